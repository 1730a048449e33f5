"""And-inverter graph netlists.

The netlist model is deliberately small: node 0 is the constant-FALSE node,
nodes 1..num_pis are primary inputs, and every further node is a two-input
AND gate whose fan-in edges may carry inverters.  Node indices are assigned
in topological order and are never reused; merging marks the dropped cone
dead instead of renumbering, so candidate-pair bookkeeping stays stable
across merges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class AigError(Exception):
    """Invalid netlist structure or an operation that would corrupt one."""


class Literal(NamedTuple):
    """A reference to a node, possibly through an inverter."""

    index: int
    inverted: bool = False

    def __invert__(self) -> "Literal":
        return Literal(self.index, not self.inverted)

    @property
    def code(self) -> int:
        """AIGER-style encoding: 2*index + inverted."""
        return self.index * 2 + (1 if self.inverted else 0)

    @staticmethod
    def from_code(code: int) -> "Literal":
        return Literal(code >> 1, bool(code & 1))


FALSE = Literal(0, False)
TRUE = Literal(0, True)


class AndNode(NamedTuple):
    fanin0: Literal
    fanin1: Literal


class Aig:
    """A combinational AIG with stable node indices and eager merge rewiring."""

    def __init__(self, num_pis: int):
        if num_pis < 0:
            raise AigError("negative PI count")
        self.num_pis = num_pis
        # fan-in literal codes per node; -1 marks const/PI slots
        self._fanin0: list[int] = [-1] * (num_pis + 1)
        self._fanin1: list[int] = [-1] * (num_pis + 1)
        # repl[i] == 2*i while node i is its own representative
        self._repl: list[int] = [2 * i for i in range(num_pis + 1)]
        self._outputs: list[int] = []
        self._index_ordered = True

    # -- basic structure ----------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self._fanin0)

    @property
    def num_ands(self) -> int:
        return self.num_nodes - self.num_pis - 1

    @property
    def outputs(self) -> list[Literal]:
        return [Literal.from_code(c) for c in self._outputs]

    def pi(self, pos: int) -> Literal:
        if not 0 <= pos < self.num_pis:
            raise AigError(f"PI position {pos} out of range")
        return Literal(pos + 1)

    def is_and(self, index: int) -> bool:
        return index > self.num_pis

    def node(self, index: int) -> AndNode:
        if not self.is_and(index):
            raise AigError(f"node {index} is not an AND gate")
        return AndNode(
            Literal.from_code(self._fanin0[index]),
            Literal.from_code(self._fanin1[index]),
        )

    def and_indices(self) -> range:
        return range(self.num_pis + 1, self.num_nodes)

    def add_and(self, f0: Literal, f1: Literal) -> Literal:
        idx = self.num_nodes
        if f0.index >= idx or f1.index >= idx:
            raise AigError("fan-in must reference an existing node")
        self._fanin0.append(f0.code)
        self._fanin1.append(f1.code)
        self._repl.append(2 * idx)
        return Literal(idx)

    def add_output(self, lit: Literal) -> None:
        if lit.index >= self.num_nodes:
            raise AigError("output references a missing node")
        self._outputs.append(lit.code)

    def set_output(self, pos: int, lit: Literal) -> None:
        self._outputs[pos] = lit.code

    # -- merge bookkeeping ---------------------------------------------------

    def resolve(self, lit: Literal) -> Literal:
        """Representative literal after all merges so far."""
        code = lit.code
        while True:
            rep = self._repl[code >> 1]
            if rep == (code & ~1):
                return Literal.from_code(rep | (code & 1))
            code = rep ^ (code & 1)

    def is_merged(self, index: int) -> bool:
        return self._repl[index] != 2 * index

    def _resolve_code(self, code: int) -> int:
        while True:
            rep = self._repl[code >> 1]
            if rep == (code & ~1):
                return rep | (code & 1)
            code = rep ^ (code & 1)

    # -- liveness and ordering ------------------------------------------------

    def live_and_indices(self) -> list[int]:
        """AND nodes reachable from the outputs, ascending."""
        seen = bytearray(self.num_nodes)
        stack = [c >> 1 for c in self._outputs]
        while stack:
            i = stack.pop()
            if seen[i] or not self.is_and(i):
                seen[i] = 1
                continue
            seen[i] = 1
            stack.append(self._fanin0[i] >> 1)
            stack.append(self._fanin1[i] >> 1)
        return [i for i in self.and_indices() if seen[i]]

    def gate_count(self) -> int:
        return len(self.live_and_indices())

    def copy(self) -> "Aig":
        dup = Aig(self.num_pis)
        dup._fanin0 = list(self._fanin0)
        dup._fanin1 = list(self._fanin1)
        dup._repl = list(self._repl)
        dup._outputs = list(self._outputs)
        dup._index_ordered = self._index_ordered
        return dup


def topological_order(aig: Aig) -> list[int]:
    """Live node indices, PIs first, every node after both fan-ins."""
    live = aig.live_and_indices()
    order = list(range(1, aig.num_pis + 1))
    if aig._index_ordered:
        order.extend(live)
        return order
    # after an out-of-order merge ascending indices are not sufficient
    placed = bytearray(aig.num_nodes)
    for i in range(aig.num_pis + 1):
        placed[i] = 1
    stack: list[tuple[int, bool]] = [(i, False) for i in reversed(live)]
    while stack:
        i, expanded = stack.pop()
        if placed[i]:
            continue
        if expanded:
            placed[i] = 1
            order.append(i)
            continue
        stack.append((i, True))
        for c in (aig._fanin1[i], aig._fanin0[i]):
            d = c >> 1
            if not placed[d]:
                stack.append((d, False))
    return order


def evaluate(aig: Aig, assignment: Sequence[int]) -> list[int]:
    """Single-pattern evaluation; returns one bit per output."""
    if len(assignment) != aig.num_pis:
        raise AigError("assignment must cover every PI")
    val = bytearray(aig.num_nodes)
    for pos in range(aig.num_pis):
        val[pos + 1] = 1 if assignment[pos] else 0
    f0, f1 = aig._fanin0, aig._fanin1
    for i in topological_order(aig):
        if i <= aig.num_pis:
            continue
        a = f0[i]
        b = f1[i]
        val[i] = (val[a >> 1] ^ (a & 1)) & (val[b >> 1] ^ (b & 1))
    return [val[c >> 1] ^ (c & 1) for c in aig._outputs]


# -- hashed construction -----------------------------------------------------


class AigBuilder:
    """Builds an Aig with structural hashing and constant folding on the fly."""

    def __init__(self, num_pis: int):
        self.aig = Aig(num_pis)
        self._table: dict[tuple[int, int], int] = {}

    def pi(self, pos: int) -> Literal:
        return self.aig.pi(pos)

    def and_(self, a: Literal, b: Literal) -> Literal:
        ca, cb = a.code, b.code
        if ca > cb:
            ca, cb = cb, ca
        if ca == 0:  # FALSE & x
            return FALSE
        if ca == 1:  # TRUE & x
            return Literal.from_code(cb)
        if ca == cb:
            return Literal.from_code(ca)
        if ca == cb ^ 1:
            return FALSE
        key = (ca, cb)
        idx = self._table.get(key)
        if idx is None:
            lit = self.aig.add_and(Literal.from_code(ca), Literal.from_code(cb))
            self._table[key] = lit.index
            return lit
        return Literal(idx)

    def or_(self, a: Literal, b: Literal) -> Literal:
        return ~self.and_(~a, ~b)

    def xor_(self, a: Literal, b: Literal) -> Literal:
        # canonical 3-AND expansion; no native XOR node type
        t0 = self.and_(a, ~b)
        t1 = self.and_(~a, b)
        return self.or_(t0, t1)

    def mux(self, sel: Literal, then: Literal, els: Literal) -> Literal:
        return self.or_(self.and_(sel, then), self.and_(~sel, els))

    def or_many(self, lits: Iterable[Literal]) -> Literal:
        acc = FALSE
        for lit in lits:
            acc = self.or_(acc, lit)
        return acc

    def add_output(self, lit: Literal) -> None:
        self.aig.add_output(lit)

    def import_aig(self, src: Aig, pi_lits: Sequence[Literal]) -> list[Literal]:
        """Rebuild src over the given PI literals; returns its output literals."""
        if len(pi_lits) != src.num_pis:
            raise AigError("PI literal count mismatch on import")
        m: list[int] = [0] * src.num_nodes
        for pos in range(src.num_pis):
            m[pos + 1] = pi_lits[pos].code
        for i in topological_order(src):
            if i <= src.num_pis:
                continue
            a = src._fanin0[i]
            b = src._fanin1[i]
            lit = self.and_(
                Literal.from_code(m[a >> 1] ^ (a & 1)),
                Literal.from_code(m[b >> 1] ^ (b & 1)),
            )
            m[i] = lit.code
        return [Literal.from_code(m[c >> 1] ^ (c & 1)) for c in src._outputs]


def build_miter(a: Aig, b: Aig) -> Aig:
    """Single-output miter: shared PIs, XOR per PO pair, OR over all XORs."""
    if a.num_pis != b.num_pis:
        raise AigError(f"PI count mismatch: {a.num_pis} vs {b.num_pis}")
    if len(a._outputs) != len(b._outputs):
        raise AigError(
            f"PO count mismatch: {len(a._outputs)} vs {len(b._outputs)}"
        )
    bld = AigBuilder(a.num_pis)
    pis = [bld.pi(i) for i in range(a.num_pis)]
    outs_a = bld.import_aig(a, pis)
    outs_b = bld.import_aig(b, pis)
    bld.add_output(bld.or_many(bld.xor_(x, y) for x, y in zip(outs_a, outs_b)))
    return bld.aig


# -- cone extraction ---------------------------------------------------------


@dataclass
class Cone:
    """A self-contained single-output sub-netlist cut out of a larger Aig."""

    aig: Aig
    pi_map: list[int]  # cone PI position -> node index in the source Aig
    root: Literal

    @property
    def num_pis(self) -> int:
        return self.aig.num_pis

    def gate_count(self) -> int:
        return self.aig.gate_count()


def _and_folded(aig: Aig, a: Literal, b: Literal) -> Literal:
    """Plain AND with local constant/trivial folding, no structural sharing."""
    ca, cb = a.code, b.code
    if ca > cb:
        ca, cb = cb, ca
    if ca == 0:
        return FALSE
    if ca == 1:
        return Literal.from_code(cb)
    if ca == cb:
        return Literal.from_code(ca)
    if ca == cb ^ 1:
        return FALSE
    return aig.add_and(Literal.from_code(ca), Literal.from_code(cb))


def _copy_tfi(aig: Aig, roots: Sequence[Literal]) -> tuple[Aig, list[int], list[Literal]]:
    """Verbatim copy of the union of the roots' fan-in cones.

    Shared sub-structure is copied once per source node, but distinct source
    nodes stay distinct: the copy deliberately performs no structural hashing
    so that the extracted cone mirrors the source graph.
    """
    seen: set[int] = set()
    support: list[int] = []
    ands: list[int] = []
    stack = [r.index for r in roots]
    while stack:
        i = stack.pop()
        if i in seen:
            continue
        seen.add(i)
        if aig.is_and(i):
            ands.append(i)
            stack.append(aig._fanin0[i] >> 1)
            stack.append(aig._fanin1[i] >> 1)
        elif i > 0:
            support.append(i)
    support.sort()
    ands.sort()
    cone = Aig(len(support))
    m: dict[int, int] = {0: 0}
    for pos, orig in enumerate(support):
        m[orig] = (pos + 1) * 2
    if not aig._index_ordered:
        order = [i for i in topological_order(aig) if i in seen and aig.is_and(i)]
    else:
        order = ands
    for i in order:
        a = aig._fanin0[i]
        b = aig._fanin1[i]
        lit = _and_folded(
            cone,
            Literal.from_code(m[a >> 1] ^ (a & 1)),
            Literal.from_code(m[b >> 1] ^ (b & 1)),
        )
        m[i] = lit.code
    mapped = [Literal.from_code(m[r.index] ^ (1 if r.inverted else 0)) for r in roots]
    return cone, support, mapped


def miter_tfi_cones(aig: Aig, a: Literal, b: Literal) -> Cone:
    """Pair miter cone: root computes a XOR b over the union of both supports.

    Antivalent candidates are handled by the caller passing one literal
    inverted, which turns the root into an XNOR of the underlying nodes.
    """
    cone, support, (ra, rb) = _copy_tfi(aig, [a, b])
    t0 = _and_folded(cone, ra, ~rb)
    t1 = _and_folded(cone, ~ra, rb)
    root = ~_and_folded(cone, ~t0, ~t1)
    cone.add_output(root)
    return Cone(cone, support, root)


def extract_cone(aig: Aig, root: Literal) -> Cone:
    """Fan-in cone of a single literal, root kept as-is."""
    cone, support, (r,) = _copy_tfi(aig, [root])
    cone.add_output(r)
    return Cone(cone, support, r)


# -- rewriting passes ---------------------------------------------------------


def merge_nodes(aig: Aig, keep: Literal, drop: Literal) -> Aig:
    """Rewire every fan-out of drop's node to keep, with phase composition.

    The caller asserts that the two literals are functionally equal; phases
    are already folded into the literals.
    """
    keep = aig.resolve(keep)
    drop = aig.resolve(drop)
    if drop.index == keep.index:
        if drop.inverted != keep.inverted:
            raise AigError("cannot merge a literal with its own complement")
        return aig
    if not aig.is_and(drop.index):
        raise AigError("only AND nodes can be dropped by a merge")
    if keep.index > drop.index:
        # cycle guard: merging a node into its own transitive fan-out
        seen = {keep.index}
        stack = [keep.index]
        while stack:
            i = stack.pop()
            if i == drop.index:
                raise AigError("merge would create a cycle through the kept node")
            if not aig.is_and(i):
                continue
            for c in (aig._fanin0[i], aig._fanin1[i]):
                j = c >> 1
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        aig._index_ordered = False
    rep = keep.code ^ (1 if drop.inverted else 0)
    aig._repl[drop.index] = rep
    d = drop.index
    f0, f1 = aig._fanin0, aig._fanin1
    for i in range(d + 1, aig.num_nodes):
        if f0[i] >> 1 == d:
            f0[i] = rep ^ (f0[i] & 1)
        if f1[i] >> 1 == d:
            f1[i] = rep ^ (f1[i] & 1)
    aig._outputs = [rep ^ (c & 1) if c >> 1 == d else c for c in aig._outputs]
    return aig


def structural_hash(aig: Aig) -> Aig:
    """Share AND nodes with identical commutatively-sorted fan-in pairs.

    Runs in place; constant and trivial ANDs fold onto their surviving
    literal.  Dropped nodes become dead, indices are not reused.
    """
    table: dict[tuple[int, int], int] = {}
    f0, f1 = aig._fanin0, aig._fanin1
    for i in aig.and_indices():
        if aig.is_merged(i):
            continue
        a = aig._resolve_code(f0[i])
        b = aig._resolve_code(f1[i])
        if a > b:
            a, b = b, a
        f0[i], f1[i] = a, b
        rep = -1
        if a == 0 or a == b ^ 1:
            rep = 0
        elif a == 1 or a == b:
            rep = b
        else:
            dup = table.get((a, b))
            if dup is None:
                table[(a, b)] = i
            else:
                rep = 2 * dup
        if rep >= 0:
            aig._repl[i] = rep
    aig._outputs = [aig._resolve_code(c) for c in aig._outputs]
    return aig


def compact(aig: Aig) -> Aig:
    """Live nodes only, renumbered topologically; used by the writer."""
    out = Aig(aig.num_pis)
    m: list[int] = [0] * aig.num_nodes
    for pos in range(aig.num_pis):
        m[pos + 1] = (pos + 1) * 2
    for i in topological_order(aig):
        if i <= aig.num_pis:
            continue
        a = aig._fanin0[i]
        b = aig._fanin1[i]
        lit = out.add_and(
            Literal.from_code(m[a >> 1] ^ (a & 1)),
            Literal.from_code(m[b >> 1] ^ (b & 1)),
        )
        m[i] = lit.code
    for c in aig._outputs:
        out.add_output(Literal.from_code(m[c >> 1] ^ (c & 1)))
    return out
