"""Benchmark generators and the exhaustive ground-truth oracle.

The generators produce small datapath netlists (adders, multipliers, chained
replicas, function-preserving rewrites, single-fault corruptions) that stand
in for industrial instances at desk scale.  ``oracle_check`` enumerates every
input pattern with packed numpy words; it deliberately shares no propagation
code with the prover's engines so it can act as an independent referee.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aig import (
    FALSE,
    Aig,
    AigBuilder,
    AigError,
    Literal,
    build_miter,
    compact,
    merge_nodes,
    topological_order,
)
from .verdict import Verdict

FAMILIES = (
    "adder_ripple",
    "adder_cla",
    "mult_array",
    "mult_columnwise",
    "replicated",
    "rewrite",
    "corrupt",
)

ORACLE_MAX_PIS = 24


class GenError(Exception):
    """Invalid generator spec or an infeasible generation-time check."""


@dataclass
class GenSpec:
    family: str
    width: int = 0
    seed: int = 0
    steps: int = 0
    replicas: int = 0
    block: "GenSpec | None" = None
    base: "GenSpec | None" = None


# -- arithmetic building blocks ----------------------------------------------


def _half_adder(bld: AigBuilder, a: Literal, b: Literal) -> tuple[Literal, Literal]:
    return bld.xor_(a, b), bld.and_(a, b)


def _full_adder(
    bld: AigBuilder, a: Literal, b: Literal, cin: Literal
) -> tuple[Literal, Literal]:
    p = bld.xor_(a, b)
    s = bld.xor_(p, cin)
    cout = bld.or_(bld.and_(a, b), bld.and_(p, cin))
    return s, cout


def adder_ripple(width: int) -> Aig:
    """Ripple-carry adder: a[width] + b[width] -> sum[width], carry."""
    if width < 1:
        raise GenError("width must be at least 1")
    bld = AigBuilder(2 * width)
    a = [bld.pi(i) for i in range(width)]
    b = [bld.pi(width + i) for i in range(width)]
    carry = FALSE
    sums = []
    for i in range(width):
        if i == 0:
            s, carry = _half_adder(bld, a[i], b[i])
        else:
            s, carry = _full_adder(bld, a[i], b[i], carry)
        sums.append(s)
    for s in sums:
        bld.add_output(s)
    bld.add_output(carry)
    return bld.aig


def adder_cla(width: int) -> Aig:
    """Carry-lookahead adder with fully expanded carry terms."""
    if width < 1:
        raise GenError("width must be at least 1")
    bld = AigBuilder(2 * width)
    a = [bld.pi(i) for i in range(width)]
    b = [bld.pi(width + i) for i in range(width)]
    g = [bld.and_(a[i], b[i]) for i in range(width)]
    p = [bld.xor_(a[i], b[i]) for i in range(width)]
    # c[i+1] = g[i] + p[i]g[i-1] + p[i]p[i-1]g[i-2] + ...
    carries = [FALSE]
    for i in range(width):
        terms = []
        for j in range(i, -1, -1):
            term = g[j]
            for k in range(j + 1, i + 1):
                term = bld.and_(term, p[k])
            terms.append(term)
        carries.append(bld.or_many(terms))
    for i in range(width):
        bld.add_output(bld.xor_(p[i], carries[i]))
    bld.add_output(carries[width])
    return bld.aig


def mult_array(width: int) -> Aig:
    """Array multiplier: partial-product rows accumulated by ripple adders."""
    if width < 1:
        raise GenError("width must be at least 1")
    bld = AigBuilder(2 * width)
    a = [bld.pi(i) for i in range(width)]
    b = [bld.pi(width + i) for i in range(width)]
    acc = [bld.and_(a[0], b[j]) for j in range(width)]
    out: list[Literal] = []
    for i in range(1, width):
        out.append(acc[0])  # bit i-1 is final once row i starts at bit i
        upper = acc[1:]
        row = [bld.and_(a[i], b[j]) for j in range(width)]
        carry = FALSE
        acc = []
        for j in range(width):
            lhs = upper[j] if j < len(upper) else FALSE
            s, carry = _full_adder(bld, lhs, row[j], carry)
            acc.append(s)
        acc.append(carry)
    out.extend(acc)
    for lit in out[: 2 * width]:
        bld.add_output(lit)
    while len(bld.aig.outputs) < 2 * width:
        bld.add_output(FALSE)
    return bld.aig


def mult_columnwise(width: int) -> Aig:
    """Column-compression multiplier: per-column adder reduction, then ripple."""
    if width < 1:
        raise GenError("width must be at least 1")
    bld = AigBuilder(2 * width)
    a = [bld.pi(i) for i in range(width)]
    b = [bld.pi(width + i) for i in range(width)]
    # two spare columns absorb structural carries that are provably zero
    cols: list[list[Literal]] = [[] for _ in range(2 * width + 2)]
    for i in range(width):
        for j in range(width):
            cols[i + j].append(bld.and_(a[i], b[j]))
    # compress every column to at most two bits with full adders
    for c in range(2 * width):
        while len(cols[c]) > 2:
            x, y, z = cols[c].pop(0), cols[c].pop(0), cols[c].pop(0)
            s, carry = _full_adder(bld, x, y, z)
            cols[c].append(s)
            cols[c + 1].append(carry)
    carry = FALSE
    for c in range(2 * width):
        bits = list(cols[c])
        if not bits:
            s, carry = carry, FALSE
        elif len(bits) == 1:
            s, carry = _half_adder(bld, bits[0], carry)
        else:
            s, carry = _full_adder(bld, bits[0], bits[1], carry)
        bld.add_output(s)
    return bld.aig


def chain_blocks(stages: list[Aig]) -> Aig:
    """Feed each stage's outputs (cyclically padded) into the next stage's PIs.

    All stages must share one PI count; the chain exposes the first stage's
    PIs and the last stage's outputs.
    """
    if not stages:
        raise GenError("chain needs at least one stage")
    num_pis = stages[0].num_pis
    if any(s.num_pis != num_pis for s in stages):
        raise GenError("all chained blocks must share one PI count")
    bld = AigBuilder(num_pis)
    lits = [bld.pi(i) for i in range(num_pis)]
    outs: list[Literal] = []
    for stage in stages:
        outs = bld.import_aig(stage, lits)
        if not outs:
            raise GenError("chained block has no outputs")
        lits = [outs[k % len(outs)] for k in range(num_pis)]
    for lit in outs:
        bld.add_output(lit)
    return bld.aig


def replicated(block: Aig, replicas: int) -> Aig:
    """Chain of identical block instances."""
    if replicas < 1:
        raise GenError("replica count must be at least 1")
    return chain_blocks([block] * replicas)


# -- function-preserving rewriting ---------------------------------------------


def _conjunction_leaves(aig: Aig, lit: Literal) -> list[Literal]:
    """Leaves of the maximal AND tree rooted at a non-inverted literal."""
    leaves: list[Literal] = []
    stack = [lit]
    while stack:
        cur = stack.pop()
        if not cur.inverted and aig.is_and(cur.index):
            node = aig.node(cur.index)
            stack.append(node.fanin1)
            stack.append(node.fanin0)
        else:
            leaves.append(cur)
    return leaves


def _xor_operands(aig: Aig, index: int) -> tuple[Literal, Literal] | None:
    """(x, y) such that node `index` computes x XOR y, else None."""
    if not aig.is_and(index):
        return None
    top = aig.node(index)
    if not (top.fanin0.inverted and top.fanin1.inverted):
        return None
    p, q = top.fanin0.index, top.fanin1.index
    if not (aig.is_and(p) and aig.is_and(q)) or p == q:
        return None
    pn, qn = aig.node(p), aig.node(q)
    straight = qn.fanin0 == ~pn.fanin0 and qn.fanin1 == ~pn.fanin1
    swapped = qn.fanin0 == ~pn.fanin1 and qn.fanin1 == ~pn.fanin0
    if not (straight or swapped):
        return None
    # AND(!(a b), !(!a !b)) computes a^b for arbitrary literal phases;
    # the XNOR spelling lands here too, with the inversion folded into b
    return pn.fanin0, pn.fanin1


def _xor_leaves(aig: Aig, lit: Literal) -> list[Literal]:
    """Operand chain of nested XOR structures, output phase folded in."""
    ops = _xor_operands(aig, lit.index)
    if ops is None:
        return [lit]
    x, y = ops
    if lit.inverted:
        y = ~y
    leaves = []
    for operand in (x, y):
        sub = _xor_leaves(aig, operand)
        if len(sub) > 1:
            leaves.extend(sub)
        else:
            leaves.append(operand)
    return leaves


def _build_and_tree(aig: Aig, leaves: list[Literal], cut: int) -> Literal:
    from .aig import _and_folded

    def build(part: list[Literal]) -> Literal:
        if len(part) == 1:
            return part[0]
        mid = cut % (len(part) - 1) + 1 if len(part) > 2 else 1
        return _and_folded(aig, build(part[:mid]), build(part[mid:]))

    return build(leaves)


def _build_xor_tree(aig: Aig, leaves: list[Literal], cut: int) -> Literal:
    from .aig import _and_folded

    def xor2(a: Literal, b: Literal) -> Literal:
        t0 = _and_folded(aig, a, ~b)
        t1 = _and_folded(aig, ~a, b)
        return ~_and_folded(aig, ~t0, ~t1)

    def build(part: list[Literal]) -> Literal:
        if len(part) == 1:
            return part[0]
        mid = cut % (len(part) - 1) + 1 if len(part) > 2 else 1
        return xor2(build(part[:mid]), build(part[mid:]))

    return build(leaves)


def rewrite_aig(base: Aig, steps: int, seed: int) -> Aig:
    """Apply random local function-preserving transforms.

    Each step re-associates one AND tree or one XOR chain and rewires the
    original root onto the rebuilt one.  The result is compacted and, when
    the PI count permits, verified equivalent against the base.
    """
    if steps < 0:
        raise GenError("rewrite steps must be non-negative")
    rng = np.random.default_rng(seed)
    aig = base.copy()
    applied = 0
    attempts = 0
    while applied < steps and attempts < steps * 20 + 20:
        attempts += 1
        live = aig.live_and_indices()
        if not live:
            break
        idx = int(live[int(rng.integers(len(live)))])
        root = Literal(idx)
        cut = int(rng.integers(1 << 30))
        xleaves = _xor_leaves(aig, root)
        if len(xleaves) > 2:
            new = _build_xor_tree(aig, xleaves, cut)
        else:
            aleaves = _conjunction_leaves(aig, root)
            if len(aleaves) < 3:
                continue
            new = _build_and_tree(aig, aleaves, cut)
        if aig.resolve(new) == aig.resolve(root):
            continue
        merge_nodes(aig, new, root)
        applied += 1
    result = compact(aig)
    if base.num_pis <= ORACLE_MAX_PIS:
        check = oracle_check(build_miter(base, result))
        if not check.is_equivalent:
            raise AssertionError("rewrite changed circuit function")
    return result


def corrupt_aig(base: Aig, seed: int) -> Aig:
    """Flip one gate fan-in polarity; re-rolled until provably inequivalent."""
    if base.num_pis > ORACLE_MAX_PIS:
        raise GenError(
            f"cannot verify a corruption of a {base.num_pis}-PI circuit: "
            f"the exhaustive oracle is limited to {ORACLE_MAX_PIS} PIs"
        )
    rng = np.random.default_rng(seed)
    live = base.live_and_indices()
    if not live:
        raise GenError("circuit has no gates to corrupt")
    for _ in range(64):
        broken = base.copy()
        idx = int(live[int(rng.integers(len(live)))])
        side = int(rng.integers(2))
        fanins = broken._fanin0 if side == 0 else broken._fanin1
        fanins[idx] ^= 1
        if not oracle_check(build_miter(base, broken)).is_equivalent:
            return broken
    raise GenError("could not find an inequivalence-producing corruption")


def generate(spec: GenSpec) -> Aig:
    """Deterministic netlist for a generator spec."""
    if spec.family == "adder_ripple":
        return adder_ripple(spec.width)
    if spec.family == "adder_cla":
        return adder_cla(spec.width)
    if spec.family == "mult_array":
        return mult_array(spec.width)
    if spec.family == "mult_columnwise":
        return mult_columnwise(spec.width)
    if spec.family == "replicated":
        if spec.block is None:
            raise GenError("replicated spec needs a block")
        return replicated(generate(spec.block), spec.replicas)
    if spec.family == "rewrite":
        if spec.base is None:
            raise GenError("rewrite spec needs a base")
        return rewrite_aig(generate(spec.base), spec.steps, spec.seed)
    if spec.family == "corrupt":
        if spec.base is None:
            raise GenError("corrupt spec needs a base")
        return corrupt_aig(generate(spec.base), spec.seed)
    raise GenError(f"unknown family {spec.family!r}")


# -- exhaustive oracle ---------------------------------------------------------


def oracle_check(miter: Aig, max_pis: int = ORACLE_MAX_PIS) -> Verdict:
    """Brute-force referee: enumerate all 2^N patterns in packed words.

    Returns the first counterexample in ascending pattern order.  A miter
    with several outputs counts as failing if any output fires.
    """
    n = miter.num_pis
    if n > max_pis:
        raise GenError(f"oracle limited to {max_pis} PIs, miter has {n}")
    order = [i for i in topological_order(miter) if miter.is_and(i)]
    f0, f1 = miter._fanin0, miter._fanin1
    chunk_bits = min(n, 18)
    chunk = 1 << chunk_bits
    nbytes = max(chunk // 8, 1)
    valid = np.arange(nbytes * 8, dtype=np.uint64) < chunk
    pad_mask = np.packbits(valid.astype(np.uint8), bitorder="little")
    for base in range(0, 1 << n, chunk):
        idx = np.arange(base, base + chunk, dtype=np.uint64)
        val: list[np.ndarray | None] = [None] * miter.num_nodes
        val[0] = np.zeros(nbytes, dtype=np.uint8)
        for pos in range(n):
            bits = ((idx >> np.uint64(pos)) & np.uint64(1)).astype(np.uint8)
            val[pos + 1] = np.packbits(bits, bitorder="little")
        for i in order:
            a, b = f0[i], f1[i]
            va = val[a >> 1]
            vb = val[b >> 1]
            if a & 1:
                va = va ^ 0xFF
            if b & 1:
                vb = vb ^ 0xFF
            val[i] = va & vb
        acc = np.zeros(nbytes, dtype=np.uint8)
        for lit in miter.outputs:
            po = val[lit.index]
            if po is None:
                raise AigError("output references a dead node")
            if lit.inverted:
                po = po ^ 0xFF
            acc |= po
        acc &= pad_mask
        hot = np.flatnonzero(acc)
        if hot.size:
            byte = int(hot[0])
            bit = (int(acc[byte]) & -int(acc[byte])).bit_length() - 1
            pattern = base + byte * 8 + bit
            assignment = tuple((pattern >> j) & 1 for j in range(n))
            return Verdict.counterexample(assignment)
    return Verdict.equivalent()
