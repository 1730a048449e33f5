"""Engine selection by XOR-chain density.

CDCL refutation cost on a cone is driven by its XOR structure: refuting an
XOR block of b gates can take on the order of 2^b clauses, while exhaustive
simulation costs 2^N regardless of structure.  The density score
log2(sum over blocks of 2^|block|) / N compares the two estimates; cones
above the threshold go to the exhaustive engine, the rest to SAT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aig import Aig, Cone, Literal, structural_hash

DEFAULT_RHO = 0.15
DEFAULT_EPS_MAX_PIS = 36

SAT = "sat"
EPS = "eps"


@dataclass(frozen=True)
class XorBlock:
    gates: frozenset[int]

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class EngineChoice:
    kind: str  # SAT | EPS
    score: float


def _xor_parts(aig: Aig, index: int) -> tuple[int, int, tuple[Literal, Literal]] | None:
    """(child_p, child_q, abstract operands) when `index` roots an XOR/XNOR."""
    if not aig.is_and(index):
        return None
    top0 = Literal.from_code(aig._fanin0[index])
    top1 = Literal.from_code(aig._fanin1[index])
    if not (top0.inverted and top1.inverted):
        return None
    p, q = top0.index, top1.index
    if p == q or not (aig.is_and(p) and aig.is_and(q)):
        return None
    pn0 = Literal.from_code(aig._fanin0[p])
    pn1 = Literal.from_code(aig._fanin1[p])
    qn0 = Literal.from_code(aig._fanin0[q])
    qn1 = Literal.from_code(aig._fanin1[q])
    straight = qn0 == ~pn0 and qn1 == ~pn1
    swapped = qn0 == ~pn1 and qn1 == ~pn0
    if not (straight or swapped):
        return None
    return p, q, (pn0, pn1)


def detect_xor_gates(cone: Cone) -> set[int]:
    """XOR/XNOR roots in the cone's hashed view, purely structural.

    Overlapping matches are resolved outermost-first: candidates are visited
    in reverse topological order and each AND node is claimed by at most one
    XOR root.
    """
    roots, _ = _detect_with_operands(_hashed_view(cone))
    return roots


def _hashed_view(cone: Cone) -> Aig:
    # recognition runs on a hashed copy so shared fan-in patterns normalize
    return structural_hash(cone.aig.copy())


def _detect_with_operands(aig: Aig) -> tuple[set[int], dict[int, tuple[Literal, Literal]]]:
    claimed: set[int] = set()
    roots: set[int] = set()
    operands: dict[int, tuple[Literal, Literal]] = {}
    live = set(aig.live_and_indices())
    for index in sorted(live, reverse=True):
        if index in claimed:
            continue
        parts = _xor_parts(aig, index)
        if parts is None:
            continue
        p, q, ops = parts
        if p in claimed or q in claimed:
            continue
        roots.add(index)
        operands[index] = ops
        claimed.add(p)
        claimed.add(q)
    return roots, operands


def group_xor_blocks(cone: Cone, xor_roots: set[int]) -> list[XorBlock]:
    """Connected components of roots linked through their abstract operands."""
    aig = _hashed_view(cone)
    _, operands = _detect_with_operands(aig)
    return _group(xor_roots, {r: operands[r] for r in xor_roots if r in operands})


def _group(
    roots: set[int], operands: dict[int, tuple[Literal, Literal]]
) -> list[XorBlock]:
    parent = {r: r for r in roots}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r, (a, b) in operands.items():
        for operand in (a, b):
            if operand.index in parent:
                ra, rb = find(r), find(operand.index)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, set[int]] = {}
    for r in roots:
        groups.setdefault(find(r), set()).add(r)
    blocks = [XorBlock(frozenset(g)) for g in groups.values()]
    blocks.sort(key=lambda blk: min(blk.gates))
    return blocks


def score_xor(blocks: list[XorBlock], n_pis: int) -> float:
    """log2(sum over blocks of 2^|block|) / n_pis; zero when no blocks exist."""
    if n_pis < 1:
        raise ValueError("score needs at least one PI")
    if not blocks:
        return 0.0
    total = sum(1 << len(blk) for blk in blocks)
    return math.log2(total) / n_pis


def select_engine(
    cone: Cone,
    rho: float = DEFAULT_RHO,
    max_pis: int = DEFAULT_EPS_MAX_PIS,
) -> EngineChoice:
    """EPS when the XOR density strictly exceeds rho and the cone fits EPS.

    Cones wider than the exhaustive engine's PI ceiling fall back to SAT no
    matter the score.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must be within [0, 1]")
    aig = _hashed_view(cone)
    roots, operands = _detect_with_operands(aig)
    blocks = _group(roots, operands)
    n = max(cone.num_pis, 1)
    score = score_xor(blocks, n)
    if score > rho and cone.num_pis <= max_pis:
        return EngineChoice(EPS, score)
    return EngineChoice(SAT, score)
