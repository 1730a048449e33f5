"""Identical structure detection.

Once a pair has been proven and merged, later candidate pairs whose cones
are structurally the same gate-for-gate can be merged without another
engine call.  Matching walks both cones in lockstep over a worklist,
succeeding at identical literals or at pairs already proven equivalent, and
failing on any fan-in polarity mismatch.
"""

from __future__ import annotations

from .aig import Aig, Literal
from .simulate import CandidatePair


def _normalize(a: Literal, b: Literal) -> tuple[int, int, bool]:
    """Canonical key for the unordered, complement-invariant literal pair."""
    phase = a.inverted != b.inverted
    if a.index <= b.index:
        return a.index, b.index, phase
    return b.index, a.index, phase


class EquivDb:
    """Proven literal equivalences plus a memo of structural-match results."""

    def __init__(self) -> None:
        self.proven: dict[tuple[int, int, bool], bool] = {}
        self.pairs: list[tuple[Literal, Literal]] = []
        self.memo: dict[tuple[int, int, bool], bool] = {}

    def add_proven(self, a: Literal, b: Literal) -> None:
        key = _normalize(a, b)
        if key not in self.proven:
            self.proven[key] = True
            self.pairs.append((a, b))
            # a new fact can only turn failed matches into successes
            self.memo = {k: v for k, v in self.memo.items() if v}

    def knows(self, a: Literal, b: Literal) -> bool:
        return _normalize(a, b) in self.proven


def structurally_identical(aig: Aig, x: Literal, y: Literal, db: EquivDb) -> bool:
    """Greedy lockstep match of two cones.

    Each popped pair must be the identical literal, a db-proven pair, or two
    AND nodes with position-wise matching fan-in polarities whose fan-ins
    are pushed for comparison.  Any mismatch fails the whole match.
    """
    top = _normalize(x, y)
    cached = db.memo.get(top)
    if cached is not None:
        return cached
    queue: list[tuple[Literal, Literal]] = [(x, y)]
    enqueued = {top}
    ok = True
    while queue:
        a, b = queue.pop()
        if a == b:
            continue
        if db.knows(a, b):
            continue
        if a.inverted != b.inverted:
            ok = False
            break
        if not (aig.is_and(a.index) and aig.is_and(b.index)):
            ok = False
            break
        na0 = Literal.from_code(aig._fanin0[a.index])
        na1 = Literal.from_code(aig._fanin1[a.index])
        nb0 = Literal.from_code(aig._fanin0[b.index])
        nb1 = Literal.from_code(aig._fanin1[b.index])
        if na0.inverted != nb0.inverted or na1.inverted != nb1.inverted:
            ok = False
            break
        for pair in ((na0, nb0), (na1, nb1)):
            key = _normalize(*pair)
            if key not in enqueued:
                enqueued.add(key)
                queue.append(pair)
    db.memo[top] = ok
    return ok


def try_isd_merge(pair: CandidatePair, aig: Aig, db: EquivDb) -> bool:
    """True when the pair is equivalent by structure alone.

    The candidate matches either directly (its two cones are identical down
    to shared or proven points) or against some previously proven pair, in
    straight or crossed orientation.
    """
    a = aig.resolve(pair.a)
    b = aig.resolve(Literal(pair.b.index, pair.b.inverted != pair.antivalent))
    if structurally_identical(aig, a, b, db):
        return True
    for x, y in db.pairs:
        x = aig.resolve(x)
        y = aig.resolve(y)
        if structurally_identical(aig, a, x, db) and structurally_identical(aig, b, y, db):
            return True
        if structurally_identical(aig, a, y, db) and structurally_identical(aig, b, x, db):
            return True
    return False
