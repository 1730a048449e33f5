"""Random bit-parallel logic simulation.

Signatures are arbitrary-width integers, one bit per simulated pattern, so a
whole batch of rounds propagates through each gate as a single bitwise
operation.  Equal (or complementary) signatures group nodes into candidate
equivalence classes; a set bit on the miter output is an immediate
counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .aig import Aig, Literal, evaluate, topological_order

W = 64  # simulation word width: one round is one W-bit block of patterns


@dataclass
class SimVector:
    """A block of pattern bits; trailing pad bits above length_bits are zero."""

    length_bits: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length_bits < 0 or self.bits < 0 or self.bits >> self.length_bits:
            raise ValueError("pad bits above length_bits must be zero")

    @property
    def words(self) -> tuple[int, ...]:
        count = (self.length_bits + W - 1) // W
        return tuple((self.bits >> (W * k)) & ((1 << W) - 1) for k in range(count))

    @staticmethod
    def from_words(words: Sequence[int], length_bits: int) -> "SimVector":
        bits = 0
        for k, word in enumerate(words):
            bits |= word << (W * k)
        return SimVector(length_bits, bits)


class CandidatePair(NamedTuple):
    a: Literal
    b: Literal
    antivalent: bool


def _pi_stream(seed: int, pi_index: int) -> np.random.Generator:
    # one splittable counter-based stream per (seed, pi); round r is word r
    return np.random.Generator(np.random.Philox(key=[seed, pi_index]))


class Signatures:
    """Per-node accumulated simulation values for one netlist."""

    def __init__(self, aig: Aig, rounds: int, seed: int):
        if rounds < 1:
            raise ValueError("at least one simulation round is required")
        self.aig = aig
        self.seed = seed
        self.rounds = rounds
        self.width_bits = rounds * W
        self.mask = (1 << self.width_bits) - 1
        self.sigs: list[int | None] = [None] * aig.num_nodes
        self.sigs[0] = 0
        self._flip_rng = np.random.Generator(np.random.Philox(key=[seed, 1 << 48]))
        for pos in range(aig.num_pis):
            words = _pi_stream(seed, pos).integers(0, 1 << W, size=rounds, dtype=np.uint64)
            self.sigs[pos + 1] = int.from_bytes(words.tobytes(), "little")
        self._propagate_ands(full=True)

    def _propagate_ands(self, full: bool, lo_bit: int = 0) -> None:
        aig = self.aig
        f0, f1 = aig._fanin0, aig._fanin1
        sigs = self.sigs
        mask = self.mask if full else (self.mask >> lo_bit)
        for i in topological_order(aig):
            if i <= aig.num_pis:
                continue
            a, b = f0[i], f1[i]
            va = sigs[a >> 1] if full else sigs[a >> 1] >> lo_bit
            vb = sigs[b >> 1] if full else sigs[b >> 1] >> lo_bit
            if a & 1:
                va ^= mask
            if b & 1:
                vb ^= mask
            value = va & vb
            sigs[i] = value if full else (sigs[i] & ((1 << lo_bit) - 1)) | (value << lo_bit)

    def signature(self, lit: Literal) -> int:
        sig = self.sigs[lit.index]
        if sig is None:
            raise ValueError(f"node {lit.index} carries no signature")
        return sig ^ self.mask if lit.inverted else sig

    def append_word(self, pi_words: Sequence[int]) -> None:
        """Extend every signature by one W-bit block of PI patterns."""
        lo = self.width_bits
        self.rounds += 1
        self.width_bits += W
        self.mask = (1 << self.width_bits) - 1
        aig = self.aig
        for pos in range(aig.num_pis):
            sig = self.sigs[pos + 1]
            assert sig is not None
            self.sigs[pos + 1] = sig | (pi_words[pos] << lo)
        self._propagate_ands(full=False, lo_bit=lo)


def simulate_random(aig: Aig, rounds: int, seed: int) -> Signatures:
    """Propagate rounds*W pseudo-random patterns; deterministic given seed."""
    return Signatures(aig, rounds, seed)


def refine_with_pattern(signatures: Signatures, pattern: Sequence[int]) -> Signatures:
    """Append one word: the given pattern plus W-1 single-bit-flip neighbors."""
    aig = signatures.aig
    if len(pattern) != aig.num_pis:
        raise ValueError("pattern must assign every PI")
    if aig.num_pis:
        flips = signatures._flip_rng.integers(0, aig.num_pis, size=W - 1, dtype=np.int64)
    else:
        flips = np.zeros(W - 1, dtype=np.int64)
    words = []
    for pos in range(aig.num_pis):
        base = -1 if pattern[pos] else 0  # all W copies of the pattern bit
        word = base & ((1 << W) - 1)
        for t in range(1, W):
            if int(flips[t - 1]) == pos:
                word ^= 1 << t
        words.append(word)
    signatures.append_word(words)
    return signatures


def collect_candidate_pairs(signatures: Signatures, aig: Aig) -> list[CandidatePair]:
    """Pairs (class representative, member), ordered by the member's position.

    Nodes are keyed by min(sig, ~sig), so complementary nodes share one class
    and carry the antivalent flag.  Pairs already connected by prior merges
    are left out.
    """
    mask = signatures.mask
    classes: dict[int, list[int]] = {}
    members = [0] + [i for i in topological_order(aig) if signatures.sigs[i] is not None]
    for i in members:
        sig = signatures.sigs[i]
        assert sig is not None
        key = min(sig, sig ^ mask)
        classes.setdefault(key, []).append(i)
    pairs: list[CandidatePair] = []
    for group in classes.values():
        if len(group) < 2:
            continue
        rep = group[0]
        rep_sig = signatures.sigs[rep]
        rep_res = aig.resolve(Literal(rep))
        for member in group[1:]:
            mem_res = aig.resolve(Literal(member))
            if mem_res.index == rep_res.index:
                continue
            anti = signatures.sigs[member] != rep_sig
            pairs.append(CandidatePair(Literal(rep), Literal(member), anti))
    pairs.sort(key=lambda p: p.b.index)
    return pairs


def check_output_counterexample(
    signatures: Signatures, miter: Aig
) -> tuple[int, ...] | None:
    """PI assignment for the first simulated pattern that fires an output."""
    for lit in miter.outputs:
        sig = signatures.signature(lit)
        if sig == 0:
            continue
        bit = (sig & -sig).bit_length() - 1
        assignment = tuple(
            (signatures.sigs[pos + 1] >> bit) & 1 for pos in range(miter.num_pis)  # type: ignore[operator]
        )
        assert evaluate(miter, assignment)[_output_pos(miter, lit)] == 1
        return assignment
    return None


def _output_pos(miter: Aig, lit: Literal) -> int:
    for pos, out in enumerate(miter.outputs):
        if out == lit:
            return pos
    raise ValueError("literal is not an output")
