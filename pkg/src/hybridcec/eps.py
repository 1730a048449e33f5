"""Exact simulation engine.

Verifies a cone by exhaustively enumerating its input space: each bit of a
wide value word is one input pattern, so a block of 2^l patterns moves
through a gate as a single bitwise operation.  Cones with more inputs than
the block width are split into 2^(N-l) rounds that together cover every
pattern exactly once, which keeps the memory footprint at live_nodes * 2^l
bits no matter how many inputs the cone has.  A rational-arithmetic mode
computes the exact output probability under reciprocal-theta input
probabilities and serves as an independent cross-check at small sizes.
"""

from __future__ import annotations

import multiprocessing as mp
import time
from dataclasses import dataclass
from fractions import Fraction

from .aig import Cone, evaluate, topological_order
from .simulate import SimVector
from .verdict import Verdict

RATIONAL_MAX_PIS = 8


class EpsError(Exception):
    """Invalid engine configuration or an out-of-contract request."""


@dataclass
class EpsConfig:
    bits_limit: int = 20  # l bound: block width is 2^l bits
    max_pis: int = 36  # hard ceiling; larger jobs are refused immediately
    workers: int = 1  # power of two
    memory_cap_bytes: int = 256 << 20
    max_seconds: float | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.bits_limit <= 30:
            raise EpsError("bits_limit must be in [1, 30]")
        if self.workers < 1 or self.workers & (self.workers - 1):
            raise EpsError("workers must be a power of two")


@dataclass
class ThetaSequence:
    values: list[int]


def theta_sequence(n: int) -> ThetaSequence:
    """theta_1 = 3, theta_{i+1} = (theta_i - 1)^2 + 1, exact big integers."""
    if n < 1:
        raise EpsError("sequence length must be at least 1")
    values = [3]
    for _ in range(n - 1):
        values.append((values[-1] - 1) ** 2 + 1)
    return ThetaSequence(values)


def output_probability(cone: Cone) -> Fraction:
    """Exact root probability with PI j carrying probability 1/theta_{j+1}."""
    thetas = theta_sequence(max(cone.num_pis, 1)).values
    aig = cone.aig
    prob: list[Fraction | None] = [None] * aig.num_nodes
    prob[0] = Fraction(0)
    for pos in range(aig.num_pis):
        prob[pos + 1] = Fraction(1, thetas[pos])

    def of(code: int) -> Fraction:
        p = prob[code >> 1]
        assert p is not None
        return 1 - p if code & 1 else p

    for i in topological_order(aig):
        if i <= aig.num_pis:
            continue
        prob[i] = of(aig._fanin0[i]) * of(aig._fanin1[i])
    return of(cone.root.code)


def eps_check_rational(cone: Cone) -> Verdict:
    """Reference mode: equivalent iff the exact root probability is zero."""
    if cone.num_pis > RATIONAL_MAX_PIS:
        raise EpsError(
            f"rational mode is limited to {RATIONAL_MAX_PIS} PIs, cone has {cone.num_pis}"
        )
    if output_probability(cone) == 0:
        return Verdict.equivalent()
    for pattern in range(1 << cone.num_pis):
        assignment = tuple((pattern >> j) & 1 for j in range(cone.num_pis))
        if evaluate(cone.aig, assignment)[0]:
            return Verdict.counterexample(assignment)
    raise AssertionError("nonzero probability but no counterexample found")


def _periodic_mask(j: int, l: int) -> int:
    """2^l-bit pattern whose bit t equals bit j of t."""
    value = ((1 << (1 << j)) - 1) << (1 << j)  # one 2^(j+1)-bit period
    width = 1 << (j + 1)
    target = 1 << l
    while width < target:  # double up to the block width
        value |= value << width
        width <<= 1
    return value


def construct_initial_value(pi_index: int, round_index: int, l: int) -> SimVector:
    """Block value of one PI in one round of the exhaustive enumeration.

    PIs below the block width l cycle within the block; the remaining PIs are
    held constant per round, at bit (pi_index - l) of the round index, so the
    union over all rounds enumerates every input pattern exactly once.
    """
    if pi_index < 0 or round_index < 0 or l < 1:
        raise EpsError("pi_index and round_index must be non-negative, l positive")
    width = 1 << l
    if pi_index < l:
        return SimVector(width, _periodic_mask(pi_index, l))
    if (round_index >> (pi_index - l)) & 1:
        return SimVector(width, (1 << width) - 1)
    return SimVector(width, 0)


def _run_rounds(
    cone: Cone,
    l: int,
    rounds: range,
    deadline: float | None,
    cancel=None,
) -> Verdict:
    """Exhaustive block simulation over the given round indices."""
    aig = cone.aig
    n = cone.num_pis
    width = 1 << l
    full = (1 << width) - 1
    masks = [_periodic_mask(j, l) for j in range(min(l, n))]
    order = topological_order(aig)
    f0, f1 = aig._fanin0, aig._fanin1
    vals = [0] * aig.num_nodes
    root = cone.root.code
    done = 0
    for i in rounds:
        if cancel is not None and cancel.is_set():
            return Verdict.resource_out(f"cancelled after {done} rounds")
        if deadline is not None and time.monotonic() > deadline:
            return Verdict.resource_out(f"time budget exhausted after {done} rounds")
        for j in range(n):
            if j < l:
                vals[j + 1] = masks[j]
            else:
                vals[j + 1] = full if (i >> (j - l)) & 1 else 0
        for idx in order:
            if idx <= n:
                continue
            a, b = f0[idx], f1[idx]
            va = vals[a >> 1]
            vb = vals[b >> 1]
            if a & 1:
                va ^= full
            if b & 1:
                vb ^= full
            vals[idx] = va & vb
        out = vals[root >> 1]
        if root & 1:
            out ^= full
        if out:
            t = (out & -out).bit_length() - 1
            assignment = tuple(
                (t >> j) & 1 if j < l else (i >> (j - l)) & 1 for j in range(n)
            )
            return Verdict.counterexample(assignment)
        done += 1
    return Verdict.equivalent()


def _memory_estimate(cone: Cone, l: int) -> int:
    live = cone.aig.num_nodes  # every buffered node holds one 2^l-bit block
    return live * (1 << l) // 8


def eps_check(
    cone: Cone,
    cfg: EpsConfig,
    *,
    deadline: float | None = None,
    cancel=None,
) -> Verdict:
    """Sequential exhaustive check of a single-rooted cone."""
    n = cone.num_pis
    if n > cfg.max_pis:
        return Verdict.resource_out(f"cone has {n} PIs, over the {cfg.max_pis}-PI limit")
    if n == 0:
        if evaluate(cone.aig, ())[0]:
            return Verdict.counterexample(())
        return Verdict.equivalent()
    l = min(n, cfg.bits_limit)
    if _memory_estimate(cone, l) > cfg.memory_cap_bytes:
        return Verdict.resource_out(
            f"predicted {_memory_estimate(cone, l)} value bytes exceed the cap"
        )
    if deadline is None and cfg.max_seconds is not None:
        deadline = time.monotonic() + cfg.max_seconds
    return _run_rounds(cone, l, range(1 << (n - l)), deadline, cancel)


def _parallel_worker(cone, l, rounds, deadline, cancel, queue, worker_id):
    try:
        verdict = _run_rounds(cone, l, rounds, deadline, cancel)
    except Exception as exc:  # surfaced by the collector
        verdict = Verdict.resource_out(f"worker failed: {exc}")
    queue.put((worker_id, verdict))


def eps_check_parallel(cone: Cone, cfg: EpsConfig) -> Verdict:
    """Split the round space by its top bits across 2^k worker processes.

    Equivalent to fixing the k highest PIs per worker: the partition is
    lossless and perfectly balanced.  The verdict kind never depends on the
    worker count; only which counterexample is found may differ.
    """
    n = cone.num_pis
    if n > cfg.max_pis:
        return Verdict.resource_out(f"cone has {n} PIs, over the {cfg.max_pis}-PI limit")
    k = cfg.workers.bit_length() - 1
    k = min(k, n - 1)
    if cfg.workers == 1 or k <= 0:
        return eps_check(cone, cfg)
    l = max(min(cfg.bits_limit, n - k), 1)
    if _memory_estimate(cone, l) > cfg.memory_cap_bytes:
        return Verdict.resource_out(
            f"predicted {_memory_estimate(cone, l)} value bytes per worker exceed the cap"
        )
    deadline = None
    if cfg.max_seconds is not None:
        deadline = time.monotonic() + cfg.max_seconds
    total_rounds = 1 << (n - l)
    share = total_rounds >> k
    ctx = mp.get_context("fork")
    cancel = ctx.Event()
    queue = ctx.SimpleQueue()
    procs = []
    for w in range(1 << k):
        rounds = range(w * share, (w + 1) * share)
        p = ctx.Process(
            target=_parallel_worker,
            args=(cone, l, rounds, deadline, cancel, queue, w),
        )
        p.start()
        procs.append(p)
    counterexample: Verdict | None = None
    resource_out: Verdict | None = None
    for _ in procs:
        _, verdict = queue.get()
        if verdict.is_counterexample and counterexample is None:
            counterexample = verdict
            cancel.set()  # first counterexample wins; siblings stop early
        elif verdict.is_resource_out and resource_out is None:
            resource_out = verdict
    for p in procs:
        p.join()
    if counterexample is not None:
        return counterexample
    if resource_out is not None:
        return resource_out
    return Verdict.equivalent()
