"""The sweeping orchestrator.

One pass over the miter: hash, simulate, collect candidate pairs, then for
each pair in topological order try a structural (ISD) merge, otherwise
dispatch the pair cone to SAT or the exhaustive engine per the XOR-density
heuristic, merging on success and replaying counterexample patterns into
the simulation.  A final proving stage decides the reduced miter output.
Pairs that exhaust their budgets are skipped, never fatal; the run is
Unknown only when the final proof runs out of budget too.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .aig import (
    FALSE,
    Aig,
    AigBuilder,
    Cone,
    Literal,
    evaluate,
    extract_cone,
    merge_nodes,
    miter_tfi_cones,
    structural_hash,
)
from .eps import EpsConfig, eps_check, eps_check_parallel
from .isd import EquivDb, try_isd_merge
from .sat import SatBudget, SatVerdict, model_to_assignment, solve, solve_external, solve_parallel, tseitin_encode, to_dimacs
from .selector import EPS, SAT, select_engine
from .simulate import (
    CandidatePair,
    Signatures,
    check_output_counterexample,
    collect_candidate_pairs,
    refine_with_pattern,
    simulate_random,
)
from .verdict import Verdict

HYBRID = "hybrid"
SAT_ONLY = "sat"
EPS_ONLY = "eps"

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not_equivalent"
UNKNOWN = "unknown"

# engage in-engine parallelism only when a call is big enough to amortize
# worker startup; verdicts do not depend on this threshold
_EPS_PARALLEL_MIN_WORK = 1 << 26  # pattern bits x gates
_SAT_PARALLEL_MIN_VARS = 1200


@dataclass
class SweepConfig:
    rho: float = 0.15
    sim_rounds: int = 16384  # 64-bit words: 2^20 patterns in total
    seed: int = 1
    sat_budget: SatBudget = field(default_factory=SatBudget)
    eps_config: EpsConfig = field(default_factory=EpsConfig)
    threads: int = 1
    isd_enabled: bool = True
    engine_override: str = HYBRID
    external_sat: str | None = None
    dump_cnf_dir: str | None = None
    timeout: float | None = None
    debug_check_merges: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if self.engine_override not in (HYBRID, SAT_ONLY, EPS_ONLY):
            raise ValueError(f"unknown engine override {self.engine_override!r}")


@dataclass
class SweepStats:
    pairs: int = 0
    isd_hits: int = 0
    sat_calls: int = 0
    sat_time_seconds: float = 0.0
    eps_calls: int = 0
    eps_time_seconds: float = 0.0
    skipped_pairs: int = 0
    merges: int = 0
    per_pair: list[dict] = field(default_factory=list)


@dataclass
class SweepResult:
    verdict: str
    counterexample: tuple[int, ...] | None
    stats: SweepStats
    wall_seconds: float = 0.0


class _Cancelled(Exception):
    pass


class _Run:
    """Mutable state for one sweep invocation."""

    def __init__(self, aig: Aig, cfg: SweepConfig, cancel) -> None:
        self.aig = aig
        self.cfg = cfg
        self.cancel = cancel
        self.stats = SweepStats()
        self.deadline = (
            time.monotonic() + cfg.timeout if cfg.timeout is not None else None
        )
        self.db = EquivDb()
        self.sigs: Signatures | None = None

    def out_of_time(self) -> bool:
        if self.cancel is not None and self.cancel.is_set():
            return True
        return self.deadline is not None and time.monotonic() > self.deadline

    def remaining(self) -> float | None:
        if self.deadline is None:
            return None
        return max(self.deadline - time.monotonic(), 0.01)

    # -- engine dispatch -----------------------------------------------------

    def _sat_once(self, cone: Cone, budget: SatBudget, pair_id: int | None) -> Verdict:
        cfg = self.cfg
        cnf = tseitin_encode(cone)
        if cfg.dump_cnf_dir:
            name = f"pair_{pair_id:04d}.cnf" if pair_id is not None else "final.cnf"
            os.makedirs(cfg.dump_cnf_dir, exist_ok=True)
            with open(os.path.join(cfg.dump_cnf_dir, name), "w") as handle:
                handle.write(to_dimacs(cnf))
        remaining = self.remaining()
        if remaining is not None and remaining < budget.max_seconds:
            budget = SatBudget(budget.max_conflicts, remaining)
        t0 = time.perf_counter()
        try:
            if cfg.external_sat:
                verdict = solve_external(cnf, cfg.external_sat)
            elif cfg.threads >= 2 and cnf.num_vars >= _SAT_PARALLEL_MIN_VARS:
                workers = 1 << (cfg.threads.bit_length() - 1)
                verdict = solve_parallel(cnf, max(workers, 2), budget)
            else:
                verdict = solve(cnf, budget, cancel=self.cancel)
        finally:
            self.stats.sat_time_seconds += time.perf_counter() - t0
        if verdict.is_unsat:
            return Verdict.equivalent()
        if verdict.is_model:
            assert verdict.model is not None
            return Verdict.counterexample(model_to_assignment(verdict.model, cone))
        return Verdict.resource_out("SAT budget exhausted")

    def _eps_once(self, cone: Cone) -> Verdict:
        cfg = self.cfg
        eps_cfg = cfg.eps_config
        remaining = self.remaining()
        max_seconds = eps_cfg.max_seconds
        if remaining is not None:
            max_seconds = min(remaining, max_seconds) if max_seconds else remaining
        workers = 1
        if cfg.threads >= 2:
            work = (1 << min(cone.num_pis, 62)) * max(cone.gate_count(), 1)
            if work >= _EPS_PARALLEL_MIN_WORK:
                workers = 1 << (cfg.threads.bit_length() - 1)
        call_cfg = EpsConfig(
            bits_limit=eps_cfg.bits_limit,
            max_pis=eps_cfg.max_pis,
            workers=workers,
            memory_cap_bytes=eps_cfg.memory_cap_bytes,
            max_seconds=max_seconds,
        )
        t0 = time.perf_counter()
        try:
            if workers > 1:
                return eps_check_parallel(cone, call_cfg)
            return eps_check(cone, call_cfg, cancel=self.cancel)
        finally:
            self.stats.eps_time_seconds += time.perf_counter() - t0

    def prove_cone(
        self, cone: Cone, pair_id: int | None, escalate: bool, choice=None
    ) -> tuple[Verdict, str]:
        """(verdict, resolving engine); cross-engine fallback in hybrid mode."""
        cfg = self.cfg
        if choice is None:
            choice = select_engine(cone, cfg.rho, cfg.eps_config.max_pis)
        if cfg.engine_override == SAT_ONLY:
            order = [SAT]
        elif cfg.engine_override == EPS_ONLY:
            order = [EPS]
        else:
            order = [choice.kind, EPS if choice.kind == SAT else SAT]
        base = cfg.sat_budget.scaled(4) if escalate else cfg.sat_budget
        last = Verdict.resource_out("no engine attempted")
        for engine in order:
            if engine == SAT:
                verdict = self._sat_once(cone, base, pair_id)
                if verdict.is_resource_out and not self.out_of_time():
                    verdict = self._sat_once(cone, base.scaled(4), pair_id)
            else:
                verdict = self._eps_once(cone)
            if not verdict.is_resource_out:
                return verdict, engine
            last = verdict
            if self.out_of_time():
                break
        return last, order[-1]


def prove_pair(
    pair: CandidatePair,
    aig: Aig,
    cfg: SweepConfig,
    stats: SweepStats | None = None,
    cancel=None,
) -> Verdict:
    """Build the pair's miter cone and decide it with the selected engine.

    A pair whose literals already resolve to the same representative is
    equivalent without any engine call.
    """
    run = _Run(aig, cfg, cancel)
    if stats is not None:
        run.stats = stats
    ra = aig.resolve(pair.a)
    rb = aig.resolve(Literal(pair.b.index, pair.b.inverted != pair.antivalent))
    if ra == rb:
        return Verdict.equivalent()
    cone = miter_tfi_cones(aig, ra, rb)
    if cone.root == FALSE:
        return Verdict.equivalent()
    verdict, _ = run.prove_cone(cone, None, escalate=False)
    return verdict


def sweep(miter: Aig, cfg: SweepConfig | None = None, cancel=None) -> SweepResult:
    """Decide whether the miter output is constant 0.

    The input netlist is not mutated; multi-output miters are OR-reduced
    before sweeping.
    """
    cfg = cfg or SweepConfig()
    t_start = time.perf_counter()
    aig = _reduce_to_single_output(miter)
    run = _Run(aig, cfg, cancel)
    try:
        result = _sweep_inner(run)
    except _Cancelled:
        result = SweepResult(UNKNOWN, None, run.stats)
    result.wall_seconds = time.perf_counter() - t_start
    return result


def _reduce_to_single_output(miter: Aig) -> Aig:
    if not miter.outputs:
        raise ValueError("miter has no outputs")
    bld = AigBuilder(miter.num_pis)
    outs = bld.import_aig(miter, [bld.pi(i) for i in range(miter.num_pis)])
    if len(outs) == 1:
        bld.add_output(outs[0])
    else:
        bld.add_output(bld.or_many(outs))
    return bld.aig


def _miter_assignment(cone: Cone, num_pis: int, cex: tuple[int, ...]) -> tuple[int, ...]:
    full = [0] * num_pis
    for pos, orig in enumerate(cone.pi_map):
        full[orig - 1] = cex[pos]
    return tuple(full)


def _sweep_inner(run: _Run) -> SweepResult:
    aig = run.aig
    cfg = run.cfg
    stats = run.stats
    structural_hash(aig)
    sigs = simulate_random(aig, cfg.sim_rounds, cfg.seed)
    run.sigs = sigs
    early = check_output_counterexample(sigs, aig)
    if early is not None:
        return SweepResult(NOT_EQUIVALENT, early, stats)
    pairs = collect_candidate_pairs(sigs, aig)
    stats.pairs = len(pairs)
    debug_ref = None
    if cfg.debug_check_merges:
        debug_ref = (sigs.signature(aig.outputs[0]), sigs.width_bits)

    for pair_id, pair in enumerate(pairs):
        if run.out_of_time():
            raise _Cancelled
        entry = {
            "id": pair_id,
            "gates": 0,
            "pis": 0,
            "score_xor": 0.0,
            "engine": "none",
            "verdict": "",
            "seconds": 0.0,
        }
        stats.per_pair.append(entry)
        t_pair = time.perf_counter()
        ra = aig.resolve(pair.a)
        rb = aig.resolve(Literal(pair.b.index, pair.b.inverted != pair.antivalent))
        if ra == rb:
            entry["verdict"] = "already_merged"
            continue
        if ra == ~rb:
            raise AssertionError("candidate pair contradicts an earlier proof")
        sig_a = sigs.signature(ra)
        sig_b = sigs.signature(rb)
        if sig_a != sig_b:
            # a replayed counterexample split this class in the meantime
            entry["verdict"] = "refuted_by_simulation"
            continue
        if cfg.isd_enabled and try_isd_merge(pair, aig, run.db):
            _merge(run, ra, rb)
            stats.isd_hits += 1
            entry["engine"] = "isd"
            entry["verdict"] = EQUIVALENT
            entry["seconds"] = time.perf_counter() - t_pair
            _debug_check(run, debug_ref)
            continue
        cone = miter_tfi_cones(aig, ra, rb)
        choice = select_engine(cone, cfg.rho, cfg.eps_config.max_pis)
        entry["gates"] = cone.gate_count()
        entry["pis"] = cone.num_pis
        entry["score_xor"] = round(choice.score, 6)
        verdict, engine = run.prove_cone(cone, pair_id, escalate=False, choice=choice)
        entry["engine"] = engine
        if verdict.is_resource_out:
            stats.skipped_pairs += 1
            entry["verdict"] = "skipped"
        elif verdict.is_equivalent:
            _bucket(stats, engine)
            _merge(run, ra, rb)
            entry["verdict"] = EQUIVALENT
            _debug_check(run, debug_ref)
        else:
            _bucket(stats, engine)
            entry["verdict"] = NOT_EQUIVALENT
            assert verdict.assignment is not None
            assert evaluate(cone.aig, verdict.assignment)[0] == 1
            full = _miter_assignment(cone, aig.num_pis, verdict.assignment)
            if evaluate(aig, full)[0] == 1:
                entry["seconds"] = time.perf_counter() - t_pair
                return SweepResult(NOT_EQUIVALENT, full, stats)
            refine_with_pattern(sigs, full)
            found = check_output_counterexample(sigs, aig)
            if found is not None:
                entry["seconds"] = time.perf_counter() - t_pair
                return SweepResult(NOT_EQUIVALENT, found, stats)
        entry["seconds"] = time.perf_counter() - t_pair

    # final stage: prove the reduced miter output itself, escalated budgets
    po = aig.resolve(aig.outputs[0])
    if po == FALSE:
        return SweepResult(EQUIVALENT, None, stats)
    if po == ~FALSE:
        zeros = tuple([0] * aig.num_pis)
        assert evaluate(aig, zeros)[0] == 1
        return SweepResult(NOT_EQUIVALENT, zeros, stats)
    if run.out_of_time():
        raise _Cancelled
    cone = extract_cone(aig, po)
    verdict, engine = run.prove_cone(cone, None, escalate=True)
    _bucket(stats, engine)
    if verdict.is_equivalent:
        return SweepResult(EQUIVALENT, None, stats)
    if verdict.is_counterexample:
        assert verdict.assignment is not None
        full = _miter_assignment(cone, aig.num_pis, verdict.assignment)
        assert evaluate(aig, full)[0] == 1
        return SweepResult(NOT_EQUIVALENT, full, stats)
    return SweepResult(UNKNOWN, None, stats)


def _bucket(stats: SweepStats, engine: str) -> None:
    if engine == SAT:
        stats.sat_calls += 1
    else:
        stats.eps_calls += 1


def _merge(run: _Run, ra: Literal, rb: Literal) -> None:
    keep, drop = (ra, rb) if ra.index < rb.index else (rb, ra)
    merge_nodes(run.aig, keep, drop)
    run.db.add_proven(keep, drop)
    run.stats.merges += 1


def _debug_check(run: _Run, reference) -> None:
    """Re-simulate after a merge and compare the output signature prefix."""
    if reference is None or run.sigs is None:
        return
    ref_sig, ref_width = reference
    fresh = simulate_random(run.aig, ref_width // 64, run.cfg.seed)
    current = fresh.signature(run.aig.resolve(run.aig.outputs[0]))
    if current != ref_sig:
        raise AssertionError("merge changed the miter output signature")
