"""Command-line interface.

Four subcommands: ``check`` proves a miter (or two circuits to be mitered)
equivalent, ``gen`` and ``gen-miter`` produce benchmark netlists, and
``oracle`` runs the exhaustive referee.  Exit codes: 0 equivalent, 1 not
equivalent, 2 unknown or timed out, 3 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .aig import Aig, AigBuilder, AigError, build_miter
from .aiger import AigerError, parse_aiger, write_aiger
from .bench import GenSpec, GenError, corrupt_aig, generate, oracle_check, rewrite_aig
from .eps import EpsConfig, EpsError
from .sat import SatBudget, SatError
from .sweep import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNKNOWN,
    SweepConfig,
    SweepResult,
    sweep,
)

EXIT_EQUIVALENT = 0
EXIT_NOT_EQUIVALENT = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3

STATS_SCHEMA = {
    "type": "object",
    "required": [
        "verdict",
        "wall_seconds",
        "pairs",
        "isd_hits",
        "sat_calls",
        "sat_time_seconds",
        "eps_calls",
        "eps_time_seconds",
        "skipped_pairs",
        "merges",
        "per_pair",
    ],
    "additionalProperties": False,
    "properties": {
        "verdict": {"enum": [EQUIVALENT, NOT_EQUIVALENT, UNKNOWN]},
        "wall_seconds": {"type": "number", "minimum": 0},
        "pairs": {"type": "integer", "minimum": 0},
        "isd_hits": {"type": "integer", "minimum": 0},
        "sat_calls": {"type": "integer", "minimum": 0},
        "sat_time_seconds": {"type": "number", "minimum": 0},
        "eps_calls": {"type": "integer", "minimum": 0},
        "eps_time_seconds": {"type": "number", "minimum": 0},
        "skipped_pairs": {"type": "integer", "minimum": 0},
        "merges": {"type": "integer", "minimum": 0},
        "per_pair": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "id",
                    "gates",
                    "pis",
                    "score_xor",
                    "engine",
                    "verdict",
                    "seconds",
                ],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "gates": {"type": "integer", "minimum": 0},
                    "pis": {"type": "integer", "minimum": 0},
                    "score_xor": {"type": "number", "minimum": 0},
                    "engine": {"enum": ["sat", "eps", "isd", "none"]},
                    "verdict": {
                        "enum": [
                            EQUIVALENT,
                            NOT_EQUIVALENT,
                            "skipped",
                            "already_merged",
                            "refuted_by_simulation",
                        ]
                    },
                    "seconds": {"type": "number", "minimum": 0},
                },
            },
        },
    },
}

_VERDICT_TEXT = {
    EQUIVALENT: "EQUIVALENT",
    NOT_EQUIVALENT: "NOT EQUIVALENT",
    UNKNOWN: "UNKNOWN",
}

_VERDICT_EXIT = {
    EQUIVALENT: EXIT_EQUIVALENT,
    NOT_EQUIVALENT: EXIT_NOT_EQUIVALENT,
    UNKNOWN: EXIT_UNKNOWN,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridcec",
        description="Combinational equivalence checking with hybrid sweeping engines.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)

    check = sub.add_parser("check", help="prove a miter, or two circuits, equivalent")
    check.add_argument("inputs", nargs="+", help="one miter AIGER, or two circuit AIGERs")
    check.add_argument("--engine", choices=["hybrid", "sat", "eps"], default="hybrid")
    check.add_argument("--rho", type=float, default=0.15, help="XOR-density threshold")
    check.add_argument("--bits-limit", type=int, default=20, help="log2 of the EPS block width")
    check.add_argument("--eps-max-pis", type=int, default=36, help="PI ceiling for EPS jobs")
    check.add_argument("--threads", type=int, default=1)
    check.add_argument("--seed", type=int, default=None, help="defaults to $HYBRIDCEC_SEED or 1")
    check.add_argument("--sim-rounds", type=int, default=16384, help="64-bit simulation words")
    check.add_argument("--timeout", type=float, default=None, help="global wall-clock limit")
    check.add_argument("--sat-conflicts", type=int, default=100_000, help="per-pair conflict budget")
    check.add_argument("--sat-seconds", type=float, default=60.0, help="per-pair SAT time budget")
    check.add_argument("--external-sat", default=None, help="external DIMACS solver command")
    check.add_argument("--dump-cnf", default=None, help="directory for per-pair CNF dumps")
    check.add_argument("--stats-json", default=None, help="write run statistics to this path")
    check.add_argument("--per-output", action="store_true", help="prove each output cone separately")

    gen = sub.add_parser("gen", help="generate a benchmark netlist")
    gen.add_argument("--family", required=True, choices=[
        "adder_ripple", "adder_cla", "mult_array", "mult_columnwise",
        "replicated", "rewrite", "corrupt",
    ])
    gen.add_argument("--width", type=int, default=4)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--steps", type=int, default=20, help="rewrite steps")
    gen.add_argument("--replicas", type=int, default=2, help="replica count")
    gen.add_argument("--block-family", default="mult_array", help="block family for replicated")
    gen.add_argument("--block-width", type=int, default=3)
    gen.add_argument("--base", default=None, help="base AIGER for rewrite/corrupt")
    gen.add_argument("-o", "--output", required=True)

    gm = sub.add_parser("gen-miter", help="combine two circuits into a miter")
    gm.add_argument("--a", required=True)
    gm.add_argument("--b", required=True)
    gm.add_argument("-o", "--output", required=True)

    oracle = sub.add_parser("oracle", help="exhaustive equivalence referee")
    oracle.add_argument("miter")
    oracle.add_argument("--max-pis", type=int, default=24)
    return parser


def _load(path: str) -> Aig:
    with open(path, "rb") as handle:
        return parse_aiger(handle.read())


def _save(aig: Aig, path: str) -> None:
    with open(path, "wb") as handle:
        handle.write(write_aiger(aig))


def _check_config(args: argparse.Namespace) -> SweepConfig:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("HYBRIDCEC_SEED", "1"))
    return SweepConfig(
        rho=args.rho,
        sim_rounds=args.sim_rounds,
        seed=seed,
        sat_budget=SatBudget(args.sat_conflicts, args.sat_seconds),
        eps_config=EpsConfig(bits_limit=args.bits_limit, max_pis=args.eps_max_pis),
        threads=args.threads,
        engine_override=args.engine,
        external_sat=args.external_sat,
        dump_cnf_dir=args.dump_cnf,
        timeout=args.timeout,
    )


def _single_output_view(miter: Aig, pos: int) -> Aig:
    bld = AigBuilder(miter.num_pis)
    outs = bld.import_aig(miter, [bld.pi(i) for i in range(miter.num_pis)])
    bld.add_output(outs[pos])
    return bld.aig


def _merge_stats(total: SweepResult, part: SweepResult) -> None:
    t, p = total.stats, part.stats
    base = len(t.per_pair)
    t.pairs += p.pairs
    t.isd_hits += p.isd_hits
    t.sat_calls += p.sat_calls
    t.sat_time_seconds += p.sat_time_seconds
    t.eps_calls += p.eps_calls
    t.eps_time_seconds += p.eps_time_seconds
    t.skipped_pairs += p.skipped_pairs
    t.merges += p.merges
    for entry in p.per_pair:
        entry = dict(entry)
        entry["id"] = base + entry["id"]
        t.per_pair.append(entry)
    total.wall_seconds += part.wall_seconds


def run_check(args: argparse.Namespace) -> int:
    if len(args.inputs) == 1:
        miter = _load(args.inputs[0])
    elif len(args.inputs) == 2:
        miter = build_miter(_load(args.inputs[0]), _load(args.inputs[1]))
    else:
        raise GenError("check takes one miter or exactly two circuits")
    cfg = _check_config(args)
    if args.per_output and len(miter.outputs) > 1:
        result = _check_per_output(miter, cfg)
    else:
        result = sweep(miter, cfg)
    print(_VERDICT_TEXT[result.verdict])
    if result.counterexample is not None:
        for pos, bit in enumerate(result.counterexample):
            print(f"{pos}={bit}")
    if args.stats_json:
        emit_stats(result, args.stats_json)
    return _VERDICT_EXIT[result.verdict]


def _check_per_output(miter: Aig, cfg: SweepConfig) -> SweepResult:
    from .sweep import SweepStats

    total = SweepResult(EQUIVALENT, None, SweepStats(), 0.0)
    saw_unknown = False
    for pos in range(len(miter.outputs)):
        part = sweep(_single_output_view(miter, pos), cfg)
        _merge_stats(total, part)
        if part.verdict == NOT_EQUIVALENT:
            total.verdict = NOT_EQUIVALENT
            total.counterexample = part.counterexample
            return total
        if part.verdict == UNKNOWN:
            saw_unknown = True
    total.verdict = UNKNOWN if saw_unknown else EQUIVALENT
    return total


def emit_stats(result: SweepResult, path: str) -> dict:
    stats = result.stats
    payload = {
        "verdict": result.verdict,
        "wall_seconds": result.wall_seconds,
        "pairs": stats.pairs,
        "isd_hits": stats.isd_hits,
        "sat_calls": stats.sat_calls,
        "sat_time_seconds": stats.sat_time_seconds,
        "eps_calls": stats.eps_calls,
        "eps_time_seconds": stats.eps_time_seconds,
        "skipped_pairs": stats.skipped_pairs,
        "merges": stats.merges,
        "per_pair": stats.per_pair,
    }
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return payload


def run_gen(args: argparse.Namespace) -> int:
    if args.family in ("rewrite", "corrupt"):
        if args.base:
            base = _load(args.base)
            if args.family == "rewrite":
                aig = rewrite_aig(base, args.steps, args.seed)
            else:
                aig = corrupt_aig(base, args.seed)
        else:
            raise GenError(f"--base is required for family {args.family}")
    elif args.family == "replicated":
        spec = GenSpec(
            "replicated",
            replicas=args.replicas,
            block=GenSpec(args.block_family, width=args.block_width, seed=args.seed),
        )
        aig = generate(spec)
    else:
        aig = generate(GenSpec(args.family, width=args.width, seed=args.seed))
    _save(aig, args.output)
    return EXIT_EQUIVALENT


def run_gen_miter(args: argparse.Namespace) -> int:
    _save(build_miter(_load(args.a), _load(args.b)), args.output)
    return EXIT_EQUIVALENT


def run_oracle(args: argparse.Namespace) -> int:
    verdict = oracle_check(_load(args.miter), max_pis=args.max_pis)
    if verdict.is_equivalent:
        print("EQUIVALENT")
        return EXIT_EQUIVALENT
    print("NOT EQUIVALENT")
    assert verdict.assignment is not None
    for pos, bit in enumerate(verdict.assignment):
        print(f"{pos}={bit}")
    return EXIT_NOT_EQUIVALENT


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.mode == "check":
            return run_check(args)
        if args.mode == "gen":
            return run_gen(args)
        if args.mode == "gen-miter":
            return run_gen_miter(args)
        return run_oracle(args)
    except (AigError, AigerError, GenError, SatError, EpsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
