"""Combinational equivalence checking for AIG netlists.

The prover sweeps a miter with two complementary engines, a CDCL SAT solver
and an exhaustive bit-parallel simulator, picking one per candidate pair by
the XOR-chain density of the pair's fan-in cone.
"""

from .aig import (
    FALSE,
    TRUE,
    Aig,
    AigBuilder,
    AigError,
    AndNode,
    Cone,
    Literal,
    build_miter,
    evaluate,
    extract_cone,
    merge_nodes,
    miter_tfi_cones,
    structural_hash,
    topological_order,
)
from .aiger import AigerError, parse_aiger, write_aiger
from .sweep import SweepConfig, SweepResult, SweepStats, sweep
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "FALSE",
    "TRUE",
    "Aig",
    "AigBuilder",
    "AigError",
    "AigerError",
    "AndNode",
    "Cone",
    "Literal",
    "SweepConfig",
    "SweepResult",
    "SweepStats",
    "Verdict",
    "build_miter",
    "evaluate",
    "extract_cone",
    "merge_nodes",
    "miter_tfi_cones",
    "parse_aiger",
    "structural_hash",
    "sweep",
    "topological_order",
    "write_aiger",
]
