"""Shared helpers: truth-table oracles and plain (non-hashing) miters."""

from __future__ import annotations

import pathlib
import sys

import pytest

from hybridcec.aig import Aig, Literal, evaluate

TESTS_DIR = pathlib.Path(__file__).resolve().parent
EXTERNAL_SOLVER = [sys.executable, str(TESTS_DIR / "external_solver.py")]


def truth_tables(aig: Aig) -> list[tuple[int, ...]]:
    """One tuple of output bits per input pattern, ascending pattern order."""
    n = aig.num_pis
    return [
        tuple(evaluate(aig, [(p >> i) & 1 for i in range(n)]))
        for p in range(1 << n)
    ]


def plain_double_miter(src: Aig) -> tuple[Aig, list[tuple[int, int]]]:
    """Two verbatim copies of src over shared PIs, no structural hashing.

    Returns the combined netlist (XOR/OR-reduced single output) and the list
    of matched internal AND-node index pairs (copy1, copy2).
    """
    out = Aig(src.num_pis)
    maps = []
    for _ in range(2):
        m = [0] * src.num_nodes
        for pos in range(src.num_pis):
            m[pos + 1] = (pos + 1) * 2
        for i in src.and_indices():
            a = src._fanin0[i]
            b = src._fanin1[i]
            lit = out.add_and(
                Literal.from_code(m[a >> 1] ^ (a & 1)),
                Literal.from_code(m[b >> 1] ^ (b & 1)),
            )
            m[i] = lit.code
        maps.append(m)

    def xor(x: Literal, y: Literal) -> Literal:
        t0 = out.add_and(x, ~y)
        t1 = out.add_and(~x, y)
        return ~out.add_and(~t0, ~t1)

    acc = None
    for c in src._outputs:
        x = Literal.from_code(maps[0][c >> 1] ^ (c & 1))
        y = Literal.from_code(maps[1][c >> 1] ^ (c & 1))
        bit = xor(x, y)
        acc = bit if acc is None else ~out.add_and(~acc, ~bit)
    assert acc is not None
    out.add_output(acc)
    matched = [(maps[0][i] >> 1, maps[1][i] >> 1) for i in src.and_indices()]
    return out, matched


@pytest.fixture(scope="session")
def small_circuits():
    from hybridcec.bench import adder_cla, adder_ripple, mult_array, mult_columnwise

    return {
        "adder_ripple_4": adder_ripple(4),
        "adder_cla_4": adder_cla(4),
        "mult_array_3": mult_array(3),
        "mult_columnwise_3": mult_columnwise(3),
        "mult_array_4": mult_array(4),
        "mult_columnwise_4": mult_columnwise(4),
    }
