"""AIGER file I/O for combinational netlists.

Reads both the ASCII ("aag") and the binary ("aig") encodings; writes ASCII.
Latches are rejected: the checker works on combinational circuits only.
Primary inputs are renumbered to node indices 1..I in file order and AND
gates are renumbered topologically, so parsed netlists always satisfy the
fan-in-before-node index invariant.
"""

from __future__ import annotations

from .aig import Aig, Literal

_SYMBOL_PREFIXES = ("i", "o", "l")


class AigerError(Exception):
    """Malformed AIGER input; the message carries a line or byte position."""


def parse_aiger(data: bytes | str) -> Aig:
    if isinstance(data, str):
        data = data.encode("ascii")
    if data.startswith(b"aag"):
        return _parse_ascii(data)
    if data.startswith(b"aig"):
        return _parse_binary(data)
    raise AigerError("line 1: header must start with 'aag' or 'aig'")


def _parse_header(line: bytes, lineno: int, magic: str) -> tuple[int, int, int, int, int]:
    fields = line.split()
    if len(fields) != 6 or fields[0] != magic.encode():
        raise AigerError(f"line {lineno}: malformed header {line.decode(errors='replace')!r}")
    try:
        m, i, l, o, a = (int(f) for f in fields[1:])
    except ValueError:
        raise AigerError(f"line {lineno}: non-numeric header field") from None
    if min(m, i, l, o, a) < 0:
        raise AigerError(f"line {lineno}: negative header field")
    if l > 0:
        raise AigerError(f"line {lineno}: {l} latches present, only combinational circuits are supported")
    if m < i + l + a:
        raise AigerError(f"line {lineno}: maximum variable index {m} below I+L+A")
    return m, i, l, o, a


def _parse_ascii(data: bytes) -> Aig:
    lines = data.split(b"\n")
    m, num_in, _, num_out, num_and = _parse_header(lines[0], 1, "aag")
    pos = 1

    def next_line(what: str) -> tuple[bytes, int]:
        nonlocal pos
        while pos < len(lines):
            line = lines[pos].strip()
            pos += 1
            if line:
                return line, pos
        raise AigerError(f"line {pos}: unexpected end of file, expected {what}")

    inputs: list[int] = []
    var_of_input: dict[int, int] = {}
    for k in range(num_in):
        line, ln = next_line("input literal")
        lit = _int_field(line, ln)
        if lit < 2 or lit & 1:
            raise AigerError(f"line {ln}: input literal {lit} must be even and non-constant")
        if lit >> 1 in var_of_input:
            raise AigerError(f"line {ln}: duplicate input literal {lit}")
        var_of_input[lit >> 1] = k
        inputs.append(lit)

    out_lits: list[tuple[int, int]] = []
    for _ in range(num_out):
        line, ln = next_line("output literal")
        out_lits.append((_int_field(line, ln), ln))

    and_defs: dict[int, tuple[int, int, int]] = {}
    and_order: list[int] = []
    for _ in range(num_and):
        line, ln = next_line("AND definition")
        fields = line.split()
        if len(fields) != 3:
            raise AigerError(f"line {ln}: AND definition needs three literals")
        lhs, rhs0, rhs1 = (_int_field(f, ln) for f in fields)
        if lhs < 2 or lhs & 1:
            raise AigerError(f"line {ln}: AND output literal {lhs} must be even and non-constant")
        var = lhs >> 1
        if var in var_of_input or var in and_defs:
            raise AigerError(f"line {ln}: literal {lhs} defined twice")
        if var > m:
            raise AigerError(f"line {ln}: variable {var} exceeds declared maximum {m}")
        and_defs[var] = (rhs0, rhs1, ln)
        and_order.append(var)
    for lit, ln in out_lits:
        if lit >> 1 > m:
            raise AigerError(f"line {ln}: variable {lit >> 1} exceeds declared maximum {m}")

    return _assemble(num_in, var_of_input, and_defs, and_order, out_lits)


def _int_field(text: bytes, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise AigerError(f"line {lineno}: expected a literal, got {text.decode(errors='replace')!r}") from None


def _assemble(
    num_in: int,
    var_of_input: dict[int, int],
    and_defs: dict[int, tuple[int, int, int]],
    and_order: list[int],
    out_lits: list[tuple[int, int]],
) -> Aig:
    aig = Aig(num_in)
    node_of_var: dict[int, int] = {0: 0}
    for var, k in var_of_input.items():
        node_of_var[var] = k + 1

    def node_lit(lit: int, lineno: int) -> Literal:
        var = lit >> 1
        idx = node_of_var.get(var)
        if idx is None:
            if var in and_defs:
                _define(var)
                idx = node_of_var[var]
            else:
                raise AigerError(f"line {lineno}: dangling literal {lit}")
        return Literal(idx, bool(lit & 1))

    defining: set[int] = set()

    def _define(var: int) -> None:
        # iterative DFS so deep chains do not hit the recursion limit
        stack = [(var, False)]
        while stack:
            v, expanded = stack.pop()
            if v in node_of_var:
                continue
            rhs0, rhs1, ln = and_defs[v]
            if expanded:
                defining.discard(v)
                lit = aig.add_and(node_lit(rhs0, ln), node_lit(rhs1, ln))
                node_of_var[v] = lit.index
                continue
            if v in defining:
                raise AigerError(f"line {ln}: cyclic AND definition for literal {2 * v}")
            defining.add(v)
            stack.append((v, True))
            for rhs in (rhs1, rhs0):
                rv = rhs >> 1
                if rv not in node_of_var:
                    if rv not in and_defs:
                        raise AigerError(f"line {ln}: dangling literal {rhs}")
                    stack.append((rv, False))

    for var in and_order:
        _define(var)
    for lit, ln in out_lits:
        aig.add_output(node_lit(lit, ln))
    return aig


def _parse_binary(data: bytes) -> Aig:
    nl = data.find(b"\n")
    if nl < 0:
        raise AigerError("byte 0: missing header line")
    m, num_in, _, num_out, num_and = _parse_header(data[:nl], 1, "aig")
    if m != num_in + num_and:
        raise AigerError("line 1: binary format requires M == I + L + A")
    pos = nl + 1

    out_lits: list[tuple[int, int]] = []
    for k in range(num_out):
        nl = data.find(b"\n", pos)
        if nl < 0:
            raise AigerError(f"byte {pos}: unexpected end of file in output section")
        out_lits.append((_int_field(data[pos:nl].strip(), k + 2), k + 2))
        pos = nl + 1

    def read_delta() -> int:
        nonlocal pos
        value = 0
        shift = 0
        while True:
            if pos >= len(data):
                raise AigerError(f"byte {pos}: truncated delta encoding")
            byte = data[pos]
            pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7

    var_of_input = {k + 1: k for k in range(num_in)}
    and_defs: dict[int, tuple[int, int, int]] = {}
    and_order: list[int] = []
    for k in range(num_and):
        var = num_in + 1 + k
        lhs = 2 * var
        at = pos
        delta0 = read_delta()
        delta1 = read_delta()
        rhs0 = lhs - delta0
        rhs1 = rhs0 - delta1
        if delta0 == 0 or rhs1 < 0:
            raise AigerError(f"byte {at}: invalid delta pair for AND literal {lhs}")
        and_defs[var] = (rhs0, rhs1, k + 2 + num_out)
        and_order.append(var)

    return _assemble(num_in, var_of_input, and_defs, and_order, out_lits)


def write_aiger(aig: Aig) -> bytes:
    """ASCII AIGER; live nodes only, compactly renumbered."""
    from .aig import compact

    dense = compact(aig)
    num_and = dense.num_ands
    m = dense.num_pis + num_and
    lines = [f"aag {m} {dense.num_pis} 0 {len(dense.outputs)} {num_and}"]
    lines.extend(str(2 * (k + 1)) for k in range(dense.num_pis))
    lines.extend(str(lit.code) for lit in dense.outputs)
    for i in dense.and_indices():
        node = dense.node(i)
        lines.append(f"{2 * i} {node.fanin0.code} {node.fanin1.code}")
    return ("\n".join(lines) + "\n").encode("ascii")
