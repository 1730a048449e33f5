import pytest

from hybridcec.aig import AndNode, Literal, compact, topological_order
from hybridcec.aiger import AigerError, parse_aiger, write_aiger
from hybridcec.bench import adder_cla, adder_ripple, mult_array, mult_columnwise, rewrite_aig

from conftest import truth_tables


def encode_binary(aig):
    """Reference binary encoder, written against the format definition only."""
    dense = compact(aig)
    n_in = dense.num_pis
    n_and = dense.num_ands
    m = n_in + n_and
    out = bytearray(f"aig {m} {n_in} 0 {len(dense.outputs)} {n_and}\n".encode())
    for lit in dense.outputs:
        out += f"{lit.code}\n".encode()
    for i in dense.and_indices():
        node = dense.node(i)
        lhs = 2 * i
        rhs0, rhs1 = sorted((node.fanin0.code, node.fanin1.code), reverse=True)
        for delta in (lhs - rhs0, rhs0 - rhs1):
            while delta >= 0x80:
                out.append((delta & 0x7F) | 0x80)
                delta >>= 7
            out.append(delta)
    return bytes(out)


def structure_key(aig):
    # AND fan-ins compare as unordered pairs: the binary format reorders them
    dense = compact(aig)
    return (
        dense.num_pis,
        [tuple(sorted((dense._fanin0[i], dense._fanin1[i]))) for i in dense.and_indices()],
        dense.outputs,
    )


class TestParseAscii:
    def test_passthrough(self):
        aig = parse_aiger(b"aag 1 1 0 1 0\n2\n2\n")
        assert aig.num_pis == 1
        assert aig.outputs == [Literal(1, False)]

    def test_and_of_two_pis(self):
        aig = parse_aiger("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n")
        assert aig.num_pis == 2
        assert aig.node(3) == AndNode(Literal(1), Literal(2))
        assert aig.outputs == [Literal(3, False)]

    def test_inverted_output_and_symbols_ignored(self):
        aig = parse_aiger("aag 3 2 0 1 1\n2\n4\n7\n6 3 5\ni0 alpha\no0 result\nc\nnote\n")
        assert aig.outputs == [Literal(3, True)]
        assert aig.node(3) == AndNode(Literal(1, True), Literal(2, True))

    def test_out_of_order_definitions_are_sorted(self):
        # gate 6 references gate 8, defined later in the file
        aig = parse_aiger("aag 4 2 0 1 2\n2\n4\n6\n6 8 2\n8 2 4\n")
        assert topological_order(aig) == [1, 2, 3, 4]
        assert truth_tables(aig) == [(0,), (0,), (0,), (1,)]


class TestParseErrors:
    def test_malformed_header(self):
        with pytest.raises(AigerError, match="line 1"):
            parse_aiger(b"aag 1 1 0 1\n")

    def test_latches_rejected(self):
        with pytest.raises(AigerError, match="latches"):
            parse_aiger(b"aag 2 1 1 0 0\n2\n4 2\n")

    def test_dangling_literal_with_position(self):
        with pytest.raises(AigerError, match="line 5.*dangling literal 8"):
            parse_aiger(b"aag 4 2 0 1 1\n2\n4\n6\n6 8 2\n")

    def test_cyclic_definitions(self):
        with pytest.raises(AigerError, match="cyclic"):
            parse_aiger(b"aag 4 1 0 1 2\n2\n6\n6 8 2\n8 6 2\n")

    def test_binary_truncated_deltas(self):
        data = b"aig 3 2 0 1 1\n6\n" + bytes([0x80])
        with pytest.raises(AigerError, match="byte"):
            parse_aiger(data)

    def test_unknown_magic(self):
        with pytest.raises(AigerError, match="header"):
            parse_aiger(b"xyz 0 0 0 0 0\n")


class TestParseBinary:
    def test_matches_ascii_parse(self):
        ascii_aig = parse_aiger("aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n")
        binary = encode_binary(ascii_aig)
        assert binary.startswith(b"aig 3 2 0 1 1\n")
        assert structure_key(parse_aiger(binary)) == structure_key(ascii_aig)

    @pytest.mark.parametrize(
        "build", [lambda: adder_ripple(4), lambda: mult_array(3), lambda: mult_columnwise(4)]
    )
    def test_round_trip_generated_circuits(self, build):
        aig = build()
        parsed = parse_aiger(encode_binary(aig))
        assert structure_key(parsed) == structure_key(aig)
        assert truth_tables(parsed) == truth_tables(aig)


class TestWriteAiger:
    def test_passthrough_bytes(self):
        aig = parse_aiger(b"aag 1 1 0 1 0\n2\n2\n")
        assert write_aiger(aig) == b"aag 1 1 0 1 0\n2\n2\n"

    def test_empty_output_header(self):
        from hybridcec.aig import Aig

        aig = Aig(2)
        aig.add_and(aig.pi(0), aig.pi(1))
        assert write_aiger(aig).startswith(b"aag 2 2 0 0 0\n")

    @pytest.mark.parametrize("width", [2, 3, 4])
    def test_multiplier_round_trip_isomorphic(self, width):
        aig = mult_array(width)
        again = parse_aiger(write_aiger(aig))
        assert structure_key(again) == structure_key(aig)

    def test_rewritten_round_trip(self):
        aig = rewrite_aig(adder_cla(4), steps=10, seed=2)
        again = parse_aiger(write_aiger(aig))
        assert structure_key(again) == structure_key(aig)
        assert truth_tables(again) == truth_tables(aig)
