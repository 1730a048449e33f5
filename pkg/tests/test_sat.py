import itertools
import random
import re

import pytest

from hybridcec.aig import AigBuilder, FALSE, TRUE, Aig, Literal, build_miter, evaluate, extract_cone, miter_tfi_cones
from hybridcec.bench import adder_cla, adder_ripple, corrupt_aig, mult_array, oracle_check
from hybridcec.sat import (
    Cnf,
    InvalidModelError,
    SatBudget,
    SatError,
    SolverOutputError,
    SolverSpawnError,
    _Solver,
    cube_variables,
    model_to_assignment,
    parse_dimacs,
    solve,
    solve_external,
    solve_parallel,
    to_dimacs,
    tseitin_encode,
)

from conftest import EXTERNAL_SOLVER


def brute_sat(num_vars, clauses):
    for bits in itertools.product((False, True), repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return True
    return False


def random_cnf(rng, max_vars=12, max_clauses=60, max_len=4):
    nv = rng.randint(1, max_vars)
    nc = rng.randint(1, max_clauses)
    clauses = [
        [rng.choice((-1, 1)) * rng.randint(1, nv) for _ in range(rng.randint(1, max_len))]
        for _ in range(nc)
    ]
    return Cnf(nv, clauses)


def adder_pair_cone(width):
    bld = AigBuilder(2 * width)
    pis = [bld.pi(i) for i in range(2 * width)]
    outs_a = bld.import_aig(adder_ripple(width), pis)
    outs_b = bld.import_aig(adder_cla(width), pis)
    return miter_tfi_cones(bld.aig, outs_a[width - 1], outs_b[width - 1])


class TestTseitinEncode:
    def test_constant_false_root_gives_complementary_units(self):
        aig = Aig(2)
        aig.add_output(FALSE)
        cnf = tseitin_encode(extract_cone(aig, FALSE))
        assert sorted(map(tuple, cnf.clauses)) == [(-1,), (1,)]
        assert solve(cnf).is_unsat

    def test_single_pi_root_model(self):
        aig = Aig(1)
        aig.add_output(aig.pi(0))
        cnf = tseitin_encode(extract_cone(aig, aig.pi(0)))
        verdict = solve(cnf)
        assert verdict.is_model
        assert verdict.model[0] is True

    def test_three_clauses_per_gate_plus_root_unit(self):
        cone = adder_pair_cone(3)
        cnf = tseitin_encode(cone)
        gates = cone.aig.gate_count()
        assert len(cnf.clauses) == 3 * gates + 1
        assert all(clause for clause in cnf.clauses)
        assert all(0 not in clause for clause in cnf.clauses)

    def test_adder_pair_cone_unsat_matches_oracle(self):
        cone = adder_pair_cone(6)
        assert oracle_check(cone.aig, max_pis=13).is_equivalent
        assert solve(tseitin_encode(cone)).is_unsat

    def test_encoding_matches_oracle_on_small_cones(self):
        rng = random.Random(5)
        for _ in range(30):
            n = rng.randint(2, 10)
            aig = Aig(n)
            lits = [aig.pi(i) for i in range(n)]
            for _ in range(rng.randint(2, 25)):
                a, b = rng.choice(lits), rng.choice(lits)
                if rng.random() < 0.5:
                    a = ~a
                if rng.random() < 0.5:
                    b = ~b
                lits.append(aig.add_and(a, b))
            aig.add_output(lits[-1])
            cone = extract_cone(aig, lits[-1])
            unsat = solve(tseitin_encode(cone)).is_unsat
            assert unsat == oracle_check(cone.aig, max_pis=12).is_equivalent


class TestSolve:
    def test_contradiction(self):
        assert solve(Cnf(1, [[1], [-1]])).is_unsat

    def test_unit_propagation_model(self):
        verdict = solve(Cnf(2, [[1, 2], [-1]]))
        assert verdict.is_model
        assert verdict.model == (False, True)

    def test_empty_clause_list_is_sat(self):
        assert solve(Cnf(3, [])).is_model

    def test_differential_against_brute_force(self):
        rng = random.Random(1234)
        for _ in range(400):
            cnf = random_cnf(rng)
            verdict = solve(cnf)
            assert not verdict.is_budget
            assert verdict.is_model == brute_sat(cnf.num_vars, cnf.clauses)

    def test_python_and_compiled_paths_agree(self):
        rng = random.Random(77)
        for _ in range(120):
            cnf = random_cnf(rng, max_vars=10)
            fast = solve(cnf)
            slow_solver = _Solver(cnf.num_vars)
            for clause in cnf.clauses:
                slow_solver.add_clause(clause)
            slow = slow_solver.search(SatBudget())
            assert fast.kind == slow.kind

    def test_budget_verdict_on_hard_instance(self):
        cone = adder_pair_cone(8)
        verdict = solve(tseitin_encode(cone), SatBudget(max_conflicts=1, max_seconds=60))
        assert verdict.is_budget or verdict.is_unsat

    def test_models_always_validated(self):
        rng = random.Random(9)
        for _ in range(100):
            cnf = random_cnf(rng)
            verdict = solve(cnf)
            if verdict.is_model:
                assert cnf.validate_model(verdict.model)


class TestDimacs:
    def test_writer_grammar(self):
        cnf = Cnf(3, [[1, -2], [2, 3], [-3]])
        text = to_dimacs(cnf)
        lines = text.splitlines()
        assert lines[0] == "p cnf 3 3"
        assert re.fullmatch(r"p cnf \d+ \d+", lines[0])
        for line in lines[1:]:
            assert re.fullmatch(r"(-?\d+ )+0", line)

    def test_parse_round_trip(self):
        cnf = Cnf(4, [[1, -2, 4], [3], [-4, -1]])
        again = parse_dimacs(to_dimacs(cnf))
        assert again.num_vars == cnf.num_vars
        assert again.clauses == cnf.clauses

    def test_parse_rejects_bad_header(self):
        with pytest.raises(SatError):
            parse_dimacs("p dnf 2 1\n1 0\n")

    def test_parse_rejects_count_mismatch(self):
        with pytest.raises(SatError):
            parse_dimacs("p cnf 2 2\n1 0\n")


class TestSolveExternal:
    def test_unsat(self):
        assert solve_external(Cnf(1, [[1], [-1]]), EXTERNAL_SOLVER).is_unsat

    def test_model_validated(self):
        verdict = solve_external(Cnf(2, [[1, 2], [-1]]), EXTERNAL_SOLVER)
        assert verdict.is_model
        assert verdict.model == (False, True)

    def test_differential_with_internal_solver(self):
        rng = random.Random(55)
        for _ in range(40):
            cnf = random_cnf(rng, max_vars=8, max_clauses=30)
            assert solve(cnf).kind == solve_external(cnf, EXTERNAL_SOLVER).kind

    def test_spawn_failure_is_distinct(self):
        with pytest.raises(SolverSpawnError):
            solve_external(Cnf(1, [[1]]), ["/nonexistent/solver-binary"])

    def test_malformed_output_is_distinct(self, tmp_path):
        script = tmp_path / "mute.sh"
        script.write_text("#!/bin/sh\necho hello\n")
        script.chmod(0o755)
        with pytest.raises(SolverOutputError):
            solve_external(Cnf(1, [[1]]), [str(script)])

    def test_invalid_model_is_distinct(self, tmp_path):
        script = tmp_path / "liar.sh"
        script.write_text('#!/bin/sh\necho "s SATISFIABLE"\necho "v -1 0"\n')
        script.chmod(0o755)
        with pytest.raises(InvalidModelError):
            solve_external(Cnf(1, [[1]]), [str(script)])


class TestSolveParallel:
    def test_contradiction_two_workers(self):
        assert solve_parallel(Cnf(1, [[1], [-1]]), 2).is_unsat

    def test_workers_validated(self):
        with pytest.raises(SatError):
            solve_parallel(Cnf(1, [[1]]), 3)

    @pytest.mark.parametrize("workers", [2, 4, 8])
    def test_equivalent_cone_unsat_at_every_width(self, workers):
        cnf = tseitin_encode(adder_pair_cone(5))
        assert solve_parallel(cnf, workers).is_unsat

    def test_satisfiable_model_valid_regardless_of_winner(self):
        rng = random.Random(3)
        for _ in range(10):
            cnf = random_cnf(rng, max_vars=10, max_clauses=25)
            verdict = solve_parallel(cnf, 4)
            if verdict.is_model:
                assert cnf.validate_model(verdict.model)

    def test_verdict_kind_matches_sequential(self):
        rng = random.Random(8)
        for _ in range(25):
            cnf = random_cnf(rng, max_vars=9, max_clauses=30)
            seq = solve(cnf)
            for workers in (2, 4):
                par = solve_parallel(cnf, workers)
                assert par.kind == seq.kind

    def test_cube_variable_selection_deterministic(self):
        cnf = Cnf(4, [[1, 2], [1, 3], [2, 3], [4]])
        assert cube_variables(cnf, 2) == [1, 2]  # occurrence ties break by index


class TestModelToAssignment:
    def test_and_vs_or_assignments(self):
        bld = AigBuilder(2)
        x = bld.and_(bld.pi(0), bld.pi(1))
        y = bld.or_(bld.pi(0), bld.pi(1))
        bld.add_output(x)
        bld.add_output(y)
        cone = miter_tfi_cones(bld.aig, x, y)
        verdict = solve(tseitin_encode(cone))
        assert verdict.is_model
        assignment = model_to_assignment(verdict.model, cone)
        assert assignment in ((1, 0), (0, 1))
        assert evaluate(cone.aig, assignment)[0] == 1

    def test_corrupted_corpus_counterexamples_evaluate_true(self):
        rng = random.Random(17)
        hits = 0
        for seed in range(12):
            base = mult_array(3)
            broken = corrupt_aig(base, seed=seed)
            miter = build_miter(base, broken)
            cone = extract_cone(miter, miter.outputs[0])
            verdict = solve(tseitin_encode(cone))
            assert verdict.is_model
            assignment = model_to_assignment(verdict.model, cone)
            assert evaluate(cone.aig, assignment)[0] == 1
            hits += 1
        assert hits == 12

    def test_constant_root_cone_is_unsat_not_reachable(self):
        aig = Aig(2)
        aig.add_output(FALSE)
        cone = extract_cone(aig, FALSE)
        assert solve(tseitin_encode(cone)).is_unsat
