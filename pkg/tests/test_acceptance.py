"""Acceptance suite: one test per criterion, each summarized at the end of the run.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section printed after the results.
"""

import io as _stdio
from collections import Counter
from itertools import product
from pathlib import Path

import numpy as np
import pytest

from golden_data import (
    CLAUSES,
    COLORING_EDGES,
    COLORING_Q,
    COVER_Q,
    CUT_EDGES,
    CUT_Q,
    DISTANCE,
    FLOW,
    KNAPSACK_Q,
    KNAPSACK_V,
    NUMBER_Q,
    NUMBERS,
    PACKING_Q,
    PARTITION_COSTS,
    PARTITION_Q,
    PARTITION_ROWS,
    PROGRAM_CONSTRAINTS,
    PROGRAM_Q,
    QAP_Q,
    SAT_Q,
    SMALL_Q,
)
from oracles import poly_value, random_symmetric
from qubokit import cli
from qubokit.formulations import (
    CnfInstance,
    Graph,
    QapInstance,
    general_binary_program,
    graph_coloring,
    max_2sat,
    max_cut,
    min_vertex_cover,
    number_partitioning,
    quadratic_assignment,
    quadratic_knapsack,
    set_packing,
    set_partitioning,
)
from qubokit.io import read_ising, read_qubo, write_ising, write_qubo
from qubokit.model import QuboModel, ising_to_qubo, qubo_to_ising
from qubokit.penalties import LinearConstraint
from qubokit.polynomial import PseudoBooleanPolynomial
from qubokit.reduction import penalty_gadget_check, poly_to_qubo, quadratize
from qubokit.solve import TabuParams, exact_optima, exact_solve, flip_delta, gray_code_values, tabu_solve

GOLDEN = Path(__file__).parent / "golden"
TOL = 1e-9


@pytest.fixture
def criterion(record_property):
    def declare(number, title):
        record_property("criterion", number)
        record_property("title", title)

        def note(text):
            print(text)
            record_property("note", text)

        return note

    return declare


def all_bits(n):
    return ((np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(float)


def table_values(Q, offset, X):
    # Row-wise x^T Q x for a stack of assignments.
    return np.einsum("ki,ij,kj->k", X, np.asarray(Q, dtype=float), X) + offset


def built_examples():
    """(name, qubo, decoder) for the ten worked examples, from the test-side data."""
    cut = Graph(5, CUT_EDGES)
    out = []
    model, decoder, _ = number_partitioning(NUMBERS)
    out.append(("number_partitioning", model, decoder))
    out.append(("max_cut", *max_cut(cut)))
    out.append(("min_vertex_cover", *_penalized(min_vertex_cover(cut, 8))))
    out.append(("set_packing", *_penalized(set_packing([[1, 0, 1, 1], [1, 1, 0, 0]], [1, 1, 1, 1], 6))))
    out.append(("max_2sat", *max_2sat(CnfInstance.from_signed(4, CLAUSES))))
    out.append(("set_partitioning", *_penalized(set_partitioning(PARTITION_COSTS, PARTITION_ROWS, 10))))
    out.append(("graph_coloring", *_penalized(graph_coloring(Graph(5, COLORING_EDGES), 3, 4))))
    out.append((
        "binary_program",
        *_penalized(general_binary_program([6, 4, 8, 5, 5], PROGRAM_CONSTRAINTS, 10, {0: 3, 2: 6}, sense="max")),
    ))
    out.append(("qap", *_penalized(quadratic_assignment(QapInstance(FLOW, DISTANCE), 200))))
    out.append((
        "quadratic_knapsack",
        *_penalized(quadratic_knapsack(KNAPSACK_V, [8, 6, 5, 3], 16, 10, slack_bound=3)),
    ))
    return out


def _penalized(pair):
    model, decoder = pair
    return model.qubo, decoder


def test_criterion_1_golden_matrices(criterion):
    note = criterion(1, "golden matrices and offsets, exact equality")
    expected = {
        "number_partitioning": (NUMBER_Q, 0),
        "max_cut": (CUT_Q, 0),
        "min_vertex_cover": (COVER_Q, 48),
        "set_packing": (PACKING_Q, 0),
        "max_2sat": (SAT_Q, 3),
        "set_partitioning": (PARTITION_Q, 40),
        "graph_coloring": (COLORING_Q, 20),
        "binary_program": (PROGRAM_Q, -900),
        "qap": (QAP_Q, 1200),
        "quadratic_knapsack": (KNAPSACK_Q, -2560),
    }
    small = PseudoBooleanPolynomial(
        4, {(0,): -5, (1,): -3, (2,): -8, (3,): -6, (0, 1): 4, (0, 2): 8, (1, 2): 2, (2, 3): 10}
    )
    mismatches = []
    if not np.array_equal(poly_to_qubo(small).Q, np.array(SMALL_Q, dtype=float)):
        mismatches.append("small expression")
    for name, qubo, _ in built_examples():
        Q, offset = expected[name]
        if not (np.array_equal(qubo.Q, np.array(Q, dtype=float)) and qubo.is_symmetric() and qubo.offset == offset):
            mismatches.append(name)
    note(f"11 matrices checked, mismatches: {mismatches or 'none'}")
    assert not mismatches


def test_criterion_2_golden_optima(criterion):
    note = criterion(2, "golden optima via exact_solve, listed bit vectors among optima")
    listed = {
        "number_partitioning": (0, 0, 0, 1, 1, 0, 0, 1),
        "max_cut": (0, 1, 1, 0, 0),
        "min_vertex_cover": (0, 1, 1, 0, 1),
        "set_packing": (0, 1, 1, 0),
        "max_2sat": (0, 0, 0, 1),
        "set_partitioning": (1, 0, 0, 0, 1, 0),
        "graph_coloring": tuple(int(k in (1, 3, 8, 10, 14)) for k in range(15)),
        "binary_program": (1, 0, 0, 1, 1, 0, 0, 0, 1, 1),
        "qap": (1, 0, 0, 0, 1, 0, 0, 0, 1),
        "quadratic_knapsack": (1, 0, 1, 1, 0, 0),
    }
    failures = []
    for name, qubo, decoder in built_examples():
        sol = exact_solve(qubo)
        value, optima = exact_optima(qubo)
        decoded = decoder.decode(sol.bits)
        quadratic = sol.value - qubo.offset
        checks = {
            "number_partitioning": quadratic == -6889
            and decoded.details["sum1"] == decoded.details["sum2"] == 83,
            "max_cut": sol.value == 5,
            "min_vertex_cover": quadratic == -45 and decoded.objective == 3,
            "set_packing": sol.value == 2,
            "max_2sat": sol.value == 1 and decoded.objective == 1 and len(CLAUSES) == 12,
            "set_partitioning": decoded.objective == 6 and sol.bits[0] == sol.bits[4] == 1,
            "graph_coloring": quadratic == -20 and decoded.feasible,
            "binary_program": quadratic == 916 and decoded.objective == 16,
            "qap": quadratic == -982 and decoded.objective == 218,
            "quadratic_knapsack": quadratic == 2588 and decoded.objective == 28,
        }
        ok = checks[name] and decoded.feasible and value == sol.value and listed[name] in optima
        if not ok:
            failures.append(name)
    note(f"10 examples solved, failures: {failures or 'none'}")
    assert not failures


def _random_constrained(rng):
    n = int(rng.integers(2, 11))
    if rng.random() < 0.5:
        objective = rng.integers(-6, 7, n)
    else:
        objective = rng.integers(-4, 5, (n, n))
    rows = []
    for _ in range(int(rng.integers(1, 4))):
        coeffs = rng.integers(-1, 4, n)
        relation = str(rng.choice(["eq", "le", "ge"]))
        rhs = int(rng.integers(0, max(1, int(coeffs.clip(0).sum())) + 1))
        rows.append((coeffs, relation, rhs))
    sense = str(rng.choice(["min", "max"]))
    return n, objective, rows, sense


def _constrained_optimum(n, objective, rows, sense):
    X = all_bits(n)
    feasible = np.ones(len(X), dtype=bool)
    for coeffs, relation, rhs in rows:
        activity = X @ coeffs
        feasible &= {"eq": activity == rhs, "le": activity <= rhs, "ge": activity >= rhs}[relation]
    if not feasible.any():
        return None
    obj = np.asarray(objective, dtype=float)
    values = X @ obj if obj.ndim == 1 else table_values(obj, 0.0, X)
    values = values[feasible]
    return values.min() if sense == "min" else values.max()


def test_criterion_3_penalty_equivalence(criterion):
    note = criterion(3, "squared-penalty model with suggest_penalty matches brute force on 200 instances")
    rng = np.random.default_rng(2024)
    checked, skipped_infeasible, skipped_large, failures = 0, 0, 0, 0
    while checked < 200:
        n, objective, rows, sense = _random_constrained(rng)
        best = _constrained_optimum(n, objective, rows, sense)
        if best is None:
            skipped_infeasible += 1
            continue
        constraints = [LinearConstraint.dense(*row) for row in rows]
        model, decoder = general_binary_program(objective, constraints, None, sense=sense, n=n)
        if model.qubo.n > 22:
            skipped_large += 1
            continue
        decoded = decoder.decode(exact_solve(model.qubo).bits)
        if not (decoded.feasible and decoded.objective == best):
            failures += 1
        checked += 1
    note(
        f"{checked} instances, {failures} failures "
        f"(regenerated {skipped_infeasible} infeasible and {skipped_large} over 22 variables)"
    )
    assert failures == 0


def test_criterion_4_ising_round_trip(criterion):
    note = criterion(4, "QUBO -> Ising -> QUBO preserves values on 100 random models")
    rng = np.random.default_rng(4)
    worst_round, worst_pair = 0.0, 0.0
    for k in range(100):
        n = 1 + k % 10
        Q = rng.normal(scale=5, size=(n, n))
        if k % 2:
            Q = np.round(Q)
        model = QuboModel(Q, float(rng.normal()))
        ising = qubo_to_ising(model)
        back = ising_to_qubo(ising)
        X = all_bits(n)
        direct = table_values(Q, model.offset, X)
        S = 2 * X - 1
        energies = S @ ising.h + np.einsum("ki,ij,kj->k", S, ising.J, S) + ising.offset
        worst_round = max(worst_round, float(np.abs(table_values(back.Q, back.offset, X) - direct).max()))
        worst_pair = max(worst_pair, float(np.abs(energies - direct).max()))
    note(f"max round-trip error {worst_round:.2e}, max x/s energy error {worst_pair:.2e}")
    assert worst_round <= TOL and worst_pair <= TOL


def _random_high_degree(rng):
    n = int(rng.integers(3, 7))
    degree = int(rng.integers(3, min(4, n) + 1))
    terms = {}
    for _ in range(int(rng.integers(2, 10))):
        k = int(rng.integers(0, degree + 1))
        mono = tuple(sorted(rng.choice(n, k, replace=False).tolist()))
        terms[mono] = terms.get(mono, 0) + int(rng.integers(-9, 10))
    top = tuple(sorted(rng.choice(n, degree, replace=False).tolist()))
    terms[top] = terms.get(top, 0) + int(rng.choice([-5, 5]))
    if terms[top] == 0:
        terms[top] = 5
    return PseudoBooleanPolynomial(n, terms)


def test_criterion_5_quadratization(criterion):
    note = criterion(5, "quadratized minimum equals original minimum on 100 polynomials; gadget zero set")
    rng = np.random.default_rng(5)
    failures, degrees = 0, Counter()
    for _ in range(100):
        poly = _random_high_degree(rng)
        degrees[poly.degree] += 1
        reduced, _ = quadratize(poly, 1 + poly.abs_coefficient_sum())
        original = min(poly_value(poly.terms, x) for x in product((0, 1), repeat=poly.n))
        extended = min(poly_value(reduced.terms, x) for x in product((0, 1), repeat=reduced.n))
        failures += reduced.degree > 2 or original != extended
    gadget_ok = True
    for P in (1, 3.5, 100):
        values = [penalty_gadget_check(a, b, y, P) for a, b, y in product((0, 1), repeat=3)]
        zero_set = all((v == 0) == (y == a * b) for v, (a, b, y) in zip(values, product((0, 1), repeat=3)))
        gadget_ok &= zero_set and Counter(values) == Counter([0, 0, 0, 0, P, P, P, 3 * P])
    note(f"100 polynomials (degree 3: {degrees[3]}, degree 4: {degrees[4]}), {failures} failures; gadget ok: {gadget_ok}")
    assert failures == 0 and gadget_ok


def test_criterion_6_flip_delta_and_gray_code(criterion):
    note = criterion(6, "flip_delta equals re-evaluation on 1000 triples; Gray-code scan equals naive scan")
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        Q = rng.normal(scale=3, size=(n, n))
        Q = (Q + Q.T) / 2
        model = QuboModel(Q)
        x = rng.integers(0, 2, n).astype(float)
        j = int(rng.integers(0, n))
        y = x.copy()
        y[j] = 1 - y[j]
        expected = y @ Q @ y - x @ Q @ x
        worst = max(worst, abs(flip_delta(model, x, j) - expected))
    gray_ok = True
    for n in range(1, 13):
        Q = rng.integers(-9, 10, (n, n)).astype(float)
        naive = {tuple(int(b) for b in x): v for x, v in zip(all_bits(n), table_values(Q, 1.0, all_bits(n)))}
        walked = dict(gray_code_values(QuboModel(Q, 1.0)))
        gray_ok &= walked == naive
    note(f"max flip_delta error {worst:.2e}; Gray code matches for n = 1..12: {gray_ok}")
    assert worst <= TOL and gray_ok


# A fixed tenure of 7 exceeds n on the smallest examples; the warning is expected there.
@pytest.mark.filterwarnings("ignore:tenure 7")
def test_criterion_7_tabu_quality(criterion):
    note = criterion(7, "tabu with defaults matches every worked example; never beats exact")
    params = TabuParams(tenure=7, max_iterations=10_000, restarts=4, seed=1)
    misses, better_than_exact = [], 0
    for name, qubo, _ in built_examples():
        tabu = tabu_solve(qubo, params)
        exact = exact_solve(qubo)
        if tabu.value != exact.value:
            misses.append(name)
        sign = 1 if qubo.sense == "min" else -1
        better_than_exact += sign * tabu.value < sign * exact.value
    rng = np.random.default_rng(7)
    hits = 0
    for _ in range(50):
        qubo = QuboModel(random_symmetric(rng, 15, -50, 50))
        tabu, exact = tabu_solve(qubo, params), exact_solve(qubo)
        hits += tabu.value == exact.value
        better_than_exact += tabu.value < exact.value
    note(f"worked examples matched: {10 - len(misses)}/10, misses: {misses or 'none'}")
    note(f"random n=15 soft target (>= 90%): {hits}/50 = {2 * hits}% {'met' if hits >= 45 else 'NOT met'}")
    note(f"tabu better than exact: {better_than_exact} times")
    assert not misses and better_than_exact == 0


def _demo(*argv):
    out = _stdio.StringIO()
    code = cli.main(["demo", *argv], out=out)
    return code, out.getvalue().encode()


def test_criterion_8_determinism(criterion):
    note = criterion(8, "demo and tabu_solve are byte-identical across runs and worker counts")
    exact_runs = {_demo("--workers", str(w)) for w in (1, 1, 2, 4)}
    tabu_runs = {_demo("--method", "tabu", "--workers", str(w)) for w in (1, 4)}
    rng = np.random.default_rng(8)
    model = QuboModel(random_symmetric(rng, 20))
    params = TabuParams(max_iterations=2000, seed=99)
    solutions = {tabu_solve(model, params) for _ in range(3)}
    big = QuboModel(random_symmetric(rng, 18))
    exact = {exact_solve(big, workers=w) for w in (1, 2, 3, 8)}
    note(
        f"distinct outputs: exact demo {len(exact_runs)}, tabu demo {len(tabu_runs)}, "
        f"tabu_solve {len(solutions)}, exact_solve over workers {len(exact)}"
    )
    assert len(exact_runs) == len(tabu_runs) == len(solutions) == len(exact) == 1
    assert all(code == 0 for code, _ in exact_runs | tabu_runs)


def test_criterion_9_serialization(criterion):
    note = criterion(9, "read(write(M)) evaluates like M for n <= 12; write(read(f)) is byte-stable")
    rng = np.random.default_rng(9)
    worst = 0.0
    for k in range(60):
        n = 1 + k % 12
        Q = rng.normal(scale=10, size=(n, n)) * (rng.random((n, n)) < 0.7)
        if k % 3 == 0:
            Q = np.round(Q)
        model = QuboModel(Q, float(rng.normal()), "max" if k % 2 else "min")
        back = read_qubo(write_qubo(model))
        X = all_bits(n)
        worst = max(worst, float(np.abs(table_values(back.Q, back.offset, X) - table_values(Q, model.offset, X)).max()))
        assert back.sense == model.sense
    files = {p.name: p.read_text() for p in sorted(GOLDEN.glob("*.qubo"))}
    for name, qubo, _ in built_examples():
        files[f"{name}.qubo"] = write_qubo(qubo)
        files[f"{name}.ising"] = write_ising(qubo_to_ising(qubo))
    unstable = [
        name for name, text in files.items()
        if (write_ising(read_ising(text)) if name.endswith(".ising") else write_qubo(read_qubo(text))) != text
    ]
    note(f"max evaluation error {worst:.2e} over 60 models; {len(files)} files, unstable: {unstable or 'none'}")
    assert worst <= TOL and not unstable
