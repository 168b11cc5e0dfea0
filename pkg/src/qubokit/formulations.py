"""QUBO builders for classic combinatorial problems, with decoders.

Every builder returns the model together with a :class:`Decoder` that maps
a QUBO bit vector back to the original problem: chosen items, original
objective value, and the list of violated constraints.  Decoders report
infeasibility; they never repair.

Multi-index variables are numbered row-major: in graph coloring variable
``node * K + color`` and in quadratic assignment ``facility * n + location``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, DomainError, QuboError
from .model import MAXIMIZE, MINIMIZE, QuboModel
from .penalties import (
    ConstrainedProblem,
    LinearConstraint,
    Penalty,
    PenaltyizedModel,
    _check_positive,
    assemble,
    known_penalty,
    reformulate,
    transformation1,
    transformation2,
)
from .polynomial import PseudoBooleanPolynomial, linear_form_squared


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with optional vertex weights."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        seen = set()
        norm = []
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise DomainError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n_vertices and 0 <= j < self.n_vertices):
                raise DimensionError(f"edge ({i}, {j}) has an endpoint outside 0..{self.n_vertices - 1}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise DomainError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != self.n_vertices:
                raise DimensionError(f"expected {self.n_vertices} vertex weights, got {len(weights)}")
            object.__setattr__(self, "weights", weights)

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)


Literal = tuple[int, bool]


@dataclass(frozen=True)
class CnfInstance:
    """2-CNF formula; a literal is ``(variable, negated)``."""

    n_vars: int
    clauses: tuple[tuple[Literal, Literal], ...]

    def __post_init__(self):
        clauses = []
        for k, clause in enumerate(self.clauses):
            if len(clause) != 2:
                raise DomainError(f"clause {k} has {len(clause)} literals, expected 2")
            (i, ni), (j, nj) = clause
            if i == j:
                raise DomainError(f"clause {k} repeats variable {i}")
            for v in (i, j):
                if not 0 <= v < self.n_vars:
                    raise DimensionError(f"clause {k} references variable {v}, n_vars={self.n_vars}")
            clauses.append(((int(i), bool(ni)), (int(j), bool(nj))))
        object.__setattr__(self, "clauses", tuple(clauses))

    @classmethod
    def from_signed(cls, n_vars: int, clauses: Sequence[Sequence[int]]) -> "CnfInstance":
        """Build from DIMACS-style signed 1-based literals (``-3`` is not x3)."""
        parsed = []
        for clause in clauses:
            if any(lit == 0 for lit in clause):
                raise DomainError("literal 0 is not allowed")
            parsed.append(tuple((abs(lit) - 1, lit < 0) for lit in clause))
        return cls(n_vars, tuple(parsed))


@dataclass(frozen=True)
class QapInstance:
    flow: np.ndarray
    distance: np.ndarray

    def __post_init__(self):
        F = np.asarray(self.flow, dtype=float)
        D = np.asarray(self.distance, dtype=float)
        if F.ndim != 2 or F.shape[0] != F.shape[1] or F.shape != D.shape:
            raise DomainError(f"flow {F.shape} and distance {D.shape} must be matching square matrices")
        object.__setattr__(self, "flow", F)
        object.__setattr__(self, "distance", D)

    @property
    def n(self) -> int:
        return self.flow.shape[0]


@dataclass
class DecodedSolution:
    kind: str
    bits: tuple[int, ...]
    objective: float
    feasible: bool
    violations: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)


_DECODERS: dict[str, Callable[["Decoder", list[int]], DecodedSolution]] = {}


def _decoder(kind: str):
    def register(fn):
        _DECODERS[kind] = fn
        return fn

    return register


@dataclass(frozen=True)
class Decoder:
    """Maps QUBO bit vectors back to an original-domain report.

    ``data`` holds the instance in JSON-compatible form so a decoder can be
    written next to a QUBO file and restored later.
    """

    kind: str
    original_n: int
    n_total: int
    data: Mapping[str, Any]

    def decode(self, bits: Sequence[int]) -> DecodedSolution:
        bits = [int(b) for b in bits]
        if len(bits) != self.n_total:
            raise DimensionError(f"expected {self.n_total} bits, got {len(bits)}")
        return _DECODERS[self.kind](self, bits)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "original_n": self.original_n, "n_total": self.n_total, "data": self.data}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "Decoder":
        if payload["kind"] not in _DECODERS:
            raise DomainError(f"unknown decoder kind {payload['kind']!r}")
        return cls(payload["kind"], int(payload["original_n"]), int(payload["n_total"]), payload["data"])


def poly_to_data(poly: PseudoBooleanPolynomial) -> list:
    return [[list(k), c] for k, c in poly.terms.items()]


def poly_from_data(n: int, data) -> PseudoBooleanPolynomial:
    return PseudoBooleanPolynomial.from_terms(n, [(tuple(k), c) for k, c in data])


def _unit_penalty(kind: str, variables: Sequence[int], n: int) -> PseudoBooleanPolynomial:
    terms, constant = known_penalty(kind, variables, 1.0)
    terms[()] = constant
    return PseudoBooleanPolynomial(n, terms)


# --------------------------------------------------------------------------
# Natural QUBO problems


def number_partitioning(numbers: Sequence[int]) -> tuple[QuboModel, Decoder, int]:
    """Two-way partition minimizing the squared sum difference.

    ``diff^2 = c^2 + 4 x^T Q x`` with ``c = sum(numbers)``; the returned
    model has zero offset and ``c^2`` is returned separately.
    """
    s = [int(v) for v in numbers]
    if not s:
        raise DomainError("number partitioning needs at least one number")
    if any(v <= 0 for v in s):
        raise DomainError("numbers must be positive integers")
    c = sum(s)
    arr = np.array(s, dtype=float)
    Q = np.outer(arr, arr)
    np.fill_diagonal(Q, arr * (arr - c))
    decoder = Decoder("number_partitioning", len(s), len(s), {"numbers": s})
    return QuboModel(Q, 0.0, MINIMIZE), decoder, c * c


@_decoder("number_partitioning")
def _decode_number_partitioning(dec: Decoder, bits: list[int]) -> DecodedSolution:
    s = dec.data["numbers"]
    first = [k for k, b in enumerate(bits) if b]
    second = [k for k, b in enumerate(bits) if not b]
    sum1 = sum(s[k] for k in first)
    sum2 = sum(s[k] for k in second)
    diff = abs(sum1 - sum2)
    details = {"subset1": first, "subset2": second, "sum1": sum1, "sum2": sum2, "diff_squared": diff * diff}
    return DecodedSolution(dec.kind, tuple(bits), float(diff), True, [], details)


def max_cut(graph: Graph) -> tuple[QuboModel, Decoder]:
    """Maximize the number of edges crossing a bipartition."""
    acc: dict = {}
    for i, j in graph.edges:
        acc[(i,)] = acc.get((i,), 0.0) + 1
        acc[(j,)] = acc.get((j,), 0.0) + 1
        acc[(i, j)] = acc.get((i, j), 0.0) - 2
    model = PseudoBooleanPolynomial(graph.n_vertices, acc).to_qubo(MAXIMIZE)
    data = {"n_vertices": graph.n_vertices, "edges": [list(e) for e in graph.edges]}
    return model, Decoder("max_cut", graph.n_vertices, graph.n_vertices, data)


@_decoder("max_cut")
def _decode_max_cut(dec: Decoder, bits: list[int]) -> DecodedSolution:
    cut = [e for e in dec.data["edges"] if bits[e[0]] != bits[e[1]]]
    details = {
        "side1": [v for v, b in enumerate(bits) if b],
        "side0": [v for v, b in enumerate(bits) if not b],
        "cut_edges": cut,
    }
    return DecodedSolution(dec.kind, tuple(bits), float(len(cut)), True, [], details)


# --------------------------------------------------------------------------
# Known-penalty problems


def min_vertex_cover(graph: Graph, P: float) -> tuple[PenaltyizedModel, Decoder]:
    """Minimum (weighted) vertex cover with ``P (1 - x_i - x_j + x_i x_j)`` per edge."""
    P = _check_positive(P)
    n = graph.n_vertices
    weights = graph.weights or (1.0,) * n
    objective = PseudoBooleanPolynomial(n, {(j,): w for j, w in enumerate(weights)})
    penalties = [Penalty(f"edge ({i}, {j})", P, _unit_penalty("at_least_one", (i, j), n)) for i, j in graph.edges]
    model = assemble(objective, penalties, n, MINIMIZE, P)
    data = {"n_vertices": n, "edges": [list(e) for e in graph.edges], "weights": list(weights)}
    return model, Decoder("min_vertex_cover", n, n, data)


@_decoder("min_vertex_cover")
def _decode_vertex_cover(dec: Decoder, bits: list[int]) -> DecodedSolution:
    cover = [v for v, b in enumerate(bits) if b]
    uncovered = [e for e in dec.data["edges"] if not (bits[e[0]] or bits[e[1]])]
    weight = sum(dec.data["weights"][v] for v in cover)
    violations = [f"edge ({i}, {j}) uncovered" for i, j in uncovered]
    details = {"cover": cover, "uncovered_edges": uncovered}
    return DecodedSolution(dec.kind, tuple(bits), float(weight), not uncovered, violations, details)


def _as_01_rows(A, n: int | None = None) -> list[list[int]]:
    rows = [[int(v) for v in row] for row in A]
    for r, row in enumerate(rows):
        if any(v not in (0, 1) for v in row):
            raise DomainError(f"row {r} has entries outside {{0, 1}}")
        if n is not None and len(row) != n:
            raise DimensionError(f"row {r} has {len(row)} entries, expected {n}")
    return rows


def set_packing(A, weights: Sequence[float], P: float) -> tuple[PenaltyizedModel, Decoder]:
    """Maximum-weight set packing: each row of ``A`` may hold at most one chosen column.

    Every pair inside a row's support is penalized by ``P x_i x_j``;
    pairs shared by several rows accumulate.
    """
    P = _check_positive(P)
    w = [float(v) for v in weights]
    n = len(w)
    rows = _as_01_rows(A, n)
    objective = PseudoBooleanPolynomial(n, {(j,): v for j, v in enumerate(w)})
    penalties = []
    for r, row in enumerate(rows):
        support = [j for j, v in enumerate(row) if v]
        acc: dict = {}
        for i, j in combinations(support, 2):
            acc.update(transformation2(i, j, 1.0))
        penalties.append(Penalty(f"row {r}", P, PseudoBooleanPolynomial(n, acc)))
    model = assemble(objective, penalties, n, MAXIMIZE, P)
    return model, Decoder("set_packing", n, n, {"rows": rows, "weights": w})


@_decoder("set_packing")
def _decode_set_packing(dec: Decoder, bits: list[int]) -> DecodedSolution:
    chosen = [j for j, b in enumerate(bits) if b]
    violations = []
    for r, row in enumerate(dec.data["rows"]):
        count = sum(row[j] for j in chosen)
        if count > 1:
            violations.append(f"row {r} packs {count} chosen sets")
    value = sum(dec.data["weights"][j] for j in chosen)
    return DecodedSolution(dec.kind, tuple(bits), float(value), not violations, violations, {"chosen": chosen})


def _clause_penalty(clause: tuple[Literal, Literal]) -> dict:
    # (1 - l_i)(1 - l_j): a plain literal contributes (1 - x), a negated one x.
    factors = []
    for var, negated in clause:
        factors.append({(var,): 1.0} if negated else {(): 1.0, (var,): -1.0})
    acc: dict = {}
    for ka, ca in factors[0].items():
        for kb, cb in factors[1].items():
            key = tuple(sorted(set(ka + kb)))
            acc[key] = acc.get(key, 0.0) + ca * cb
    return acc


def max_2sat(instance: CnfInstance) -> tuple[QuboModel, Decoder]:
    """Minimize the number of unsatisfied 2-clauses.

    Each clause adds a penalty equal to one exactly when both of its
    literals are false.  The model size depends only on ``n_vars``.
    """
    acc: dict = {}
    for clause in instance.clauses:
        for key, c in _clause_penalty(clause).items():
            acc[key] = acc.get(key, 0.0) + c
    model = PseudoBooleanPolynomial(instance.n_vars, acc).to_qubo(MINIMIZE)
    clauses = [[[v, neg] for v, neg in clause] for clause in instance.clauses]
    decoder = Decoder("max_2sat", instance.n_vars, instance.n_vars, {"n_vars": instance.n_vars, "clauses": clauses})
    return model, decoder


@_decoder("max_2sat")
def _decode_max_2sat(dec: Decoder, bits: list[int]) -> DecodedSolution:
    satisfied, unsatisfied = [], []
    for k, clause in enumerate(dec.data["clauses"]):
        if any(bits[v] != neg for v, neg in clause):
            satisfied.append(k)
        else:
            unsatisfied.append(k)
    details = {"satisfied": satisfied, "unsatisfied": unsatisfied}
    return DecodedSolution(dec.kind, tuple(bits), float(len(unsatisfied)), True, [], details)


# --------------------------------------------------------------------------
# Squared-penalty problems


def set_partitioning_direct(costs: Sequence[float], A, P: float) -> QuboModel:
    """Closed-form set partitioning QUBO.

    ``q_ii = c_i - P k_i`` with ``k_i`` the column count of ``A`` and
    ``q_ij = P r_ij`` with ``r_ij`` the number of rows holding both
    ``i`` and ``j``; the constant is ``m P``.
    """
    P = _check_positive(P)
    M = np.array(_as_01_rows(A, len(costs)), dtype=float).reshape(-1, len(costs))
    shared = M.T @ M
    Q = P * shared
    np.fill_diagonal(Q, np.asarray(costs, dtype=float) - P * M.sum(axis=0))
    return QuboModel(Q, M.shape[0] * P, MINIMIZE)


def set_partitioning(costs: Sequence[float], A, P: float) -> tuple[PenaltyizedModel, Decoder]:
    """Minimum-cost exact cover: every row of ``A`` covered exactly once."""
    c = [float(v) for v in costs]
    n = len(c)
    rows = _as_01_rows(A, n)
    constraints = [LinearConstraint.dense(row, "eq", 1) for row in rows]
    model = transformation1(ConstrainedProblem.linear(c, constraints), P)
    direct = set_partitioning_direct(c, rows, P)
    if not (np.array_equal(model.qubo.Q, direct.Q) and model.qubo.offset == direct.offset):
        raise QuboError("set partitioning: squared-penalty and closed-form matrices disagree")
    return model, Decoder("set_partitioning", n, n, {"costs": c, "rows": rows})


@_decoder("set_partitioning")
def _decode_set_partitioning(dec: Decoder, bits: list[int]) -> DecodedSolution:
    chosen = [j for j, b in enumerate(bits) if b]
    violations = []
    for r, row in enumerate(dec.data["rows"]):
        count = sum(row[j] for j in chosen)
        if count != 1:
            violations.append(f"row {r} covered {count} times")
    cost = sum(dec.data["costs"][j] for j in chosen)
    return DecodedSolution(dec.kind, tuple(bits), float(cost), not violations, violations, {"chosen": chosen})


def graph_coloring(graph: Graph, K: int, P: float) -> tuple[PenaltyizedModel, Decoder]:
    """Feasible K-coloring.

    One-color-per-node equalities get the squared penalty; for each edge and
    color the pair ``x_{i,p} + x_{j,p} <= 1`` gets ``P x x``.  A coloring is
    proper exactly when ``x^T Q x == -n P`` (value zero with the offset).
    """
    if K < 1:
        raise DomainError("need at least one color")
    P = _check_positive(P)
    n = graph.n_vertices
    N = n * K
    penalties = []
    for v in range(n):
        coeffs = {v * K + p: 1.0 for p in range(K)}
        penalties.append(Penalty(f"node {v}", P, linear_form_squared(coeffs, 1.0, N)))
    for i, j in graph.edges:
        for p in range(K):
            terms = transformation2(i * K + p, j * K + p, 1.0)
            penalties.append(Penalty(f"edge ({i}, {j}) color {p}", P, PseudoBooleanPolynomial(N, terms)))
    model = assemble(PseudoBooleanPolynomial(N, {}), penalties, N, MINIMIZE, P)
    data = {"n_vertices": n, "edges": [list(e) for e in graph.edges], "colors": K}
    return model, Decoder("graph_coloring", N, N, data)


@_decoder("graph_coloring")
def _decode_graph_coloring(dec: Decoder, bits: list[int]) -> DecodedSolution:
    K = dec.data["colors"]
    n = dec.data["n_vertices"]
    colors: dict[int, list[int]] = {v: [p for p in range(K) if bits[v * K + p]] for v in range(n)}
    violations = []
    for v, cs in colors.items():
        if not cs:
            violations.append(f"node {v} uncolored")
        elif len(cs) > 1:
            violations.append(f"node {v} has colors {cs}")
    for i, j in dec.data["edges"]:
        for p in sorted(set(colors[i]) & set(colors[j])):
            violations.append(f"edge ({i}, {j}) shares color {p}")
    coloring = {v: cs[0] for v, cs in colors.items() if len(cs) == 1}
    details = {"coloring": coloring, "colors_used": sorted(set(coloring.values()))}
    return DecodedSolution(dec.kind, tuple(bits), 0.0, not violations, violations, details)


def _constraints_data(constraints: Sequence[LinearConstraint]) -> list:
    return [{"coeffs": [list(t) for t in c.coeffs], "relation": c.relation, "rhs": c.rhs} for c in constraints]


def _constraints_from_data(data) -> list[LinearConstraint]:
    return [LinearConstraint(tuple((int(j), a) for j, a in c["coeffs"]), c["relation"], c["rhs"]) for c in data]


def _slack_violations(constraints, slack_map, bits) -> list[str]:
    """Original-constraint violations plus slack bits that do not close the gap."""
    violations = []
    slack = {k: bitlist for k, bitlist in slack_map}
    for k, con in enumerate(constraints):
        if not con.is_satisfied(bits):
            violations.append(f"constraint {k} violated (residual {con.residual(bits):g})")
        elif k in slack:
            s = sum(w * bits[idx] for idx, w in slack[k])
            gap = con.rhs - con.activity(bits) if con.relation == "le" else con.activity(bits) - con.rhs
            if s != gap:
                violations.append(f"constraint {k} slack bits encode {s}, gap is {gap:g}")
    return violations


def _objective_model(objective, n: int, sense: str) -> QuboModel:
    arr = np.asarray(objective, dtype=float)
    if arr.ndim == 1:
        if arr.size != n:
            raise DimensionError(f"objective has {arr.size} coefficients, expected {n}")
        arr = np.diag(arr)
    return QuboModel(arr, 0.0, sense)


def general_binary_program(
    objective,
    constraints: Sequence[LinearConstraint],
    P=None,
    slack_overrides: Mapping[int, int] | None = None,
    sense: str = MINIMIZE,
    n: int | None = None,
) -> tuple[PenaltyizedModel, Decoder]:
    """Linear or quadratic 0/1 program with mixed linear constraints.

    ``objective`` is a coefficient vector or an ``n x n`` matrix.
    Inequalities receive binary slack (``slack_overrides`` maps a constraint
    position to a slack upper bound); all equalities are then penalized.
    """
    if n is None:
        n = np.asarray(objective).shape[0]
    problem = ConstrainedProblem(_objective_model(objective, n, sense), tuple(constraints))
    model = reformulate(problem, P, slack_overrides)
    data = {
        "sense": sense,
        "objective": poly_to_data(model.objective),
        "constraints": _constraints_data(problem.constraints),
        "slack_map": [[k, [list(b) for b in bits]] for k, bits in model.slack_map],
    }
    return model, Decoder("binary_program", n, model.qubo.n, data)


@_decoder("binary_program")
def _decode_binary_program(dec: Decoder, bits: list[int]) -> DecodedSolution:
    x = bits[: dec.original_n]
    objective = poly_from_data(dec.original_n, dec.data["objective"]).evaluate(x)
    constraints = _constraints_from_data(dec.data["constraints"])
    violations = _slack_violations(constraints, dec.data["slack_map"], bits)
    residuals = [con.residual(x) for con in constraints]
    details = {"x": x, "slack": bits[dec.original_n:], "residuals": residuals}
    return DecodedSolution(dec.kind, tuple(x), objective, not violations, violations, details)


def quadratic_assignment(instance: QapInstance, P: float) -> tuple[PenaltyizedModel, Decoder]:
    """Quadratic assignment with ``x[i * n + k] = 1`` placing facility i at location k.

    The pair ``{(i, k), (j, l)}`` costs ``f_ij d_kl + f_ji d_lk``; pairs
    with ``i == j`` or ``k == l`` are left out since the assignment
    constraints forbid them.
    """
    n = instance.n
    F, D = instance.flow, instance.distance
    acc: dict = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(n):
                for l in range(n):
                    if k == l or F[i, j] * D[k, l] == 0:
                        continue
                    key = tuple(sorted((i * n + k, j * n + l)))
                    acc[key] = acc.get(key, 0.0) + F[i, j] * D[k, l]
    cost = np.zeros((n * n, n * n))
    for (a, b), c in acc.items():
        cost[a, b] = cost[b, a] = c / 2
    rows = [LinearConstraint(tuple((i * n + k, 1.0) for k in range(n)), "eq", 1) for i in range(n)]
    cols = [LinearConstraint(tuple((i * n + k, 1.0) for i in range(n)), "eq", 1) for k in range(n)]
    model = transformation1(ConstrainedProblem(QuboModel(cost), tuple(rows + cols)), P)
    labels = [f"facility {i}" for i in range(n)] + [f"location {k}" for k in range(n)]
    model = PenaltyizedModel(
        model.qubo,
        model.penalty,
        model.objective,
        tuple(Penalty(lab, p.weight, p.terms) for lab, p in zip(labels, model.penalties)),
        model.original_n,
        constraints=model.constraints,
    )
    data = {"flow": F.tolist(), "distance": D.tolist(), "objective": poly_to_data(model.objective)}
    return model, Decoder("qap", n * n, n * n, data)


@_decoder("qap")
def _decode_qap(dec: Decoder, bits: list[int]) -> DecodedSolution:
    n = len(dec.data["flow"])
    X = np.array(bits).reshape(n, n)
    violations = [f"facility {i} placed {int(s)} times" for i, s in enumerate(X.sum(axis=1)) if s != 1]
    violations += [f"location {k} used {int(s)} times" for k, s in enumerate(X.sum(axis=0)) if s != 1]
    objective = poly_from_data(dec.original_n, dec.data["objective"]).evaluate(bits)
    details: dict[str, Any] = {}
    if not violations:
        details["permutation"] = [int(np.argmax(X[i])) for i in range(n)]
    return DecodedSolution(dec.kind, tuple(bits), objective, not violations, violations, details)


def quadratic_knapsack(
    values, requirements: Sequence[int], budget: int, P=None, slack_bound: int | None = None
) -> tuple[PenaltyizedModel, Decoder]:
    """Maximize ``x^T V x`` subject to ``sum_j a_j x_j <= b``.

    ``values`` is usually upper triangular: ``V[i][i]`` is the stand-alone
    value of project i and ``V[i][j]`` the pair bonus.  A full matrix is
    read as ``x^T V x``, so a mirrored pair counts twice.
    """
    V = np.asarray(values, dtype=float)
    n = len(requirements)
    if V.shape != (n, n):
        raise DimensionError(f"value matrix is {V.shape}, expected ({n}, {n})")
    constraint = LinearConstraint.dense(requirements, "le", budget)
    overrides = None if slack_bound is None else {0: slack_bound}
    model, _ = general_binary_program(V, [constraint], P, overrides, sense=MAXIMIZE)
    data = {
        "objective": poly_to_data(model.objective),
        "requirements": [float(a) for a in requirements],
        "budget": float(budget),
        "constraints": _constraints_data([constraint]),
        "slack_map": [[k, [list(b) for b in bits]] for k, bits in model.slack_map],
    }
    return model, Decoder("quadratic_knapsack", n, model.qubo.n, data)


@_decoder("quadratic_knapsack")
def _decode_knapsack(dec: Decoder, bits: list[int]) -> DecodedSolution:
    x = bits[: dec.original_n]
    value = poly_from_data(dec.original_n, dec.data["objective"]).evaluate(x)
    constraints = _constraints_from_data(dec.data["constraints"])
    violations = _slack_violations(constraints, dec.data["slack_map"], bits)
    usage = sum(a * b for a, b in zip(dec.data["requirements"], x))
    details = {"chosen": [j for j, b in enumerate(x) if b], "usage": usage, "budget": dec.data["budget"]}
    return DecodedSolution(dec.kind, tuple(x), value, not violations, violations, details)


@_decoder("polynomial")
def _decode_polynomial(dec: Decoder, bits: list[int]) -> DecodedSolution:
    x = bits[: dec.original_n]
    value = poly_from_data(dec.original_n, dec.data["objective"]).evaluate(x)
    violations = []
    for y, i, j in dec.data["substitutions"]:
        if bits[y] != bits[i] * bits[j]:
            violations.append(f"auxiliary {y} != x{i} * x{j}")
    return DecodedSolution(dec.kind, tuple(x), value, not violations, violations, {"auxiliary": bits[dec.original_n:]})


def polynomial_decoder(poly: PseudoBooleanPolynomial, records, n_total: int) -> Decoder:
    data = {
        "objective": poly_to_data(poly),
        "substitutions": [[r.new_var, r.pair[0], r.pair[1]] for r in records],
    }
    return Decoder("polynomial", poly.n, n_total, data)
