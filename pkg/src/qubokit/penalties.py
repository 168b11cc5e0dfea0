"""Penalty reformulation of constrained 0/1 programs.

Constraints are turned into quadratic penalty polynomials that vanish on
feasible points and are at least ``P`` elsewhere.  Three routes exist:

* the fixed table of known two- and three-variable penalties,
* the squared-residual penalty ``P (a.x - b)^2`` for linear equalities,
* the pairwise product penalty ``P x_i x_j`` for ``x_i + x_j <= 1``.

Inequalities with integer data are turned into equalities first by adding
slack variables with power-of-two weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ArityError, DimensionError, DomainError, InfeasibleError, PreconditionError
from .model import MAXIMIZE, MINIMIZE, QuboModel
from .polynomial import Monomial, PseudoBooleanPolynomial, linear_form_squared

EQ, LE, GE = "eq", "le", "ge"
RELATIONS = {"=": EQ, "==": EQ, "eq": EQ, "<=": LE, "le": LE, ">=": GE, "ge": GE}

# Known penalty table: name -> (arity, unscaled terms over local slots, constant).
_KNOWN = {
    "at_most_one": (2, {(0, 1): 1.0}, 0.0),
    "at_least_one": (2, {(0,): -1.0, (1,): -1.0, (0, 1): 1.0}, 1.0),
    "exactly_one": (2, {(0,): -1.0, (1,): -1.0, (0, 1): 2.0}, 1.0),
    "implies": (2, {(0,): 1.0, (0, 1): -1.0}, 0.0),
    "at_most_one_of_three": (3, {(0, 1): 1.0, (0, 2): 1.0, (1, 2): 1.0}, 0.0),
    "equal": (2, {(0,): 1.0, (1,): 1.0, (0, 1): -2.0}, 0.0),
}
_KNOWN_ALIASES = {
    "x+y<=1": "at_most_one",
    "x+y>=1": "at_least_one",
    "x+y=1": "exactly_one",
    "x<=y": "implies",
    "x1+x2+x3<=1": "at_most_one_of_three",
    "x=y": "equal",
}
KNOWN_CONSTRAINTS = tuple(_KNOWN)


def _check_positive(P: float) -> float:
    P = float(P)
    if not (P > 0 and math.isfinite(P)):
        raise DomainError(f"penalty must be a positive finite number, got {P}")
    return P


def known_penalty(kind: str, variables: Sequence[int], P: float) -> tuple[dict[Monomial, float], float]:
    """Terms of a tabulated penalty, scaled by ``P``.

    Parameters
    ----------
    kind : str
        One of :data:`KNOWN_CONSTRAINTS`, or the constraint written out
        (``"x+y<=1"``, ``"x+y>=1"``, ``"x+y=1"``, ``"x<=y"``,
        ``"x1+x2+x3<=1"``, ``"x=y"``).
    variables : sequence of int
        Variable indices filling the row's slots in order.
    P : float
        Positive penalty weight.

    Returns
    -------
    terms : dict
        Linear and quadratic terms keyed by sorted index tuples.
    constant : float
        Constant part, to be accumulated into a model offset.
    """
    name = _KNOWN_ALIASES.get(kind.replace(" ", ""), kind)
    if name not in _KNOWN:
        raise DomainError(f"unknown penalty kind {kind!r}")
    arity, local_terms, constant = _KNOWN[name]
    if len(variables) != arity:
        raise ArityError(f"{name} takes {arity} variables, got {len(variables)}")
    if len(set(variables)) != arity:
        raise ArityError(f"{name} needs distinct variables, got {tuple(variables)}")
    P = _check_positive(P)
    terms: dict[Monomial, float] = {}
    for slots, coeff in local_terms.items():
        mono = tuple(sorted(int(variables[s]) for s in slots))
        terms[mono] = terms.get(mono, 0.0) + P * coeff
    return terms, P * constant


def transformation2(i: int, j: int, P: float) -> dict[Monomial, float]:
    """Pairwise penalty ``P x_i x_j`` enforcing ``x_i + x_j <= 1``."""
    if i == j:
        raise DimensionError(f"pairwise penalty needs two distinct indices, got {i} twice")
    return {(min(i, j), max(i, j)): _check_positive(P)}


@dataclass(frozen=True)
class LinearConstraint:
    """``sum_j a_j x_j  (=, <=, >=)  b`` over binary variables."""

    coeffs: tuple[tuple[int, float], ...]
    relation: str
    rhs: float

    def __post_init__(self):
        if isinstance(self.coeffs, Mapping):
            pairs = tuple(self.coeffs.items())
        else:
            pairs = tuple((int(j), float(a)) for j, a in self.coeffs)
        indices = [j for j, _ in pairs]
        if len(set(indices)) != len(indices):
            raise DomainError(f"duplicate variable index in constraint {indices}")
        if any(j < 0 for j in indices):
            raise DimensionError("negative variable index in constraint")
        relation = RELATIONS.get(self.relation)
        if relation is None:
            raise DomainError(f"unknown relation {self.relation!r}")
        if not math.isfinite(self.rhs):
            raise DomainError("constraint right-hand side must be finite")
        object.__setattr__(self, "coeffs", tuple(sorted((int(j), float(a)) for j, a in pairs)))
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "rhs", float(self.rhs))

    @classmethod
    def dense(cls, row: Sequence[float], relation: str, rhs: float) -> "LinearConstraint":
        return cls(tuple((j, a) for j, a in enumerate(row) if a != 0), relation, rhs)

    @property
    def max_index(self) -> int:
        return max((j for j, _ in self.coeffs), default=-1)

    def activity(self, x: Sequence[int]) -> float:
        return sum(a * x[j] for j, a in self.coeffs)

    def residual(self, x: Sequence[int]) -> float:
        return self.activity(x) - self.rhs

    def is_satisfied(self, x: Sequence[int]) -> bool:
        r = self.residual(x)
        if self.relation == EQ:
            return r == 0
        return r <= 0 if self.relation == LE else r >= 0

    def activity_range(self) -> tuple[float, float]:
        lo = sum(a for _, a in self.coeffs if a < 0)
        hi = sum(a for _, a in self.coeffs if a > 0)
        return lo, hi

    def is_redundant(self) -> bool:
        """True when every binary point satisfies an inequality."""
        lo, hi = self.activity_range()
        if self.relation == LE:
            return hi <= self.rhs
        if self.relation == GE:
            return lo >= self.rhs
        return False


@dataclass(frozen=True)
class ConstrainedProblem:
    """Quadratic objective (as a QUBO-shaped model) plus linear constraints."""

    objective: QuboModel
    constraints: tuple[LinearConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for k, con in enumerate(self.constraints):
            if con.max_index >= self.n:
                raise DimensionError(f"constraint {k} references variable {con.max_index}, n={self.n}")

    @classmethod
    def linear(cls, c: Sequence[float], constraints=(), sense: str = MINIMIZE, offset: float = 0.0):
        return cls(QuboModel(np.diag(np.asarray(c, dtype=float)), offset, sense), tuple(constraints))

    @property
    def n(self) -> int:
        return self.objective.n

    @property
    def sense(self) -> str:
        return self.objective.sense

    def is_feasible(self, x: Sequence[int]) -> bool:
        return all(con.is_satisfied(x) for con in self.constraints)


@dataclass(frozen=True)
class Penalty:
    """One penalized constraint: ``weight * terms(x)``, zero iff satisfied."""

    label: str
    weight: float
    terms: PseudoBooleanPolynomial

    def value(self, x: Sequence[int]) -> float:
        return self.weight * self.terms.evaluate(x)


@dataclass(frozen=True)
class PenaltyizedModel:
    """A QUBO built from an objective plus penalties, with its bookkeeping.

    ``qubo`` equals ``objective + sum(penalties)`` when minimizing and
    ``objective - sum(penalties)`` when maximizing.  Slack bits occupy the
    indices ``original_n .. qubo.n - 1``; ``slack_map`` lists, per expanded
    constraint, the ``(bit index, weight)`` pairs.
    """

    qubo: QuboModel
    penalty: float | tuple[float, ...]
    objective: PseudoBooleanPolynomial
    penalties: tuple[Penalty, ...]
    original_n: int
    slack_map: tuple[tuple[int, tuple[tuple[int, int], ...]], ...] = ()
    constraints: tuple[LinearConstraint, ...] = field(default=())

    @property
    def sign(self) -> int:
        return -1 if self.qubo.sense == MAXIMIZE else 1

    def objective_value(self, x: Sequence[int]) -> float:
        return self.objective.evaluate(list(x)[: self.objective.n])

    def penalty_contributions(self, x: Sequence[int]) -> list[tuple[str, float]]:
        return [(p.label, p.value(x)) for p in self.penalties]

    def total_penalty(self, x: Sequence[int]) -> float:
        return sum(p.value(x) for p in self.penalties)

    def is_feasible(self, x: Sequence[int]) -> bool:
        return all(v == 0 for _, v in self.penalty_contributions(x))


def assemble(
    objective: PseudoBooleanPolynomial,
    penalties: Sequence[Penalty],
    n_total: int,
    sense: str,
    penalty: float | tuple[float, ...],
    original_n: int | None = None,
    slack_map=(),
    constraints=(),
) -> PenaltyizedModel:
    """Combine objective and penalties into a :class:`PenaltyizedModel`."""
    sign = -1.0 if sense == MAXIMIZE else 1.0
    total = objective.with_n(n_total)
    for p in penalties:
        total = total + p.terms.with_n(n_total).scaled(sign * p.weight)
    return PenaltyizedModel(
        qubo=total.to_qubo(sense),
        penalty=penalty,
        objective=objective,
        penalties=tuple(penalties),
        original_n=objective.n if original_n is None else original_n,
        slack_map=tuple(slack_map),
        constraints=tuple(constraints),
    )


def _penalty_vector(P, count: int) -> tuple[float, ...]:
    if np.ndim(P) == 0:
        return (_check_positive(P),) * count
    weights = tuple(_check_positive(p) for p in P)
    if len(weights) != count:
        raise DimensionError(f"expected {count} penalty weights, got {len(weights)}")
    return weights


def transformation1(
    problem: ConstrainedProblem,
    P,
    original_n: int | None = None,
    slack_map=(),
    labels: Sequence[str] | None = None,
) -> PenaltyizedModel:
    """Add ``P (a_i.x - b_i)^2`` for every equality constraint.

    ``P`` is a positive scalar or one weight per constraint.  For maximizing
    problems the penalties are subtracted.
    """
    for k, con in enumerate(problem.constraints):
        if con.relation != EQ:
            raise PreconditionError(f"constraint {k} is not an equality; expand slack first")
    m = len(problem.constraints)
    if np.ndim(P) == 0:
        recorded = _check_positive(P)
        weights = (recorded,) * m
    else:
        weights = recorded = _penalty_vector(P, m)
    if labels is None:
        labels = [f"constraint {k}" for k in range(m)]
    penalties = [
        Penalty(label, w, linear_form_squared(dict(con.coeffs), con.rhs, problem.n))
        for label, con, w in zip(labels, problem.constraints, weights)
    ]
    objective = PseudoBooleanPolynomial.from_qubo(problem.objective)
    if original_n is not None:
        objective = _restrict(objective, original_n)
    return assemble(
        objective,
        penalties,
        problem.n,
        problem.sense,
        recorded,
        original_n=original_n,
        slack_map=slack_map,
        constraints=problem.constraints,
    )


def _restrict(poly: PseudoBooleanPolynomial, n: int) -> PseudoBooleanPolynomial:
    if any(k and k[-1] >= n for k in poly.terms):
        raise PreconditionError("objective references slack variables")
    return PseudoBooleanPolynomial(n, poly.terms)


def _require_integer(value: float, what: str) -> int:
    if not float(value).is_integer():
        raise DomainError(f"{what} must be an integer for binary slack expansion, got {value}")
    return int(value)


def expand_slack(
    constraint: LinearConstraint, n_current: int, bound: int | None = None
) -> tuple[LinearConstraint, list[tuple[int, int]]]:
    """Turn an integer inequality into an equality with binary slack bits.

    ``a.x <= b`` becomes ``a.x + sum_k 2^k s_k = b`` and ``a.x >= b``
    becomes ``a.x - sum_k 2^k s_k = b``.  The slack upper bound defaults to
    the box bound (``b - min a.x`` or ``max a.x - b``); ``bound`` overrides
    it.  Slack bits are numbered from ``n_current``.

    Returns
    -------
    equality : LinearConstraint
    slack_bits : list of (index, weight)
    """
    if constraint.relation == EQ:
        raise PreconditionError("constraint is already an equality")
    for j, a in constraint.coeffs:
        _require_integer(a, f"coefficient of x{j}")
    rhs = _require_integer(constraint.rhs, "right-hand side")
    lo, hi = constraint.activity_range()
    upper = rhs - int(lo) if constraint.relation == LE else int(hi) - rhs
    if upper < 0:
        raise InfeasibleError(f"no binary point satisfies the constraint (slack bound {upper})")
    if bound is not None:
        bound = _require_integer(bound, "slack bound")
        if bound < 0:
            raise DomainError(f"slack bound must be non-negative, got {bound}")
        upper = bound
    sign = 1 if constraint.relation == LE else -1
    bits = [(n_current + k, 1 << k) for k in range(int(upper).bit_length())]
    coeffs = constraint.coeffs + tuple((idx, float(sign * w)) for idx, w in bits)
    return LinearConstraint(coeffs, EQ, rhs), bits


def suggest_penalty(problem: ConstrainedProblem | QuboModel | PseudoBooleanPolynomial) -> float:
    """Default penalty: one more than the sum of absolute objective coefficients.

    The sum bounds the spread between any two objective values, so with
    integer constraint data every violation costs strictly more than any
    objective gain.
    """
    if isinstance(problem, ConstrainedProblem):
        problem = problem.objective
    if isinstance(problem, QuboModel):
        problem = PseudoBooleanPolynomial.from_qubo(problem)
    return 1.0 + problem.abs_coefficient_sum(include_constant=False)


def reformulate(
    problem: ConstrainedProblem,
    P=None,
    slack_bounds: Mapping[int, int] | None = None,
) -> PenaltyizedModel:
    """Expand inequalities into slack equalities, then apply the squared penalty.

    Inequalities satisfied by every binary point are dropped.  ``slack_bounds``
    maps constraint positions to slack upper-bound overrides.  When ``P`` is
    omitted :func:`suggest_penalty` supplies it.
    """
    slack_bounds = dict(slack_bounds or {})
    if P is None:
        P = suggest_penalty(problem)
    per_constraint = np.ndim(P) != 0
    if per_constraint and len(P) != len(problem.constraints):
        raise DimensionError(f"expected {len(problem.constraints)} penalty weights, got {len(P)}")
    n_total = problem.n
    equalities: list[LinearConstraint] = []
    labels: list[str] = []
    weights: list[float] = []
    slack_map: list[tuple[int, tuple[tuple[int, int], ...]]] = []
    for k, con in enumerate(problem.constraints):
        w = P[k] if per_constraint else P
        if con.relation == EQ:
            equalities.append(con)
            labels.append(f"constraint {k}")
            weights.append(w)
            continue
        if con.is_redundant() and k not in slack_bounds:
            continue
        eq, bits = expand_slack(con, n_total, slack_bounds.get(k))
        n_total += len(bits)
        equalities.append(eq)
        labels.append(f"constraint {k}")
        weights.append(w)
        slack_map.append((k, tuple(bits)))
    extended = np.zeros((n_total, n_total))
    extended[: problem.n, : problem.n] = problem.objective.Q
    expanded = ConstrainedProblem(
        QuboModel(extended, problem.objective.offset, problem.sense), tuple(equalities)
    )
    return transformation1(
        expanded,
        tuple(weights) if per_constraint else P,
        original_n=problem.n,
        slack_map=slack_map,
        labels=labels,
    )
