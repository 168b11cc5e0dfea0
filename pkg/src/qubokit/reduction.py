"""Degree reduction of pseudo-Boolean polynomials to quadratic form.

A product ``x_i x_j`` is replaced by a fresh binary ``y`` and the gadget
``P (x_i x_j - 2 x_i y - 2 x_j y + 3 y)`` is added.  The gadget is zero
exactly when ``y == x_i x_j`` and at least ``P`` otherwise, so repeated
substitution yields a quadratic polynomial with the same minimum once ``P``
exceeds the sum of absolute coefficients.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from .errors import DomainError
from .model import MINIMIZE, QuboModel
from .penalties import _check_positive
from .polynomial import Monomial, PseudoBooleanPolynomial

__all__ = [
    "PseudoBooleanPolynomial",
    "SubstitutionRecord",
    "default_reduction_penalty",
    "penalty_gadget_check",
    "poly_to_qubo",
    "quadratize",
]


@dataclass(frozen=True)
class SubstitutionRecord:
    new_var: int
    pair: tuple[int, int]
    penalty_weight: float


def gadget_terms(i: int, j: int, y: int, P: float) -> dict[Monomial, float]:
    return {(i, j): P, (min(i, y), max(i, y)): -2 * P, (min(j, y), max(j, y)): -2 * P, (y,): 3 * P}


def penalty_gadget_check(xi: int, xj: int, y: int, P: float) -> float:
    """Value of the substitution gadget at one point."""
    return P * (xi * xj - 2 * xi * y - 2 * xj * y + 3 * y)


def default_reduction_penalty(poly: PseudoBooleanPolynomial) -> float:
    return 1.0 + poly.abs_coefficient_sum()


def _pick_pair(terms) -> tuple[int, int] | None:
    counts: Counter = Counter()
    for mono in terms:
        if len(mono) >= 3:
            counts.update(combinations(mono, 2))
    if not counts:
        return None
    # Most frequent pair; ties go to the lexicographically smallest.
    return min(counts, key=lambda pair: (-counts[pair], pair))


def quadratize(
    poly: PseudoBooleanPolynomial, P: float | None = None
) -> tuple[PseudoBooleanPolynomial, list[SubstitutionRecord]]:
    """Reduce ``poly`` to degree two by repeated pair substitution.

    Each round picks the variable pair shared by the most terms of degree
    three or more, replaces it by a new variable in every term containing it,
    and adds the consistency gadget with weight ``P``.  New variables are
    numbered from ``poly.n`` upward.

    Parameters
    ----------
    poly : PseudoBooleanPolynomial
    P : float, optional
        Gadget weight; defaults to one more than the sum of absolute
        coefficients of ``poly``.

    Returns
    -------
    reduced : PseudoBooleanPolynomial
        Degree at most two, over ``poly.n + len(records)`` variables.
    records : list of SubstitutionRecord
    """
    P = default_reduction_penalty(poly) if P is None else _check_positive(P)
    terms: dict[Monomial, float] = dict(poly.terms)
    n = poly.n
    records: list[SubstitutionRecord] = []
    while (pair := _pick_pair(terms)) is not None:
        i, j = pair
        y = n
        n += 1
        rewritten: dict[Monomial, float] = {}
        for mono, coeff in terms.items():
            if i in mono and j in mono:
                mono = tuple(sorted([v for v in mono if v != i and v != j] + [y]))
            rewritten[mono] = rewritten.get(mono, 0.0) + coeff
        for mono, coeff in gadget_terms(i, j, y, P).items():
            rewritten[mono] = rewritten.get(mono, 0.0) + coeff
        terms = rewritten
        records.append(SubstitutionRecord(y, (i, j), P))
    return PseudoBooleanPolynomial(n, terms), records


def extend_assignment(x, records: list[SubstitutionRecord]) -> list[int]:
    """Append the consistent auxiliary values ``y = x_i x_j`` to ``x``."""
    full = [int(v) for v in x]
    for rec in records:
        if rec.new_var != len(full):
            raise DomainError("substitution records are out of order")
        i, j = rec.pair
        full.append(full[i] * full[j])
    return full


def poly_to_qubo(poly: PseudoBooleanPolynomial, sense: str = MINIMIZE) -> QuboModel:
    """Quadratic polynomial to a symmetric QUBO; constant term becomes the offset."""
    return poly.to_qubo(sense)
