"""Multilinear pseudo-Boolean polynomials over 0/1 variables."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegreeError, DimensionError
from .model import MINIMIZE, QuboModel

Monomial = tuple[int, ...]


def _canonical(indices: Iterable[int]) -> Monomial:
    # x_i * x_i == x_i, so repeated indices collapse.
    return tuple(sorted(set(int(i) for i in indices)))


@dataclass(frozen=True)
class PseudoBooleanPolynomial:
    """Sum of coefficient-weighted products of distinct binary variables.

    ``terms`` maps a sorted index tuple to its coefficient; the empty tuple
    is the constant term.  Zero coefficients are never stored.
    """

    n: int
    terms: Mapping[Monomial, float]

    def __post_init__(self):
        merged: dict[Monomial, float] = {}
        for key, coeff in dict(self.terms).items():
            mono = _canonical(key)
            if mono and (mono[0] < 0 or mono[-1] >= self.n):
                raise DimensionError(f"term {key} has an index outside 0..{self.n - 1}")
            merged[mono] = merged.get(mono, 0.0) + float(coeff)
        object.__setattr__(self, "terms", {k: v for k, v in sorted(merged.items()) if v != 0})

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[Sequence[int], float]]) -> "PseudoBooleanPolynomial":
        acc: dict[Monomial, float] = {}
        for indices, coeff in terms:
            mono = _canonical(indices)
            acc[mono] = acc.get(mono, 0.0) + coeff
        return cls(n, acc)

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    @property
    def constant(self) -> float:
        return self.terms.get((), 0.0)

    def abs_coefficient_sum(self, include_constant: bool = True) -> float:
        return sum(abs(c) for k, c in self.terms.items() if k or include_constant)

    def evaluate(self, x: Sequence[int]) -> float:
        if len(x) != self.n:
            raise DimensionError(f"assignment has length {len(x)}, polynomial has {self.n} variables")
        total = 0.0
        for mono, coeff in self.terms.items():
            if all(x[i] for i in mono):
                total += coeff
        return total

    def __add__(self, other: "PseudoBooleanPolynomial") -> "PseudoBooleanPolynomial":
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0.0) + c
        return PseudoBooleanPolynomial(max(self.n, other.n), acc)

    def scaled(self, factor: float) -> "PseudoBooleanPolynomial":
        return PseudoBooleanPolynomial(self.n, {k: factor * c for k, c in self.terms.items()})

    def with_n(self, n: int) -> "PseudoBooleanPolynomial":
        return PseudoBooleanPolynomial(n, self.terms)

    def to_qubo(self, sense: str = MINIMIZE) -> QuboModel:
        """Symmetric QUBO with linear terms on the diagonal and the constant as offset."""
        if self.degree > 2:
            raise DegreeError(f"polynomial has degree {self.degree}; quadratize it first")
        Q = np.zeros((self.n, self.n))
        offset = 0.0
        for mono, coeff in self.terms.items():
            if len(mono) == 0:
                offset += coeff
            elif len(mono) == 1:
                Q[mono[0], mono[0]] += coeff
            else:
                i, j = mono
                Q[i, j] += coeff / 2
                Q[j, i] += coeff / 2
        return QuboModel(Q, offset, sense)

    @classmethod
    def from_qubo(cls, model: QuboModel) -> "PseudoBooleanPolynomial":
        Q = model.Q
        acc: dict[Monomial, float] = {(): model.offset}
        for i in range(model.n):
            acc[(i,)] = Q[i, i]
            for j in range(i + 1, model.n):
                acc[(i, j)] = Q[i, j] + Q[j, i]
        return cls(model.n, acc)


def linear_form_squared(coeffs: Mapping[int, float], rhs: float, n: int) -> PseudoBooleanPolynomial:
    """Expand ``(sum_j a_j x_j - b)^2`` using ``x_j^2 == x_j``."""
    items = sorted((int(j), float(a)) for j, a in coeffs.items() if a != 0)
    acc: dict[Monomial, float] = {(): rhs * rhs}
    for pos, (j, a) in enumerate(items):
        acc[(j,)] = a * a - 2 * rhs * a
        for k, b in items[pos + 1:]:
            acc[(j, k)] = 2 * a * b
    return PseudoBooleanPolynomial(n, acc)
