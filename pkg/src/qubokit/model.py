"""QUBO and Ising model representations.

A :class:`QuboModel` holds the value function ``x^T Q x + offset`` over
``x`` in ``{0, 1}^n``.  The symmetric matrix is the canonical storage form;
upper-triangular storage is produced on demand for export.  An
:class:`IsingModel` holds ``h.s + s^T J s + offset`` over spins in
``{-1, +1}^n`` with ``J`` symmetric and zero on the diagonal (the double
sum counts every pair twice, exactly like ``x^T Q x``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError

MINIMIZE = "min"
MAXIMIZE = "max"
SENSES = (MINIMIZE, MAXIMIZE)


def _check_sense(sense: str) -> str:
    if sense not in SENSES:
        raise DomainError(f"sense must be 'min' or 'max', got {sense!r}")
    return sense


def _frozen_square(matrix, name: str) -> np.ndarray:
    arr = np.array(matrix, dtype=np.float64, copy=True)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class QuboModel:
    """Quadratic unconstrained binary model ``x^T Q x + offset``.

    Parameters
    ----------
    Q : array_like
        Square coefficient matrix.  Any storage form is accepted; builders in
        this package always produce the symmetric form.
    offset : float
        Additive constant.
    sense : {"min", "max"}
        Optimization direction.
    labels : sequence of str, optional
        Variable names, one per row of ``Q``.
    """

    Q: np.ndarray
    offset: float = 0.0
    sense: str = MINIMIZE
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "Q", _frozen_square(self.Q, "Q"))
        offset = float(self.offset)
        if not np.isfinite(offset):
            raise DomainError("offset must be finite")
        object.__setattr__(self, "offset", offset)
        _check_sense(self.sense)
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != self.n:
                raise DimensionError(f"expected {self.n} labels, got {len(labels)}")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @classmethod
    def from_triplets(
        cls,
        n: int,
        triplets: Iterable[tuple[int, int, float]],
        offset: float = 0.0,
        sense: str = MINIMIZE,
    ) -> "QuboModel":
        """Build a symmetric model from ``(i, j, value)`` coefficient triplets.

        ``value`` is the full coefficient of ``x_i x_j`` (``x_i`` when
        ``i == j``); off-diagonal values are split evenly between ``(i, j)``
        and ``(j, i)``.  Repeated triplets accumulate.
        """
        Q = np.zeros((n, n))
        for i, j, value in triplets:
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionError(f"index ({i}, {j}) out of range for n={n}")
            if i == j:
                Q[i, i] += value
            else:
                Q[i, j] += value / 2
                Q[j, i] += value / 2
        return cls(Q, offset, sense)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.Q, self.Q.T))

    def is_upper_triangular(self) -> bool:
        return not np.any(np.tril(self.Q, -1))

    def __eq__(self, other):
        if not isinstance(other, QuboModel):
            return NotImplemented
        return (
            np.array_equal(self.Q, other.Q)
            and self.offset == other.offset
            and self.sense == other.sense
            and self.labels == other.labels
        )

    __hash__ = None

    def __repr__(self):
        return f"QuboModel(n={self.n}, offset={self.offset!r}, sense={self.sense!r})"


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Spin model ``sum_i h_i s_i + sum_{i,j} J_ij s_i s_j + offset``."""

    h: np.ndarray
    J: np.ndarray | None = None
    offset: float = 0.0
    sense: str = MINIMIZE

    def __post_init__(self):
        h = np.array(self.h, dtype=np.float64, copy=True).reshape(-1)
        J = _frozen_square(np.zeros((h.size, h.size)) if self.J is None else self.J, "J")
        if J.shape[0] != h.size:
            raise DimensionError(f"h has length {h.size} but J is {J.shape}")
        if not np.all(np.isfinite(h)):
            raise DomainError("h contains non-finite entries")
        if not np.array_equal(J, J.T):
            raise DomainError("J must be symmetric")
        if np.any(np.diag(J)):
            raise DomainError("J must have a zero diagonal")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "offset", float(self.offset))
        _check_sense(self.sense)

    @property
    def n(self) -> int:
        return self.h.size

    def energy(self, spins: Sequence[int]) -> float:
        s = _as_vector(spins, self.n, (-1, 1))
        return float(self.h @ s + s @ self.J @ s + self.offset)

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (
            np.array_equal(self.h, other.h)
            and np.array_equal(self.J, other.J)
            and self.offset == other.offset
            and self.sense == other.sense
        )

    __hash__ = None


def _as_vector(values, n: int, alphabet: tuple[int, int]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size != n:
        raise DimensionError(f"assignment has length {arr.size}, model has {n} variables")
    if not np.all((arr == alphabet[0]) | (arr == alphabet[1])):
        raise DomainError(f"assignment entries must be in {set(alphabet)}")
    return arr


def evaluate(model: QuboModel, x: Sequence[int]) -> float:
    """Return ``x^T Q x + offset`` for a 0/1 assignment ``x``."""
    xv = _as_vector(x, model.n, (0, 1))
    return float(xv @ model.Q @ xv) + model.offset


def to_symmetric(model: QuboModel) -> QuboModel:
    """Replace each off-diagonal pair by its average."""
    Q = (model.Q + model.Q.T) / 2
    np.fill_diagonal(Q, np.diag(model.Q))
    return QuboModel(Q, model.offset, model.sense, model.labels)


def to_upper_triangular(model: QuboModel) -> QuboModel:
    """Fold each below-diagonal entry onto its mirror above the diagonal."""
    Q = np.triu(model.Q + model.Q.T, 1)
    np.fill_diagonal(Q, np.diag(model.Q))
    return QuboModel(Q, model.offset, model.sense, model.labels)


def qubo_to_ising(model: QuboModel) -> IsingModel:
    """Change variables with ``x = (s + 1) / 2``.

    Energies agree exactly on paired assignments; the constant produced by
    the substitution lands in the Ising offset.
    """
    Q = to_symmetric(model).Q
    diag = np.diag(Q).copy()
    off = Q - np.diag(diag)
    J = off / 4
    h = diag / 2 + off.sum(axis=1) / 2
    offset = model.offset + diag.sum() / 2 + off.sum() / 4
    return IsingModel(h, J, offset, model.sense)


def ising_to_qubo(model: IsingModel) -> QuboModel:
    """Inverse of :func:`qubo_to_ising`, substituting ``s = 2x - 1``."""
    J = model.J
    Q = 4 * J
    np.fill_diagonal(Q, 2 * model.h - 4 * J.sum(axis=1))
    offset = model.offset - model.h.sum() + J.sum()
    return QuboModel(Q, offset, model.sense)


def normalize_sense(model: QuboModel) -> QuboModel:
    """Return an equivalent minimization model (negated when maximizing)."""
    if model.sense == MINIMIZE:
        return model
    return QuboModel(-model.Q, -model.offset, MINIMIZE, model.labels)


def flip_sense(model: QuboModel) -> QuboModel:
    """Negate the model and swap its sense; values at every point negate."""
    other = MAXIMIZE if model.sense == MINIMIZE else MINIMIZE
    return QuboModel(-model.Q, -model.offset, other, model.labels)


def all_assignments(n: int) -> np.ndarray:
    """All ``2**n`` bit vectors, bit 0 most significant, in counting order."""
    idx = np.arange(1 << n, dtype=np.int64)[:, None]
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)[None, :]
    return ((idx >> shifts) & 1).astype(np.int8)
