"""Exact and heuristic QUBO solvers plus solution verification.

Ties are always broken toward the lexicographically smallest bit vector
(bit 0 most significant) or the lowest variable index, so every routine is
deterministic.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, DomainError, SizeError
from .model import MAXIMIZE, QuboModel, all_assignments, evaluate, normalize_sense

MASK64 = (1 << 64) - 1
DEFAULT_EXACT_LIMIT = 24
# Low bits enumerated as one block per high-bit pattern.
_BLOCK_BITS = 14


class XorShift64:
    """64-bit xorshift generator (shifts 13, 7, 17).

    ``state ^= state << 13; state ^= state >> 7; state ^= state << 17``, all
    modulo 2**64.  A zero seed is replaced by ``0x9E3779B97F4A7C15`` because
    zero is a fixed point of the recurrence.
    """

    def __init__(self, seed: int):
        self.state = (int(seed) & MASK64) or 0x9E3779B97F4A7C15

    def next(self) -> int:
        x = self.state
        x ^= (x << 13) & MASK64
        x ^= x >> 7
        x ^= (x << 17) & MASK64
        self.state = x
        return x

    def bit(self) -> int:
        return self.next() >> 63


def splitmix64(value: int) -> int:
    """SplitMix64 finalizer, used to derive independent per-restart seeds."""
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class Solution:
    """Best assignment found; ``value`` includes the offset, in the model's sense."""

    bits: tuple[int, ...]
    value: float
    method: str
    iterations: int = 0

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class TabuParams:
    """Tabu search settings.

    ``tenure=None`` picks ``min(7, n - 1)`` clamped to at least one.
    ``restarts`` counts extra runs after the first, each from a fresh
    random start.
    """

    tenure: int | None = None
    max_iterations: int = 10_000
    restarts: int = 4
    seed: int = 1

    def __post_init__(self):
        if self.tenure is not None and self.tenure < 1:
            raise DomainError("tenure must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be positive")
        if self.restarts < 0:
            raise DomainError("restarts must be non-negative")
        if not 0 <= self.seed <= MASK64:
            raise DomainError("seed must fit in 64 unsigned bits")

    def tenure_for(self, n: int) -> int:
        if self.tenure is not None:
            return self.tenure
        return max(1, min(7, n - 1))


def _pair_matrix(model: QuboModel) -> np.ndarray:
    # C[i, j] = coefficient of x_i x_j for i != j (any storage form); diag = q_ii.
    C = model.Q + model.Q.T
    np.fill_diagonal(C, np.diag(model.Q))
    return C


def _min_form(model: QuboModel) -> QuboModel:
    return normalize_sense(model)


def flip_delta(model: QuboModel, x: Sequence[int], j: int) -> float:
    """Change in value when bit ``j`` of ``x`` is flipped, in O(n)."""
    xv = np.asarray(x, dtype=np.float64).reshape(-1)
    if xv.size != model.n:
        raise DimensionError(f"assignment has length {xv.size}, model has {model.n} variables")
    if not 0 <= j < model.n:
        raise IndexError(f"variable index {j} out of range for n={model.n}")
    Q = model.Q
    coupling = Q[j, :] @ xv + Q[:, j] @ xv - 2 * Q[j, j] * xv[j]
    return float((1 - 2 * xv[j]) * (Q[j, j] + coupling))


def gray_code_values(model: QuboModel) -> Iterator[tuple[tuple[int, ...], float]]:
    """Walk all ``2**n`` assignments in reflected Gray-code order.

    Each step flips one bit and updates the value with the flip delta, using
    an incrementally maintained local field.
    """
    n = model.n
    C = _pair_matrix(model)
    diag = np.diag(C).copy()
    field_ = np.zeros(n)  # sum_{i != j} C[j, i] x_i
    x = np.zeros(n, dtype=np.int8)
    value = model.offset
    yield tuple(int(b) for b in x), value
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1
        sign = 1 - 2 * int(x[j])
        value += sign * (diag[j] + field_[j])
        x[j] ^= 1
        field_ += sign * C[:, j]
        field_[j] -= sign * C[j, j]
        yield tuple(int(b) for b in x), value


def _block_values(C: np.ndarray, offset: float, n_high: int, n_low: int):
    """Precompute per-block data for the split enumeration."""
    low = all_assignments(n_low).astype(np.float64)
    C_ll = C[n_high:, n_high:]
    upper_ll = np.triu(C_ll, 1)
    base = low @ np.diag(C_ll) + np.einsum("ij,jk,ik->i", low, upper_ll, low) + offset
    return low, base


def _scan(model: QuboModel, workers: int = 1):
    """Yield ``(high_index, values)`` blocks in counting order of the high bits."""
    n = model.n
    C = _pair_matrix(model)
    n_low = min(n, _BLOCK_BITS)
    n_high = n - n_low
    low, base = _block_values(C, model.offset, n_high, n_low)
    C_hh = C[:n_high, :n_high]
    C_hl = C[:n_high, n_high:]
    upper_hh = np.triu(C_hh, 1)
    diag_hh = np.diag(C_hh)

    def block(h: int) -> np.ndarray:
        xh = np.array([(h >> (n_high - 1 - k)) & 1 for k in range(n_high)], dtype=np.float64)
        const = xh @ diag_hh + xh @ upper_hh @ xh
        return base + low @ (xh @ C_hl) + const

    highs = range(1 << n_high)
    if workers > 1 and n_high > 0:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            yield from zip(highs, pool.map(block, highs))
    else:
        for h in highs:
            yield h, block(h)


def _index_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def exact_solve(model: QuboModel, limit: int = DEFAULT_EXACT_LIMIT, workers: int = 1) -> Solution:
    """Global optimum by exhaustive enumeration.

    Among tied optima the lexicographically smallest bit vector is returned.
    ``workers`` parallelizes the blocks; the result does not depend on it.
    """
    if model.n > limit:
        raise SizeError(
            f"model has {model.n} variables, exact limit is {limit}; use tabu_solve for larger models"
        )
    work = _min_form(model)
    n = model.n
    n_low = min(n, _BLOCK_BITS)
    best_value = np.inf
    best_index = 0
    for h, values in _scan(work, workers):
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value = values[k]
            best_index = (h << n_low) | k
    bits = _index_bits(best_index, n)
    return Solution(bits, evaluate(model, bits), "exact", 1 << n)


def exact_optima(model: QuboModel, limit: int = DEFAULT_EXACT_LIMIT) -> tuple[float, list[tuple[int, ...]]]:
    """Optimal value and every optimal bit vector, in lexicographic order."""
    if model.n > limit:
        raise SizeError(f"model has {model.n} variables, exact limit is {limit}")
    work = _min_form(model)
    n_low = min(model.n, _BLOCK_BITS)
    best_value = np.inf
    winners: list[int] = []
    for h, values in _scan(work):
        v = values.min()
        if v > best_value:
            continue
        hits = [(h << n_low) | int(k) for k in np.flatnonzero(values == v)]
        if v < best_value:
            best_value, winners = v, hits
        else:
            winners.extend(hits)
    optima = [_index_bits(i, model.n) for i in winners]
    return evaluate(model, optima[0]), optima


def _tabu_run(C: np.ndarray, offset: float, n: int, tenure: int, iterations: int, seed: int):
    rng = XorShift64(seed)
    x = np.array([rng.bit() for _ in range(n)], dtype=np.float64)
    diag = np.diag(C).copy()
    off = C - np.diag(diag)
    # s_i = +1 when x_i = 0, so flipping i changes the value by delta_i.
    s = 1 - 2 * x
    delta = s * (diag + off @ x)
    current = float(offset + x @ diag + x @ np.triu(off, 1) @ x)
    best, best_s = current, s.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    cand = np.empty(n)
    for it in range(iterations):
        np.copyto(cand, delta)
        # Tabu moves stay eligible only when they would beat the best value.
        cand[(tabu_until > it) & (delta >= best - current)] = np.inf
        j = int(cand.argmin())
        if cand[j] == np.inf:
            j = int(delta.argmin())
        d = delta[j]
        current += d
        sj = s[j]
        delta += (sj * s) * off[:, j]
        delta[j] = -d
        s[j] = -sj
        # The flip iteration counts toward the tenure.
        tabu_until[j] = it + tenure
        if current < best:
            best, best_s = current, s.copy()
    return best, tuple(int(v < 0) for v in best_s)


def tabu_solve(model: QuboModel, params: TabuParams | None = None) -> Solution:
    """One-flip tabu search with aspiration.

    Every iteration flips the non-tabu variable with the best flip delta
    (lowest index on ties); a tabu variable is admissible when flipping it
    beats the best value seen in the run.  A variable flipped at iteration
    ``t`` is tabu through iteration ``t + tenure - 1``.  Run ``r`` (``0 <= r <= restarts``) starts from
    bits drawn from ``XorShift64(splitmix64(seed + r))``, bit ``i`` being the
    top bit of the ``i``-th draw.  The best run wins; ties go to the
    lexicographically smaller bit vector, then the earlier run.
    """
    params = params or TabuParams()
    n = model.n
    if n < 1:
        raise DomainError("tabu_solve needs at least one variable")
    tenure = params.tenure_for(n)
    if params.tenure is not None and tenure >= n:
        warnings.warn(f"tenure {tenure} >= n={n}; all variables can become tabu", stacklevel=2)
    work = _min_form(model)
    C = _pair_matrix(work)
    best_key = None
    total = 0
    for r in range(params.restarts + 1):
        seed = splitmix64((params.seed + r) & MASK64)
        value, bits = _tabu_run(C, work.offset, n, tenure, params.max_iterations, seed)
        total += params.max_iterations
        key = (evaluate(work, bits), bits)
        if best_key is None or key < best_key:
            best_key = key
    bits = best_key[1]
    return Solution(bits, evaluate(model, bits), "tabu", total)


def is_better(a: float, b: float, sense: str) -> bool:
    return a > b if sense == MAXIMIZE else a < b


@dataclass
class VerifyReport:
    """Outcome of checking one assignment."""

    value: float
    quadratic_value: float
    offset: float
    objective: float | None = None
    penalties: list[tuple[str, float]] = field(default_factory=list)
    feasible: bool = True
    violations: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)


def verify(target, x: Sequence[int], decoder=None) -> VerifyReport:
    """Evaluate ``x`` and, for penalized models, report each penalty term.

    ``target`` is a :class:`QuboModel` or a ``PenaltyizedModel``.  With a
    decoder the original-domain objective and violations are included.
    ``feasible`` is true when every penalty contribution is zero.
    """
    from .penalties import PenaltyizedModel

    bits = [int(b) for b in x]
    if isinstance(target, PenaltyizedModel):
        qubo = target.qubo
    elif isinstance(target, QuboModel):
        qubo = target
    else:
        raise TypeError(f"cannot verify against {type(target).__name__}")
    value = evaluate(qubo, bits)
    report = VerifyReport(value=value, quadratic_value=value - qubo.offset, offset=qubo.offset)
    if isinstance(target, PenaltyizedModel):
        report.penalties = target.penalty_contributions(bits)
        report.feasible = all(v == 0 for _, v in report.penalties)
        report.objective = target.objective_value(bits)
        report.violations = [label for label, v in report.penalties if v != 0]
    if decoder is not None:
        decoded = decoder.decode(bits)
        report.objective = decoded.objective
        report.details = decoded.details
        if not isinstance(target, PenaltyizedModel):
            report.feasible = decoded.feasible
            report.violations = list(decoded.violations)
    return report
