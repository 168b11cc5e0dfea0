"""Text formats: QUBO and Ising files, problem descriptions, polynomials.

QUBO file (0-based, upper-triangular)::

    c sense min
    c offset 40
    p qubo 0 <n> <n_diagonal> <n_off_diagonal>
    <i> <i> <q_ii>            diagonal lines first, by index
    <i> <j> <q_ij + q_ji>     then off-diagonal lines, i < j, row-major

Zero entries are not written.  Numbers are written as integers when
integral and otherwise as the shortest string that parses back to the same
double, so ``write(read(write(M))) == write(M)`` byte for byte.  Unknown
comment lines are ignored on input.

The Ising file is the same with ``p ising``; diagonal lines carry ``h_i``
and off-diagonal lines the total coupling ``2 J_ij`` of the pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FormatError
from .model import MAXIMIZE, MINIMIZE, SENSES, IsingModel, QuboModel, to_upper_triangular
from .polynomial import PseudoBooleanPolynomial


def format_number(value: float) -> str:
    v = float(value)
    if not math.isfinite(v):
        raise FormatError(f"cannot write non-finite value {v}")
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def _parse_number(token: str, lineno: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise FormatError(f"not a number: {token!r}", lineno) from None
    if not math.isfinite(v):
        raise FormatError(f"non-finite value {token!r}", lineno)
    return v


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"not an integer: {token!r}", lineno) from None


def _write_matrix_file(tag: str, n: int, diag, off, offset: float, sense: str) -> str:
    lines = [f"c sense {sense}", f"c offset {format_number(offset)}"]
    lines.append(f"p {tag} 0 {n} {len(diag)} {len(off)}")
    lines += [f"{i} {i} {format_number(v)}" for i, v in diag]
    lines += [f"{i} {j} {format_number(v)}" for i, j, v in off]
    return "\n".join(lines) + "\n"


def _read_matrix_file(text: str, tag: str):
    sense, offset = MINIMIZE, 0.0
    header = None
    diag: dict[int, float] = {}
    off: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "c":
            if len(parts) >= 3 and parts[1] == "offset":
                offset = _parse_number(parts[2], lineno)
            elif len(parts) >= 3 and parts[1] == "sense":
                if parts[2] not in SENSES:
                    raise FormatError(f"sense must be 'min' or 'max', got {parts[2]!r}", lineno)
                sense = parts[2]
            continue
        if parts[0] == "p":
            if header is not None:
                raise FormatError("second program line", lineno)
            if len(parts) != 6 or parts[1] != tag:
                raise FormatError(f"expected 'p {tag} 0 <n> <n_diagonal> <n_off_diagonal>'", lineno)
            header = tuple(_parse_int(t, lineno) for t in parts[3:])
            if min(header) < 0:
                raise FormatError("negative count on program line", lineno)
            continue
        if header is None:
            raise FormatError("entry before the program line", lineno)
        if len(parts) != 3:
            raise FormatError("entry lines have the form '<i> <j> <value>'", lineno)
        i, j = _parse_int(parts[0], lineno), _parse_int(parts[1], lineno)
        v = _parse_number(parts[2], lineno)
        n = header[0]
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(f"index out of range for n={n}", lineno)
        if i == j:
            if i in diag:
                raise FormatError(f"duplicate diagonal entry {i}", lineno)
            diag[i] = v
        elif i < j:
            if (i, j) in off:
                raise FormatError(f"duplicate entry ({i}, {j})", lineno)
            off[(i, j)] = v
        else:
            raise FormatError("off-diagonal entries need i < j", lineno)
    if header is None:
        raise FormatError("missing program line")
    n, n_diag, n_off = header
    if len(diag) != n_diag or len(off) != n_off:
        raise FormatError(
            f"program line announces {n_diag} diagonal and {n_off} off-diagonal entries, "
            f"found {len(diag)} and {len(off)}"
        )
    return n, diag, off, offset, sense


def write_qubo(model: QuboModel) -> str:
    U = model.Q + model.Q.T - np.diag(np.diag(model.Q))
    n = model.n
    diag = [(i, U[i, i]) for i in range(n) if U[i, i] != 0]
    off = [(i, j, U[i, j]) for i in range(n) for j in range(i + 1, n) if U[i, j] != 0]
    return _write_matrix_file("qubo", n, diag, off, model.offset, model.sense)


def read_qubo(text: str) -> QuboModel:
    """Parse a QUBO file into the symmetric model it describes."""
    n, diag, off, offset, sense = _read_matrix_file(text, "qubo")
    triplets = [(i, i, v) for i, v in diag.items()] + [(i, j, v) for (i, j), v in off.items()]
    return QuboModel.from_triplets(n, triplets, offset, sense)


def write_ising(model: IsingModel) -> str:
    n = model.n
    diag = [(i, model.h[i]) for i in range(n) if model.h[i] != 0]
    off = [(i, j, 2 * model.J[i, j]) for i in range(n) for j in range(i + 1, n) if model.J[i, j] != 0]
    return _write_matrix_file("ising", n, diag, off, model.offset, model.sense)


def read_ising(text: str) -> IsingModel:
    n, diag, off, offset, sense = _read_matrix_file(text, "ising")
    h = np.zeros(n)
    J = np.zeros((n, n))
    for i, v in diag.items():
        h[i] = v
    for (i, j), v in off.items():
        J[i, j] = J[j, i] = v / 2
    return IsingModel(h, J, offset, sense)


DENSE_FORMS = ("symmetric", "upper")


def write_dense(model: QuboModel, form: str) -> str:
    """Full matrix, one row per line, in symmetric or upper-triangular form."""
    if form not in DENSE_FORMS:
        raise FormatError(f"dense form must be one of {DENSE_FORMS}, got {form!r}")
    Q = model.Q if form == "symmetric" else to_upper_triangular(model).Q
    lines = [f"c sense {model.sense}", f"c offset {format_number(model.offset)}", f"p dense {form} {model.n}"]
    lines += [" ".join(format_number(v) for v in row) for row in Q]
    return "\n".join(lines) + "\n"


def read_dense(text: str) -> QuboModel:
    """Parse a dense matrix file; the matrix is read as given (either form)."""
    sense, offset = MINIMIZE, 0.0
    n = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) >= 3 and parts[1] == "offset":
                offset = _parse_number(parts[2], lineno)
            elif len(parts) >= 3 and parts[1] == "sense":
                if parts[2] not in SENSES:
                    raise FormatError(f"sense must be 'min' or 'max', got {parts[2]!r}", lineno)
                sense = parts[2]
            continue
        if parts[0] == "p":
            if n is not None or len(parts) != 4 or parts[1] != "dense" or parts[2] not in DENSE_FORMS:
                raise FormatError("expected a single 'p dense <symmetric|upper> <n>' line", lineno)
            n = _parse_int(parts[3], lineno)
            continue
        if n is None:
            raise FormatError("row before the program line", lineno)
        if len(parts) != n:
            raise FormatError(f"row has {len(parts)} entries, expected {n}", lineno)
        rows.append([_parse_number(t, lineno) for t in parts])
    if n is None:
        raise FormatError("missing program line")
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, found {len(rows)}")
    return QuboModel(np.array(rows, dtype=float).reshape(n, n), offset, sense)


def sniff_kind(text: str) -> str:
    """``"qubo"``, ``"ising"`` or ``"dense"``, from the program line."""
    for line in text.splitlines():
        parts = line.split()
        if parts and parts[0] == "p" and len(parts) > 1:
            return parts[1]
    raise FormatError("missing program line")


# --------------------------------------------------------------------------
# Problem description files


PROBLEM_KINDS = (
    "number_partitioning",
    "max_cut",
    "min_vertex_cover",
    "set_packing",
    "max_2sat",
    "set_partitioning",
    "graph_coloring",
    "binary_program",
    "qap",
    "quadratic_knapsack",
    "polynomial",
)

# Keys whose lines may repeat; every other key may appear once.
_REPEATED = {
    "edge", "row", "clause", "constraint", "quadratic", "flow", "distance", "values", "term", "substitution",
}
_RELATIONS = ("<=", ">=", "=", "==")


@dataclass
class ProblemFile:
    """Parsed problem description: a kind plus keyed payload lines.

    ``entries`` maps each key to a list of ``(line number, tokens)``.
    """

    kind: str
    entries: dict[str, list[tuple[int, list[str]]]] = field(default_factory=dict)

    def lines(self, key: str) -> list[tuple[int, list[str]]]:
        return self.entries.get(key, [])

    def single(self, key: str, required: bool = True) -> tuple[int, list[str]] | None:
        found = self.lines(key)
        if not found:
            if required:
                raise FormatError(f"{self.kind}: missing '{key}' line")
            return None
        return found[0]

    def numbers(self, key: str, required: bool = True) -> list[float] | None:
        found = self.single(key, required)
        if found is None:
            return None
        lineno, tokens = found
        return [_parse_number(t, lineno) for t in tokens]

    def integer(self, key: str, required: bool = True) -> int | None:
        found = self.single(key, required)
        if found is None:
            return None
        lineno, tokens = found
        if len(tokens) != 1:
            raise FormatError(f"'{key}' takes one value", lineno)
        return _parse_int(tokens[0], lineno)

    def matrix(self, key: str) -> list[list[float]]:
        return [[_parse_number(t, lineno) for t in tokens] for lineno, tokens in self.lines(key)]


def parse_problem(text: str) -> ProblemFile:
    """Parse ``key value ...`` lines; ``#`` starts a comment."""
    problem: ProblemFile | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *tokens = line.split()
        if key == "kind":
            if problem is not None:
                raise FormatError("second 'kind' line", lineno)
            if len(tokens) != 1 or tokens[0] not in PROBLEM_KINDS:
                raise FormatError(f"kind must be one of {', '.join(PROBLEM_KINDS)}", lineno)
            problem = ProblemFile(tokens[0])
            continue
        if problem is None:
            raise FormatError("the first line must be 'kind <name>'", lineno)
        if key not in _REPEATED and key in problem.entries:
            raise FormatError(f"duplicate '{key}' line", lineno)
        if not tokens:
            raise FormatError(f"'{key}' needs values", lineno)
        problem.entries.setdefault(key, []).append((lineno, tokens))
    if problem is None:
        raise FormatError("empty problem file")
    return problem


def parse_constraint(tokens: list[str], lineno: int):
    """``a_1 ... a_n <rel> b [bound k]`` into (coefficients, relation, rhs, bound)."""
    rel_at = [k for k, t in enumerate(tokens) if t in _RELATIONS]
    if len(rel_at) != 1:
        raise FormatError("constraint needs exactly one of <=, >=, =", lineno)
    k = rel_at[0]
    coeffs = [_parse_number(t, lineno) for t in tokens[:k]]
    rest = tokens[k + 1:]
    if not coeffs or not rest:
        raise FormatError("constraint needs coefficients and a right-hand side", lineno)
    rhs = _parse_number(rest[0], lineno)
    bound = None
    if len(rest) == 3 and rest[1] == "bound":
        bound = _parse_int(rest[2], lineno)
    elif len(rest) != 1:
        raise FormatError("trailing tokens after the right-hand side", lineno)
    return coeffs, tokens[k], rhs, bound


def parse_terms(problem: ProblemFile, n: int) -> PseudoBooleanPolynomial:
    """``term <coeff> <i> <j> ...`` lines into a polynomial over ``n`` variables."""
    terms = []
    for lineno, tokens in problem.lines("term"):
        coeff = _parse_number(tokens[0], lineno)
        indices = [_parse_int(t, lineno) for t in tokens[1:]]
        if any(not 0 <= i < n for i in indices):
            raise FormatError(f"term index outside 0..{n - 1}", lineno)
        terms.append((indices, coeff))
    return PseudoBooleanPolynomial.from_terms(n, terms)


def write_polynomial(poly: PseudoBooleanPolynomial, sense: str = MINIMIZE) -> str:
    lines = ["kind polynomial", f"variables {poly.n}"]
    if sense == MAXIMIZE:
        lines.append("sense max")
    for mono, coeff in poly.terms.items():
        lines.append(" ".join(["term", format_number(coeff), *map(str, mono)]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Decoder sidecar


def meta_path(qubo_path: str | Path) -> Path:
    return Path(str(qubo_path) + ".meta.json")


def write_meta(path: str | Path, payload: dict[str, Any]) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_meta(path: str | Path) -> dict[str, Any] | None:
    p = Path(path)
    if not p.exists():
        return None
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{p}: invalid metadata ({exc.msg})", exc.lineno) from None
