"""Command-line front end.

Exit codes: 0 success, 2 parse or I/O error, 3 failed precondition,
4 exact-solver size limit exceeded, 5 infeasible assignment (``check``).

Reports are printed as ``key: value`` lines in a fixed order so that they
can be parsed by scripts.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import io
from .errors import FormatError, QuboError, SizeError
from .formulations import (
    CnfInstance,
    Decoder,
    Graph,
    LinearConstraint,
    QapInstance,
    poly_to_data,
    poly_from_data,
    general_binary_program,
    graph_coloring,
    max_2sat,
    max_cut,
    min_vertex_cover,
    number_partitioning,
    polynomial_decoder,
    quadratic_assignment,
    quadratic_knapsack,
    set_packing,
    set_partitioning,
)
from .model import MAXIMIZE, MINIMIZE, QuboModel, ising_to_qubo, qubo_to_ising
from .penalties import Penalty, PenaltyizedModel, suggest_penalty
from .reduction import quadratize
from .solve import DEFAULT_EXACT_LIMIT, TabuParams, exact_solve, tabu_solve, verify
from .worked_examples import EXAMPLES

EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, EXIT_SIZE, EXIT_INFEASIBLE = 0, 2, 3, 4, 5


@dataclass
class Formulated:
    qubo: QuboModel
    decoder: Decoder
    penalized: PenaltyizedModel | None
    penalty: float | None


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, float, np.floating, np.integer)):
        return io.format_number(value)
    return str(value)


def _emit(out, key: str, value) -> None:
    out.write(f"{key}: {_fmt(value)}\n")


# --------------------------------------------------------------------------
# Problem files to models

_KEYS = {
    "number_partitioning": {"numbers"},
    "max_cut": {"vertices", "edge"},
    "min_vertex_cover": {"vertices", "edge", "weights", "penalty"},
    "set_packing": {"weights", "row", "penalty"},
    "max_2sat": {"variables", "clause"},
    "set_partitioning": {"cost", "row", "penalty"},
    "graph_coloring": {"vertices", "edge", "colors", "penalty"},
    "binary_program": {"variables", "sense", "objective", "quadratic", "constraint", "penalty"},
    "qap": {"size", "flow", "distance", "penalty"},
    "quadratic_knapsack": {"values", "requirements", "budget", "slack_bound", "penalty"},
    "polynomial": {"variables", "sense", "term", "substitution", "penalty"},
}


def _graph(pf: io.ProblemFile, weighted: bool = False) -> Graph:
    n = pf.integer("vertices")
    edges = []
    for lineno, tokens in pf.lines("edge"):
        if len(tokens) != 2:
            raise FormatError("edge lines have the form 'edge <i> <j>'", lineno)
        edges.append((io._parse_int(tokens[0], lineno), io._parse_int(tokens[1], lineno)))
    weights = pf.numbers("weights", required=False) if weighted else None
    return Graph(n, tuple(edges), None if weights is None else tuple(weights))


def _sense(pf: io.ProblemFile) -> str:
    found = pf.single("sense", required=False)
    if found is None:
        return MINIMIZE
    lineno, tokens = found
    if tokens not in (["min"], ["max"]):
        raise FormatError("sense must be 'min' or 'max'", lineno)
    return tokens[0]


def _with_penalty(build: Callable[[float | None], tuple], P: float | None, accepts_none: bool = False):
    """Call ``build(P)``; when ``P`` is missing derive it from the objective."""
    if P is None and not accepts_none:
        probe, _ = build(1.0)
        P = suggest_penalty(probe.objective)
    model, decoder = build(P)
    return Formulated(model.qubo, decoder, model, model.penalty)


def _binary_program(pf: io.ProblemFile, P):
    objective = pf.numbers("objective")
    n = pf.integer("variables", required=False)
    if n is None:
        n = len(objective)
    if len(objective) != n:
        raise FormatError(f"objective has {len(objective)} coefficients, expected {n}", pf.single("objective")[0])
    C = np.diag(np.asarray(objective, dtype=float))
    for lineno, tokens in pf.lines("quadratic"):
        if len(tokens) != 3:
            raise FormatError("quadratic lines have the form 'quadratic <i> <j> <coeff>'", lineno)
        i, j = io._parse_int(tokens[0], lineno), io._parse_int(tokens[1], lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(f"index outside 0..{n - 1}", lineno)
        v = io._parse_number(tokens[2], lineno)
        if i == j:
            C[i, i] += v
        else:
            C[i, j] += v / 2
            C[j, i] += v / 2
    constraints, bounds = [], {}
    for k, (lineno, tokens) in enumerate(pf.lines("constraint")):
        coeffs, relation, rhs, bound = io.parse_constraint(tokens, lineno)
        if len(coeffs) != n:
            raise FormatError(f"constraint has {len(coeffs)} coefficients, expected {n}", lineno)
        constraints.append(LinearConstraint.dense(coeffs, relation, rhs))
        if bound is not None:
            bounds[k] = bound
    build = lambda p: general_binary_program(C, constraints, p, bounds, sense=_sense(pf))
    return _with_penalty(build, P, accepts_none=True)


def _knapsack(pf: io.ProblemFile, P):
    V = pf.matrix("values")
    a = pf.numbers("requirements")
    b = pf.numbers("budget")
    if len(b) != 1:
        raise FormatError("'budget' takes one value", pf.single("budget")[0])
    bound = pf.integer("slack_bound", required=False)
    return _with_penalty(lambda p: quadratic_knapsack(V, a, b[0], p, bound), P, accepts_none=True)


def _qap(pf: io.ProblemFile, P):
    F, D = pf.matrix("flow"), pf.matrix("distance")
    size = pf.integer("size", required=False)
    if size is not None and not (len(F) == len(D) == size):
        raise FormatError(f"flow and distance need {size} rows each")
    if any(len(row) != len(F) for row in F + D) or len(F) != len(D):
        raise FormatError("flow and distance must be matching square matrices")
    inst = QapInstance(np.array(F), np.array(D))
    return _with_penalty(lambda p: quadratic_assignment(inst, p), P)


def _reduce(pf: io.ProblemFile, P):
    poly = io.parse_terms(pf, pf.integer("variables"))
    if _sense(pf) == MAXIMIZE:
        # Gadgets must lower a maximized value, so reduce the negation.
        reduced, records = quadratize(poly.scaled(-1), P)
        return poly, reduced.scaled(-1), records
    reduced, records = quadratize(poly, P)
    return poly, reduced, records


def _polynomial(pf: io.ProblemFile, P):
    poly, reduced, records = _reduce(pf, P)
    weight = records[0].penalty_weight if records else None
    qubo = reduced.to_qubo(_sense(pf))
    return Formulated(qubo, polynomial_decoder(poly, records, reduced.n), None, weight)


def _clauses(pf: io.ProblemFile) -> CnfInstance:
    n = pf.integer("variables")
    clauses = []
    for lineno, tokens in pf.lines("clause"):
        if len(tokens) != 2:
            raise FormatError("clauses have exactly two literals", lineno)
        lits = [io._parse_int(t, lineno) for t in tokens]
        if 0 in lits or any(abs(v) > n for v in lits):
            raise FormatError(f"literals are signed indices in 1..{n}", lineno)
        clauses.append(lits)
    return CnfInstance.from_signed(n, clauses)


def build_problem(pf: io.ProblemFile, P: float | None = None) -> Formulated:
    """Build the model described by a parsed problem file.

    ``P`` overrides a ``penalty`` line in the file; with neither, the
    penalty is derived from the objective.
    """
    allowed = _KEYS[pf.kind]
    for key, found in pf.entries.items():
        if key not in allowed:
            raise FormatError(f"unexpected '{key}' line for kind {pf.kind}", found[0][0])
    if P is None and "penalty" in pf.entries:
        P = pf.numbers("penalty")[0]
    kind = pf.kind
    if kind == "number_partitioning":
        numbers = pf.numbers("numbers")
        if any(not float(v).is_integer() for v in numbers):
            raise FormatError("numbers must be integers", pf.single("numbers")[0])
        model, decoder, _ = number_partitioning([int(v) for v in numbers])
        return Formulated(model, decoder, None, None)
    if kind == "max_cut":
        return Formulated(*max_cut(_graph(pf)), None, None)
    if kind == "max_2sat":
        return Formulated(*max_2sat(_clauses(pf)), None, None)
    if kind == "min_vertex_cover":
        g = _graph(pf, weighted=True)
        return _with_penalty(lambda p: min_vertex_cover(g, p), P)
    if kind == "set_packing":
        rows, w = pf.matrix("row"), pf.numbers("weights")
        return _with_penalty(lambda p: set_packing(rows, w, p), P)
    if kind == "set_partitioning":
        rows, c = pf.matrix("row"), pf.numbers("cost")
        return _with_penalty(lambda p: set_partitioning(c, rows, p), P)
    if kind == "graph_coloring":
        g, K = _graph(pf), pf.integer("colors")
        return _with_penalty(lambda p: graph_coloring(g, K, p), P)
    if kind == "binary_program":
        return _binary_program(pf, P)
    if kind == "qap":
        return _qap(pf, P)
    if kind == "quadratic_knapsack":
        return _knapsack(pf, P)
    return _polynomial(pf, P)


def _meta_payload(f: Formulated) -> dict:
    payload = {"decoder": f.decoder.to_dict(), "penalty": f.penalty}
    if f.penalized is not None:
        pm = f.penalized
        payload["objective"] = poly_to_data(pm.objective)
        payload["original_n"] = pm.original_n
        payload["penalties"] = [
            {"label": p.label, "weight": p.weight, "terms": poly_to_data(p.terms)} for p in pm.penalties
        ]
    return payload


def _penalized_from_meta(qubo: QuboModel, meta: dict) -> PenaltyizedModel | None:
    if "penalties" not in meta:
        return None
    n = qubo.n
    penalties = tuple(
        Penalty(p["label"], p["weight"], poly_from_data(n, p["terms"])) for p in meta["penalties"]
    )
    objective = poly_from_data(meta["original_n"], meta["objective"])
    return PenaltyizedModel(qubo, meta["penalty"], objective, penalties, meta["original_n"])


def _load_qubo(path: str) -> tuple[QuboModel, dict | None]:
    qubo = io.read_qubo(_read(path))
    meta = io.read_meta(io.meta_path(path))
    if meta is not None and meta["decoder"]["n_total"] != qubo.n:
        raise FormatError(f"{io.meta_path(path)} describes {meta['decoder']['n_total']} variables, file has {qubo.n}")
    return qubo, meta


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text)


# --------------------------------------------------------------------------
# Commands


def cmd_formulate(args, out) -> int:
    pf = io.parse_problem(_read(args.input))
    f = build_problem(pf, args.penalty)
    Path(args.out).write_text(io.write_qubo(f.qubo))
    io.write_meta(io.meta_path(args.out), _meta_payload(f))
    _emit(out, "kind", pf.kind)
    _emit(out, "variables", f.qubo.n)
    _emit(out, "original_variables", f.decoder.original_n)
    _emit(out, "sense", f.qubo.sense)
    _emit(out, "penalty", f.penalty)
    _emit(out, "offset", f.qubo.offset)
    _emit(out, "written", args.out)
    return EXIT_OK


def _tabu_params(args) -> TabuParams:
    return TabuParams(tenure=args.tenure, max_iterations=args.iterations, restarts=args.restarts, seed=args.seed)


def _report_decoded(out, meta: dict | None, bits) -> bool:
    if meta is None:
        return True
    decoded = Decoder.from_dict(meta["decoder"]).decode(bits)
    _emit(out, "objective", decoded.objective)
    _emit(out, "feasible", decoded.feasible)
    _emit(out, "violations", "; ".join(decoded.violations) or None)
    return decoded.feasible


def cmd_solve(args, out) -> int:
    qubo, meta = _load_qubo(args.qubo)
    if args.method == "exact":
        sol = exact_solve(qubo, limit=args.limit, workers=args.workers)
    else:
        sol = tabu_solve(qubo, _tabu_params(args))
    _emit(out, "value", sol.value)
    _emit(out, "quadratic_value", sol.value - qubo.offset)
    _emit(out, "offset", qubo.offset)
    _emit(out, "bits", sol.bitstring)
    _emit(out, "method", sol.method)
    _emit(out, "iterations", sol.iterations)
    _report_decoded(out, meta, sol.bits)
    return EXIT_OK


def cmd_convert(args, out) -> int:
    text = _read(args.input)
    kind = io.sniff_kind(text)
    if kind == "ising":
        ising = io.read_ising(text)
        qubo = ising_to_qubo(ising)
    elif kind == "dense":
        qubo = io.read_dense(text)
        ising = None
    elif kind == "qubo":
        qubo = io.read_qubo(text)
        ising = None
    else:
        raise FormatError(f"unknown program line tag {kind!r}")
    if args.to == "ising":
        result = io.write_ising(ising if ising is not None else qubo_to_ising(qubo))
    elif args.to == "qubo":
        result = io.write_qubo(qubo)
    else:
        result = io.write_dense(qubo, args.to)
    _write(args.out, result, out)
    return EXIT_OK


def _parse_bits(text: str, n: int) -> list[int]:
    cleaned = text.replace(",", "").replace(" ", "")
    if any(ch not in "01" for ch in cleaned):
        raise FormatError(f"bits must be a string of 0 and 1, got {text!r}")
    if len(cleaned) != n:
        raise FormatError(f"expected {n} bits, got {len(cleaned)}")
    return [int(ch) for ch in cleaned]


def cmd_check(args, out) -> int:
    qubo, meta = _load_qubo(args.qubo)
    bits = _parse_bits(args.bits, qubo.n)
    penalized = _penalized_from_meta(qubo, meta) if meta else None
    decoder = Decoder.from_dict(meta["decoder"]) if meta else None
    report = verify(penalized or qubo, bits, decoder)
    _emit(out, "value", report.value)
    _emit(out, "quadratic_value", report.quadratic_value)
    _emit(out, "offset", report.offset)
    if meta is not None:
        _emit(out, "objective", report.objective)
    for label, value in report.penalties:
        if value != 0:
            _emit(out, f"penalty[{label}]", value)
    _emit(out, "feasible", report.feasible)
    _emit(out, "violations", "; ".join(report.violations) or None)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_reduce(args, out) -> int:
    pf = io.parse_problem(_read(args.input))
    if pf.kind != "polynomial":
        raise FormatError(f"reduce expects kind polynomial, got {pf.kind}")
    f = build_problem(pf, args.penalty)
    poly, reduced, records = _reduce(pf, f.penalty)
    text = io.write_polynomial(reduced, _sense(pf))
    text += "".join(
        f"substitution {r.new_var} {r.pair[0]} {r.pair[1]} {io.format_number(r.penalty_weight)}\n" for r in records
    )
    _write(args.out, text, out)
    if args.qubo_out:
        Path(args.qubo_out).write_text(io.write_qubo(f.qubo))
        io.write_meta(io.meta_path(args.qubo_out), _meta_payload(f))
    if args.out is not None:
        _emit(out, "degree", poly.degree)
        _emit(out, "variables", poly.n)
        _emit(out, "auxiliaries", len(records))
        _emit(out, "penalty", f.penalty)
        _emit(out, "written", args.out)
    return EXIT_OK


def run_demo(method: str = "exact", params: TabuParams | None = None, workers: int = 1) -> tuple[list[str], bool]:
    """Solve the ten worked examples; returns the table lines and whether all matched."""
    lines = [f"{'example':<22}{'quantity':<22}{'expected':>10}{'computed':>10}  match"]
    matched = 0
    for ex in EXAMPLES:
        built = ex.build()
        if method == "exact":
            sol = exact_solve(built.qubo, workers=workers)
        else:
            sol = tabu_solve(built.qubo, params)
        computed, ok = ex.measure(sol, built)
        matched += ok
        lines.append(
            f"{ex.key:<22}{ex.quantity:<22}{_fmt(ex.expected):>10}{_fmt(computed):>10}  {_fmt(ok)}"
        )
    lines.append(f"matched: {matched}/{len(EXAMPLES)}")
    return lines, matched == len(EXAMPLES)


def cmd_demo(args, out) -> int:
    lines, ok = run_demo(args.method, _tabu_params(args), args.workers)
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else 1


# --------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("exact", "tabu"), default="exact")
    p.add_argument("--seed", type=int, default=1, help="tabu seed (default 1)")
    p.add_argument("--tenure", type=_positive_int, default=None, help="tabu tenure (default min(7, n-1))")
    p.add_argument("--iterations", type=_positive_int, default=10_000, help="tabu iterations per run")
    p.add_argument("--restarts", type=int, default=4, help="extra tabu runs from fresh starts")
    p.add_argument("--limit", type=int, default=DEFAULT_EXACT_LIMIT, help="largest n for exact enumeration")
    p.add_argument("--workers", type=_positive_int, default=1, help="threads for exact enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qubokit", description="Build, convert and solve QUBO models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("formulate", help="build a QUBO file from a problem description")
    p.add_argument("input")
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_formulate)

    p = sub.add_parser("solve", help="solve a QUBO file")
    p.add_argument("qubo")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("convert", help="convert between QUBO, Ising and dense matrix files")
    p.add_argument("input")
    p.add_argument("--to", choices=("ising", "qubo", "upper", "symmetric"), required=True)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("check", help="evaluate one assignment and report feasibility")
    p.add_argument("qubo")
    p.add_argument("bits", help="bit string such as 01101")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="quadratize a polynomial problem file")
    p.add_argument("input")
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--out", default=None, help="reduced polynomial path (default stdout)")
    p.add_argument("--qubo-out", default=None, help="also write the QUBO file and its metadata")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("demo", help="solve the ten worked examples and compare with known optima")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except QuboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
