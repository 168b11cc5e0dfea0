"""Tests for the text formats and the problem-file parser."""

from pathlib import Path

import numpy as np
import pytest

from oracles import quad_value
from qubokit.errors import FormatError
from qubokit.io import (
    format_number,
    parse_constraint,
    parse_problem,
    parse_terms,
    read_dense,
    read_ising,
    read_meta,
    read_qubo,
    sniff_kind,
    write_dense,
    write_ising,
    write_meta,
    write_polynomial,
    write_qubo,
)
from qubokit.model import QuboModel, all_assignments, evaluate, qubo_to_ising
from qubokit.polynomial import PseudoBooleanPolynomial
from qubokit.worked_examples import EXAMPLES

GOLDEN = Path(__file__).parent / "golden"
SMALL_Q = np.array([[-5, 2, 4, 0], [2, -3, 1, 0], [4, 1, -8, 5], [0, 0, 5, -6]], dtype=float)


class TestFormatNumber:
    @pytest.mark.parametrize(
        "value, text", [(3.0, "3"), (-0.5, "-0.5"), (0.1, "0.1"), (1e20, "1e+20"), (2.0**53, "9007199254740992.0")]
    )
    def test_examples(self, value, text):
        assert format_number(value) == text

    def test_round_trips_exactly(self):
        rng = np.random.default_rng(1)
        for v in rng.normal(scale=1e6, size=200):
            assert float(format_number(v)) == v

    def test_rejects_non_finite(self):
        with pytest.raises(FormatError):
            format_number(float("nan"))


class TestQuboFile:
    def test_golden_small(self):
        text = (GOLDEN / "small.qubo").read_text()
        model = read_qubo(text)
        assert np.array_equal(model.Q, SMALL_Q)
        assert write_qubo(model) == text

    def test_golden_set_partitioning(self):
        text = (GOLDEN / "set_partitioning.qubo").read_text()
        model = read_qubo(text)
        assert model.offset == 40
        assert write_qubo(model) == text
        assert evaluate(model, (1, 0, 0, 0, 1, 0)) == 6

    def test_upper_and_symmetric_write_the_same(self):
        upper = QuboModel(np.triu(SMALL_Q + SMALL_Q.T) - np.diag(np.diag(SMALL_Q)))
        assert write_qubo(upper) == write_qubo(QuboModel(SMALL_Q))

    def test_sense_and_fractional_offset(self):
        model = QuboModel(np.array([[0.25, 0.1], [0.1, 0.0]]), offset=-1.5, sense="max")
        back = read_qubo(write_qubo(model))
        assert back == model

    def test_zero_matrix(self):
        text = write_qubo(QuboModel(np.zeros((3, 3))))
        assert text == "c sense min\nc offset 0\np qubo 0 3 0 0\n"
        assert read_qubo(text) == QuboModel(np.zeros((3, 3)))

    def test_random_round_trip_evaluation(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(1, 13))
            Q = rng.normal(size=(n, n)) * (rng.random((n, n)) < 0.6)
            model = QuboModel(Q, float(rng.normal()))
            back = read_qubo(write_qubo(model))
            xs = all_assignments(n) if n <= 8 else rng.integers(0, 2, (200, n))
            for x in xs:
                assert abs(evaluate(back, x) - quad_value(Q, x, model.offset)) <= 1e-9

    def test_worked_examples_byte_stable(self):
        for ex in EXAMPLES:
            text = write_qubo(ex.build().qubo)
            assert write_qubo(read_qubo(text)) == text

    def test_unknown_comments_ignored(self):
        text = "c made by hand\n" + (GOLDEN / "small.qubo").read_text()
        assert np.array_equal(read_qubo(text).Q, SMALL_Q)

    @pytest.mark.parametrize(
        "text, lineno",
        [
            ("p qubo 0 2 1 0\n0 0 1\n1 0 2\n", 3),
            ("p qubo 0 2 2 0\n0 0 1\n0 0 2\n", 3),
            ("p qubo 0 2 1 0\n0 2 1\n", 2),
            ("p qubo 0 2 1 0\n0 0 x\n", 2),
            ("0 0 1\np qubo 0 2 1 0\n", 1),
            ("c sense up\np qubo 0 1 0 0\n", 1),
            ("p qubo 0 2 1 0\np qubo 0 2 1 0\n", 2),
            ("p qubo 0 2 1 0\n0 0\n", 2),
            ("p qubo 0 2 1 0\n0 0 inf\n", 2),
        ],
    )
    def test_errors_carry_line_numbers(self, text, lineno):
        with pytest.raises(FormatError) as info:
            read_qubo(text)
        assert info.value.lineno == lineno
        assert str(info.value).startswith(f"line {lineno}:")

    def test_count_mismatch(self):
        with pytest.raises(FormatError, match="announces"):
            read_qubo("p qubo 0 2 2 0\n0 0 1\n")

    def test_missing_program_line(self):
        with pytest.raises(FormatError, match="missing"):
            read_qubo("c offset 1\n")


class TestIsingFile:
    def test_round_trip(self):
        ising = qubo_to_ising(QuboModel(SMALL_Q, offset=2))
        text = write_ising(ising)
        back = read_ising(text)
        assert np.array_equal(back.h, ising.h) and np.array_equal(back.J, ising.J)
        assert back.offset == ising.offset
        assert write_ising(back) == text

    def test_pair_line_holds_total_coupling(self):
        # 4 x0 x1 becomes s0 s1 plus linear terms, i.e. J01 = J10 = 0.5.
        ising = qubo_to_ising(QuboModel(np.array([[0.0, 2.0], [2.0, 0.0]])))
        assert ising.J[0, 1] == 0.5
        assert write_ising(ising).endswith("0 1 1\n")

    def test_wrong_tag(self):
        with pytest.raises(FormatError):
            read_ising((GOLDEN / "small.qubo").read_text())


class TestDenseFile:
    @pytest.mark.parametrize("form", ["symmetric", "upper"])
    def test_round_trip(self, form):
        model = QuboModel(SMALL_Q, offset=1)
        text = write_dense(model, form)
        back = read_dense(text)
        for x in all_assignments(4):
            assert evaluate(back, x) == evaluate(model, x)
        assert write_dense(back, form) == text

    def test_upper_layout(self):
        text = write_dense(QuboModel(np.array([[1.0, 2.0], [2.0, 3.0]])), "upper")
        assert text.splitlines()[2:] == ["p dense upper 2", "1 4", "0 3"]

    def test_short_row(self):
        with pytest.raises(FormatError) as info:
            read_dense("p dense symmetric 2\n1 2\n3\n")
        assert info.value.lineno == 3

    def test_sniff(self):
        assert sniff_kind(write_dense(QuboModel(SMALL_Q), "upper")) == "dense"
        assert sniff_kind((GOLDEN / "small.qubo").read_text()) == "qubo"
        with pytest.raises(FormatError):
            sniff_kind("c nothing\n")


class TestProblemFile:
    def test_golden_problem(self):
        pf = parse_problem((GOLDEN / "set_partitioning.txt").read_text())
        assert pf.kind == "set_partitioning"
        assert pf.numbers("cost") == [3, 2, 1, 1, 3, 2]
        assert len(pf.matrix("row")) == 4

    def test_kind_must_come_first(self):
        with pytest.raises(FormatError) as info:
            parse_problem("# comment\ncost 1 2\nkind set_packing\n")
        assert info.value.lineno == 2

    def test_unknown_kind(self):
        with pytest.raises(FormatError, match="kind must be"):
            parse_problem("kind tsp\n")

    def test_duplicate_single_key(self):
        with pytest.raises(FormatError) as info:
            parse_problem("kind set_packing\nweights 1 2\nweights 1 2\n")
        assert info.value.lineno == 3

    def test_empty(self):
        with pytest.raises(FormatError, match="empty"):
            parse_problem("# nothing\n\n")

    def test_integer_value(self):
        pf = parse_problem("kind max_cut\nvertices 2.5\n")
        with pytest.raises(FormatError):
            pf.integer("vertices")

    @pytest.mark.parametrize(
        "line, expected",
        [
            ("1 2 <= 3", ([1, 2], "<=", 3, None)),
            ("1 -1 = 0", ([1, -1], "=", 0, None)),
            ("2 2 >= 1 bound 4", ([2, 2], ">=", 1, 4)),
        ],
    )
    def test_constraint(self, line, expected):
        assert parse_constraint(line.split(), 1) == expected

    @pytest.mark.parametrize("line", ["1 2 3", "1 <= 2 <= 3", "<= 3", "1 <= 3 extra", "1 <= 3 bound x"])
    def test_bad_constraint(self, line):
        with pytest.raises(FormatError):
            parse_constraint(line.split(), 1)

    def test_polynomial_round_trip(self):
        poly = PseudoBooleanPolynomial(4, {(): 2, (0, 1, 2): -1.5, (3,): 4})
        pf = parse_problem(write_polynomial(poly))
        assert parse_terms(pf, 4) == poly

    def test_term_index_range(self):
        pf = parse_problem("kind polynomial\nvariables 2\nterm 1 0 2\n")
        with pytest.raises(FormatError) as info:
            parse_terms(pf, 2)
        assert info.value.lineno == 3


class TestMeta:
    def test_round_trip_and_missing(self, tmp_path):
        path = tmp_path / "m.json"
        assert read_meta(path) is None
        write_meta(path, {"b": 1, "a": [1, 2]})
        assert read_meta(path) == {"a": [1, 2], "b": 1}
        assert path.read_text().index('"a"') < path.read_text().index('"b"')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("{\n oops")
        with pytest.raises(FormatError):
            read_meta(path)
