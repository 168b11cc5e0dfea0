"""The ten small reference instances, with their known optimal values.

Each entry builds its model from embedded data and knows which number to
read off an optimal solution: the QUBO value for the natural QUBO problems,
the decoded original objective for the constrained ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .formulations import (
    CnfInstance,
    DecodedSolution,
    Decoder,
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
from .model import QuboModel
from .penalties import LinearConstraint, PenaltyizedModel
from .solve import Solution

NUMBERS = (25, 7, 13, 31, 42, 17, 21, 10)
CUT_GRAPH = Graph(5, ((0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)))
PACKING_ROWS = ((1, 0, 1, 1), (1, 1, 0, 0))
CLAUSES = (
    (1, 2), (1, -2), (-1, 2), (-1, -2), (-1, 3), (-1, -3),
    (2, -3), (2, 4), (-2, 3), (-2, -3), (3, 4), (-3, -4),
)
PARTITION_COSTS = (3, 2, 1, 1, 3, 2)
PARTITION_ROWS = (
    (1, 0, 1, 0, 0, 1),
    (0, 1, 1, 0, 1, 1),
    (0, 0, 1, 1, 1, 0),
    (1, 1, 0, 1, 0, 1),
)
# Adjacency read off the off-diagonal 2's of the reference 15 x 15 coloring matrix.
COLORING_GRAPH = Graph(5, ((0, 1), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4)))
PROGRAM_OBJECTIVE = (6, 4, 8, 5, 5)
PROGRAM_CONSTRAINTS = (
    LinearConstraint.dense((2, 2, 4, 3, 2), "le", 7),
    LinearConstraint.dense((1, 2, 2, 1, 2), "eq", 4),
    LinearConstraint.dense((3, 3, 2, 4, 4), "ge", 5),
)
# The reference expansion uses slack bounds 3 and 6, tighter than the box bounds.
PROGRAM_SLACK = {0: 3, 2: 6}
QAP = QapInstance(((0, 5, 2), (5, 0, 3), (2, 3, 0)), ((0, 8, 15), (8, 0, 13), (15, 13, 0)))
KNAPSACK_VALUES = ((2, 8, 6, 10), (0, 5, 2, 6), (0, 0, 2, 4), (0, 0, 0, 4))
KNAPSACK_REQUIREMENTS = (8, 6, 5, 3)
KNAPSACK_BUDGET = 16


@dataclass(frozen=True)
class Built:
    qubo: QuboModel
    decoder: Decoder
    penalized: PenaltyizedModel | None = None


@dataclass(frozen=True)
class WorkedExample:
    key: str
    title: str
    quantity: str
    expected: float
    build: Callable[[], Built]
    read: Callable[[Solution, QuboModel, DecodedSolution], float]

    def measure(self, solution: Solution, built: Built) -> tuple[float, bool]:
        """Read the reported number off ``solution``; a match also requires feasibility."""
        decoded = built.decoder.decode(solution.bits)
        computed = self.read(solution, built.qubo, decoded)
        ok = computed == self.expected and decoded.feasible
        return computed, ok


def _penalized(pair) -> Built:
    model, decoder = pair
    return Built(model.qubo, decoder, model)


def _plain(pair) -> Built:
    return Built(*pair)


def _value(sol: Solution, qubo: QuboModel, dec: DecodedSolution) -> float:
    return sol.value


def _quadratic(sol: Solution, qubo: QuboModel, dec: DecodedSolution) -> float:
    return sol.value - qubo.offset


def _objective(sol: Solution, qubo: QuboModel, dec: DecodedSolution) -> float:
    return dec.objective


EXAMPLES: tuple[WorkedExample, ...] = (
    WorkedExample(
        "number_partitioning", "number partitioning", "x'Qx", -6889,
        lambda: Built(*number_partitioning(NUMBERS)[:2]), _value,
    ),
    WorkedExample("max_cut", "max cut", "cut edges", 5, lambda: _plain(max_cut(CUT_GRAPH)), _value),
    WorkedExample(
        "min_vertex_cover", "minimum vertex cover (P=8)", "cover size", 3,
        lambda: _penalized(min_vertex_cover(CUT_GRAPH, 8)), _objective,
    ),
    WorkedExample(
        "set_packing", "set packing (P=6)", "packed weight", 2,
        lambda: _penalized(set_packing(PACKING_ROWS, (1, 1, 1, 1), 6)), _value,
    ),
    WorkedExample(
        "max_2sat", "max 2-sat", "unsatisfied clauses", 1,
        lambda: _plain(max_2sat(CnfInstance.from_signed(4, CLAUSES))), _objective,
    ),
    WorkedExample(
        "set_partitioning", "set partitioning (P=10)", "cost", 6,
        lambda: _penalized(set_partitioning(PARTITION_COSTS, PARTITION_ROWS, 10)), _objective,
    ),
    WorkedExample(
        "graph_coloring", "graph coloring (K=3, P=4)", "x'Qx", -20,
        lambda: _penalized(graph_coloring(COLORING_GRAPH, 3, 4)), _quadratic,
    ),
    WorkedExample(
        "binary_program", "general 0/1 program (P=10)", "objective", 16,
        lambda: _penalized(
            general_binary_program(PROGRAM_OBJECTIVE, PROGRAM_CONSTRAINTS, 10, PROGRAM_SLACK, sense="max")
        ),
        _objective,
    ),
    WorkedExample(
        "qap", "quadratic assignment (P=200)", "assignment cost", 218,
        lambda: _penalized(quadratic_assignment(QAP, 200)), _objective,
    ),
    WorkedExample(
        "quadratic_knapsack", "quadratic knapsack (P=10)", "value", 28,
        lambda: _penalized(
            quadratic_knapsack(KNAPSACK_VALUES, KNAPSACK_REQUIREMENTS, KNAPSACK_BUDGET, 10, slack_bound=3)
        ),
        _objective,
    ),
)


def example(key: str) -> WorkedExample:
    for ex in EXAMPLES:
        if ex.key == key:
            return ex
    raise KeyError(key)
