"""Build, convert, solve and verify QUBO models."""

from .errors import (
    ArityError,
    DegreeError,
    DimensionError,
    DomainError,
    FormatError,
    InfeasibleError,
    PreconditionError,
    QuboError,
    SizeError,
)
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
    set_partitioning_direct,
)
from .model import (
    MAXIMIZE,
    MINIMIZE,
    IsingModel,
    QuboModel,
    evaluate,
    ising_to_qubo,
    qubo_to_ising,
    to_symmetric,
    to_upper_triangular,
)
from .penalties import (
    ConstrainedProblem,
    LinearConstraint,
    PenaltyizedModel,
    expand_slack,
    known_penalty,
    reformulate,
    suggest_penalty,
    transformation1,
    transformation2,
)
from .polynomial import PseudoBooleanPolynomial
from .reduction import SubstitutionRecord, penalty_gadget_check, poly_to_qubo, quadratize
from .solve import Solution, TabuParams, exact_solve, flip_delta, tabu_solve, verify

__version__ = "0.1.0"
