"""Cell-to-location layout optimization for cellular manufacturing systems."""

from .errors import *  # noqa: F401,F403
from .instance import (
    CellLayoutInstance,
    compose_weights,
    generate_random_instance,
    letter_to_score,
    load_fixture,
    normalize_matrix,
    parse_instance,
    read_instance,
    serialize_instance,
)
from .objective import Assignment, CostBreakdown, apply_swap, evaluate, swap_delta
from .solvers import (
    SaParams,
    SolveResult,
    auto_initial_temperature,
    brute_force,
    greedy_descent,
    simulated_annealing,
)

__version__ = "0.1.0"
