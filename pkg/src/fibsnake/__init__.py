"""Fibonacci-weighted control words, snake manipulator workspaces and their IFS attractors."""
from .errors import (
    BudgetError,
    DivergentBaseError,
    FibIndexError,
    FibSnakeError,
    NumericalInstabilityError,
    OutOfRangeError,
    RegimeError,
    RegimeWarning,
)
from .expansion import (
    ControlWord,
    ExpansionResult,
    evaluate,
    gap_interval,
    greedy_batch,
    greedy_real,
    greedy_strided,
    shift,
)
from .geometry import Polygon2, Segment2, convex_hull, hausdorff, point_in_polygon, reachable_polygon, zonogon
from .ifs import AttractorCover, build_maps, chaos_game, companion, iterate_complex_hull, iterate_real, k_min
from .manipulator import Configuration, JointTrace, ManipulatorParams, joint_positions, workspace
from .numbers import PHI, fib, scaled_terms
from .series import delta, q_crit, tail_remainder, tail_sum

__version__ = "0.1.0"
