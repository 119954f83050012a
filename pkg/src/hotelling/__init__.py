"""Exact payoffs and equilibrium checks for vendors on a linear city."""

from .core import (
    Block,
    BlockDecomposition,
    Intervals,
    ParseError,
    Profile,
    Rat,
    blocks,
    format_rat,
    intervals,
    make_profile,
    parse_profile,
    parse_rat,
)
from .dynamics import DynamicsTrace, best_response_on_grid, run_dynamics
from .equilibrium import (
    CrossValidation,
    DeviationReport,
    DisagreementError,
    Finding,
    GapLimit,
    PreconditionError,
    Verdict,
    check_necessary,
    check_theorem_conditions,
    cross_validate,
    cross_validate_many,
    deviation_sup,
    payoff_floor_check,
    screen_equilibria,
    verify_equilibrium,
)
from .payoff import PayoffVector, TieSet, density, payoff_closed_form, payoff_numeric, tie_set
from .synthesis import (
    InfeasibleError,
    LengthSystem,
    canonical_equilibrium,
    lengths_to_profile,
    sample_equilibria,
)

__version__ = "0.1.0"
