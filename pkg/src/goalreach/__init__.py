"""Goal-reaching reinsurance and portfolio selection under dependence uncertainty."""

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import (
    Distribution,
    DomainError,
    Empirical,
    Lognormal,
    PreconditionError,
    TruncatedNormal,
    TruncatedShiftedPareto,
    Uniform,
    from_spec,
    make_empirical,
    reflect,
    shift,
)
from .distortion import (
    DistortionPricing,
    PowerDistortion,
    layer_g_expectation,
    layer_premium,
    premium,
    z0,
)
from .frechet import Direction, FrechetResult, alpha, sup_prob, worst_case_coupling
from .numerics import NumericError
from .portfolio import PortfolioProblem, PortfolioSolution, solve_goal_reaching
from .reinsurance import (
    Case,
    LayerContract,
    ReinsuranceProblem,
    ReinsuranceSolution,
    comonotone_map,
    evaluate_comonotone,
    evaluate_worst_case,
    solve_comonotone,
    solve_no_background,
    solve_with_background,
)

__version__ = "0.1.0"
