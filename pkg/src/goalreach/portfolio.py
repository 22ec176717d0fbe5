"""Robust goal-reaching portfolio selection with background risk.

The investor maximises the worst case, over all couplings of the payoff ``X``
with a background risk ``Y ~ F0``, of ``P(X - Y >= xi)`` subject to the
budget ``E[rho X] <= x0``. The optimum is a digital payoff

    X* = kappa* * 1{rho <= F_rho^{-1}(1 - r*)},

where ``r*`` maximises ``F0(x0 / C(r) - xi) - r`` over ``[0, 1)`` and
``C(r) = int_r^1 F_rho^{-1}(1 - s) ds`` is the cost of paying one unit on the
cheapest ``1 - r`` of states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import Distribution, DomainError, PreconditionError, shift
from .numerics import NumericError, adaptive_simpson, golden_section_max

COST_TOL = 1e-12
_BELOW_ONE = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class PortfolioProblem:
    x0: float
    xi: float
    F_rho: Distribution
    F0: Distribution

    def __post_init__(self):
        if not self.x0 > 0:
            raise DomainError("initial wealth x0 must be positive")
        if not self.xi > 0:
            raise DomainError("goal xi must be positive")
        if not self.F_rho.is_continuous:
            raise PreconditionError("pricing kernel must be atomless")
        if not self.F0.is_continuous:
            raise PreconditionError("background risk cdf must be continuous")
        if self.F_rho.support[0] < 0:
            raise PreconditionError("pricing kernel must be nonnegative")


@dataclass(frozen=True)
class PortfolioSolution:
    r_star: float
    kappa_star: float
    rho_threshold: float
    value: float

    def to_dict(self) -> dict:
        return {
            "r_star": self.r_star,
            "kappa_star": self.kappa_star,
            "rho_threshold": self.rho_threshold,
            "value": self.value,
        }


def _quantile_integral(F: Distribution, a: float, b: float, tol: float = COST_TOL) -> float:
    """``int_a^b F^{-1}(u) du`` for ``0 <= a <= b <= 1``.

    Substitutes ``u = b - (b - a) v**2`` so the integrand carries a factor
    ``v`` at ``u = b``, which tames an unbounded quantile when ``b = 1``.
    """
    if b <= a:
        return 0.0
    width = b - a

    def integrand(v: float) -> float:
        if v == 0.0:
            return 0.0
        # 1 - v*v rounds to 1.0 for v < 1e-8; stay strictly below the top
        u = min(b - width * v * v, _BELOW_ONE)
        q = F.lower_quantile(u) if u > 0.0 else F.support[0]
        return 2.0 * width * v * q

    val = adaptive_simpson(integrand, 0.0, 1.0, tol)
    if not math.isfinite(val):
        raise NumericError(f"quantile integral over [{a}, {b}] diverges")
    return val


def capital_cost(F_rho: Distribution, r: float) -> float:
    """``int_r^1 F_rho^{-1}(1 - s) ds``: price of one unit paid on ``{rho <= F_rho^{-1}(1 - r)}``."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r must lie in [0, 1), got {r}")
    return _quantile_integral(F_rho, 0.0, 1.0 - r)


def capital_cost_grid(F_rho: Distribution, rs: np.ndarray) -> np.ndarray:
    """:func:`capital_cost` on an increasing grid, accumulated cell by cell."""
    rs = np.asarray(rs, dtype=float)
    us = 1.0 - rs
    out = np.empty_like(us)
    out[-1] = _quantile_integral(F_rho, 0.0, float(us[-1]))
    for i in range(len(us) - 2, -1, -1):
        out[i] = out[i + 1] + _quantile_integral(F_rho, float(us[i + 1]), float(us[i]))
    return out


def goal_objective(p: PortfolioProblem, r: float, cost: float | None = None) -> float:
    """``F0(x0 / C(r) - xi) - r``: worst-case reaching probability of the digital payoff at ``r``."""
    if cost is None:
        cost = capital_cost(p.F_rho, r)
    kappa = p.x0 / cost if cost > 0 else math.inf
    return p.F0._cdf_scalar(kappa - p.xi) - r


def solve_goal_reaching(p: PortfolioProblem, cfg: SolverConfig = DEFAULT_CONFIG) -> PortfolioSolution:
    rs = np.linspace(0.0, cfg.r_cap, cfg.portfolio_grid)
    costs = capital_cost_grid(p.F_rho, rs)
    if not np.isfinite(costs[0]):
        raise NumericError("E[rho] is not finite")
    F1 = shift(p.F0, p.xi)
    with np.errstate(divide="ignore"):
        kappas = np.where(costs > 0, p.x0 / costs, np.inf)
    values = F1.cdf(kappas) - rs
    i = int(np.argmax(values))
    r_star, best = float(rs[i]), float(values[i])
    i_lo, i_hi = max(i - 1, 0), min(i + 1, len(rs) - 1)
    lo, hi = float(rs[i_lo]), float(rs[i_hi])
    anchor_u, anchor_cost = 1.0 - hi, float(costs[i_hi])

    def cost_near(r: float) -> float:
        # C(r) = C(hi) + int_{1-hi}^{1-r} F^{-1}; only the partial cell is new
        return anchor_cost + _quantile_integral(p.F_rho, anchor_u, 1.0 - r)

    if hi > lo:
        r, val = golden_section_max(lambda r: goal_objective(p, r, cost_near(r)), lo, hi, cfg.refine_xtol)
        if val > best + 1e-15:
            r_star, best = r, val
    if r_star >= cfg.r_cap and len(rs) > 1:
        raise NumericError("optimal r sits on the grid cap; the cap is binding")
    kappa = p.x0 / cost_near(r_star)
    threshold = p.F_rho.quantile(1.0 - r_star)
    value = p.F0._cdf_scalar(kappa - p.xi) - r_star
    return PortfolioSolution(
        r_star=r_star, kappa_star=kappa, rho_threshold=float(threshold), value=min(max(value, 0.0), 1.0)
    )


def optimal_payoff(sol: PortfolioSolution, rho_sample):
    """``kappa*`` on the winning event ``{rho <= threshold}``, zero elsewhere."""
    if np.ndim(rho_sample) == 0:
        return sol.kappa_star if rho_sample <= sol.rho_threshold else 0.0
    rho = np.asarray(rho_sample, dtype=float)
    return np.where(rho <= sol.rho_threshold, sol.kappa_star, 0.0)
