"""Goal-reaching layer reinsurance: no background risk, worst-case dependent
background risk, and comonotone background risk.

An insurer with wealth ``w0`` cedes ``I(X) = min((X - a)_+, b - a)`` of a
bounded loss ``X`` for the distortion premium and wants to keep
``w0 - Y - X + I(X) - premium >= xi``. All three solvers return a layer
``(a, b)``; they differ in how the background risk ``Y`` enters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import Distribution, DomainError, PreconditionError
from .distortion import (
    DistortionPricing,
    check_comonotone_ready,
    layer_premium,
    premium as distortion_premium,
    survival_integral,
    z0 as critical_retention,
)
from .numerics import (
    NumericError,
    bisect_first_true,
    bisect_last_true,
    bisect_root,
    golden_section_max,
    grid_refine_max,
    largest_root,
)


class Case(str, enum.Enum):
    GOAL_CERTAIN = "goal_certain"
    INTERIOR = "interior"
    INDIFFERENT = "indifferent"
    NO_REINSURANCE = "no_reinsurance"


@dataclass(frozen=True)
class LayerContract:
    """Cede ``min((x - attach)_+, detach - attach)``; retain the rest."""

    attach: float
    detach: float

    def __post_init__(self):
        if self.attach < 0:
            raise DomainError("attachment must be nonnegative")
        if self.detach < self.attach:
            raise DomainError("detachment must not be below attachment")

    @property
    def width(self) -> float:
        return self.detach - self.attach

    def ceded(self, x):
        return np.clip(np.asarray(x, dtype=float) - self.attach, 0.0, self.width)

    def retained(self, x):
        return np.asarray(x, dtype=float) - self.ceded(x)

    def retained_scalar(self, x: float) -> float:
        if x <= self.attach:
            return x
        if x <= self.detach:
            return self.attach
        return x - self.width

    def retained_cdf(self, F_X: Distribution, z: float) -> float:
        """``P(R(X) <= z)``: the retained loss is flat at ``attach`` on the ceded layer."""
        if z < self.attach:
            return F_X._cdf_scalar(z)
        return F_X._cdf_scalar(z + self.width)

    def to_dict(self) -> dict:
        return {"attach": self.attach, "detach": self.detach}


@dataclass(frozen=True)
class ReinsuranceSolution:
    contract: LayerContract
    premium: float
    value: float
    case: Case

    def to_dict(self) -> dict:
        return {
            "contract": self.contract.to_dict(),
            "premium": self.premium,
            "value": self.value,
            "case": self.case.value,
        }


@dataclass(frozen=True)
class ComonotoneMap:
    """``h(x) = F_Y^{-1}(F_X(x))`` so that ``Y = h(X)`` is comonotone with ``X``."""

    F_X: Distribution
    F_Y: Distribution

    def __call__(self, x: float) -> float:
        return float(self.F_Y.lower_quantile(self.F_X._cdf_scalar(float(x))))


def comonotone_map(F_X: Distribution, F_Y: Distribution, check_points: int = 501) -> ComonotoneMap:
    h = ComonotoneMap(F_X, F_Y)
    lo, hi = F_X.support
    xs = np.linspace(lo, hi, check_points)
    hs = np.array([h(x) for x in xs])
    if np.any(np.diff(hs) < -1e-9):
        raise PreconditionError("comonotone map is not increasing on the support of X")
    return h


@dataclass(frozen=True)
class ReinsuranceProblem:
    w0: float
    xi: float
    pricing: DistortionPricing
    F_X: Distribution
    F0: Distribution | None = None
    h: Callable[[float], float] | None = None

    def __post_init__(self):
        lo, hi = self.F_X.support
        if lo < 0 or not math.isfinite(hi):
            raise DomainError("insurable loss must live on a bounded subset of [0, inf)")

    @property
    def M(self) -> float:
        return float(self.F_X.support[1])

    @property
    def loading_factor(self) -> float:
        return 1.0 + self.pricing.loading

    def G(self, t: float) -> float:
        """``int_0^t g(S_X(y)) dy``, i.e. the distorted price of ``min(X, t)``."""
        return survival_integral(self.pricing.g, self.F_X)(t)

    @property
    def distorted_mean(self) -> float:
        return survival_integral(self.pricing.g, self.F_X).total

    def layer_price(self, a: float, b: float) -> float:
        return self.loading_factor * (self.G(b) - self.G(a)) if b > a else 0.0


def _solution(p: ReinsuranceProblem, a: float, b: float, value: float, case: Case) -> ReinsuranceSolution:
    c = LayerContract(a, b)
    return ReinsuranceSolution(c, layer_premium(p.pricing, p.F_X, a, b), float(value), case)


# ---------------------------------------------------------------------------
# no background risk


def psi(p: ReinsuranceProblem, pi: float) -> float:
    """``E^g[X] - pi/(1+loading) - int_0^{w0-pi-xi} g(S_X)``; convex in ``pi``.

    Positive values mean the premium ``pi`` cannot buy certainty of the goal.
    """
    span = p.w0 - p.xi
    if not (-1e-12 <= pi <= span + 1e-12):
        raise DomainError(f"premium {pi} outside [0, w0 - xi] = [0, {span}]")
    return p.distorted_mean - pi / p.loading_factor - p.G(p.w0 - pi - p.xi)


def psi_prime(p: ReinsuranceProblem, pi: float) -> float:
    eta = p.w0 - pi - p.xi
    return p.pricing.g(1.0 - p.F_X._cdf_scalar(eta)) - 1.0 / p.loading_factor


def check_no_background_assumption(p: ReinsuranceProblem) -> None:
    pg = distortion_premium(p.pricing, p.F_X)
    if not p.xi < p.w0:
        raise PreconditionError(f"goal xi={p.xi} must be below initial wealth w0={p.w0}")
    if not p.w0 - min(pg, p.M) < p.xi:
        raise PreconditionError(
            f"goal xi={p.xi} must exceed w0 - min(premium(X), M) = {p.w0 - min(pg, p.M)}"
        )


def solve_no_background(p: ReinsuranceProblem, cfg: SolverConfig = DEFAULT_CONFIG) -> ReinsuranceSolution:
    check_no_background_assumption(p)
    span = p.w0 - p.xi
    factor = p.loading_factor

    # pi_bar: leftmost sign change of the nondecreasing psi'
    pi_bar = bisect_first_true(lambda x: psi_prime(p, x) >= 0.0, span - p.M - 1.0, span + 1.0, 1e-12)
    pi_star = max(0.0, min(pi_bar, span))

    if pi_star < span and psi(p, pi_star) <= 0.0:
        # goal reachable for sure: cheapest premium with psi <= 0, then a stop-loss
        if psi(p, 0.0) <= 0.0:
            pi_hat = 0.0
        else:
            pi_hat = bisect_first_true(lambda x: psi(p, x) <= 0.0, 0.0, pi_star, 1e-12)
        retained_price = p.distorted_mean - pi_hat / factor
        eta_hat = p.w0 - pi_hat - p.xi
        t_hat = bisect_root(lambda t: p.G(t) - retained_price, 0.0, min(eta_hat, p.M), 1e-12)
        return _solution(p, t_hat, p.M, 1.0, Case.GOAL_CERTAIN)

    eta = p.w0 - pi_star - p.xi
    target = pi_star / factor
    G_eta = p.G(eta)
    q_star = largest_root(
        lambda q: p.G(q) - G_eta - target, eta, p.M, cfg.root_scan_steps, cfg.root_xtol
    )
    case = Case.NO_REINSURANCE if pi_star == 0.0 else Case.INTERIOR
    if case is Case.NO_REINSURANCE:
        q_star = eta
    return _solution(p, eta, q_star, p.F_X._cdf_scalar(q_star), case)


# ---------------------------------------------------------------------------
# worst-case dependence


def _require_background(p: ReinsuranceProblem) -> Distribution:
    if p.F0 is None:
        raise PreconditionError("background risk distribution F0 is required")
    if not p.F0.is_continuous:
        raise PreconditionError("background risk cdf must be continuous")
    return p.F0


def K_objective(p: ReinsuranceProblem, z: float, y: float) -> float:
    """``F_X(y) + F0(w0 - (1+loading) int_z^y g(S_X) - xi - z)``.

    The worst-case reaching probability of the layer ``(z, y)`` is ``K - 1``
    when ``z`` is chosen optimally for ``y``.
    """
    F0 = _require_background(p)
    if z > y:
        raise DomainError(f"K needs z <= y, got ({z}, {y})")
    if z < 0 or y > p.M:
        raise DomainError("K needs 0 <= z <= y <= M")
    return p.F_X._cdf_scalar(y) + F0._cdf_scalar(p.w0 - p.layer_price(z, y) - p.xi - z)


def solve_with_background(p: ReinsuranceProblem, cfg: SolverConfig = DEFAULT_CONFIG) -> ReinsuranceSolution:
    F0 = _require_background(p)
    zc = critical_retention(p.pricing, p.F_X)
    G_z0 = p.G(zc)
    factor = p.loading_factor

    def k(y: float) -> float:
        z = min(y, zc)
        layer = factor * (p.G(y) - (G_z0 if z == zc else p.G(z))) if y > z else 0.0
        return p.F_X._cdf_scalar(y) + F0._cdf_scalar(p.w0 - layer - p.xi - z)

    # premiums are confined to [0, w0 - xi]; the layer price grows with y above z0
    budget = max(p.w0 - p.xi, 0.0)
    y_cap = p.M
    if zc < p.M and p.layer_price(zc, p.M) > budget:
        y_cap = bisect_root(lambda y: factor * (p.G(y) - G_z0) - budget, zc, p.M, 1e-12)

    ys = np.linspace(0.0, y_cap, cfg.reinsurance_grid)
    values = np.array([k(float(y)) for y in ys])
    y_star, k_star = grid_refine_max(k, ys, values, cfg.refine_xtol)
    z_star = min(y_star, zc)
    value = k_star - 1.0
    if value <= cfg.indifference_tol:
        return _solution(p, z_star, y_star, 0.0, Case.INDIFFERENT)
    if y_star <= zc:
        return _solution(p, y_star, y_star, value, Case.NO_REINSURANCE)
    case = Case.GOAL_CERTAIN if value >= 1.0 - 1e-12 else Case.INTERIOR
    return _solution(p, z_star, y_star, min(value, 1.0), case)


def evaluate_worst_case(
    p: ReinsuranceProblem, c: LayerContract, cfg: SolverConfig = DEFAULT_CONFIG
) -> float:
    """Worst-case reaching probability of a given layer over all couplings of ``(X, Y)``.

    Equals ``max(0, sup_{z in [0, M]} (F_{R(X)}(z) - F_pi(z)))`` with
    ``F_pi(z) = 1 - F0(w0 - pi - xi - z)``.
    """
    F0 = _require_background(p)
    if c.detach > p.M + 1e-12:
        raise DomainError("contract detaches above the maximal loss")
    thr = p.w0 - layer_premium(p.pricing, p.F_X, c.attach, c.detach) - p.xi

    def gap(z: float) -> float:
        return c.retained_cdf(p.F_X, z) - (1.0 - F0._cdf_scalar(thr - z))

    zs = np.linspace(0.0, p.M, cfg.reinsurance_grid)
    extra = [c.attach, max(c.attach - 1e-12, 0.0)]
    zs = np.union1d(zs, extra)
    F_R = np.where(zs < c.attach, p.F_X.cdf(zs), p.F_X.cdf(zs + c.width))
    gaps = F_R - (1.0 - F0.cdf(thr - zs))
    z_best, best = grid_refine_max(gap, zs, gaps, cfg.refine_xtol)
    return max(0.0, min(best, 1.0))


# ---------------------------------------------------------------------------
# comonotone background risk


def _require_h(p: ReinsuranceProblem) -> Callable[[float], float]:
    if p.h is None:
        raise PreconditionError("comonotone mode needs the map h with Y = h(X)")
    return p.h


def L_function(p: ReinsuranceProblem, a: float, b: float) -> float:
    """``h(b) + a + (1+loading) int_a^b g(S_X)``: worst retained position of the layer ``(a, b)``."""
    return _require_h(p)(b) + a + p.layer_price(a, b)


def solve_comonotone(p: ReinsuranceProblem, cfg: SolverConfig = DEFAULT_CONFIG) -> ReinsuranceSolution:
    h = _require_h(p)
    check_comonotone_ready(p.pricing)
    if not p.F_X.is_continuous:
        raise PreconditionError("comonotone solver needs a continuous loss distribution")
    xs = np.linspace(0.0, p.M, 1001)
    if np.any(np.diff(p.F_X.cdf(xs)) <= 0.0):
        raise PreconditionError("comonotone solver needs F_X strictly increasing on [0, M]")

    zc = critical_retention(p.pricing, p.F_X)
    budget = p.w0 - p.xi
    if h(p.M) + zc + p.layer_price(zc, p.M) <= budget:
        return _solution(p, zc, p.M, 1.0, Case.GOAL_CERTAIN)
    if budget < h(0.0):
        return _solution(p, zc, zc, 0.0, Case.INDIFFERENT)
    if h(zc) + zc >= budget:
        x_bar = largest_root(lambda x: h(x) + x - budget, 0.0, p.M, cfg.root_scan_steps, cfg.root_xtol)
        return _solution(p, zc, zc, p.F_X._cdf_scalar(x_bar), Case.NO_REINSURANCE)
    b_star = bisect_root(lambda b: L_function(p, zc, b) - budget, zc, p.M, cfg.root_xtol)
    return _solution(p, zc, b_star, p.F_X._cdf_scalar(b_star), Case.INTERIOR)


def evaluate_comonotone(p: ReinsuranceProblem, c: LayerContract) -> float:
    """``P(h(X) + R(X) + premium <= w0 - xi)`` for the given layer.

    ``h + R`` is increasing, so the event is ``{X <= x_bar}`` with ``x_bar``
    the last point where the inequality holds.
    """
    h = _require_h(p)
    thr = p.w0 - p.xi - layer_premium(p.pricing, p.F_X, c.attach, c.detach)

    def ok(t: float) -> bool:
        return h(t) + c.retained_scalar(t) <= thr

    if not ok(0.0):
        return 0.0
    if ok(p.M):
        return 1.0
    x_bar = bisect_last_true(ok, 0.0, p.M, 1e-12)
    return p.F_X._cdf_scalar(x_bar)
