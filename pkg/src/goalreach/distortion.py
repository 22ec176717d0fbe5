"""Distortion premium principle, layer premiums and the critical retention z0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Mapping

import numpy as np

from .dist_core import Distribution, DomainError, PreconditionError
from .numerics import adaptive_simpson, bisect_last_true

QUAD_TOL = 1e-9
QUAD_DEPTH = 50


@dataclass(frozen=True)
class PowerDistortion:
    """``g(s) = s**theta``; concave iff ``theta <= 1``, identity at ``theta = 1``."""

    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise DomainError("power distortion needs theta > 0")

    strictly_increasing = True
    continuous = True

    def __call__(self, s):
        if isinstance(s, float):
            return s**self.theta if s > 0.0 else 0.0
        return np.power(np.clip(s, 0.0, 1.0), self.theta)

    @property
    def is_concave(self) -> bool:
        return self.theta <= 1.0

    def to_spec(self):
        return {"family": "power", "theta": self.theta}


IDENTITY = PowerDistortion(1.0)


@dataclass(frozen=True)
class DistortionPricing:
    """Premium ``(1 + loading) * int g(S_Z(z)) dz`` for a nonnegative risk ``Z``.

    ``g`` must be increasing and left-continuous with ``g(0) = 0`` and
    ``g(1) = 1``; these are checked on a grid at construction.
    """

    g: Callable = IDENTITY
    loading: float = 0.0

    def __post_init__(self):
        if self.loading < 0:
            raise DomainError("safety loading must be nonnegative")
        if abs(float(self.g(0.0))) > 1e-12 or abs(float(self.g(1.0)) - 1.0) > 1e-12:
            raise DomainError("distortion must satisfy g(0)=0 and g(1)=1")
        grid = np.linspace(0.0, 1.0, 1001)
        vals = np.array([float(self.g(float(s))) for s in grid])
        if np.any(np.diff(vals) < -1e-12):
            raise DomainError("distortion must be increasing")

    @property
    def g_strictly_increasing(self) -> bool:
        return bool(getattr(self.g, "strictly_increasing", False))

    def to_spec(self):
        spec = dict(self.g.to_spec()) if hasattr(self.g, "to_spec") else {"family": "custom"}
        spec["loading"] = self.loading
        return spec


def pricing_from_spec(spec: Mapping[str, Any]) -> DistortionPricing:
    """``{"family": "power", "theta": 0.5, "loading": 0.1}`` -> pricing."""
    spec = dict(spec)
    family = spec.pop("family", "power")
    loading = float(spec.pop("loading", 0.0))
    if family == "power":
        g = PowerDistortion(float(spec.pop("theta", 1.0)))
    elif family in ("identity", "expected_value"):
        g = IDENTITY
    else:
        raise DomainError(f"unknown distortion family {family!r}")
    if spec:
        raise DomainError(f"unknown distortion parameters: {sorted(spec)}")
    return DistortionPricing(g, loading)


class SurvivalIntegral:
    """``G(t) = int_lo^t g(S_X(y)) dy`` with a cached table of knots.

    Cumulative values at ``n_cells + 1`` uniform knots are built once; each
    query then integrates only the partial cell by adaptive Simpson.
    """

    def __init__(self, g: Callable, X: Distribution, n_cells: int = 256, tol: float = QUAD_TOL):
        lo, hi = X.support
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise DomainError("layer integrals need a bounded support")
        self.g = g
        self.X = X
        self.lo, self.hi = float(lo), float(hi)
        self.tol = tol
        self._knots = np.linspace(self.lo, self.hi, n_cells + 1)
        self._h = (self.hi - self.lo) / n_cells
        cell_tol = tol / n_cells
        parts = [
            adaptive_simpson(self.integrand, float(a), float(b), cell_tol, QUAD_DEPTH)
            for a, b in zip(self._knots[:-1], self._knots[1:])
        ]
        self._cum = np.concatenate(([0.0], np.cumsum(parts)))

    def integrand(self, y: float) -> float:
        return self.g(1.0 - self.X._cdf_scalar(y))

    def __call__(self, t: float) -> float:
        if t <= self.lo:
            # below the support S = 1 and g(1) = 1
            return -(self.lo - t)
        if t >= self.hi:
            return float(self._cum[-1])
        k = min(int((t - self.lo) / self._h), len(self._knots) - 2)
        base = float(self._knots[k])
        return float(self._cum[k]) + adaptive_simpson(self.integrand, base, t, self.tol * 0.1, QUAD_DEPTH)

    @property
    def total(self) -> float:
        return float(self._cum[-1])

    def between(self, a: float, b: float) -> float:
        return self(b) - self(a)


@lru_cache(maxsize=64)
def survival_integral(g: Callable, X: Distribution) -> SurvivalIntegral:
    return SurvivalIntegral(g, X)


def distorted_expectation(p: DistortionPricing, Z: Distribution) -> float:
    """``E^g[Z] = int_0^hi g(S_Z(z)) dz`` for a nonnegative, bounded ``Z``."""
    lo, hi = Z.support
    if lo < 0:
        raise DomainError("distortion premiums are defined for nonnegative risks")
    if not math.isfinite(hi):
        raise DomainError("premium needs a finite upper support")
    return adaptive_simpson(lambda z: p.g(1.0 - Z._cdf_scalar(z)), 0.0, float(hi), QUAD_TOL, QUAD_DEPTH)


def premium(p: DistortionPricing, Z: Distribution) -> float:
    """Distortion premium ``(1 + loading) * E^g[Z]``."""
    return (1.0 + p.loading) * distorted_expectation(p, Z)


def layer_g_expectation(p: DistortionPricing, X: Distribution, a: float, b: float) -> float:
    """``int_a^b g(S_X(t)) dt``: the unloaded distorted price of the layer ``[a, b]``.

    The stop-loss ``min((x - a)_+, b - a)`` costs ``(1 + loading)`` times this.
    """
    if a > b:
        raise DomainError(f"layer needs a <= b, got ({a}, {b})")
    if a < 0 or b > X.support[1] + 1e-12:
        raise DomainError("layer must lie within [0, ess sup X]")
    if a == b:
        return 0.0
    return survival_integral(p.g, X).between(a, b)


def layer_premium(p: DistortionPricing, X: Distribution, a: float, b: float) -> float:
    return (1.0 + p.loading) * layer_g_expectation(p, X, a, b)


def z0(p: DistortionPricing, X: Distribution, xtol: float = 1e-10) -> float:
    """Critical retention ``sup{z : (1 + loading) g(S_X(z)) >= 1}``, clamped to ``[0, M]``.

    The map ``z -> (1 + loading) g(S_X(z))`` is nonincreasing, so the sup is
    the boundary found by bisection.
    """
    lo, hi = X.support
    if lo < 0 or not math.isfinite(hi):
        raise DomainError("z0 needs X supported on a bounded subset of [0, inf)")
    factor = 1.0 + p.loading

    def holds(z: float) -> bool:
        return factor * p.g(1.0 - X._cdf_scalar(z)) >= 1.0

    if not holds(0.0):
        return 0.0
    # S_X(M) = 0 so the inequality fails at M itself; the left limit decides
    # whether the sup reaches M
    if holds(math.nextafter(hi, -math.inf)):
        return float(hi)
    return bisect_last_true(holds, 0.0, float(hi), xtol)


def check_comonotone_ready(p: DistortionPricing) -> None:
    """The comonotone solver needs a continuous, strictly increasing ``g``."""
    if not (p.g_strictly_increasing and getattr(p.g, "continuous", False)):
        raise PreconditionError("comonotone solver requires g continuous and strictly increasing")
