"""Univariate distributions with exact cdf, survival and left-continuous quantile.

Every family accepts scalars or numpy arrays. Scalar inputs take a pure-math
path because the solvers evaluate cdfs millions of times inside quadrature.

The quantile is the left-continuous inverse ``inf{z : cdf(z) >= t}`` on
``(0, 1]``; for ``t > 1`` it is ``+inf``, and ``t <= 0`` is a domain error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy import special

INF = math.inf
_SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(ValueError):
    """Inputs violate an assumption an operation relies on."""


def _is_scalar(x: Any) -> bool:
    return isinstance(x, (float, int)) or (isinstance(x, np.ndarray) and x.ndim == 0)


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


class Distribution:
    """Base class; subclasses implement ``_cdf`` and ``_quantile`` on arrays.

    ``_cdf_scalar`` and ``_quantile_scalar`` are optional fast paths.
    """

    is_continuous: bool = True

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    # array kernels ------------------------------------------------------
    def _cdf(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _quantile(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _cdf_scalar(self, x: float) -> float:
        return float(self._cdf(np.array([x]))[0])

    def _quantile_scalar(self, t: float) -> float:
        return float(self._quantile(np.array([t]))[0])

    # public API ---------------------------------------------------------
    def cdf(self, x):
        if _is_scalar(x):
            return self._cdf_scalar(float(x))
        return self._cdf(np.asarray(x, dtype=float))

    def survival(self, x):
        if _is_scalar(x):
            return 1.0 - self._cdf_scalar(float(x))
        return 1.0 - self._cdf(np.asarray(x, dtype=float))

    def quantile(self, t):
        if _is_scalar(t):
            t = float(t)
            if not t > 0.0:
                raise DomainError(f"quantile level must lie in (0, 1], got {t}")
            if t > 1.0:
                return INF
            return self._quantile_scalar(t)
        t = np.asarray(t, dtype=float)
        if np.any(~(t > 0.0)):
            raise DomainError("quantile levels must lie in (0, 1]")
        out = np.full(t.shape, INF)
        inside = t <= 1.0
        if np.any(inside):
            out[inside] = self._quantile(t[inside])
        return out

    def lower_quantile(self, t):
        """Quantile that also accepts ``t = 0``, mapped to ``quantile(0+)``.

        Handy for comonotone maps ``F_Y^{-1}(F_X(x))`` at the left end of the
        support of ``X``.
        """
        if _is_scalar(t):
            t = float(t)
            return self.support[0] if t <= 0.0 else self.quantile(t)
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.support[0])
        pos = t > 0.0
        if np.any(pos):
            out[pos] = self.quantile(t[pos])
        return out

    def effective_bounds(self, eps: float = 1e-12) -> tuple[float, float]:
        """Support, with infinite ends replaced by the ``eps`` / ``1-eps`` quantiles."""
        lo, hi = self.support
        if not math.isfinite(lo):
            lo = self.quantile(eps)
        if not math.isfinite(hi):
            hi = self.quantile(1.0 - eps)
        return float(lo), float(hi)

    @property
    def atoms(self) -> tuple[float, ...]:
        return ()

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise DomainError("uniform needs hi > lo")

    @property
    def support(self):
        return (self.lo, self.hi)

    def _cdf_scalar(self, x):
        return min(max((x - self.lo) / (self.hi - self.lo), 0.0), 1.0)

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _quantile_scalar(self, t):
        return self.lo + t * (self.hi - self.lo)

    def _quantile(self, t):
        return self.lo + t * (self.hi - self.lo)

    def to_spec(self):
        return {"family": "uniform", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class TruncatedShiftedPareto(Distribution):
    """Pareto loss ``gamma * beta**gamma / (beta + x)**(gamma + 1)`` renormalised on ``[0, M]``."""

    beta: float = 10.0
    gamma: float = 3.0
    M: float = 10.0

    def __post_init__(self):
        if not (self.beta > 0 and self.gamma > 0 and self.M > 0):
            raise DomainError("trunc_pareto needs beta, gamma, M > 0")

    @property
    def support(self):
        return (0.0, self.M)

    @property
    def _tail_at_M(self) -> float:
        return (self.beta / (self.beta + self.M)) ** self.gamma

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        c = 1.0 - self._tail_at_M
        dens = self.gamma * self.beta**self.gamma / (self.beta + np.clip(x, 0.0, self.M)) ** (self.gamma + 1)
        return np.where((x >= 0) & (x <= self.M), dens / c, 0.0)

    def _cdf_scalar(self, x):
        if x <= 0.0:
            return 0.0
        if x >= self.M:
            return 1.0
        return (1.0 - (self.beta / (self.beta + x)) ** self.gamma) / (1.0 - self._tail_at_M)

    def _cdf(self, x):
        xc = np.clip(x, 0.0, self.M)
        out = (1.0 - (self.beta / (self.beta + xc)) ** self.gamma) / (1.0 - self._tail_at_M)
        return np.where(x >= self.M, 1.0, np.clip(out, 0.0, 1.0))

    def _quantile_scalar(self, t):
        if t >= 1.0:
            return self.M
        c = 1.0 - self._tail_at_M
        return min(self.beta * ((1.0 - c * t) ** (-1.0 / self.gamma) - 1.0), self.M)

    def _quantile(self, t):
        c = 1.0 - self._tail_at_M
        out = self.beta * ((1.0 - c * t) ** (-1.0 / self.gamma) - 1.0)
        return np.where(t >= 1.0, self.M, np.minimum(out, self.M))

    def to_spec(self):
        return {"family": "trunc_pareto", "beta": self.beta, "gamma": self.gamma, "M": self.M}


@dataclass(frozen=True)
class TruncatedNormal(Distribution):
    """Standard normal conditioned on ``[lower, upper]``.

    The quantile is found by bisection on the cdf to an absolute tolerance of
    ``1e-12`` rather than through an inverse special function.
    """

    lower: float = -5.0
    upper: float = 5.0

    def __post_init__(self):
        if not self.upper > self.lower:
            raise DomainError("trunc_normal needs upper > lower")
        # cache the normaliser; object.__setattr__ because the dataclass is frozen
        object.__setattr__(self, "_n_lo", _norm_cdf(self.lower))
        object.__setattr__(self, "_mass", _norm_cdf(self.upper) - _norm_cdf(self.lower))
        if not self._mass > 0.0:
            raise DomainError("trunc_normal interval carries no normal mass")

    @property
    def support(self):
        return (self.lower, self.upper)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        dens = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi) / self._mass
        return np.where((x >= self.lower) & (x <= self.upper), dens, 0.0)

    def _cdf_scalar(self, x):
        if x <= self.lower:
            return 0.0
        if x >= self.upper:
            return 1.0
        return min(max((_norm_cdf(x) - self._n_lo) / self._mass, 0.0), 1.0)

    def _cdf(self, x):
        out = (special.ndtr(x) - self._n_lo) / self._mass
        out = np.clip(out, 0.0, 1.0)
        out = np.where(x <= self.lower, 0.0, out)
        return np.where(x >= self.upper, 1.0, out)

    def _quantile_scalar(self, t):
        if t >= 1.0:
            return self.upper
        lo, hi = self.lower, self.upper
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self._cdf_scalar(mid) >= t:
                hi = mid
            else:
                lo = mid
        return hi

    def _quantile(self, t):
        lo = np.full(t.shape, self.lower)
        hi = np.full(t.shape, self.upper)
        n_iter = int(math.ceil(math.log2((self.upper - self.lower) / 1e-12))) + 1
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            right = self._cdf(mid) >= t
            hi = np.where(right, mid, hi)
            lo = np.where(right, lo, mid)
        return np.where(t >= 1.0, self.upper, hi)

    def to_spec(self):
        return {"family": "trunc_normal", "lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class Lognormal(Distribution):
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("lognormal needs sigma > 0")

    @property
    def support(self):
        return (0.0, INF)

    @property
    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def _cdf_scalar(self, x):
        if x <= 0.0:
            return 0.0
        return _norm_cdf((math.log(x) - self.mu) / self.sigma)

    def _cdf(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return np.where(x > 0, special.ndtr(z), 0.0)

    def _quantile_scalar(self, t):
        if t >= 1.0:
            return INF
        return math.exp(self.mu + self.sigma * float(special.ndtri(t)))

    def _quantile(self, t):
        with np.errstate(over="ignore"):
            return np.exp(self.mu + self.sigma * special.ndtri(t))

    def to_spec(self):
        return {"family": "lognormal", "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Shifted(Distribution):
    """Law of ``base + c``."""

    base: Distribution
    c: float

    @property
    def is_continuous(self):  # type: ignore[override]
        return self.base.is_continuous

    @property
    def support(self):
        lo, hi = self.base.support
        return (lo + self.c, hi + self.c)

    @property
    def atoms(self):
        return tuple(a + self.c for a in self.base.atoms)

    def _cdf_scalar(self, x):
        return self.base._cdf_scalar(x - self.c)

    def _cdf(self, x):
        return self.base._cdf(x - self.c)

    def _quantile_scalar(self, t):
        return self.base._quantile_scalar(t) + self.c

    def _quantile(self, t):
        return self.base._quantile(t) + self.c

    def to_spec(self):
        return {"family": "shifted", "base": self.base.to_spec(), "c": self.c}


@dataclass(frozen=True)
class Reflected(Distribution):
    """Law of ``-base`` for an atomless ``base``.

    ``P(-X <= z) = P(X >= -z)`` equals the survival of ``base`` at ``-z`` only
    when ``base`` has no atoms, hence the restriction.
    """

    base: Distribution

    def __post_init__(self):
        if not self.base.is_continuous:
            raise PreconditionError("reflection is implemented for continuous laws only")

    @property
    def support(self):
        lo, hi = self.base.support
        return (-hi, -lo)

    def _cdf_scalar(self, x):
        return 1.0 - self.base._cdf_scalar(-x)

    def _cdf(self, x):
        return 1.0 - self.base._cdf(-x)

    def _quantile(self, t):
        # inf{z : 1 - F(-z) >= t} = -sup{y : F(y) <= 1 - t}; continuous F makes
        # that the upper quantile, which differs from F^{-1}(1-t) only on flats.
        lo, hi = self.effective_bounds()
        lo_arr = np.full(t.shape, lo)
        hi_arr = np.full(t.shape, hi)
        for _ in range(80):
            mid = 0.5 * (lo_arr + hi_arr)
            right = self._cdf(mid) >= t
            hi_arr = np.where(right, mid, hi_arr)
            lo_arr = np.where(right, lo_arr, mid)
        return hi_arr

    def effective_bounds(self, eps: float = 1e-12):
        lo, hi = self.base.effective_bounds(eps)
        return (-hi, -lo)

    def to_spec(self):
        return {"family": "reflected", "base": self.base.to_spec()}


@dataclass(frozen=True)
class Empirical(Distribution):
    """Equally weighted atoms; step cdf and order-statistic quantile."""

    samples: tuple[float, ...]
    _sorted: np.ndarray = field(init=False, repr=False, compare=False, hash=False)
    _levels: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    is_continuous = False

    def __post_init__(self):
        if len(self.samples) == 0:
            raise DomainError("empirical distribution needs at least one sample")
        xs = np.sort(np.asarray(self.samples, dtype=float))
        n = xs.size
        object.__setattr__(self, "samples", tuple(float(v) for v in self.samples))
        object.__setattr__(self, "_sorted", xs)
        # k/n computed exactly as the cdf computes it, so both Galois
        # inequalities hold without slack
        object.__setattr__(self, "_levels", np.arange(1, n + 1) / n)

    @property
    def support(self):
        return (float(self._sorted[0]), float(self._sorted[-1]))

    @property
    def atoms(self):
        return tuple(np.unique(self._sorted).tolist())

    def _cdf(self, x):
        return np.searchsorted(self._sorted, x, side="right") / self._sorted.size

    def _cdf_scalar(self, x):
        return float(np.searchsorted(self._sorted, x, side="right")) / self._sorted.size

    def _quantile(self, t):
        k = np.searchsorted(self._levels, t, side="left")
        return self._sorted[np.minimum(k, self._sorted.size - 1)]

    def to_spec(self):
        return {"family": "empirical", "samples": list(self.samples)}


def make_empirical(samples) -> Empirical:
    return Empirical(tuple(np.asarray(samples, dtype=float).ravel().tolist()))


def shift(d: Distribution, c: float) -> Distribution:
    """Law of ``X + c`` for ``X ~ d``."""
    if c == 0:
        return d
    return Shifted(d, float(c))


def reflect(d: Distribution) -> Distribution:
    return Reflected(d)


def max_cdf_jump(d: Distribution, n: int = 20001) -> float:
    """Largest cdf increment on a uniform grid over the effective support."""
    lo, hi = d.effective_bounds()
    pad = 1e-6 * max(1.0, hi - lo)
    xs = np.linspace(lo - pad, hi + pad, n)
    return float(np.max(np.diff(d.cdf(xs))))


_FAMILIES = {
    "uniform": (Uniform, ("lo", "hi")),
    "trunc_pareto": (TruncatedShiftedPareto, ("beta", "gamma", "M")),
    "trunc_normal": (TruncatedNormal, ("lower", "upper")),
    "lognormal": (Lognormal, ("mu", "sigma")),
}


def from_spec(spec: Mapping[str, Any]) -> Distribution:
    """Build a distribution from ``{"family": name, **params}``.

    >>> from_spec({"family": "trunc_pareto", "beta": 10, "gamma": 3, "M": 10})
    TruncatedShiftedPareto(beta=10.0, gamma=3.0, M=10.0)
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "empirical":
        return make_empirical(spec["samples"])
    if family == "shifted":
        return shift(from_spec(spec["base"]), float(spec["c"]))
    if family == "reflected":
        return reflect(from_spec(spec["base"]))
    if family not in _FAMILIES:
        raise DomainError(f"unknown distribution family {family!r}")
    cls, names = _FAMILIES[family]
    unknown = set(spec) - set(names)
    if unknown:
        raise DomainError(f"unknown parameters for {family}: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in spec.items()})
