"""Extremal probabilities of ``{W <= V}``-type events over couplings with fixed marginals.

With ``alpha = sup_z (F_V(z) - F_W(z))`` and at least one marginal continuous:

    sup P(W <= V) = sup P(W < V) = 1 - alpha
    inf P(W >  V) = inf P(W >= V) = alpha

and the ``>=``/``<`` family follows by swapping the roles of ``V`` and ``W``.
The supremum over ``z`` is taken on a dense grid and polished by golden
section, because ``F_V - F_W`` can have several local maxima.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dist_core import Distribution, DomainError, PreconditionError
from .numerics import golden_section_max

GRID_POINTS = 20001
ATOM_OFFSET = 1e-12
MAX_BRUTE_FORCE_ATOMS = 8


class Direction(str, enum.Enum):
    SUP_LEQ = "sup_leq"  # sup P(W <= V)
    SUP_GEQ = "sup_geq"  # sup P(W >= V)
    INF_LT = "inf_lt"  # inf P(W < V)
    INF_GT = "inf_gt"  # inf P(W > V)
    SUP_LT = "sup_lt"
    SUP_GT = "sup_gt"
    INF_LEQ = "inf_leq"
    INF_GEQ = "inf_geq"


# direction -> (maximise?, event comparator on (w, v), uses sup(F_V - F_W)?)
_RULES: dict[Direction, tuple[bool, Callable, bool]] = {
    Direction.SUP_LEQ: (True, lambda w, v: w <= v, True),
    Direction.SUP_LT: (True, lambda w, v: w < v, True),
    Direction.SUP_GEQ: (True, lambda w, v: w >= v, False),
    Direction.SUP_GT: (True, lambda w, v: w > v, False),
    Direction.INF_LT: (False, lambda w, v: w < v, False),
    Direction.INF_LEQ: (False, lambda w, v: w <= v, False),
    Direction.INF_GT: (False, lambda w, v: w > v, True),
    Direction.INF_GEQ: (False, lambda w, v: w >= v, True),
}


@dataclass(frozen=True)
class FrechetResult:
    alpha: float
    bound: float
    argsup_z: float
    direction: Direction

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "bound": self.bound,
            "argsup_z": self.argsup_z,
            "direction": self.direction.value,
        }


def _check_marginals(F_V: Distribution, F_W: Distribution) -> None:
    if not (F_V.is_continuous or F_W.is_continuous):
        raise PreconditionError("at least one marginal must be continuous")


def sup_cdf_gap(
    F_A: Distribution, F_B: Distribution, n_grid: int = GRID_POINTS
) -> tuple[float, float]:
    """``(sup_z (F_A(z) - F_B(z)), smallest maximizing z)``.

    The grid spans the hull of both effective supports, padded by one grid
    step on each side. Atoms of either law are evaluated exactly, together
    with points ``1e-12`` to their left.
    """
    lo_a, hi_a = F_A.effective_bounds()
    lo_b, hi_b = F_B.effective_bounds()
    lo, hi = min(lo_a, lo_b), max(hi_a, hi_b)
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / (n_grid - 1)
    grid = np.linspace(lo - step, hi + step, n_grid + 2)
    atoms = np.array(sorted(set(F_A.atoms) | set(F_B.atoms)), dtype=float)
    if atoms.size:
        grid = np.union1d(grid, np.concatenate([atoms, atoms - ATOM_OFFSET]))
    gaps = F_A.cdf(grid) - F_B.cdf(grid)
    i = int(np.argmax(gaps))
    best_z, best = float(grid[i]), float(gaps[i])

    def gap(z: float) -> float:
        return F_A._cdf_scalar(z) - F_B._cdf_scalar(z)

    if i > 0 and i < grid.size - 1:
        z, val = golden_section_max(gap, float(grid[i - 1]), float(grid[i + 1]), xtol=1e-12)
        if val > best + 1e-15:
            best_z, best = z, val
    return min(max(best, 0.0), 1.0), best_z


def alpha(F_V: Distribution, F_W: Distribution, n_grid: int = GRID_POINTS) -> float:
    """``sup_z (F_V(z) - F_W(z))``, clipped to ``[0, 1]``."""
    _check_marginals(F_V, F_W)
    return sup_cdf_gap(F_V, F_W, n_grid)[0]


def sup_prob(
    direction: Direction | str,
    F_V: Distribution,
    F_W: Distribution,
    n_grid: int = GRID_POINTS,
) -> FrechetResult:
    """Extremal probability of the event named by ``direction``."""
    direction = Direction(direction)
    _check_marginals(F_V, F_W)
    maximise, _, uses_vw = _RULES[direction]
    if uses_vw:
        a, z = sup_cdf_gap(F_V, F_W, n_grid)
    else:
        a, z = sup_cdf_gap(F_W, F_V, n_grid)
    bound = 1.0 - a if maximise else a
    return FrechetResult(alpha=a, bound=bound, argsup_z=z, direction=direction)


@dataclass(frozen=True)
class WorstCaseCoupling:
    """Coupling of ``(W, V)`` through one uniform ``Z`` attaining ``sup P(W <= V)``.

    ``W = F_W^{-1}(Z)``; ``V = F_V^{-1}(Z + alpha)`` when ``Z <= 1 - alpha`` and
    ``F_V^{-1}(1 - Z)`` otherwise.
    """

    alpha: float
    F_V: Distribution
    F_W: Distribution

    def w_of_z(self, z):
        return self.F_W.quantile(z)

    def v_of_z(self, z):
        a = self.alpha
        if np.ndim(z) == 0:
            z = float(z)
            return self.F_V.quantile(z + a) if z <= 1.0 - a else self.F_V.quantile(1.0 - z)
        z = np.asarray(z, dtype=float)
        low = z <= 1.0 - a
        out = np.empty_like(z)
        if np.any(low):
            out[low] = self.F_V.quantile(z[low] + a)
        if np.any(~low):
            out[~low] = self.F_V.quantile(1.0 - z[~low])
        return out

    def pushforward_cdf(self, z):
        """``P(V <= z)`` under the construction: ``max(0, F_V - alpha) + min(F_V, alpha)``."""
        fv = self.F_V.cdf(z)
        return np.maximum(0.0, fv - self.alpha) + np.minimum(fv, self.alpha)


def worst_case_coupling(F_V: Distribution, F_W: Distribution) -> WorstCaseCoupling:
    _check_marginals(F_V, F_W)
    return WorstCaseCoupling(alpha(F_V, F_W), F_V, F_W)


def brute_force_bound(direction: Direction | str, atoms_V: Sequence[float], atoms_W: Sequence[float]) -> float:
    """Exact extremal probability for equally weighted atoms by trying all ``n!`` pairings.

    Couplings of two uniform empirical laws form the Birkhoff polytope whose
    extreme points are permutations, so a linear objective is extremised at
    one of them.
    """
    direction = Direction(direction)
    v = list(map(float, atoms_V))
    w = list(map(float, atoms_W))
    n = len(v)
    if n != len(w) or n == 0:
        raise DomainError("atom lists must be nonempty and of equal length")
    if n > MAX_BRUTE_FORCE_ATOMS:
        raise DomainError(f"brute force limited to {MAX_BRUTE_FORCE_ATOMS} atoms, got {n}")
    maximise, event, _ = _RULES[direction]
    best = None
    for perm in itertools.permutations(range(n)):
        hits = sum(1 for i, j in enumerate(perm) if event(w[j], v[i]))
        if best is None or (hits > best if maximise else hits < best):
            best = hits
    return best / n


def mc_verify(c: WorstCaseCoupling, n: int, seed: int) -> float:
    """Empirical frequency of ``{W <= V}`` under ``c`` from ``n`` seeded uniforms."""
    if n < 1:
        raise DomainError("mc_verify needs n >= 1")
    rng = np.random.default_rng(seed)
    # (0, 1] keeps the quantiles in their domain
    z = 1.0 - rng.random(n)
    return float(np.mean(c.w_of_z(z) <= c.v_of_z(z)))


def discretize(d: Distribution, n: int) -> list[float]:
    """``n`` equally weighted atoms at the mid-quantiles ``(i - 1/2)/n``."""
    return [float(x) for x in d.quantile((np.arange(n) + 0.5) / n)]


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
