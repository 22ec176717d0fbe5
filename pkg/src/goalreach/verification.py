"""Oracle suites behind ``goalreach verify``.

Each suite returns a list of :class:`Check` records; nothing here raises on
a failed comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .dist_core import Distribution, Lognormal, TruncatedNormal, Uniform, make_empirical, shift
from .frechet import Direction, binomial_sigma, brute_force_bound, discretize, mc_verify, sup_prob, worst_case_coupling
from .robustness import BASE, REFERENCE_TABLES, TABLE_TOLERANCE, BaseConfig, run_table


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def random_continuous(rng: np.random.Generator) -> Distribution:
    kind = int(rng.integers(3))
    if kind == 0:
        lo = float(rng.uniform(-2.0, 2.0))
        return Uniform(lo, lo + float(rng.uniform(0.2, 3.0)))
    if kind == 1:
        return Lognormal(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(0.1, 1.0)))
    lo = float(rng.uniform(-3.0, -0.2))
    base = TruncatedNormal(lo, lo + float(rng.uniform(0.5, 5.0)))
    return shift(base, float(rng.uniform(-1.0, 1.0)))


def random_pair(rng: np.random.Generator) -> tuple[Distribution, Distribution]:
    """``(F_V, F_W)``; ``F_W`` is always continuous, ``F_V`` is discrete half the time."""
    W = random_continuous(rng)
    if rng.random() < 0.5:
        V = make_empirical(np.round(rng.normal(0.5, 1.0, size=6), 3))
    else:
        V = random_continuous(rng)
    return V, W


def verify_frechet(seed: int, pairs: int = 20, n_atoms: int = 6) -> list[Check]:
    """Analytic bound vs exhaustive search over pairings of ``n_atoms`` atoms.

    A six-atom empirical law is its own mid-quantile discretisation, so only
    continuous marginals are approximated. Replacing a continuous law by ``n``
    mid-quantile atoms moves each cdf by at most ``1/(2n)``, so the two routes may differ by up to ``2/n``.
    """
    rng = np.random.default_rng(seed)
    tol = 2.0 / n_atoms + 1e-6
    checks = []
    directions = list(Direction)
    for k in range(pairs):
        V, W = random_pair(rng)
        d = directions[k % len(directions)]
        analytic = sup_prob(d, V, W).bound
        brute = brute_force_bound(d, discretize(V, n_atoms), discretize(W, n_atoms))
        diff = abs(analytic - brute)
        checks.append(
            Check(f"frechet pair {k} {d.value}", diff <= tol, f"analytic={analytic:.6f} brute={brute:.6f} diff={diff:.4f} tol={tol:.4f}")
        )
    return checks


COUPLING_PAIR = (Lognormal(0.0, 0.5), Uniform(0.2, 2.5))


def verify_coupling(seed: int, n: int = 1_000_000) -> list[Check]:
    """Monte Carlo frequency of ``{W <= V}`` under the constructed coupling vs ``1 - alpha``."""
    V, W = COUPLING_PAIR
    c = worst_case_coupling(V, W)
    target = 1.0 - c.alpha
    est = mc_verify(c, n, seed)
    sigma = binomial_sigma(target, n)
    ok = abs(est - target) <= 3.0 * sigma + 1e-12
    return [Check("coupling monte carlo", ok, f"empirical={est:.6f} analytic={target:.6f} 3sigma={3 * sigma:.2e}")]


def _close(name: str, got: float, want: float, tol: float) -> Check:
    return Check(name, abs(got - want) <= tol, f"got={got:.6f} want={want:.4f} tol={tol:g}")


def verify_tables(base: BaseConfig = BASE, cfg: SolverConfig = DEFAULT_CONFIG) -> list[Check]:
    """Every printed table cell against a fresh solve; blank cells check the case tag."""
    checks = []
    for which, ref in REFERENCE_TABLES.items():
        tol = TABLE_TOLERANCE[which]
        rows = run_table(which, base, cfg, [r[0] for r in ref])
        for got, (xi, pi, value, a, b) in zip(rows, ref):
            tag = f"{which} xi={xi:g}"
            if pi is None:
                checks.append(Check(f"{tag} case", got.case == "indifferent", f"case={got.case} value={got.value:.3g}"))
                checks.append(_close(f"{tag} value", got.value, value, tol))
                continue
            if not (which == "t3" and xi == 17.0):
                checks.append(_close(f"{tag} premium", got.pi_star, pi, tol))
            checks.append(_close(f"{tag} value", got.value, value, tol))
            checks.append(_close(f"{tag} attach", got.attach, a, tol))
            checks.append(_close(f"{tag} detach", got.detach, b, tol))
    return checks


def all_ok(checks: list[Check]) -> bool:
    return all(c.ok for c in checks)
