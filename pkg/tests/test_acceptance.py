"""Exit criteria. Each test prints exactly one ``CRITERION n: PASS|FAIL`` line.

A criterion collects every sub-check before asserting, so the printed line
lists all failing cells rather than only the first.
"""

import time

import numpy as np
import pytest

from goalreach.dist_core import (
    Lognormal,
    TruncatedNormal,
    TruncatedShiftedPareto,
    Uniform,
    make_empirical,
    reflect,
    shift,
)
from goalreach.distortion import layer_g_expectation, premium, survival_integral, z0
from goalreach.frechet import (
    Direction,
    binomial_sigma,
    brute_force_bound,
    discretize,
    mc_verify,
    sup_prob,
    worst_case_coupling,
)
from goalreach.numerics import bisect_last_true
from goalreach.portfolio import PortfolioProblem, goal_objective, optimal_payoff, solve_goal_reaching
from goalreach.reinsurance import psi
from goalreach.robustness import BASE, SweepSpec, run_sweep, run_table
from goalreach.verification import random_pair

from oracles import classical_digital_value

pytestmark = pytest.mark.acceptance

GOALS = (15.0, 15.5, 16.0, 16.5, 17.0, 17.5, 18.0, 18.5, 19.0)

# published (premium, value, attach, detach) per goal level
TABLE1 = {
    15.0: (4.4356, 0.9690, 0.5644, 8.7320),
    15.5: (3.9356, 0.9047, 0.5644, 6.8680),
    16.0: (3.4356, 0.8048, 0.5644, 5.5817),
    16.5: (2.9356, 0.7714, 0.5644, 4.5439),
    17.0: (2.4356, 0.6946, 0.5644, 3.6608),
    17.5: (1.9356, 0.6090, 0.5644, 2.8882),
    18.0: (1.4356, 0.5135, 0.5644, 2.2003),
    18.5: (0.9356, 0.4069, 0.5644, 1.5803),
    19.0: (0.4356, 0.2881, 0.5644, 1.0165),
}
TABLE2 = {
    15.0: (3.0064, 0.7051, 0.5644, 4.6801),
    15.5: (2.5712, 0.6300, 0.5644, 3.8884),
    16.0: (2.1416, 0.5476, 0.5644, 3.1950),
    16.5: (1.7162, 0.4571, 0.5644, 2.5772),
    17.0: (1.2945, 0.3577, 0.5644, 2.0197),
    17.5: (0.8775, 0.2488, 0.5644, 1.5120),
    18.0: (0.4657, 0.1295, 0.5644, 1.0493),  # printed attachment 0.5664 read as z0
}
TABLE3 = {
    15.0: (3.4372, 0.8410, 0.5644, 5.5853),
    15.5: (3.1080, 0.7960, 0.5644, 4.8811),
    16.0: (2.7708, 0.7469, 0.5644, 4.2383),
    16.5: (2.4296, 0.6936, 0.5644, 3.6509),
    17.0: (1.2955, 0.6360, 0.5644, 3.1133),
    17.5: (1.7480, 0.5744, 0.5644, 2.6212),
    18.0: (1.4131, 0.5090, 0.5644, 2.1710),
    18.5: (1.0860, 0.4402, 0.5644, 1.7604),
    19.0: (0.7701, 0.3690, 0.5644, 1.3879),
}
COLUMNS = ("premium", "value", "attach", "detach")


def report(capsys, n, failures, note=""):
    status = "PASS" if not failures else "FAIL"
    detail = "; ".join(failures[:8]) + (f" (+{len(failures) - 8} more)" if len(failures) > 8 else "")
    with capsys.disabled():
        print(f"\nCRITERION {n}: {status}" + (f" - {note}" if note else "") + (f" - {detail}" if detail else ""))
    assert not failures, detail


def timed_table(which):
    survival_integral.cache_clear()
    t = time.perf_counter()
    rows = run_table(which)
    return {r.xi: r for r in rows}, time.perf_counter() - t


def compare_row(tag, row, expect, tol, skip=()):
    got = (row.pi_star, row.value, row.attach, row.detach)
    out = []
    for name, g, e in zip(COLUMNS, got, expect):
        if name in skip:
            continue
        if abs(g - e) > tol:
            out.append(f"{tag} {name} got {g:.4f} want {e:.4f}")
    return out


def test_criterion_1_table1(capsys):
    rows, elapsed = timed_table("t1")
    failures = []
    for xi, expect in TABLE1.items():
        failures += compare_row(f"xi={xi:g}", rows[xi], expect, 2e-3)
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.2f}s >= 5s")
    report(capsys, 1, failures, f"{elapsed:.2f}s")


def test_criterion_2_table2(capsys):
    rows, elapsed = timed_table("t2")
    failures = []
    for xi, expect in TABLE2.items():
        failures += compare_row(f"xi={xi:g}", rows[xi], expect, 3e-3)
    for xi in (18.5, 19.0):
        r = rows[xi]
        if r.case != "indifferent" or r.value != 0.0:
            failures.append(f"xi={xi:g} case={r.case} value={r.value:.3g}, want indifferent/0")
    if elapsed >= 10.0:
        failures.append(f"runtime {elapsed:.2f}s >= 10s")
    report(capsys, 2, failures, f"{elapsed:.2f}s")


def test_criterion_3_table3(capsys):
    rows, elapsed = timed_table("t3")
    failures = []
    for xi, expect in TABLE3.items():
        skip = ("premium",) if xi == 17.0 else ()
        failures += compare_row(f"xi={xi:g}", rows[xi], expect, 3e-3, skip)
    premiums = [rows[xi].pi_star for xi in GOALS]
    if not all(b < a for a, b in zip(premiums, premiums[1:])):
        failures.append(f"premiums not decreasing: {np.round(premiums, 4).tolist()}")
    if elapsed >= 10.0:
        failures.append(f"runtime {elapsed:.2f}s >= 10s")
    report(capsys, 3, failures, f"{elapsed:.2f}s")


def test_criterion_4_constant_attachment(capsys):
    failures = []
    for which in ("t1", "t2", "t3"):
        for r in run_table(which):
            if r.case in ("indifferent", "no_reinsurance"):
                continue
            if abs(r.attach - 0.5644) > 5e-4:
                failures.append(f"{which} xi={r.xi:g} attach {r.attach:.5f}")
    report(capsys, 4, failures)


def test_criterion_5_frechet_oracles(capsys):
    t = time.perf_counter()
    rng = np.random.default_rng(20240601)
    n = 6
    directions = list(Direction)
    failures = []
    for k in range(20):
        V, W = random_pair(rng)
        assert V.is_continuous or W.is_continuous
        for d in directions:
            analytic = sup_prob(d, V, W).bound
            brute = brute_force_bound(d, discretize(V, n), discretize(W, n))
            # 2/n from discretisation, 1e-3 for the sup grid
            if abs(analytic - brute) > 2.0 / n + 1e-3:
                failures.append(f"pair {k} {d.value} analytic {analytic:.4f} brute {brute:.4f}")
    c = worst_case_coupling(Lognormal(0.0, 0.5), Uniform(0.2, 2.5))
    target = 1.0 - c.alpha
    est = mc_verify(c, 1_000_000, 42)
    sigma = binomial_sigma(target, 1_000_000)
    if abs(est - target) > 3 * sigma:
        failures.append(f"monte carlo {est:.6f} vs {target:.6f} beyond 3 sigma {3 * sigma:.2e}")
    elapsed = time.perf_counter() - t
    if elapsed >= 30.0:
        failures.append(f"runtime {elapsed:.2f}s >= 30s")
    report(capsys, 5, failures, f"{elapsed:.2f}s, mc {est:.5f} vs {target:.5f}")


def _mass_below(c, z):
    """Lebesgue measure of ``{u in (0, 1]: v_of_z(u) <= z}`` from the map itself."""
    a = c.alpha
    F = c.F_V
    total = 0.0
    # u <= 1 - alpha: v = Q(u + alpha) is nondecreasing in u
    lo, hi = 1e-15, 1.0 - a
    if hi > lo and c.v_of_z(lo) <= z:
        total += bisect_last_true(lambda u: c.v_of_z(u) <= z, lo, hi, 1e-14)
    # u > 1 - alpha: v = Q(1 - u) is nonincreasing in u
    lo, hi = 1.0 - a, 1.0 - 1e-15
    if a > 0 and c.v_of_z(hi) <= z:
        if c.v_of_z(lo + 1e-15) <= z:
            total += a
        else:
            total += 1.0 - bisect_last_true(lambda u: c.v_of_z(u) > z, lo, hi, 1e-14)
    return total


def test_criterion_6_coupling_marginal(capsys):
    pairs = [
        (Lognormal(0.0, 0.5), Uniform(0.2, 2.5)),
        (Uniform(0.0, 1.0), Uniform(0.3, 1.3)),
        (Uniform(0.0, 2.0), Lognormal(-0.5, 0.3)),
        (Lognormal(0.2, 0.8), Lognormal(0.0, 0.4)),
        (TruncatedShiftedPareto(10, 3, 10), Uniform(0.0, 6.0)),
        (reflect(TruncatedShiftedPareto(10, 2, 10)), Uniform(-3.0, 0.0)),
        (shift(Lognormal(0.0, 0.6), -1.0), Uniform(-0.5, 1.5)),
        (make_empirical([0.1, 0.5, 0.7, 2.0]), Uniform(0.0, 2.0)),
        (Uniform(-1.0, 1.0), TruncatedNormal(-2.0, 2.0)),
        (TruncatedNormal(-1.0, 3.0), shift(Uniform(-1.0, 1.0), 0.5)),
    ]
    failures = []
    worst = 0.0
    for k, (V, W) in enumerate(pairs):
        c = worst_case_coupling(V, W)
        zs = np.linspace(*V.effective_bounds(), 200)
        for z in zs:
            err = abs(_mass_below(c, float(z)) - V.cdf(float(z)))
            formula = abs(float(c.pushforward_cdf(z)) - V.cdf(float(z)))
            worst = max(worst, err, formula)
            if err > 1e-9 or formula > 1e-9:
                failures.append(f"pair {k} z={z:.4f} map err {err:.2e} formula err {formula:.2e}")
                break
    report(capsys, 6, failures, f"max err {worst:.1e}")


def test_criterion_7_portfolio(capsys):
    failures = []
    mu, sigma, x0, xi = -0.05, 0.4, 1.0, 1.2
    rho = Lognormal(mu, sigma)
    p = PortfolioProblem(x0, xi, rho, TruncatedNormal(-0.5, 0.5))
    s = solve_goal_reaching(p)

    from scipy import stats

    def cost(r):
        c = np.exp(mu + sigma * stats.norm.ppf(1.0 - r))
        return np.exp(mu + sigma**2 / 2) * stats.norm.cdf((np.log(c) - mu - sigma**2) / sigma)

    spent = s.kappa_star * cost(s.r_star)
    if abs(spent - x0) > 1e-8:
        failures.append(f"budget {spent:.12f} != {x0}")
    levels = rho.quantile(np.linspace(1e-4, 1 - 1e-4, 2001))
    pay = optimal_payoff(s, levels)
    if not set(np.unique(pay)) <= {0.0, s.kappa_star} or np.any((pay > 0) != (levels <= s.rho_threshold)):
        failures.append("payoff is not kappa* on {rho <= threshold} and 0 elsewhere")
    limit = solve_goal_reaching(PortfolioProblem(x0, xi, rho, TruncatedNormal(-1e-6, 1e-6)))
    hz = classical_digital_value(x0, xi, mu, sigma)
    if abs(limit.value - hz) > 2e-3:
        failures.append(f"degenerate limit {limit.value:.5f} vs bisected {hz:.5f}")
    for r in np.random.default_rng(7).uniform(0.0, 0.999, 100):
        if goal_objective(p, float(r), cost(float(r))) > s.value + 1e-9:
            failures.append(f"r={r:.4f} beats the solver")
            break
    report(capsys, 7, failures, f"value {s.value:.5f}, degenerate {limit.value:.5f} vs {hz:.5f}")


def test_criterion_8_robustness_orderings(capsys):
    failures = []
    reports = {name: run_sweep(SweepSpec.default(name)) for name in ("goal", "loading", "shape")}
    for name, rep in reports.items():
        for r in rep.rows:
            if r.error:
                failures.append(f"{name}={r.param_value:g} error {r.error}")
                continue
            if r.robust.value < r.worst_of_nominal - 1e-9:
                failures.append(f"{name}={r.param_value:g} worst(robust) < worst(nominal)")
            if r.nominal.value < r.nominal_of_robust - 1e-9:
                failures.append(f"{name}={r.param_value:g} nominal(nominal) < nominal(robust)")
    for r in reports["goal"].rows:
        if r.param_value <= 18.0 and not r.worst_gap > r.nominal_gap:
            failures.append(
                f"goal={r.param_value:g} worst gap {r.worst_gap:.6f} <= nominal gap {r.nominal_gap:.6f}"
            )
    rows = reports["loading"].rows
    for label, series in (("robust", [r.robust.value for r in rows]), ("nominal", [r.nominal.value for r in rows])):
        if not all(b < a for a, b in zip(series, series[1:])):
            failures.append(f"{label} values not decreasing in loading")
    report(capsys, 8, failures)


GALOIS_FAMILIES = {
    "uniform": Uniform(-1.0, 2.0),
    "pareto": TruncatedShiftedPareto(10.0, 3.0, 10.0),
    "trunc_normal": TruncatedNormal(-5.0, 5.0),
    "lognormal": Lognormal(-0.05, 0.4),
    "shifted": shift(TruncatedNormal(-1.0, 2.0), 0.7),
    "reflected": reflect(TruncatedShiftedPareto(10.0, 3.0, 10.0)),
    "empirical": make_empirical(np.random.default_rng(0).normal(size=50)),
}


def test_criterion_9_invariants(capsys):
    failures = []
    rng = np.random.default_rng(99)
    for name, d in GALOIS_FAMILIES.items():
        ts = rng.uniform(1e-9, 1.0, 1000)
        if np.any(d.cdf(d.quantile(ts)) < ts - 1e-12):
            failures.append(f"{name}: F(Q(t)) < t")
        lo, hi = d.quantile(1e-6), d.quantile(1 - 1e-6)
        xs = rng.uniform(lo, hi, 1000)
        Fx = d.cdf(xs)
        keep = Fx > 0
        if np.any(d.quantile(Fx[keep]) > xs[keep] + 1e-9 * np.maximum(1.0, np.abs(xs[keep]))):
            failures.append(f"{name}: Q(F(x)) > x")

    p = BASE.problem(xi=17.0)
    pricing, X = p.pricing, p.F_X
    for a, b, c in np.sort(rng.uniform(0.0, 10.0, size=(300, 3)), axis=1):
        inner = layer_g_expectation(pricing, X, a, b)
        outer = layer_g_expectation(pricing, X, a, c)
        if not (0.0 <= inner <= outer + 1e-12 and outer - inner <= c - b + 1e-10):
            failures.append(f"layer monotone/Lipschitz broken at ({a:.3f}, {b:.3f}, {c:.3f})")
            break

    for x, y in rng.uniform(0.0, 3.0, size=(100, 2)):
        if psi(p, (x + y) / 2) > (psi(p, x) + psi(p, y)) / 2 + 1e-9:
            failures.append(f"psi not midpoint convex at ({x:.3f}, {y:.3f})")
            break

    pg = premium(pricing, X)
    if abs(pg - 5.187) > 0.01:
        failures.append(f"premium {pg:.4f} vs 5.187")
    zc = z0(pricing, X)
    factor = 1.0 + pricing.loading
    if not (factor * pricing.g(X.survival(zc - 1e-7)) >= 1.0 > factor * pricing.g(X.survival(zc + 1e-7))):
        failures.append(f"z0={zc:.6f} is not the boundary of (1+loading) g(S) >= 1")
    # z0 minimises z + premium((X - z)_+), whose minimum is premium - loading-weighted saving
    stop_loss = [z + factor * layer_g_expectation(pricing, X, z, 10.0) for z in np.linspace(0, 10, 201)]
    if min(stop_loss) < zc + factor * layer_g_expectation(pricing, X, zc, 10.0) - 1e-9:
        failures.append("z0 does not minimise z + premium of the stop-loss above z")
    report(capsys, 9, failures, f"premium {pg:.6f}, z0 {zc:.6f}")
