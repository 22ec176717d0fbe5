import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from goalreach.dist_core import DomainError, Lognormal, PreconditionError, TruncatedNormal, Uniform, make_empirical
from goalreach.portfolio import (
    PortfolioProblem,
    capital_cost,
    capital_cost_grid,
    goal_objective,
    optimal_payoff,
    solve_goal_reaching,
)

from oracles import classical_digital_value

RHO = Lognormal(-0.05, 0.4)
NEAR_POINT_MASS = TruncatedNormal(-1e-6, 1e-6)


def lognormal_cost(mu, sigma, r):
    """E[rho 1{rho <= Q(1 - r)}] for lognormal rho."""
    c = math.exp(mu + sigma * stats.norm.ppf(1.0 - r))
    return math.exp(mu + sigma**2 / 2) * stats.norm.cdf((math.log(c) - mu - sigma**2) / sigma)


@pytest.mark.parametrize("r", [0.0, 0.01, 0.2, 0.5, 0.9, 0.999])
def test_capital_cost_lognormal_closed_form(r):
    assert capital_cost(RHO, r) == pytest.approx(lognormal_cost(-0.05, 0.4, r) if r > 0 else RHO.mean, abs=1e-9)


def test_capital_cost_uniform_closed_form():
    # int_0^{1-r} (1 + u) du
    u = Uniform(1.0, 2.0)
    for r in (0.0, 0.3, 0.8):
        s = 1.0 - r
        assert capital_cost(u, r) == pytest.approx(s + s * s / 2, abs=1e-12)


def test_capital_cost_grid_matches_pointwise():
    rs = np.linspace(0.0, 0.99, 23)
    grid = capital_cost_grid(RHO, rs)
    assert np.allclose(grid, [capital_cost(RHO, float(r)) for r in rs], atol=1e-10)


def test_capital_cost_domain():
    with pytest.raises(DomainError):
        capital_cost(RHO, 1.5)


@pytest.fixture(scope="module")
def solved():
    p = PortfolioProblem(1.0, 1.2, RHO, TruncatedNormal(-0.5, 0.5))
    return p, solve_goal_reaching(p)


def test_budget_binds(solved):
    p, s = solved
    spent = s.kappa_star * lognormal_cost(-0.05, 0.4, s.r_star)
    assert spent == pytest.approx(p.x0, abs=1e-8)


def test_digital_shape(solved):
    _, s = solved
    rho = RHO.quantile(np.linspace(0.001, 0.999, 999))
    pay = optimal_payoff(s, rho)
    assert set(np.unique(pay)) <= {0.0, s.kappa_star}
    assert np.all((pay > 0) == (rho <= s.rho_threshold))
    assert optimal_payoff(s, s.rho_threshold) == s.kappa_star
    # the payoff is paid on a set of probability 1 - r*
    assert RHO.cdf(s.rho_threshold) == pytest.approx(1.0 - s.r_star, abs=1e-12)


def test_grid_dominance(solved):
    p, s = solved
    rng = np.random.default_rng(3)
    for r in rng.uniform(0.0, 0.999, 100):
        cost = lognormal_cost(-0.05, 0.4, float(r))
        assert goal_objective(p, float(r), cost) <= s.value + 1e-9


def test_degenerate_background_matches_classical_digital():
    p = PortfolioProblem(1.0, 1.2, RHO, NEAR_POINT_MASS)
    s = solve_goal_reaching(p)
    assert s.value == pytest.approx(classical_digital_value(1.0, 1.2, -0.05, 0.4), abs=2e-3)


def test_rich_investor_is_certain():
    # x0 >= (xi + 0.5) E[rho] buys the whole background range
    p = PortfolioProblem(2.0, 1.2, RHO, TruncatedNormal(-0.5, 0.5))
    s = solve_goal_reaching(p)
    assert s.r_star == pytest.approx(0.0, abs=1e-9)
    assert s.value == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(
    mu=st.floats(-0.3, 0.3),
    sigma=st.floats(0.15, 0.8),
    xi=st.floats(1.05, 2.0),
    width=st.floats(0.05, 1.0),
)
def test_properties_random_markets(mu, sigma, xi, width):
    rho = Lognormal(mu, sigma)
    p = PortfolioProblem(1.0, xi, rho, TruncatedNormal(-width, width))
    s = solve_goal_reaching(p)
    assert 0.0 <= s.value <= 1.0
    assert s.kappa_star * lognormal_cost(mu, sigma, s.r_star) == pytest.approx(1.0, abs=1e-8)
    for r in np.linspace(0.001, 0.99, 12):
        cost = lognormal_cost(mu, sigma, float(r))
        assert goal_objective(p, float(r), cost) <= s.value + 1e-9


def test_problem_validation():
    with pytest.raises(DomainError):
        PortfolioProblem(0.0, 1.0, RHO, NEAR_POINT_MASS)
    with pytest.raises(PreconditionError):
        PortfolioProblem(1.0, 1.0, make_empirical([0.5, 1.5]), NEAR_POINT_MASS)
    with pytest.raises(PreconditionError):
        PortfolioProblem(1.0, 1.0, RHO, make_empirical([0.0, 1.0]))
    with pytest.raises(PreconditionError):
        PortfolioProblem(1.0, 1.0, Uniform(-1.0, 1.0), NEAR_POINT_MASS)
