"""Goal-reaching digital payoff when an unhedgeable risk sits on top.

Run: python3 demos/04_digital_portfolio.py
"""

# %%
import numpy as np

from goalreach.dist_core import Lognormal, TruncatedNormal
from goalreach.portfolio import PortfolioProblem, optimal_payoff, solve_goal_reaching

rho = Lognormal(-0.05, 0.4)

# %% widen the background risk and watch the payoff move
for width in (1e-6, 0.1, 0.3, 0.5):
    s = solve_goal_reaching(PortfolioProblem(1.0, 1.2, rho, TruncatedNormal(-width, width)))
    print(f"width {width:7.1e}: pay {s.kappa_star:.4f} when rho <= {s.rho_threshold:.4f}, P(goal) = {s.value:.4f}")

# %%
s = solve_goal_reaching(PortfolioProblem(1.0, 1.2, rho, TruncatedNormal(-0.3, 0.3)))
print("payoff on a few states:", optimal_payoff(s, np.array([0.5, 1.0, 1.5, 2.0])))
