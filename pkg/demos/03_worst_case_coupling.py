"""Extremal P(W <= V) when only the marginals are known.

Run: python3 demos/03_worst_case_coupling.py
"""

# %%
import numpy as np

from goalreach.dist_core import Lognormal, Uniform
from goalreach.frechet import brute_force_bound, discretize, mc_verify, sup_prob, worst_case_coupling

V, W = Lognormal(0.0, 0.5), Uniform(0.2, 2.5)
res = sup_prob("sup_leq", V, W)
print(f"alpha = {res.alpha:.5f} attained at z = {res.argsup_z:.4f}; sup P(W <= V) = {res.bound:.5f}")

# %% six atoms each: try all 720 pairings
print("best pairing of 6 atoms:", brute_force_bound("sup_leq", discretize(V, 6), discretize(W, 6)))

# %% the coupling that attains the bound, sampled
c = worst_case_coupling(V, W)
print("monte carlo under the coupling:", mc_verify(c, 200_000, seed=1))
z = np.linspace(0.05, 0.95, 5)
print("V along the common uniform:", np.round(c.v_of_z(z), 3))
