"""Optimal layer reinsurance with and without background risk.

Run: python3 demos/01_layer_reinsurance.py
"""

# %%
from goalreach.distortion import premium, z0
from goalreach.reinsurance import (
    evaluate_comonotone,
    evaluate_worst_case,
    solve_comonotone,
    solve_no_background,
    solve_with_background,
)
from goalreach.robustness import BASE

p = BASE.problem(xi=17.0)
print("distortion premium of the whole loss:", round(premium(p.pricing, p.F_X), 4))
print("critical retention z0:", round(z0(p.pricing, p.F_X), 4))

# %% three views of the same insurer
for label, solver in [
    ("no background risk", solve_no_background),
    ("worst-case coupling", solve_with_background),
    ("comonotone background", solve_comonotone),
]:
    s = solver(p)
    c = s.contract
    print(f"{label:24s} cede ({c.attach:.4f}, {c.detach:.4f}] for {s.premium:.4f}, P(goal) = {s.value:.4f}")

# %% swap the contracts between scenarios
robust = solve_with_background(p).contract
nominal = solve_comonotone(p).contract
print("worst case:  robust", round(evaluate_worst_case(p, robust), 4), " nominal", round(evaluate_worst_case(p, nominal), 4))
print("comonotone:  robust", round(evaluate_comonotone(p, robust), 4), " nominal", round(evaluate_comonotone(p, nominal), 4))
