# coding: utf-8

# # Correlation and the choice of imputer
#
# Four equicorrelated features, a linear model on the first three and a
# noise feature x4 that the model ignores. We sweep the correlation and read
# off individual effects at x = (1, 1, 1, 1).

# In[1]:

import numpy as np

from fanova_games.experiments import fig_sweep, lookup


# In[2]:

rows = fig_sweep("fig2_lin", repetitions=1)
for rho in (0.0, 0.5, 0.9):
    print(f"rho = {rho}")
    for imputer in ("baseline", "marginal", "conditional"):
        for effect in ("pure", "partial", "full"):
            vals = lookup(rows, rho, imputer, effect)
            print(f"  {imputer:<12}{effect:<8}", np.round(vals, 4))


# Under conditional imputation the noise feature gets a large pure effect
# because it predicts the others, while its full effect stays at zero. The
# full effects of x1..x3 shrink towards zero as the features become redundant.

# In[3]:

print(lookup(rows, 0.9, "conditional", "full"))


# The same sweep with Monte Carlo imputation; the spread over seeds comes
# from the background and conditional draws.

# In[4]:

mc = fig_sweep("fig2_lin", repetitions=5, mode="monte_carlo", mc_samples=256, rhos=(0.9,))
for r in mc:
    if r["imputer"] == "conditional" and r["effect"] == "pure":
        print(f"x{r['feature']}: {r['mean']:.3f} +/- {r['std']:.3f}")
