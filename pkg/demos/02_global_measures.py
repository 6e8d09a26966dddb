# coding: utf-8

# # Variance and risk based importance
#
# Global measures come from the same effect definitions applied to two other
# games: the variance of the marginalised model (sensitivity game) and its
# negative loss on labelled data (risk game).

# In[1]:

import numpy as np

from fanova_games import ImputerConfig, ValueFunction, parse_model
from fanova_games.games import risk_game, sensitivity_game
from fanova_games.gaussian import GaussianSpec
from fanova_games.influence import compute_effect, h_statistic, shapley_value, sobol_indices, superset_measure
from fanova_games.synthetic import synthetic_dataset


# In[2]:

F = parse_model("2*x1 + 3*x2 + 1.5*x1*x2 + 0.5*x3", 3)
spec = GaussianSpec.standard(3)
vf = ValueFunction(F, ImputerConfig("m", background=spec))
nu = sensitivity_game(vf, (spec, 20000, 0))


# Closed and total Sobol indices are the pure and full effects of this game.

# In[3]:

for i in (1, 2, 3):
    closed, total = sobol_indices(nu, [i], normalized=True)
    print(f"x{i}: closed {closed:.3f}  total {total:.3f}")

print("superset measure of {1,2}:", round(superset_measure(nu, [1, 2]), 3))
print("H-statistic (1,2):", round(h_statistic(vf, (spec, 20000, 0), 1, 2).value, 3))


# Shapley values of the sensitivity game split the interaction variance
# equally between x1 and x2.

# In[4]:

print(shapley_value(nu))


# Risk game: permutation feature importance is the full individual effect
# under marginal imputation, SAGE the partial one under conditional imputation.

# In[5]:

corr = GaussianSpec.equicorrelated(3, 0.7)
data = synthetic_dataset(F, corr, 5000, seed=1)
pfi_game = risk_game(ValueFunction(F, ImputerConfig("m", background=corr)), data)
sage_game = risk_game(ValueFunction(F, ImputerConfig("c", background=corr)), data)
for i in range(3):
    print(f"x{i + 1}: pfi {compute_effect(pfi_game, 1 << i, 'full', 'individual'):7.3f}"
          f"  sage {compute_effect(sage_game, 1 << i, 'partial', 'individual'):7.3f}")
