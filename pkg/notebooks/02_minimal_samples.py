"""
How many points recover every weight?
=====================================

Each vertex of a generic polytrope is tight on ``d - 1`` facets.  A sample
recovers all weights exactly when the tight sets of its points cover all
facets, so the best case sample size is a set cover number of the dual
triangulation.  Sampling random weights shows which numbers occur.
"""

import numpy as np

from tropmlbn import atom_sample, census, dual_subdivision, exact_cover_cells, known_dag_estimate
from tropmlbn.model import random_model

for d, draws in [(3, 50), (4, 200), (5, 500)]:
    result = census(d, draws, rng_seed=1)
    print(f"d={d}: {len(result.types)} types, cover sizes {result.cover_sizes()}")

# build a minimal sample from one cover and check the estimate
model = random_model(5, rng_seed=7)
sigma = dual_subdivision(model.C_star)
cover = exact_cover_cells(sigma)
S = atom_sample(model, cover, rng_seed=0)
est = known_dag_estimate(S, model.dag)
err = max(abs(est[i, j] - model.C_star[i, j]) for j, i in sigma.universe)
print(f"{len(S)} points, largest error on facet edges {err:.2e}")

# dropping one point leaves a facet unseen
est_short = known_dag_estimate(S[1:], model.dag)
gaps = [model.C_star[i, j] - est_short[i, j] for j, i in sorted(sigma.universe)]
print("under-estimates after dropping a point:", np.round(gaps, 3))
