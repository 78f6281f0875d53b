"""Two-step replicability analysis of a p-value matrix.

Step 1 selects promising features from an m x n matrix (rows = features,
columns = studies). Step 2 reports, for each selected feature, a lower
bound k_hat on the number of studies in which the effect is present,
with the expected proportion of overstated bounds controlled at q.
"""

import numpy as np

from pcfdr import SIMES, SelectionRule, WeightScheme, khat_bounds, select_features

rng = np.random.default_rng(7)

m, n = 12, 4
mat = rng.random((m, n))
# plant signal: feature 0 replicates in all 4 studies, feature 1 in 2,
# feature 2 in 1; the rest are null.
mat[0, :4] = rng.random(4) * 1e-5
mat[1, :2] = rng.random(2) * 1e-5
mat[2, :1] = rng.random(1) * 1e-5

ws = WeightScheme.unit(m)
rule = SelectionRule("step_up_on_combined", alpha=0.1)
selected = select_features(mat, rule, SIMES, ws)
print(f"selected features: {sorted(selected)}")

report = khat_bounds(mat, selected, SIMES, ws, q=0.1)
print(f"selection volume |S|_v = {report.selection_volume:.0f}\n")
print("replicability lower bounds:")
for i in sorted(selected):
    t = report.threshold_used[i]
    print(f"  feature {i}: k_hat = {report.khat[i]} "
          f"(step-2 threshold {t:.4f})")

print("\nEvery selected feature has k_hat >= 1 by construction when the"
      "\nsame combiner and level drive both steps, so selection alone"
      "\nalready certifies an effect in at least one study.")
