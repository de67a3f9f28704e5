"""Selection alone versus selection followed by a ridge refit.

Fifty noisy samples, a thousand uniform inputs, three of them relevant.
A LASSO path is computed once on the training half; every point on it is
scored twice on a large validation set, first with the shrunk LASSO
weights and then after refitting the selected features by least squares.

    python3 demos/sparse_toy_two_stage.py
"""

import numpy as np

from nested_enet.pipeline import GridSpec, default_grid, holdout_grid_search, selection_path
from nested_enet.synthdata import REFERENCE_WEIGHTS, ToyRegressionSpec, generate_toy_regression

train, valid, truth = generate_toy_regression(ToyRegressionSpec(true_weights=REFERENCE_WEIGHTS, seed=0))
print(f"train {train.samples.shape}, validation {valid.samples.shape}")

base = default_grid(train, tau_ratio=0.05)
grid = GridSpec(base.tau_values, (0.0,), 0.0, (0.0,))
path = selection_path(train, grid.tau_values, 0.0)

lasso = holdout_grid_search(train, valid, grid, refit=False, path=path)
two = holdout_grid_search(train, valid, grid, path=path)

print("\n  tau     |supp|  lasso MSE  refit MSE")
for t, tau in enumerate(grid.tau_values[::3]):
    i = 3 * t
    print(f"  {tau:7.4f}  {len(path.supports[i]):5d}  {lasso.error_surface[i, 0]:9.4f}  {two.error_surface[i, 0]:9.4f}")

print(f"\nLASSO only: best MSE {lasso.min_error:.4f} at tau {lasso.tau_opt:.4f}")
print(f"two-stage : best MSE {two.min_error:.4f} at tau {two.tau_opt:.4f}")

# the refit removes the shrinkage, so a larger tau (fewer features) wins
model = path.model(two.tau_index, 0.0)
print("\nselected features:", [train.feature_ids[j] for j in model.support])
print("true weights     :", np.round(truth[:3], 3))
print("refit weights    :", np.round(model.weights[:3], 3))
