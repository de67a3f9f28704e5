"""How the l2 weight grows the support over groups of correlated features.

Three blocks of five nearly identical features drive the response; 25 more
features are pure noise. With a tiny l2 penalty the l1 term keeps one
representative per block. Raising mu at fixed tau pulls the rest of each
block in, and the cascade makes every support contain the previous one.

    python3 demos/grouped_mu_sweep.py
"""

import logging

from nested_enet.analysis import support_recovery_score
from nested_enet.pipeline import GridSpec, SweepMode, default_grid, holdout_grid_search, stage2_sweep
from nested_enet.solver import IterationConfig
from nested_enet.synthdata import GroupedToySpec, generate_grouped_toy, split_rows

# grid points near tau -> 0 may hit the iteration cap; they are scored inf
logging.getLogger("nested_enet").setLevel(logging.ERROR)
config = IterationConfig(max_iterations=100_000)
data, groups = generate_grouped_toy(GroupedToySpec(response_noise_sigma=1.0, seed=1))
train, valid = split_rows(data, 50, seed=1)
print("blocks:", [sorted(g) for g in groups])

# stage I: pick tau and lambda on a held-out half with almost no l2 penalty
cv = holdout_grid_search(train, valid, default_grid(train), config)
print(f"tau* = {cv.tau_opt:.4g}, lambda* = {cv.lambda_opt:.3g}")

# stage II: same tau, growing mu, on all samples
mus = (0.0,) + tuple(f * cv.tau_opt for f in (1e-5, 1e-4, 1e-3, 1e-2, 1.0, 1000.0))
grid = GridSpec(cv.tau_values, cv.lambda_values, 1e-6, mus)
for mode in SweepMode:
    sweep = stage2_sweep(data, None, cv, grid, config, mode)
    print(f"\n{mode.value}:")
    for mu, model in zip(sweep.mu_values, sweep.models):
        score = support_recovery_score(model.support, groups)
        print(f"  mu/tau* = {mu / cv.tau_opt:8.3g}  |supp| = {score.n_selected:2d}  per block {score.per_group}  noise {score.outside}")
    print(f"  overlap with previous support (%): {[round(v) for v in sweep.nesting.overlap_percent]}")
