"""Two-stage elastic-net feature selection.

An l1 + l2 penalized least-squares fit (solved by damped iterative
soft-thresholding) selects a support, a ridge fit restricted to that support
sets the weights, and a sweep over the l2 weight yields nested supports of
increasing size.
"""

from .analysis import (
    NestingReport,
    RejectionReport,
    StabilityReport,
    nesting_overlap,
    rejection_region,
    selection_frequency,
    support_recovery_score,
)
from .data import (
    CenteringTransform,
    Dataset,
    FoldPlan,
    HyperParams,
    LinearModel,
    TaskKind,
    apply_centering,
    fit_centering,
    make_folds,
    predict,
)
from .pipeline import (
    CvResult,
    GridSpec,
    SweepMode,
    SweepResult,
    default_grid,
    evaluate,
    fold_stability,
    holdout_grid_search,
    stage1_grid_search,
    stage2_sweep,
    train_classifier,
)
from .solver import (
    IterationConfig,
    SolveReport,
    cascade_solve,
    elastic_net_solve,
    estimate_step_bound,
    kkt_residual,
    ridge_solve,
    soft_threshold,
)

__version__ = "0.1.0"
