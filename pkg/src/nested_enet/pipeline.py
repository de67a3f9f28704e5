"""Two-stage protocol: cross-validated (tau, lambda) search at a small fixed
mu, then a mu sweep at the optimum producing nested supports.

A classifier is built in two steps on centered training data: an elastic-net
solve picks the support, then a ridge fit restricted to that support sets the
weights.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .analysis import NestingReport, StabilityReport, nesting_overlap, selection_frequency
from .data import (
    Dataset,
    FoldPlan,
    HyperParams,
    LinearModel,
    TaskKind,
    apply_centering,
    fit_centering,
    sign_labels,
)
from .solver import (
    IllPosedError,
    IterationConfig,
    SolveReport,
    cascade_solve,
    default_mu_cascade,
    estimate_step_bound,
    ridge_solve,
    tau_max,
)

logger = logging.getLogger(__name__)

DEFAULT_MU_SWEEP = (0.0,) + tuple(np.geomspace(1e-6, 1e-3, 8).tolist())


class SweepMode(str, enum.Enum):
    CASCADE = "cascade"
    INDEPENDENT = "independent"


class NoAdmissibleParams(RuntimeError):
    pass


@dataclass(frozen=True)
class GridSpec:
    tau_values: tuple[float, ...]
    lambda_values: tuple[float, ...]
    mu_stage1: float = 1e-6
    mu_sweep: tuple[float, ...] = DEFAULT_MU_SWEEP

    def __post_init__(self):
        taus = tuple(float(t) for t in self.tau_values)
        lams = tuple(float(v) for v in self.lambda_values)
        mus = tuple(float(m) for m in self.mu_sweep)
        if not taus or any(t <= 0 for t in taus):
            raise ValueError("tau_values must be nonempty and strictly positive")
        if any(b >= a for a, b in zip(taus, taus[1:])):
            raise ValueError("tau_values must be sorted in strictly decreasing order")
        if not lams or any(v < 0 for v in lams):
            raise ValueError("lambda_values must be nonempty and nonnegative")
        if self.mu_stage1 < 0:
            raise ValueError("mu_stage1 must be nonnegative")
        if not mus or any(b <= a for a, b in zip(mus, mus[1:])):
            raise ValueError("mu_sweep must be nonempty and strictly increasing")
        if mus[0] not in (0.0, float(self.mu_stage1)):
            raise ValueError("mu_sweep must start at 0 or at mu_stage1")
        object.__setattr__(self, "tau_values", taus)
        object.__setattr__(self, "lambda_values", lams)
        object.__setattr__(self, "mu_sweep", mus)
        object.__setattr__(self, "mu_stage1", float(self.mu_stage1))


def default_grid(
    data: Dataset,
    n_tau: int = 30,
    tau_ratio: float = 1e-4,
    n_lambda: int = 10,
    lambda_range: tuple[float, float] = (1e-8, 1e2),
    mu_stage1: float = 1e-6,
    mu_sweep: Sequence[float] = DEFAULT_MU_SWEEP,
) -> GridSpec:
    """tau: ``n_tau`` geometric points from ``tau_max`` down to
    ``tau_ratio * tau_max``; lambda: ``n_lambda`` geometric points."""
    Xc, yc = apply_centering(fit_centering(data), data.samples, data.responses)
    top = tau_max(Xc, yc)
    if top <= 0:
        raise ValueError("responses are uncorrelated with every feature")
    return GridSpec(
        tuple(np.geomspace(top, tau_ratio * top, n_tau).tolist()),
        tuple(np.geomspace(*lambda_range, n_lambda).tolist()),
        mu_stage1,
        tuple(mu_sweep),
    )


@dataclass(frozen=True)
class ErrorRecord:
    """Test error of one model.

    ``misclassified`` maps each true class to its number of errors
    (classification only).
    """

    kind: TaskKind
    n: int
    mse: float
    misclassified: dict[int, int] | None = None

    @property
    def n_misclassified(self) -> int:
        return sum(self.misclassified.values()) if self.misclassified else 0

    def value(self, metric: str = "default") -> float:
        if metric == "mse" or self.kind is TaskKind.REGRESSION:
            return self.mse
        return float(self.n_misclassified)

    def to_dict(self):
        d = {"n": self.n, "mse": self.mse}
        if self.misclassified is not None:
            d["misclassified"] = {str(k): v for k, v in sorted(self.misclassified.items())}
        return d


def evaluate(model: LinearModel, test: Dataset) -> ErrorRecord:
    scores = model.scores(test.samples)
    mse = float(np.mean((scores - test.responses) ** 2))
    if test.task_kind is not TaskKind.CLASSIFICATION:
        return ErrorRecord(test.task_kind, test.n, mse)
    wrong = sign_labels(scores) != test.responses
    counts = {c: int(np.sum(wrong & (test.responses == c))) for c in (-1, 1)}
    return ErrorRecord(test.task_kind, test.n, mse, counts)


def _select(Xc, yc, tau, mu, config, step_bound, start=None, cascade=True) -> SolveReport:
    """Elastic-net selection step; small positive mu is reached through the
    warm-started cascade from 1e-3 when ``cascade`` is set."""
    schedule = default_mu_cascade(mu) if cascade else [mu]
    cfg = IterationConfig(step_bound, config.tolerance_numerator, config.max_iterations, config.kkt_tolerance)
    return cascade_solve(Xc, yc, tau, schedule, cfg, initial_point=start)


def _build_model(Xc, yc, selection: np.ndarray, lam, refit, centering, params, feature_ids, converged):
    weights = np.zeros(Xc.shape[1])
    support = np.flatnonzero(selection)
    if support.size:
        weights[support] = ridge_solve(Xc[:, support], yc, lam) if refit else selection[support]
    return LinearModel(weights, centering, params, feature_ids, converged)


def train_classifier(
    train: Dataset,
    params: HyperParams,
    config: IterationConfig = IterationConfig(),
    *,
    refit: bool = True,
    cascade: bool = True,
) -> LinearModel:
    """Center, select with the elastic net, refit ridge on the support.

    ``refit=False`` returns the elastic-net weights themselves. An empty
    support gives the zero model, which predicts the training response mean.
    """
    if train.n == 0:
        raise ValueError("empty dataset")
    centering = fit_centering(train)
    Xc, yc = apply_centering(centering, train.samples, train.responses)
    C = config.step_bound or estimate_step_bound(Xc)
    report = _select(Xc, yc, params.tau, params.mu, config, C, config.initial_point, cascade)
    return _build_model(Xc, yc, report.solution, params.lam, refit, centering, params, train.feature_ids, report.converged)


@dataclass(frozen=True)
class CvResult:
    """Grid-search outcome.

    ``fold_errors[t, l, i]`` is the error of grid point (t, l) on split i
    (``inf`` where the fit failed). ``per_fold_supports[t][i]`` is the
    selected support; it does not depend on lambda.
    """

    tau_values: tuple[float, ...]
    lambda_values: tuple[float, ...]
    fold_errors: NDArray[np.float64]
    error_se: NDArray[np.float64]
    per_fold_supports: tuple[tuple[tuple[int, ...], ...], ...]
    tau_index: int
    lambda_index: int
    mu: float

    @property
    def error_surface(self) -> NDArray[np.float64]:
        return self.fold_errors.mean(axis=2)

    @property
    def tau_opt(self) -> float:
        return self.tau_values[self.tau_index]

    @property
    def lambda_opt(self) -> float:
        return self.lambda_values[self.lambda_index]

    @property
    def min_error(self) -> float:
        return float(self.error_surface.min())

    def supports_at_optimum(self) -> tuple[tuple[int, ...], ...]:
        return self.per_fold_supports[self.tau_index]


def select_optimum(surface, se, tau_values, lambda_values, one_se: bool = True) -> tuple[int, int]:
    """Index of the chosen grid point.

    Among points whose mean error is within one standard error of the minimum
    (exactly equal to it with ``one_se=False``) take the largest tau, then the
    smallest lambda.
    """
    surface = np.asarray(surface)
    finite = np.isfinite(surface)
    if not finite.any():
        raise NoAdmissibleParams("no admissible hyperparameters")
    best = np.unravel_index(np.argmin(np.where(finite, surface, np.inf)), surface.shape)
    bound = surface[best] + (se[best] if one_se else 0.0)
    ok = finite & (surface <= bound)
    taus = np.asarray(tau_values)[:, None] * np.ones_like(surface)
    lams = np.ones_like(surface) * np.asarray(lambda_values)[None, :]
    cands = np.argwhere(ok)
    order = sorted(cands.tolist(), key=lambda tl: (-taus[tl[0], tl[1]], lams[tl[0], tl[1]]))
    t, l = order[0]
    return int(t), int(l)


@dataclass(frozen=True)
class SelectionPath:
    """Selection-step solutions on one training set for a decreasing tau list."""

    centering: object
    Xc: NDArray[np.float64]
    yc: NDArray[np.float64]
    tau_values: tuple[float, ...]
    mu: float
    reports: tuple[SolveReport, ...]
    feature_ids: tuple[str, ...]

    @property
    def supports(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(j) for j in r.support) for r in self.reports)

    def model(self, t: int, lam: float, refit: bool = True) -> LinearModel:
        r = self.reports[t]
        params = HyperParams(self.tau_values[t], self.mu, lam)
        return _build_model(self.Xc, self.yc, r.solution, lam, refit, self.centering, params, self.feature_ids, r.converged)


def selection_path(
    train: Dataset, tau_values: Sequence[float], mu: float, config: IterationConfig = IterationConfig(), cascade: bool = True
) -> SelectionPath:
    """Elastic-net selections along decreasing ``tau_values``, each solve warm
    started from the previous one. The step constant is computed once."""
    centering = fit_centering(train)
    Xc, yc = apply_centering(centering, train.samples, train.responses)
    C = config.step_bound or estimate_step_bound(Xc)
    reports = []
    start = None
    for tau in tau_values:
        report = _select(Xc, yc, tau, mu, config, C, start, cascade)
        # next tau starts from the first cascade stage, which solves at the largest mu
        start = report.stages[0].solution
        reports.append(report)
    return SelectionPath(centering, Xc, yc, tuple(tau_values), mu, tuple(reports), train.feature_ids)


def score_path(path: SelectionPath, valid: Dataset, lambda_values: Sequence[float], refit: bool = True, metric: str = "default"):
    """Validation errors ``(T, L)`` and per-sample losses ``(T, L, m)``.

    Non-converged selections and ill-posed refits score ``inf``.
    """
    T, L = len(path.tau_values), len(lambda_values)
    errors = np.full((T, L), np.inf)
    losses = np.full((T, L, valid.n), np.inf)
    counts = valid.task_kind is TaskKind.CLASSIFICATION and metric != "mse"
    for t, report in enumerate(path.reports):
        if not report.converged:
            continue
        for l, lam in enumerate(lambda_values):
            try:
                model = path.model(t, lam, refit)
            except IllPosedError:
                continue
            scores = model.scores(valid.samples)
            if counts:
                losses[t, l] = (sign_labels(scores) != valid.responses).astype(float)
                errors[t, l] = losses[t, l].sum()
            else:
                losses[t, l] = (scores - valid.responses) ** 2
                errors[t, l] = losses[t, l].mean()
    return errors, losses


def _fold_task(train: Dataset, valid: Dataset, grid: GridSpec, mu: float, config: IterationConfig, refit: bool, metric: str, cascade: bool):
    path = selection_path(train, grid.tau_values, mu, config, cascade)
    errors, losses = score_path(path, valid, grid.lambda_values, refit, metric)
    return errors, path.supports, losses


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # results come back in submission order
        return list(pool.map(lambda it: fn(*it), items))


def stage1_grid_search(
    train: Dataset,
    grid: GridSpec,
    folds: FoldPlan,
    config: IterationConfig = IterationConfig(),
    *,
    refit: bool = True,
    metric: str = "default",
    one_se: bool = True,
    cascade: bool = True,
    workers: int = 1,
) -> CvResult:
    """k-fold search over the (tau, lambda) grid at ``grid.mu_stage1``.

    Each split is centered with its own training-part means. The error of a
    fold is the misclassification count (classification) or the mean square
    error; fold errors are averaged with equal weights.
    """
    if folds.n != train.n:
        raise ValueError(f"fold plan covers {folds.n} samples, dataset has {train.n}")
    items = [
        (train.rows(tr), train.rows(va), grid, grid.mu_stage1, config, refit, metric, cascade)
        for tr, va in folds.splits()
    ]
    results = _map(_fold_task, items, workers)
    fold_errors = np.stack([r[0] for r in results], axis=2)
    supports = tuple(zip(*(r[1] for r in results)))
    k = folds.k
    with np.errstate(invalid="ignore"):
        se = fold_errors.std(axis=2, ddof=1) / np.sqrt(k) if k > 1 else np.zeros(fold_errors.shape[:2])
    se = np.where(np.isfinite(se), se, 0.0)
    t, l = select_optimum(fold_errors.mean(axis=2), se, grid.tau_values, grid.lambda_values, one_se)
    return CvResult(grid.tau_values, grid.lambda_values, fold_errors, se, supports, t, l, grid.mu_stage1)


def holdout_grid_search(
    train: Dataset,
    validation: Dataset,
    grid: GridSpec,
    config: IterationConfig = IterationConfig(),
    *,
    refit: bool = True,
    metric: str = "default",
    one_se: bool = True,
    cascade: bool = True,
    path: SelectionPath | None = None,
) -> CvResult:
    """Grid search against a single held-out validation set.

    The standard error used by the one-standard-error rule is taken over the
    validation samples. A precomputed ``path`` for ``grid.tau_values`` at
    ``grid.mu_stage1`` skips the selection solves.
    """
    if path is None:
        path = selection_path(train, grid.tau_values, grid.mu_stage1, config, cascade)
    errors, losses = score_path(path, validation, grid.lambda_values, refit, metric)
    m = validation.n
    with np.errstate(invalid="ignore"):
        se = losses.std(axis=2, ddof=1) / np.sqrt(m)
    if validation.task_kind is TaskKind.CLASSIFICATION and metric != "mse":
        se = se * m  # errors are counts
    se = np.where(np.isfinite(se), se, 0.0)
    t, l = select_optimum(errors, se, grid.tau_values, grid.lambda_values, one_se)
    supports = tuple((s,) for s in path.supports)
    return CvResult(grid.tau_values, grid.lambda_values, errors[:, :, None], se, supports, t, l, path.mu)


@dataclass(frozen=True)
class SweepResult:
    mu_values: tuple[float, ...]
    models: tuple[LinearModel, ...]
    test_errors: tuple[ErrorRecord | None, ...]
    nesting: NestingReport | None
    mode: SweepMode
    tau: float
    lam: float
    selection_converged: tuple[bool, ...] = field(default=())

    @property
    def supports(self) -> list[tuple[int, ...]]:
        return [m.support for m in self.models]

    @property
    def cardinalities(self) -> list[int]:
        return [len(m.support) for m in self.models]


def sweep_selections(Xc, yc, tau, mu_sweep, config, mode: SweepMode, step_bound=None, cascade: bool = True):
    """Selection-step solutions for each mu of an increasing sweep.

    Cascade mode runs one decreasing cascade from the largest mu down to the
    smallest and reads it backwards, so supports are nested exactly.
    """
    C = step_bound or estimate_step_bound(Xc)
    mus = [float(m) for m in mu_sweep]
    if SweepMode(mode) is SweepMode.INDEPENDENT:
        return [_select(Xc, yc, tau, mu, config, C, None, cascade) for mu in mus]
    top = default_mu_cascade(mus[-1]) if cascade else [mus[-1]]
    schedule = top + mus[-2::-1]
    cfg = IterationConfig(C, config.tolerance_numerator, config.max_iterations, config.kkt_tolerance)
    report = cascade_solve(Xc, yc, tau, schedule, cfg)
    stages = list(report.stages)
    # a non-converged stage stops the cascade; later stages inherit its failure
    while len(stages) < len(schedule):
        stages.append(SolveReport(stages[-1].solution, 0, False, stages[-1].kkt_residual))
    picked = [stages[len(top) - 1]] + stages[len(top):]
    return picked[::-1]


def stage2_sweep(
    train: Dataset,
    test: Dataset | None,
    cv: CvResult,
    grid: GridSpec,
    config: IterationConfig = IterationConfig(),
    mode: SweepMode | str = SweepMode.CASCADE,
    *,
    refit: bool = True,
    cascade: bool = True,
) -> SweepResult:
    """Models on the full training set at (tau_opt, mu, lambda_opt) for every
    mu of ``grid.mu_sweep``, with test errors when ``test`` is given."""
    mode = SweepMode(mode)
    tau, lam = cv.tau_opt, cv.lambda_opt
    centering = fit_centering(train)
    Xc, yc = apply_centering(centering, train.samples, train.responses)
    selections = sweep_selections(Xc, yc, tau, grid.mu_sweep, config, mode, config.step_bound, cascade)
    models = []
    for mu, sel in zip(grid.mu_sweep, selections):
        params = HyperParams(tau, mu, lam)
        models.append(_build_model(Xc, yc, sel.solution, lam, refit, centering, params, train.feature_ids, sel.converged))
    errors = tuple(evaluate(m, test) if test is not None else None for m in models)
    nesting = nesting_overlap([m.support for m in models]) if len(models) > 1 else None
    if mode is SweepMode.CASCADE and nesting is not None and not nesting.perfectly_nested:
        raise AssertionError("cascade sweep produced non-nested supports")
    return SweepResult(
        tuple(grid.mu_sweep), tuple(models), errors, nesting, mode, tau, lam, tuple(s.converged for s in selections)
    )


def fold_stability(
    train: Dataset,
    folds: FoldPlan,
    tau: float,
    mu_sweep: Sequence[float],
    config: IterationConfig = IterationConfig(),
    mode: SweepMode | str = SweepMode.CASCADE,
    *,
    cascade: bool = True,
    workers: int = 1,
) -> list[StabilityReport]:
    """Selection frequency across the training parts of ``folds``, one report
    per mu of the sweep."""
    items = []
    for tr, _ in folds.splits():
        part = train.rows(tr)
        Xc, yc = apply_centering(fit_centering(part), part.samples, part.responses)
        items.append((Xc, yc, tau, list(mu_sweep), config, SweepMode(mode), config.step_bound, cascade))
    per_fold = _map(sweep_selections, items, workers)
    return [
        selection_frequency([tuple(per_fold[i][m].support) for i in range(folds.k)], train.p)
        for m in range(len(mu_sweep))
    ]
