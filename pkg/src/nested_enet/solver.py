r"""Damped iterative soft-thresholding for the naive elastic net.

Minimizes, on centered data,

.. math::

    \frac{1}{n}\|y - X\beta\|_2^2 + \mu\|\beta\|_2^2 + \tau\|\beta\|_1

with the fixed-point iteration

.. math::

    \beta^{(l+1)} = \frac{1}{1 + n\mu/C}
        S_{n\tau/C}\left(\beta^{(l)} + \frac{1}{C} X^T(y - X\beta^{(l)})\right)

where ``2C`` strictly bounds the spectral norm of ``X^T X``. Also provides the
restricted ridge refit and a KKT certificate for candidate solutions.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from ._kernels import damped_iteration
from .data import HyperParams

logger = logging.getLogger(__name__)

STEP_SAFETY = 0.01


class DivergenceError(RuntimeError):
    pass


class IllPosedError(ValueError):
    pass


@dataclass(frozen=True)
class IterationConfig:
    """Iteration controls.

    step_bound:
        Constant ``C`` with ``||X^T X|| < 2C``. ``None`` estimates it from the
        design at solve time; an explicit value is checked against a
        power-iteration estimate.
    tolerance_numerator:
        The iteration stops once every coefficient moves by at most
        ``tolerance_numerator / l`` of its previous magnitude (``l`` = iteration).
    kkt_tolerance:
        Maximum KKT residual for a stop to count as converged; if the relative
        rule fires above it, iterating continues.
    """

    step_bound: float | None = None
    tolerance_numerator: float = 0.1
    max_iterations: int = 1_000_000
    kkt_tolerance: float = 1e-5
    initial_point: NDArray[np.float64] | None = None

    def __post_init__(self):
        if self.step_bound is not None and not self.step_bound > 0:
            raise ValueError("step_bound must be positive")
        if not self.tolerance_numerator > 0:
            raise ValueError("tolerance_numerator must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.kkt_tolerance > 0:
            raise ValueError("kkt_tolerance must be positive")


@dataclass(frozen=True)
class SolveReport:
    solution: NDArray[np.float64]
    iterations_used: int
    converged: bool
    kkt_residual: float

    @property
    def support(self) -> NDArray[np.intp]:
        return np.flatnonzero(self.solution)


@dataclass(frozen=True)
class CascadeReport(SolveReport):
    """Cascade result; ``stages`` holds each stage's report embedded in R^p."""

    stages: tuple[SolveReport, ...] = field(default=())
    mu_schedule: tuple[float, ...] = field(default=())


def soft_threshold(v: ArrayLike, alpha: float) -> NDArray[np.float64]:
    """Shrink each component toward zero by ``alpha / 2``, zeroing those below it."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - alpha / 2.0, 0.0)


def power_iteration(X: ArrayLike, *, tol: float = 1e-12, max_iter: int = 5000, seed: int = 0) -> float:
    """Largest eigenvalue of ``X^T X`` (the squared top singular value of X)."""
    X = np.asarray(X, dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    # iterate on the smaller Gram side
    side = X.shape[1] if X.shape[1] <= X.shape[0] else X.shape[0]
    v = rng.standard_normal(side)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(max_iter):
        w = X.T @ (X @ v) if side == X.shape[1] else X @ (X.T @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        new_estimate = float(v @ w)
        v = w / norm
        if abs(new_estimate - estimate) <= tol * new_estimate:
            return new_estimate
        estimate = new_estimate
    return estimate


def estimate_step_bound(X: ArrayLike, safety: float = STEP_SAFETY) -> float:
    """``C = (1 + safety) * sigma_max(X)**2 / 2`` so that ``||X^T X|| < 2C``."""
    top = power_iteration(X)
    if not top > 0:
        raise ValueError("degenerate design")
    return (1.0 + safety) * top / 2.0


def tau_max(X: ArrayLike, y: ArrayLike) -> float:
    """Smallest l1 weight whose elastic-net solution is identically zero."""
    X = np.asarray(X, dtype=np.float64)
    return float(np.max(np.abs(2.0 / X.shape[0] * (X.T @ np.asarray(y, dtype=np.float64))), initial=0.0))


def kkt_residual(X: ArrayLike, y: ArrayLike, params: HyperParams, beta: ArrayLike) -> float:
    """Worst violation of the first-order optimality conditions at ``beta``."""
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    n = X.shape[0]
    corr = 2.0 / n * (X.T @ (np.asarray(y, dtype=np.float64) - X @ beta))
    return _kkt_from_corr(corr, beta, params.tau, params.mu)


def _kkt_from_corr(corr, beta, tau, mu):
    # corr = -(gradient of the data term)
    active = beta != 0
    res_active = np.abs(-corr[active] + 2.0 * mu * beta[active] + tau * np.sign(beta[active]))
    res_zero = np.maximum(np.abs(corr[~active]) - tau, 0.0)
    return float(max(res_active.max(initial=0.0), res_zero.max(initial=0.0)))


def elastic_net_solve(
    X: ArrayLike,
    y: ArrayLike,
    params: HyperParams,
    config: IterationConfig = IterationConfig(),
    initial_point: ArrayLike | None = None,
) -> SolveReport:
    """Run the damped thresholding iteration on centered ``(X, y)``.

    ``initial_point`` overrides ``config.initial_point`` (warm starts).
    Hitting ``max_iterations`` returns the last iterate with ``converged=False``.
    """
    X = np.asarray(X, dtype=np.float64)
    if config.step_bound is None:
        C = estimate_step_bound(X)
    else:
        C = config.step_bound
        if power_iteration(X) >= 2.0 * C:
            raise ValueError(f"step bound C={C} violates ||X^T X|| < 2C")
    start = initial_point if initial_point is not None else config.initial_point
    return iterate(X, y, params, C, config, start)


def iterate(X, y, params: HyperParams, C: float, config: IterationConfig, start=None) -> SolveReport:
    """Thresholding loop with a step constant ``C`` the caller vouches for."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    beta = np.zeros(p) if start is None else np.array(start, dtype=np.float64)
    if beta.shape != (p,):
        raise ValueError(f"initial point must have {p} components")

    Xty = X.T @ y
    use_gram = p <= n
    M = X.T @ X if use_gram else np.ascontiguousarray(X.T)
    iterations, converged, kkt = damped_iteration(
        M, use_gram, Xty, beta, float(C), params.tau, params.mu, float(n),
        config.tolerance_numerator, config.kkt_tolerance, config.max_iterations,
    )
    if iterations < 0:
        raise DivergenceError("divergence")
    if not converged:
        logger.warning("elastic net did not converge in %d iterations (kkt=%.3g)", iterations, kkt)
    return SolveReport(beta, iterations, converged, kkt)


def ridge_solve(X: ArrayLike, y: ArrayLike, lam: float) -> NDArray[np.float64]:
    """Minimizer of ``(1/n)||y - X b||^2 + lam ||b||^2``.

    Solves ``(X^T X + n lam I) b = X^T y`` by Cholesky; when there are more
    columns than rows the dual ``n x n`` system is factored instead.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, k = X.shape
    if k == 0:
        raise ValueError("empty support")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    primal = k <= n
    A = X.T @ X if primal else X @ X.T
    A[np.diag_indices_from(A)] += n * lam
    if lam == 0.0 and np.linalg.cond(A) > 1e12:
        raise IllPosedError("ill-posed, increase lambda")
    try:
        factor = scipy.linalg.cho_factor(A, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise IllPosedError("ill-posed, increase lambda") from exc
    if primal:
        return scipy.linalg.cho_solve(factor, X.T @ y, check_finite=False)
    return X.T @ scipy.linalg.cho_solve(factor, y, check_finite=False)


def default_mu_cascade(mu: float, start: float = 1e-3, steps: int = 10) -> list[float]:
    """Geometric schedule from ``start`` down to ``mu`` (``steps`` values)."""
    if mu <= 0 or mu >= start:
        return [mu]
    return np.geomspace(start, mu, steps).tolist()


def cascade_solve(
    X: ArrayLike,
    y: ArrayLike,
    tau: float,
    mu_schedule: Sequence[float],
    config: IterationConfig = IterationConfig(),
    initial_point: ArrayLike | None = None,
) -> CascadeReport:
    """Solve for a decreasing ``mu_schedule``, each stage restricted to the
    previous stage's support and warm-started from its solution.

    Supports are nested by construction. The reported KKT residual of each
    stage refers to its restricted problem.
    """
    mus = [float(m) for m in mu_schedule]
    if not mus:
        raise ValueError("empty mu schedule")
    if any(b >= a for a, b in zip(mus, mus[1:])):
        raise ValueError("mu schedule must be strictly decreasing")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p = X.shape[1]

    active = np.arange(p)
    start = np.zeros(p) if initial_point is None else np.asarray(initial_point, dtype=np.float64)
    stages: list[SolveReport] = []
    total = 0
    for i, mu in enumerate(mus):
        if active.size == 0:
            stages.append(SolveReport(np.zeros(p), 0, True, 0.0))
            continue
        sub = X[:, active] if active.size < p else X
        if i == 0 and config.step_bound is not None:
            C = config.step_bound
        else:
            # restricted designs have a smaller norm, hence a longer step
            C = estimate_step_bound(sub)
        report = iterate(sub, y, HyperParams(tau, mu), C, config, start[active])
        total += report.iterations_used
        full = np.zeros(p)
        full[active] = report.solution
        stages.append(SolveReport(full, report.iterations_used, report.converged, report.kkt_residual))
        if not report.converged:
            break
        active = np.flatnonzero(full)
        start = full

    last = stages[-1]
    return CascadeReport(
        last.solution,
        total,
        all(s.converged for s in stages),
        last.kkt_residual,
        stages=tuple(stages),
        mu_schedule=tuple(mus[: len(stages)]),
    )
