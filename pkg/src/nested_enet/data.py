"""Core data containers: datasets, centering, fold plans and linear models.

All containers are immutable once built. Arrays are stored as read-only
float64 copies so they can be shared between worker threads.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray


class TaskKind(str, enum.Enum):
    CLASSIFICATION = "classification"
    REGRESSION = "regression"


def _frozen(a: ArrayLike, ndim: int, name: str) -> NDArray[np.float64]:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Sample matrix (n x p), response vector and feature identifiers."""

    samples: NDArray[np.float64]
    responses: NDArray[np.float64]
    feature_ids: tuple[str, ...] = ()
    task_kind: TaskKind = TaskKind.REGRESSION

    def __post_init__(self):
        X = _frozen(self.samples, 2, "samples")
        y = _frozen(self.responses, 1, "responses")
        if X.shape[0] != y.shape[0]:
            raise ValueError(
                f"samples has {X.shape[0]} rows but responses has {y.shape[0]} entries"
            )
        ids = tuple(str(f) for f in self.feature_ids) or tuple(
            f"f{j}" for j in range(X.shape[1])
        )
        if len(ids) != X.shape[1]:
            raise ValueError(f"expected {X.shape[1]} feature ids, got {len(ids)}")
        if len(set(ids)) != len(ids):
            seen: set[str] = set()
            dups = sorted({f for f in ids if f in seen or seen.add(f)})
            raise ValueError(f"duplicated feature ids: {dups}")
        kind = TaskKind(self.task_kind)
        if kind is TaskKind.CLASSIFICATION and not np.all(np.abs(y) == 1.0):
            bad = sorted(set(y[np.abs(y) != 1.0].tolist()))
            raise ValueError(f"classification labels must be +1 or -1, found {bad}")
        object.__setattr__(self, "samples", X)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "feature_ids", ids)
        object.__setattr__(self, "task_kind", kind)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def p(self) -> int:
        return self.samples.shape[1]

    def rows(self, index: ArrayLike) -> Dataset:
        """Sub-dataset made of the given sample rows."""
        index = np.asarray(index, dtype=np.intp)
        return Dataset(self.samples[index], self.responses[index], self.feature_ids, self.task_kind)

    def columns(self, index: ArrayLike) -> Dataset:
        index = np.asarray(index, dtype=np.intp)
        return Dataset(
            self.samples[:, index],
            self.responses,
            tuple(self.feature_ids[j] for j in index),
            self.task_kind,
        )


@dataclass(frozen=True)
class CenteringTransform:
    feature_means: NDArray[np.float64]
    response_mean: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "feature_means", _frozen(self.feature_means, 1, "feature_means"))
        object.__setattr__(self, "response_mean", float(self.response_mean))

    @classmethod
    def identity(cls, p: int) -> CenteringTransform:
        return cls(np.zeros(p), 0.0)


def fit_centering(data: Dataset) -> CenteringTransform:
    """Column means of the samples and mean of the responses."""
    if data.n == 0:
        raise ValueError("empty dataset")
    return CenteringTransform(data.samples.mean(axis=0), float(data.responses.mean()))


def apply_centering(transform: CenteringTransform, samples: ArrayLike, responses: ArrayLike | None = None):
    """Subtract the stored means; returns ``(samples, responses_or_None)``.

    Test data must always go through the transform fitted on the training set.
    """
    X = np.asarray(samples, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != transform.feature_means.shape[0]:
        raise ValueError(
            f"expected samples with {transform.feature_means.shape[0]} columns, got shape {X.shape}"
        )
    Xc = X - transform.feature_means
    if responses is None:
        return Xc, None
    y = np.asarray(responses, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise ValueError(f"responses must have length {X.shape[0]}, got shape {y.shape}")
    return Xc, y - transform.response_mean


@dataclass(frozen=True)
class FoldPlan:
    fold_assignments: NDArray[np.intp]
    k: int

    def __post_init__(self):
        a = np.array(self.fold_assignments, dtype=np.intp)
        a.setflags(write=False)
        if a.ndim != 1:
            raise ValueError("fold_assignments must be a vector")
        if self.k < 1 or np.any(a < 0) or np.any(a >= self.k):
            raise ValueError(f"fold indices must lie in [0, {self.k})")
        if np.any(np.bincount(a, minlength=self.k) == 0):
            raise ValueError("every fold must be nonempty")
        object.__setattr__(self, "fold_assignments", a)

    @property
    def n(self) -> int:
        return self.fold_assignments.shape[0]

    def split(self, i: int) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
        """(train indices, validation indices) for fold ``i``."""
        mask = self.fold_assignments == i
        return np.flatnonzero(~mask), np.flatnonzero(mask)

    def splits(self):
        return [self.split(i) for i in range(self.k)]


def make_folds(n: int, k: int, seed: int = 0, labels: ArrayLike | None = None, stratify: bool = False) -> FoldPlan:
    """Seeded shuffle followed by round-robin assignment.

    With ``stratify=True`` the shuffled indices of each label are dealt in
    turn, continuing the round-robin across labels so fold sizes stay balanced.
    ``k == n`` is leave-one-out.
    """
    if k < 2 or k > n:
        raise ValueError(f"fold count must satisfy 2 <= k <= n, got k={k}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    if stratify:
        if labels is None:
            raise ValueError("stratified folds need labels")
        labels = np.asarray(labels)
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)])
    else:
        order = rng.permutation(n)
    assign = np.empty(n, dtype=np.intp)
    assign[order] = np.arange(n) % k
    return FoldPlan(assign, k)


@dataclass(frozen=True)
class HyperParams:
    """l1 weight ``tau``, l2 weight ``mu`` and debiasing ridge weight ``lam``."""

    tau: float
    mu: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        for name in ("tau", "mu", "lam"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class LinearModel:
    """Weights in the original feature space plus the centering they assume.

    Predictions are ``weights . (x - feature_means) + response_mean``.
    ``converged`` is False when the selection step hit its iteration budget.
    """

    weights: NDArray[np.float64]
    centering: CenteringTransform
    hyperparams: HyperParams
    feature_ids: tuple[str, ...] = ()
    converged: bool = True
    support: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        w = _frozen(self.weights, 1, "weights")
        if w.shape != self.centering.feature_means.shape:
            raise ValueError("weights and centering have different dimensions")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "support", tuple(int(j) for j in np.flatnonzero(w)))
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))

    @property
    def p(self) -> int:
        return self.weights.shape[0]

    def scores(self, samples: ArrayLike) -> NDArray[np.float64]:
        Xc, _ = apply_centering(self.centering, np.atleast_2d(samples))
        return Xc @ self.weights + self.centering.response_mean


def predict(model: LinearModel, sample: Sequence[float] | NDArray) -> float:
    x = np.asarray(sample, dtype=np.float64)
    if x.shape != (model.p,):
        raise ValueError(f"sample must have {model.p} components, got shape {x.shape}")
    return float(model.scores(x[None, :])[0])


def sign_labels(scores: ArrayLike) -> NDArray[np.float64]:
    """Class labels from scores; a score of exactly 0 is assigned to +1."""
    return np.where(np.asarray(scores) >= 0, 1.0, -1.0)
