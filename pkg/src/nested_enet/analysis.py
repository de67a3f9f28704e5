"""Post-hoc summaries of selected supports and classifier scores."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

DECILES = tuple(round(0.1 * i, 1) for i in range(1, 11))


@dataclass(frozen=True)
class NestingReport:
    """``cardinalities[i]`` is ``|S_i|``; ``overlap_percent[i]`` is the share of
    ``S_i`` found again in ``S_{i+1}``."""

    cardinalities: tuple[int, ...]
    overlap_percent: tuple[float, ...]

    @property
    def perfectly_nested(self) -> bool:
        return all(v == 100.0 for v in self.overlap_percent)

    def to_dict(self):
        return {"cardinalities": list(self.cardinalities), "overlap_percent": list(self.overlap_percent)}


def nesting_overlap(supports: Sequence[Iterable[int]]) -> NestingReport:
    """Overlap of each support with the next one in the list.

    An empty support counts as fully contained in its successor.
    """
    sets = [frozenset(int(j) for j in s) for s in supports]
    if len(sets) < 2:
        raise ValueError("need at least two supports")
    overlap = []
    for cur, nxt in zip(sets, sets[1:]):
        overlap.append(100.0 if not cur else 100.0 * len(cur & nxt) / len(cur))
    return NestingReport(tuple(len(s) for s in sets), tuple(overlap))


@dataclass(frozen=True)
class RejectionReport:
    """Score interval ``[lower, upper]`` whose removal leaves no errors.

    ``rejected_fraction`` maps each predicted class (-1, +1) to the share of
    samples predicted in that class that fall inside the region.
    """

    lower: float
    upper: float
    rejected_fraction: dict[int, float]
    rejected: NDArray[np.bool_]

    @property
    def degenerate(self) -> bool:
        return not self.rejected.any()

    @property
    def sides(self) -> int:
        """0 for a degenerate region, 1 if it extends to one side of 0, else 2."""
        if self.degenerate:
            return 0
        return int(self.lower < 0) + int(self.upper > 0)

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "rejected_fraction": {str(k): v for k, v in sorted(self.rejected_fraction.items())},
            "n_rejected": int(self.rejected.sum()),
        }


def _errors(scores, labels):
    pred = np.where(scores >= 0, 1.0, -1.0)
    return pred != labels


def rejection_region(scores: ArrayLike, labels: ArrayLike) -> RejectionReport:
    """Smallest closed interval around 0 containing every misclassified score.

    A score of 0 is predicted +1, so a negative sample scoring exactly 0 is
    misclassified. Samples on the interval endpoints are rejected.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if s.shape != y.shape:
        raise ValueError("scores and labels must have the same length")
    wrong = _errors(s, y)
    lower = float(min(0.0, s[wrong & (y > 0)].min(initial=0.0)))
    upper = float(max(0.0, s[wrong & (y < 0)].max(initial=0.0)))
    if wrong.any():
        rejected = (s >= lower) & (s <= upper)
    else:
        rejected = np.zeros(s.shape, dtype=bool)
    if _errors(s[~rejected], y[~rejected]).any():
        raise AssertionError("rejection region leaves misclassified samples")
    pred = np.where(s >= 0, 1, -1)
    fractions = {}
    for c in (-1, 1):
        in_class = pred == c
        fractions[c] = float(rejected[in_class].sum() / in_class.sum()) if in_class.any() else 0.0
    return RejectionReport(lower, upper, fractions, rejected)


@dataclass(frozen=True)
class StabilityReport:
    counts: NDArray[np.int_]
    n_folds: int
    thresholds: tuple[float, ...]
    cumulative: tuple[int, ...]

    @property
    def frequencies(self) -> NDArray[np.float64]:
        return self.counts / self.n_folds

    def n_selected_at_least(self, fraction: float) -> int:
        # small slack so that e.g. 1/3 of the folds passes a 1/3 threshold
        return int(np.sum(self.counts >= fraction * self.n_folds - 1e-9))

    @property
    def always_selected(self) -> int:
        return int(np.sum(self.counts == self.n_folds))

    @property
    def mean_support_size(self) -> float:
        return float(self.counts.sum() / self.n_folds)

    def to_dict(self, feature_ids: Sequence[str] | None = None):
        nz = np.flatnonzero(self.counts)
        ids = [feature_ids[j] for j in nz] if feature_ids is not None else [int(j) for j in nz]
        return {
            "n_folds": self.n_folds,
            "thresholds": list(self.thresholds),
            "cumulative": list(self.cumulative),
            "selection_counts": dict(zip(map(str, ids), (int(c) for c in self.counts[nz]))),
        }


def selection_frequency(per_fold_supports: Sequence[Iterable[int]], p: int, thresholds: Sequence[float] = DECILES) -> StabilityReport:
    """Per-feature selection counts and the number of features selected in at
    least each threshold fraction of the folds."""
    if not per_fold_supports:
        raise ValueError("need at least one support")
    counts = np.zeros(p, dtype=np.int_)
    for s in per_fold_supports:
        idx = np.fromiter((int(j) for j in set(s)), dtype=np.intp)
        counts[idx] += 1
    report = StabilityReport(counts, len(per_fold_supports), tuple(thresholds), ())
    cumulative = tuple(report.n_selected_at_least(f) for f in thresholds)
    return StabilityReport(counts, len(per_fold_supports), tuple(thresholds), cumulative)


@dataclass(frozen=True)
class RecoveryScore:
    correct: bool
    slightly_redundant: bool
    ratio: float
    per_group: tuple[int, ...]
    outside: int

    @property
    def n_selected(self) -> int:
        return sum(self.per_group) + self.outside


def support_recovery_score(selected: Iterable[int], true_groups: Sequence[Iterable[int]]) -> RecoveryScore:
    """Compare a support with groups of interchangeable relevant features.

    ``correct``: one feature per group and nothing else. ``slightly_redundant``:
    every group hit, nothing else, exactly one extra feature overall.
    ``ratio``: relevant selected / all selected (0 for an empty selection).
    """
    sel = {int(j) for j in selected}
    groups = [{int(j) for j in g} for g in true_groups]
    per_group = tuple(len(sel & g) for g in groups)
    relevant = set().union(*groups) if groups else set()
    outside = len(sel - relevant)
    n_relevant = len(sel & relevant)
    covered = all(c >= 1 for c in per_group)
    extra = sum(c - 1 for c in per_group if c > 1)
    return RecoveryScore(
        correct=covered and outside == 0 and extra == 0,
        slightly_redundant=covered and outside == 0 and extra == 1,
        ratio=n_relevant / len(sel) if sel else 0.0,
        per_group=per_group,
        outside=outside,
    )
