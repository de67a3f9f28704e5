"""Seeded generators for the two synthetic benchmarks.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` in a fixed
order, so a seed reproduces the dataset bit for bit on any platform that
ships the same PCG64 stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .data import Dataset, TaskKind

# Reference draw of the three nonzero weights of the sparse regression toy.
REFERENCE_WEIGHTS = (0.6449, 0.8180, 0.6602)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ToyRegressionSpec:
    """Sparse linear regression with uniform inputs.

    ``true_weights=None`` draws the three active weights uniformly from
    ``weight_range`` using the ``seed`` field.
    """

    n_train: int = 50
    n_validation: int = 1000
    p: int = 1000
    true_weights: tuple[float, float, float] | None = None
    noise_sigma: float = 0.5
    input_range: tuple[float, float] = (-1.0, 1.0)
    weight_range: tuple[float, float] = (0.5, 1.0)
    seed: int = 0

    def __post_init__(self):
        if self.p < 3:
            raise ValueError("p must be at least 3")
        if self.true_weights is not None:
            w = tuple(float(v) for v in self.true_weights)
            if len(w) != 3 or any(v == 0 for v in w):
                raise ValueError("true_weights must hold exactly three nonzero values")
            object.__setattr__(self, "true_weights", w)
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


def generate_toy_regression(spec: ToyRegressionSpec = ToyRegressionSpec()):
    """Returns ``(train, validation, truth)``; only ``truth[:3]`` is nonzero."""
    rng = rng_for(spec.seed)
    truth = np.zeros(spec.p)
    if spec.true_weights is None:
        truth[:3] = rng.uniform(*spec.weight_range, size=3)
    else:
        truth[:3] = spec.true_weights
    lo, hi = spec.input_range
    ids = tuple(f"x{j + 1}" for j in range(spec.p))

    def draw(n):
        X = rng.uniform(lo, hi, size=(n, spec.p))
        y = X @ truth
        if spec.noise_sigma > 0:
            y = y + spec.noise_sigma * rng.standard_normal(n)
        return Dataset(X, y, ids, TaskKind.REGRESSION)

    train = draw(spec.n_train)
    validation = draw(spec.n_validation)
    return train, validation, truth


@dataclass(frozen=True)
class GroupedToySpec:
    """Three blocks of near-identical features plus independent noise features.

    Feature ``j`` of block ``g`` is ``Z_g + eps_j`` with ``Z_g ~ N(0, 1)`` and
    ``eps_j ~ N(0, within_group_noise_sigma**2)``. The response is the sum of
    all block features plus ``N(0, response_noise_sigma**2)`` noise (none by
    default).
    """

    n: int = 100
    within_group_noise_sigma: float = 0.01
    group_size: int = 5
    n_noise_features: int = 25
    response_noise_sigma: float = 0.0
    n_groups: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.group_size < 1 or self.n_groups < 1 or self.n_noise_features < 0:
            raise ValueError("invalid grouped toy dimensions")

    @property
    def p(self) -> int:
        return self.n_groups * self.group_size + self.n_noise_features


def generate_grouped_toy(spec: GroupedToySpec = GroupedToySpec()) -> tuple[Dataset, list[frozenset[int]]]:
    """Returns the dataset and the relevant blocks as 0-based index sets.

    The noise features form the last block and are not returned as a group.
    """
    rng = rng_for(spec.seed)
    n, size = spec.n, spec.group_size
    latents = rng.standard_normal((n, spec.n_groups))
    blocks = np.repeat(latents, size, axis=1)
    blocks = blocks + spec.within_group_noise_sigma * rng.standard_normal(blocks.shape)
    noise = rng.standard_normal((n, spec.n_noise_features))
    X = np.hstack([blocks, noise])
    y = blocks.sum(axis=1)
    if spec.response_noise_sigma > 0:
        y = y + spec.response_noise_sigma * rng.standard_normal(n)
    groups = [frozenset(range(g * size, (g + 1) * size)) for g in range(spec.n_groups)]
    ids = tuple(f"g{g + 1}_{j + 1}" for g in range(spec.n_groups) for j in range(size))
    ids += tuple(f"noise_{j + 1}" for j in range(spec.n_noise_features))
    return Dataset(X, y, ids, TaskKind.REGRESSION), groups


def split_rows(data: Dataset, n_first: int, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Random disjoint split into ``n_first`` rows and the remainder."""
    if not 0 < n_first < data.n:
        raise ValueError("n_first must leave both parts nonempty")
    order = rng_for(seed).permutation(data.n)
    return data.rows(np.sort(order[:n_first])), data.rows(np.sort(order[n_first:]))


def true_grouped_weights(spec: GroupedToySpec) -> NDArray[np.float64]:
    w = np.zeros(spec.p)
    w[: spec.n_groups * spec.group_size] = 1.0
    return w


def to_classification(data: Dataset) -> Dataset:
    """Relabel a regression dataset by the sign of its responses (0 -> +1)."""
    labels = np.where(data.responses >= 0, 1.0, -1.0)
    return Dataset(data.samples, labels, data.feature_ids, TaskKind.CLASSIFICATION)
