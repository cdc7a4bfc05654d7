"""Dirichlet-categorical data model.

Labels live on {1, ..., Y}. The class probabilities theta are drawn from a
symmetric Dirichlet prior with concentration alpha, and observations are
i.i.d. categorical draws from theta. Everything downstream consumes per-label
counts; individual labels are only materialized where random splits need
observation identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

THETA_ATOL = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    """Label-space size and Dirichlet concentration of the generating model."""

    num_labels: int
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if self.num_labels < 2:
            raise ValueError(f"num_labels must be >= 2, got {self.num_labels}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")


def validate_theta(theta: np.ndarray, num_labels: int | None = None) -> np.ndarray:
    """Check that theta is a point of the standard simplex and return it as float64."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1:
        raise ValueError("theta must be a 1-d probability vector")
    if num_labels is not None and theta.shape[0] != num_labels:
        raise ValueError(f"theta has {theta.shape[0]} entries, expected {num_labels}")
    if np.any(theta < 0):
        raise ValueError("theta entries must be non-negative")
    if abs(float(theta.sum()) - 1.0) > THETA_ATOL:
        raise ValueError("theta entries must sum to 1")
    return theta


@dataclass(frozen=True)
class LabelCounts:
    """Per-label counts of a (sub)dataset; the sufficient statistic for all formulas.

    ``counts[i]`` is the number of observations with label ``i + 1``.
    """

    counts: np.ndarray
    total: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 1 or counts.shape[0] < 2:
            raise ValueError("counts must be a 1-d vector with at least two entries")
        if counts.min(initial=0) < 0:
            raise ValueError("counts must be non-negative")
        if int(counts.sum()) != self.total:
            raise ValueError(
                f"total {self.total} does not match sum of counts {int(counts.sum())}"
            )

    @classmethod
    def from_counts(cls, counts) -> "LabelCounts":
        counts = np.asarray(counts, dtype=np.int64)
        return cls(counts=counts, total=int(counts.sum()))

    @property
    def num_labels(self) -> int:
        return int(self.counts.shape[0])


@dataclass(frozen=True)
class Dataset:
    """A sequence of labels in {1, ..., num_labels}."""

    labels: np.ndarray
    num_labels: int

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-d sequence")
        if labels.size and (labels.min() < 1 or labels.max() > self.num_labels):
            raise ValueError(f"labels must lie in 1..{self.num_labels}")

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def to_counts(self) -> LabelCounts:
        counts = np.bincount(self.labels, minlength=self.num_labels + 1)[1:]
        return LabelCounts(counts=counts.astype(np.int64), total=len(self))


def sample_theta(spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw theta from the symmetric Dirichlet prior.

    Uses the standard exact construction: Y independent Gamma(alpha, 1)
    variates normalized to sum 1, renormalized once more to suppress
    rounding drift.
    """
    g = rng.gamma(spec.alpha, 1.0, size=spec.num_labels)
    g /= g.sum()
    g /= g.sum()
    return g


def sample_dataset(theta: np.ndarray, size: int, rng: np.random.Generator) -> Dataset:
    """Draw ``size`` i.i.d. categorical observations with probabilities theta."""
    theta = np.asarray(theta, dtype=np.float64)
    if size < 0:
        raise ValueError(f"size must be >= 0, got {size}")
    num_labels = theta.shape[0]
    labels = rng.choice(num_labels, size=size, p=theta) + 1
    return Dataset(labels=labels, num_labels=num_labels)


def predictive(counts: LabelCounts, spec: ModelSpec) -> np.ndarray:
    """Posterior predictive probabilities (n_y + alpha) / (n + Y * alpha).

    This is the generalization of Laplace's rule of succession for the
    symmetric Dirichlet prior; entries are strictly positive and sum to 1.
    """
    if counts.num_labels != spec.num_labels:
        raise ValueError("counts and spec disagree on the number of labels")
    return (counts.counts + spec.alpha) / (counts.total + spec.num_labels * spec.alpha)
