"""Aggregated conformal predictors.

Cross-conformal prediction aggregates per-fold inductive predictors: p-value
parts by count-summing across folds, e-values by plain averaging (an average
of e-values is an e-value, which is what keeps every aggregate here valid).
Repeated and balanced inductive conformal e-prediction replace the fold
structure with independent random splits, with the split size fixed (RICEP)
or drawn from a prior over calibration sizes (BICEP and its variants).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import PValueParts
from .conformal_inductive import Split, icep_e_values, random_split
from .model import Dataset, LabelCounts, ModelSpec


@dataclass(frozen=True)
class FoldPlan:
    """Balanced assignment of observations to folds 1..num_folds."""

    num_folds: int
    assignment: np.ndarray

    def __post_init__(self) -> None:
        assignment = np.asarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", assignment)
        if self.num_folds < 2:
            raise ValueError(f"need at least 2 folds, got {self.num_folds}")
        sizes = np.bincount(assignment, minlength=self.num_folds + 1)[1:]
        if sizes.size != self.num_folds or np.any(sizes != sizes[0]):
            raise ValueError("folds must be non-empty and of equal size")


@dataclass(frozen=True)
class RicepPlan:
    """Proper-training size and number of repeated random splits."""

    proper_size: int
    repetitions: int

    def __post_init__(self) -> None:
        if self.proper_size < 1:
            raise ValueError(f"proper_size must be >= 1, got {self.proper_size}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")


@dataclass(frozen=True)
class CalibSizePrior:
    """Probability weights over calibration-set sizes 1..l-1.

    ``weights[i]`` is the probability of calibration size i + 1.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        if weights.ndim != 1 or weights.size < 1:
            raise ValueError("weights must be a non-empty 1-d vector")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    @classmethod
    def uniform(cls, training_size: int) -> "CalibSizePrior":
        """Uniform over sizes 1..l-1 (the fully balanced variant)."""
        width = training_size - 1
        return cls(weights=np.full(width, 1.0 / width))

    @classmethod
    def semi(cls, training_size: int) -> "CalibSizePrior":
        """Uniform over 1..floor(l/2): calibration never larger than proper."""
        weights = np.zeros(training_size - 1)
        half = training_size // 2
        weights[:half] = 1.0 / half
        return cls(weights=weights)

    @classmethod
    def point_mass(cls, training_size: int, calib_size: int) -> "CalibSizePrior":
        if not 1 <= calib_size <= training_size - 1:
            raise ValueError(
                f"calib_size must lie in 1..{training_size - 1}, got {calib_size}"
            )
        weights = np.zeros(training_size - 1)
        weights[calib_size - 1] = 1.0
        return cls(weights=weights)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw calibration sizes from the prior."""
        return rng.choice(self.weights.shape[0], size=size, p=self.weights) + 1


def make_folds(data: Dataset, num_folds: int, rng: np.random.Generator) -> FoldPlan:
    """Uniformly random balanced partition into num_folds folds.

    Shuffles indices once and slices the shuffle into contiguous blocks.
    Errors if num_folds does not divide the training size.
    """
    total = len(data)
    if num_folds < 2:
        raise ValueError(f"need at least 2 folds, got {num_folds}")
    if total % num_folds != 0:
        raise ValueError(f"{num_folds} folds do not divide {total} observations")
    fold_size = total // num_folds
    assignment = np.empty(total, dtype=np.int64)
    assignment[rng.permutation(total)] = np.repeat(
        np.arange(1, num_folds + 1), fold_size
    )
    return FoldPlan(num_folds=num_folds, assignment=assignment)


def _fold_calib_counts(data: Dataset, plan: FoldPlan) -> np.ndarray:
    """(num_folds, num_labels) matrix of per-fold label counts."""
    if plan.assignment.shape[0] != len(data):
        raise ValueError("fold plan does not match the dataset size")
    counts = np.zeros((plan.num_folds, data.num_labels), dtype=np.int64)
    np.add.at(counts, (plan.assignment - 1, data.labels - 1), 1)
    return counts


def ccp_ab_counts(
    data: Dataset, plan: FoldPlan, spec: ModelSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Integer numerators of the cross-conformal (a, b) parts, denominator l + 1.

    Per fold, calibration counts of labels whose proper-training count is
    below (ties: equal to) the postulated label's are summed; fold sums are
    then added, with b getting +1 for the test observation.
    """
    calib = _fold_calib_counts(data, plan)
    totals = data.to_counts().counts
    a_num = np.zeros(spec.num_labels, dtype=np.int64)
    b_num = np.zeros(spec.num_labels, dtype=np.int64)
    for k in range(plan.num_folds):
        proper = totals - calib[k]
        a_num += (proper[None, :] < proper[:, None]) @ calib[k]
        b_num += (proper[None, :] == proper[:, None]) @ calib[k]
    return a_num, b_num + 1


def ccp_p_parts(data: Dataset, plan: FoldPlan, spec: ModelSpec) -> list[PValueParts]:
    """Smoothed cross-conformal p-value parts per postulated label."""
    a_num, b_num = ccp_ab_counts(data, plan, spec)
    denom = len(data) + 1
    return [
        PValueParts(a=float(a_num[y]) / denom, b=float(b_num[y]) / denom)
        for y in range(spec.num_labels)
    ]


def ccep_e_values(
    data: Dataset,
    plan: FoldPlan,
    spec: ModelSpec,
    suboptimal: bool = False,
    inverse: bool = False,
) -> np.ndarray:
    """Cross-conformal e-values: the mean of per-fold inductive e-values.

    Each fold serves in turn as the calibration set with the remaining folds
    as proper training set; ``inverse`` swaps the two roles. For two folds
    the variants coincide.
    """
    calib = _fold_calib_counts(data, plan)
    totals = data.to_counts().counts
    total_size = len(data)
    fold_size = total_size // plan.num_folds
    values = np.empty((plan.num_folds, spec.num_labels))
    for k in range(plan.num_folds):
        fold = LabelCounts(counts=calib[k], total=fold_size)
        rest = LabelCounts(counts=totals - calib[k], total=total_size - fold_size)
        split = Split(proper_counts=fold, calib_counts=rest) if inverse else Split(
            proper_counts=rest, calib_counts=fold
        )
        values[k] = icep_e_values(split, spec, suboptimal)
    return values.mean(axis=0)


def icep_split_samples(
    data: Dataset,
    proper_size: int,
    num_splits: int,
    spec: ModelSpec,
    suboptimal: bool,
    rng: np.random.Generator,
) -> np.ndarray:
    """(num_splits, num_labels) inductive e-values from independent random splits."""
    values = np.empty((num_splits, spec.num_labels))
    for i in range(num_splits):
        split = random_split(data, proper_size, rng)
        values[i] = icep_e_values(split, spec, suboptimal)
    return values


def ricep_e_values(
    data: Dataset,
    plan: RicepPlan,
    spec: ModelSpec,
    suboptimal: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Repeated inductive conformal e-values.

    The training set is split ``plan.repetitions`` times at the fixed proper
    size and the resulting e-value vectors are averaged in repetition order.
    """
    if rng is None:
        raise ValueError("ricep_e_values requires an rng")
    if not 1 <= plan.proper_size <= len(data) - 1:
        raise ValueError(
            f"proper_size must lie in 1..{len(data) - 1}, got {plan.proper_size}"
        )
    samples = icep_split_samples(
        data, plan.proper_size, plan.repetitions, spec, suboptimal, rng
    )
    return samples.mean(axis=0)


def bicep_e_values(
    data: Dataset,
    prior: CalibSizePrior,
    num_repeats: int,
    spec: ModelSpec,
    suboptimal: bool = False,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Balanced inductive conformal e-values.

    Each repetition draws a calibration size from the prior, splits the
    training set at that size, and computes inductive e-values; the
    repetitions are averaged. A uniform prior over 1..l-1 gives the fully
    balanced variant, uniform over 1..floor(l/2) the semi-balanced one, a
    point mass reduces to the repeated fixed-size predictor.
    """
    if rng is None:
        raise ValueError("bicep_e_values requires an rng")
    if num_repeats < 1:
        raise ValueError(f"num_repeats must be >= 1, got {num_repeats}")
    total = len(data)
    if prior.weights.shape[0] != total - 1:
        raise ValueError("prior must assign weights to sizes 1..l-1")
    calib_sizes = prior.sample(rng, num_repeats)
    values = np.empty((num_repeats, spec.num_labels))
    for i, calib_size in enumerate(calib_sizes):
        split = random_split(data, total - int(calib_size), rng)
        values[i] = icep_e_values(split, spec, suboptimal)
    return values.mean(axis=0)


def jensen_gap(e_values: np.ndarray) -> float:
    """ln(mean) - mean(ln) of a batch of positive values; non-negative.

    Zero exactly when all values are equal; grows with the spread of the
    batch, which is what rewards averaging under log-based criteria.
    """
    e = np.asarray(e_values, dtype=np.float64)
    if e.size == 0:
        raise ValueError("need at least one value")
    if np.any(e <= 0):
        raise ValueError("all values must be positive")
    if np.all(e == e[0]):
        return 0.0  # exact equality case; the mean would introduce rounding
    return float(np.log(e.mean()) - np.log(e).mean())
