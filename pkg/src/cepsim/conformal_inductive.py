"""Inductive conformal prediction.

The training set is split once into a proper training part (fits the score,
counts n_y) and a calibration part (counts n'_y). Scores are the predictive
odds against a label computed from the proper part only, so both the p- and
e-predictors depend on the data through the two count vectors alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import PValueParts
from .model import Dataset, LabelCounts, ModelSpec


@dataclass(frozen=True)
class Split:
    """Counts of the proper training and calibration parts of one split."""

    proper_counts: LabelCounts
    calib_counts: LabelCounts

    def __post_init__(self) -> None:
        if self.proper_counts.num_labels != self.calib_counts.num_labels:
            raise ValueError("split parts disagree on the number of labels")

    @property
    def proper_size(self) -> int:
        return self.proper_counts.total

    @property
    def calib_size(self) -> int:
        return self.calib_counts.total


def random_split(data: Dataset, proper_size: int, rng: np.random.Generator) -> Split:
    """Split the dataset uniformly at random; only counts are retained."""
    total = len(data)
    if not 1 <= proper_size <= total - 1:
        raise ValueError(
            f"proper_size must lie in 1..{total - 1}, got {proper_size}"
        )
    shuffled = rng.permutation(data.labels)
    width = data.num_labels + 1
    proper = np.bincount(shuffled[:proper_size], minlength=width)[1:]
    calib = np.bincount(shuffled[proper_size:], minlength=width)[1:]
    return Split(
        proper_counts=LabelCounts(counts=proper, total=proper_size),
        calib_counts=LabelCounts(counts=calib, total=total - proper_size),
    )


def icp_p_parts(split: Split, spec: ModelSpec) -> list[PValueParts]:
    """Smoothed inductive conformal p-value parts per postulated label.

    a_y' sums calibration counts of labels scoring strictly worse than y',
    b_y' the tie group plus one for the test observation itself; denominator
    is the calibration size plus 1. Score comparisons reduce to integer
    comparisons of proper-training counts.
    """
    n = split.proper_counts.counts
    n_cal = split.calib_counts.counts
    denom = split.calib_size + 1
    a_num = (n[None, :] < n[:, None]) @ n_cal
    b_num = (n[None, :] == n[:, None]) @ n_cal + 1
    return [
        PValueParts(a=float(a_num[y]) / denom, b=float(b_num[y]) / denom)
        for y in range(spec.num_labels)
    ]


def icep_scores(split: Split, spec: ModelSpec, suboptimal: bool = False) -> np.ndarray:
    """Per-label nonconformity score (m + Y*alpha) / (n_y + alpha) - 1.

    The suboptimal variant drops the subtraction and uses the plain
    inverse-probability ratio. Scores are strictly positive for the optimal
    variant too, since n_y <= m < m + (Y - 1) * alpha.
    """
    n = split.proper_counts.counts
    top = split.proper_size + spec.num_labels * spec.alpha
    offset = 0.0 if suboptimal else 1.0
    return top / (n + spec.alpha) - offset


def icep_e_values(
    split: Split, spec: ModelSpec, suboptimal: bool = False
) -> np.ndarray:
    """Inductive conformal e-values, one per postulated label.

    The postulated test observation's score is divided by the average score
    over the calibration bag plus the test observation, so the average of
    normalized scores over that bag of size m' + 1 is 1 by construction.
    """
    if split.proper_counts.num_labels != spec.num_labels:
        raise ValueError("split and spec disagree on the number of labels")
    scores = icep_scores(split, spec, suboptimal)
    calib_total = float(split.calib_counts.counts @ scores)
    return scores * (split.calib_size + 1) / (calib_total + scores)
