"""Full conformal prediction for label-only classification.

The conformity score of an observation is the count of its label in the
comparison bag, equivalently its estimated predictive probability, so
p-values reduce to count arithmetic over the training counts augmented by
the postulated test label.

Conformal e-values come in a family indexed by an ordinariness parameter
sigma in [0, 1]: sigma = 0 excludes the scored observation from its own
comparison bag (deleted), sigma = 1 includes it (ordinary), sigma = 0.5 is
the intermediate, studentized-like compromise.
"""

from __future__ import annotations

import numpy as np

from .criteria import PValueParts
from .model import LabelCounts, ModelSpec


def _check_sigma(sigma: float) -> float:
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    return float(sigma)


def full_cp_ab_counts(counts: LabelCounts) -> tuple[np.ndarray, np.ndarray]:
    """Integer numerators of the full conformal (a, b) parts, denominator l + 1.

    For postulated label y': the a-numerator counts bag elements strictly
    less conforming than the test observation, the b-numerator the test
    observation's tie group (itself included).
    """
    n = counts.counts
    not_self = ~np.eye(n.shape[0], dtype=bool)
    a_num = ((n[None, :] <= n[:, None]) & not_self) @ n
    b_num = (n[None, :] == n[:, None] + 1) @ n + n + 1
    return a_num, b_num


def full_cp_p_parts(counts: LabelCounts, spec: ModelSpec) -> list[PValueParts]:
    """Smoothed full conformal p-value parts, one per postulated label."""
    if counts.num_labels != spec.num_labels:
        raise ValueError("counts and spec disagree on the number of labels")
    a_num, b_num = full_cp_ab_counts(counts)
    denom = counts.total + 1
    return [
        PValueParts(a=float(a_num[y]) / denom, b=float(b_num[y]) / denom)
        for y in range(spec.num_labels)
    ]


def _odds_scores(
    counts: LabelCounts, spec: ModelSpec, sigma: float, suboptimal: bool
) -> tuple[np.ndarray, np.ndarray]:
    """Per-label nonconformity scores in the augmented training set.

    Returns (train, test): ``train[y]`` scores a training observation with
    label y distinct from the postulated label (its own copy removed from the
    bag, hence n_y - 1); ``test[y]`` scores the test observation postulated
    as y, and equally a training observation whose label coincides with the
    postulated one. The optimal variant uses odds (ratio minus 1), the
    suboptimal variant the plain inverse-probability ratio.

    When n_y = 0 the train denominator can vanish; the whole score is set to
    0 there, which is immaterial since it is always multiplied by n_y = 0.
    """
    n = counts.counts
    top = counts.total + sigma + spec.num_labels * spec.alpha
    offset = 0.0 if suboptimal else 1.0
    denom_train = n - 1 + sigma + spec.alpha
    safe = np.where(n == 0, 1.0, denom_train)
    train = np.where(n == 0, 0.0, top / safe - offset)
    test = top / (n + sigma + spec.alpha) - offset
    return train, test


def cep_scores(
    counts: LabelCounts,
    spec: ModelSpec,
    sigma: float,
    postulated: int,
    suboptimal: bool = False,
) -> tuple[np.ndarray, float]:
    """Nonconformity scores of the augmented training set for one postulated label.

    Returns (per-training-label scores, test score). The entry for the
    postulated label uses the test-style score, because removing such a
    training observation from the bag and adding the postulated test
    observation leaves its label count unchanged.
    """
    sigma = _check_sigma(sigma)
    if not 1 <= postulated <= spec.num_labels:
        raise ValueError(f"postulated label must lie in 1..{spec.num_labels}")
    train, test = _odds_scores(counts, spec, sigma, suboptimal)
    scores = train.copy()
    scores[postulated - 1] = test[postulated - 1]
    return scores, float(test[postulated - 1])


def cep_e_values(
    counts: LabelCounts,
    spec: ModelSpec,
    sigma: float = 0.0,
    suboptimal: bool = False,
) -> np.ndarray:
    """Full conformal e-values, one per postulated label.

    The e-value is the test observation's score divided by the mean score
    over the augmented bag of size l + 1, so the bag average of normalized
    scores is 1 by construction. Computed through the precomputed bag total
    S = sum_y n_y * train_y, adjusted per postulated label.
    """
    sigma = _check_sigma(sigma)
    if counts.num_labels != spec.num_labels:
        raise ValueError("counts and spec disagree on the number of labels")
    n = counts.counts
    train, test = _odds_scores(counts, spec, sigma, suboptimal)
    bag_total = float(n @ train)
    denom = bag_total - n * train + (n + 1) * test
    return (counts.total + 1) * test / denom
