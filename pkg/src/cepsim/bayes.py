"""Bayes-optimal reference predictors.

These are valid only under the generating Dirichlet-categorical model (the
"hard model" role); the conformal predictors elsewhere use the same
predictive probabilities merely as scores and stay valid under
exchangeability.
"""

from __future__ import annotations

import numpy as np

from .criteria import PValueParts
from .model import LabelCounts, ModelSpec, predictive


def bayes_p_parts(counts: LabelCounts, spec: ModelSpec) -> list[PValueParts]:
    """Smoothed Bayesian p-value parts per candidate label.

    For each label y: a_y is the total predictive probability of labels
    strictly less probable than y, b_y the total probability of the tie group
    of y (itself included). Ties are detected on integer counts, which is
    exact: two labels have equal predictive probability iff their counts are
    equal.
    """
    p = predictive(counts, spec)
    n = counts.counts
    less = n[None, :] < n[:, None]
    tied = n[None, :] == n[:, None]
    a = less @ p
    b = tied @ p
    return [PValueParts(a=float(a[y]), b=float(b[y])) for y in range(spec.num_labels)]


def bayes_e_values(counts: LabelCounts, spec: ModelSpec) -> np.ndarray:
    """Optimal Bayesian e-values, one per candidate label.

    e_y = ((l + Y*alpha) / (n_y + alpha) - 1) / (Y - 1), i.e. the predictive
    odds against label y divided by Y - 1. Entries are strictly positive and
    decrease as n_y grows.
    """
    top = counts.total + spec.num_labels * spec.alpha
    return (top / (counts.counts + spec.alpha) - 1.0) / (spec.num_labels - 1)


def suboptimal_bayes_e_values(counts: LabelCounts, spec: ModelSpec) -> np.ndarray:
    """Inverse-probability Bayesian e-values e_y = 1 / (Y * P(y)).

    Optimal for the mean-log-e criterion over all labels rather than over
    false labels only.
    """
    top = counts.total + spec.num_labels * spec.alpha
    return top / (counts.counts + spec.alpha) / spec.num_labels
