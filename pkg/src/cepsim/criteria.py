"""Predictive-efficiency criteria.

Quality is measured in surprisal units: -ln p for a p-value, ln e for an
e-value, averaged over false labels in the infinite-test-set limit. Larger
is better for every criterion here.

A smoothed p-value is represented by the pair (a, b) with p = a + tau * b,
tau uniform on [0, 1]. The tie-breaking variable tau is always integrated
out analytically via ``expected_p_surprisal``; it is never sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Below this, the a-part of a smoothed p-value is treated as exactly zero;
# (a/b)*ln(a) -> 0 as a -> 0, so the branch is continuous.
A_ZERO = 1e-300

PARTS_ATOL = 1e-12


@dataclass(frozen=True)
class PValueParts:
    """The (a, b) decomposition of a smoothed p-value p = a + tau * b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not self.a >= 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"b must be > 0, got {self.b}")
        if self.a + self.b > 1.0 + PARTS_ATOL:
            raise ValueError(f"a + b must be <= 1, got {self.a + self.b}")


def expected_p_surprisal(parts: PValueParts) -> float:
    """Expected surprisal E_tau[-ln(a + tau * b)] of a smoothed p-value.

    Closed form of the definite integral: (a/b) ln a + 1 - ((a+b)/b) ln(a+b),
    with the a = 0 case replaced by 1 - ln b.
    """
    a, b = parts.a, parts.b
    if a < A_ZERO:
        return 1.0 - math.log(b)
    s = a + b
    return (a / b) * math.log(a) + 1.0 - (s / b) * math.log(s)


def deterministic_p_surprisal(parts: PValueParts) -> float:
    """Surprisal -ln(a + b) of the deterministic p-value (tau fixed at 1)."""
    return -math.log(parts.a + parts.b)


def _as_evalues(e_values: np.ndarray) -> np.ndarray:
    e = np.asarray(e_values, dtype=np.float64)
    if np.any(e < 0):
        raise ValueError("e-values must be non-negative")
    return e


def afs_quality(
    theta: np.ndarray, p_parts_per_label: Sequence[PValueParts], smoothed: bool = True
) -> float:
    """Average false p-surprisal for a fixed training set and infinite test set.

    Computes sum_y (1 - theta_y) F(a_y, b_y) / (Y - 1) where F is the expected
    surprisal when ``smoothed`` and the deterministic surprisal otherwise.
    The weights (1 - theta_y) / (Y - 1) sum to 1.
    """
    theta = np.asarray(theta, dtype=np.float64)
    num_labels = theta.shape[0]
    if len(p_parts_per_label) != num_labels:
        raise ValueError("need one PValueParts per label")
    surprisal = expected_p_surprisal if smoothed else deterministic_p_surprisal
    values = np.array([surprisal(parts) for parts in p_parts_per_label])
    return float((1.0 - theta) @ values / (num_labels - 1))


def afes_quality(theta: np.ndarray, e_values: np.ndarray) -> float:
    """Average false e-surprisal sum_y (1 - theta_y) ln(e_y) / (Y - 1).

    An e-value of exactly 0 yields -inf (recorded, not raised); a zero-weight
    label contributes 0 regardless of its e-value.
    """
    theta = np.asarray(theta, dtype=np.float64)
    e = _as_evalues(e_values)
    if e.shape != theta.shape:
        raise ValueError("theta and e_values must have the same length")
    weights = 1.0 - theta
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(weights == 0.0, 0.0, weights * np.log(e))
    return float(terms.sum() / (theta.shape[0] - 1))


def afes16_quality(e_values: np.ndarray) -> float:
    """Mean log e-value over all labels (the theta-independent criterion)."""
    e = _as_evalues(e_values)
    with np.errstate(divide="ignore"):
        return float(np.log(e).mean())
