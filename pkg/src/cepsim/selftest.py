"""Built-in oracle and validity checks, exposed through the CLI.

These duplicate the heart of the acceptance suite in a form that runs from
an installed package with no test dependencies: exact aggregation
equivalences, quadrature cross-checks of the expected-surprisal closed form,
algebraic identities, and Monte Carlo validity of the predictors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .aggregation import (
    CalibSizePrior,
    RicepPlan,
    bicep_e_values,
    ccep_e_values,
    ccp_ab_counts,
    ccp_p_parts,
    make_folds,
    ricep_e_values,
)
from .bayes import bayes_e_values, bayes_p_parts, suboptimal_bayes_e_values
from .conformal_full import (
    _odds_scores,
    cep_e_values,
    full_cp_ab_counts,
    full_cp_p_parts,
)
from .conformal_inductive import icep_e_values, icp_p_parts, random_split
from .criteria import PValueParts, expected_p_surprisal
from .model import Dataset, LabelCounts, ModelSpec, predictive, sample_dataset, sample_theta


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_dataset(rng, size, num_labels) -> Dataset:
    return Dataset(labels=rng.integers(1, num_labels + 1, size=size),
                   num_labels=num_labels)


def check_leave_one_out(num_cases: int = 100, seed: int = 7) -> CheckResult:
    """Leave-one-out cross-conformal p-parts must equal full conformal exactly."""
    rng = np.random.default_rng(seed)
    worst = 0
    for _ in range(num_cases):
        size = int(rng.integers(4, 31))
        num_labels = int(rng.integers(2, 5))
        data = _random_dataset(rng, size, num_labels)
        spec = ModelSpec(num_labels)
        plan = make_folds(data, size, rng)
        a_ccp, b_ccp = ccp_ab_counts(data, plan, spec)
        a_full, b_full = full_cp_ab_counts(data.to_counts())
        worst = max(
            worst,
            int(np.abs(a_ccp - a_full).max()),
            int(np.abs(b_ccp - b_full).max()),
        )
    return CheckResult(
        "leave-one-out aggregation equals full conformal",
        worst == 0,
        f"max numerator discrepancy {worst} over {num_cases} datasets",
    )


def check_surprisal_quadrature(
    num_cases: int = 400, num_zero_a: int = 50, seed: int = 11, atol: float = 1e-9
) -> CheckResult:
    """Closed-form expected surprisal vs adaptive quadrature of the integral."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(num_cases):
        if i < num_zero_a:
            a = 0.0
        else:
            a = float(rng.uniform(0.0, 1.0 - 1e-9))
        b = float(rng.uniform(1e-9, 1.0 - a))
        closed = expected_p_surprisal(PValueParts(a=a, b=b))
        oracle, _ = integrate.quad(lambda t: -math.log(a + b * t), 0.0, 1.0)
        worst = max(worst, abs(closed - oracle))
    return CheckResult(
        "expected surprisal closed form vs quadrature",
        worst <= atol,
        f"max |closed - quadrature| = {worst:.3e} over {num_cases} cases",
    )


def _direct_cep(counts: LabelCounts, spec: ModelSpec, sigma: float,
                suboptimal: bool) -> np.ndarray:
    """Reference e-value: explicit bag-average normalization per postulated label."""
    train, test = _odds_scores(counts, spec, sigma, suboptimal)
    n = counts.counts
    out = np.empty(spec.num_labels)
    for y in range(spec.num_labels):
        bag = sum(n[z] * train[z] for z in range(spec.num_labels) if z != y)
        bag += (n[y] + 1) * test[y]
        out[y] = test[y] / (bag / (counts.total + 1))
    return out


def check_identities(num_cases: int = 300, seed: int = 13,
                     atol: float = 1e-12) -> CheckResult:
    """Odds/probability identities and bag-normalization averages."""
    from .conformal_inductive import Split, icep_scores

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(num_cases):
        num_labels = int(rng.integers(2, 12))
        counts = LabelCounts.from_counts(rng.integers(0, 40, size=num_labels))
        spec = ModelSpec(num_labels, alpha=float(rng.uniform(0.1, 2.0)))
        p = predictive(counts, spec)

        e_opt = bayes_e_values(counts, spec)
        worst = max(worst, float(np.abs(
            e_opt - (1.0 - p) / p / (num_labels - 1)).max()))
        e_sub = suboptimal_bayes_e_values(counts, spec)
        worst = max(worst, abs(float(p @ e_sub) - 1.0))

        sigma = float(rng.choice([0.0, 0.5, 1.0]))
        suboptimal = bool(rng.integers(0, 2))
        quick = cep_e_values(counts, spec, sigma=sigma, suboptimal=suboptimal)
        direct = _direct_cep(counts, spec, sigma, suboptimal)
        worst = max(worst, float(np.abs(quick / direct - 1.0).max()))

        proper = LabelCounts.from_counts(rng.integers(0, 40, size=num_labels))
        calib = LabelCounts.from_counts(1 + rng.integers(0, 10, size=num_labels))
        split = Split(proper_counts=proper, calib_counts=calib)
        e_icep = icep_e_values(split, spec, suboptimal)
        scores = icep_scores(split, spec, suboptimal)
        for y in range(num_labels):
            bag_mean = scores[y] / e_icep[y]
            mean_norm = (float(calib.counts @ scores) + scores[y]) / (
                (calib.total + 1) * bag_mean
            )
            worst = max(worst, abs(mean_norm - 1.0))
    return CheckResult(
        "algebraic identities (odds, quick form, bag averages)",
        worst <= atol,
        f"max identity error {worst:.3e} over {num_cases} cases",
    )


def _ks_uniform(samples: np.ndarray) -> float:
    return float(stats.kstest(samples, "uniform").pvalue)


def check_p_validity(num_sims: int = 20_000, seed: int = 17,
                     training_size: int = 50, num_labels: int = 5) -> CheckResult:
    """True-label smoothed p-values must be uniform at the 1% KS level."""
    spec = ModelSpec(num_labels)
    rng = np.random.default_rng(seed)
    samples = {"p-bayes": np.empty(num_sims), "cp": np.empty(num_sims),
               "icp": np.empty(num_sims), "ccp": np.empty(num_sims)}
    for i in range(num_sims):
        theta = sample_theta(spec, rng)
        data = sample_dataset(theta, training_size + 1, rng)
        train = Dataset(labels=data.labels[:-1], num_labels=num_labels)
        test_label = int(data.labels[-1])
        counts = train.to_counts()
        tau = rng.uniform(size=4)

        parts = bayes_p_parts(counts, spec)[test_label - 1]
        samples["p-bayes"][i] = parts.a + tau[0] * parts.b
        parts = full_cp_p_parts(counts, spec)[test_label - 1]
        samples["cp"][i] = parts.a + tau[1] * parts.b
        split = random_split(train, training_size // 2, rng)
        parts = icp_p_parts(split, spec)[test_label - 1]
        samples["icp"][i] = parts.a + tau[2] * parts.b
        plan = make_folds(train, 5, rng)
        parts = ccp_p_parts(train, plan, spec)[test_label - 1]
        samples["ccp"][i] = parts.a + tau[3] * parts.b

    pvalues = {name: _ks_uniform(vals) for name, vals in samples.items()}
    passed = all(p > 0.01 for p in pvalues.values())
    detail = ", ".join(f"{name} KS p={p:.3f}" for name, p in pvalues.items())
    return CheckResult("smoothed p-value uniformity at true label", passed, detail)


def check_e_validity(num_sims: int = 20_000, seed: int = 19,
                     training_size: int = 50, num_labels: int = 5) -> CheckResult:
    """True-label e-values must average at most 1 (within 3 standard errors)."""
    spec = ModelSpec(num_labels)
    rng = np.random.default_rng(seed)
    names = ("cep", "icep", "ccep", "ricep-10", "bicep-10")
    samples = {name: np.empty(num_sims) for name in names}
    prior = CalibSizePrior.uniform(training_size)
    for i in range(num_sims):
        theta = sample_theta(spec, rng)
        data = sample_dataset(theta, training_size + 1, rng)
        train = Dataset(labels=data.labels[:-1], num_labels=num_labels)
        y = int(data.labels[-1]) - 1
        counts = train.to_counts()
        samples["cep"][i] = cep_e_values(counts, spec)[y]
        samples["icep"][i] = icep_e_values(
            random_split(train, training_size // 2, rng), spec)[y]
        plan = make_folds(train, 5, rng)
        samples["ccep"][i] = ccep_e_values(train, plan, spec)[y]
        samples["ricep-10"][i] = ricep_e_values(
            train, RicepPlan(proper_size=training_size // 2, repetitions=10),
            spec, rng=rng)[y]
        samples["bicep-10"][i] = bicep_e_values(train, prior, 10, spec, rng=rng)[y]

    details = []
    passed = True
    for name, vals in samples.items():
        mean = vals.mean()
        bound = 1.0 + 3.0 * vals.std(ddof=1) / math.sqrt(num_sims)
        passed &= mean <= bound
        details.append(f"{name} mean={mean:.4f} (bound {bound:.4f})")
    return CheckResult("e-value validity at true label", passed, "; ".join(details))


def run_selftest(quick: bool = False) -> list[CheckResult]:
    scale = 0.25 if quick else 1.0
    checks = [
        check_leave_one_out(num_cases=int(100 * scale) or 20),
        check_surprisal_quadrature(num_cases=int(400 * scale) or 100),
        check_identities(num_cases=int(300 * scale) or 60),
        check_p_validity(num_sims=int(20_000 * scale)),
        check_e_validity(num_sims=int(20_000 * scale)),
    ]
    return checks
