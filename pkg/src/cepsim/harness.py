"""Reproducible Monte Carlo experiment runner.

One experiment draws ``iterations`` independent (theta, training set) pairs
and evaluates every configured predictor on each pair under one efficiency
criterion, in a paired design: all predictors in a config see the same data
within an iteration, while split-based predictors get their own independent
split randomness.

Seeding contract: iteration i derives all of its randomness from child seed
sequences keyed on (master_seed, i, slot), so results are independent of
execution order and thread count, and any iteration can be replayed in
isolation.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .aggregation import (
    CalibSizePrior,
    RicepPlan,
    bicep_e_values,
    ccep_e_values,
    ccp_p_parts,
    make_folds,
    ricep_e_values,
)
from .bayes import bayes_e_values, bayes_p_parts, suboptimal_bayes_e_values
from .conformal_full import cep_e_values, full_cp_p_parts
from .conformal_inductive import icep_e_values, icp_p_parts, random_split
from .criteria import afes16_quality, afes_quality, afs_quality
from .model import Dataset, ModelSpec, sample_dataset, sample_theta

CRITERIA = ("AFS-smoothed", "AFS-deterministic", "AFES", "AFES16")

P_KINDS = ("p-bayes", "cp", "icp", "ccp")
E_KINDS = ("e-bayes", "cep", "icep", "ccep", "ricep", "bicep")

_SPLIT_KINDS = ("icp", "icep", "ccp", "ccep", "ricep", "bicep")


class ConfigError(ValueError):
    """An experiment configuration is structurally or semantically invalid."""


@dataclass(frozen=True)
class PredictorSpec:
    """One predictor to evaluate, with its parameters.

    ``parameter`` overrides the x-axis value recorded for this predictor in
    result records (useful when sweeping a derived quantity such as the fold
    count); ``label`` overrides the derived predictor id.
    """

    kind: str
    sigma: float = 0.0
    proper_size: int | None = None
    num_folds: int | None = None
    repetitions: int = 1
    suboptimal: bool = False
    inverse: bool = False
    prior: str | tuple[float, ...] | None = None
    parameter: float | None = None
    label: str | None = None

    @property
    def predictor_id(self) -> str:
        if self.label is not None:
            return self.label
        name = self.kind
        if self.kind == "bicep":
            base = {"uniform": "bicep", "semi": "semi-bicep"}.get(
                self.prior if isinstance(self.prior, str) else "", "partial-bicep"
            )
            name = f"{base}-{self.repetitions}"
        elif self.kind == "ricep":
            name = f"ricep-{self.repetitions}"
        if self.kind == "ccep" and self.inverse:
            name += "-inverse"
        if self.suboptimal:
            name += "-suboptimal"
        return name

    @property
    def x_value(self) -> float:
        """The swept x-axis value; NaN for predictors with no natural sweep axis."""
        if self.parameter is not None:
            return float(self.parameter)
        if self.kind == "cep":
            return self.sigma
        if self.kind in ("icp", "icep", "ricep"):
            return float(self.proper_size) if self.proper_size is not None else math.nan
        if self.kind in ("ccp", "ccep"):
            return float(self.num_folds) if self.num_folds is not None else math.nan
        if self.kind == "bicep":
            return float(self.repetitions)
        return math.nan

    def validate(self, training_size: int) -> None:
        if self.kind not in P_KINDS + E_KINDS:
            raise ConfigError(f"unknown predictor kind {self.kind!r}")
        if self.kind == "cep" and not 0.0 <= self.sigma <= 1.0:
            raise ConfigError(f"cep sigma must lie in [0, 1], got {self.sigma}")
        if self.kind in ("icp", "icep", "ricep"):
            if self.proper_size is None or not 1 <= self.proper_size <= training_size - 1:
                raise ConfigError(
                    f"{self.kind} needs proper_size in 1..{training_size - 1}, "
                    f"got {self.proper_size}"
                )
        if self.kind in ("ccp", "ccep"):
            if self.num_folds is None or self.num_folds < 2:
                raise ConfigError(f"{self.kind} needs num_folds >= 2")
            if training_size % self.num_folds != 0:
                raise ConfigError(
                    f"num_folds {self.num_folds} does not divide "
                    f"training_size {training_size}"
                )
        if self.kind in ("ricep", "bicep") and self.repetitions < 1:
            raise ConfigError(f"{self.kind} needs repetitions >= 1")
        if self.kind == "bicep":
            self.resolve_prior(training_size)
        if self.suboptimal and self.kind not in ("e-bayes", "cep", "icep", "ccep", "ricep", "bicep"):
            raise ConfigError(f"{self.kind} has no suboptimal variant")
        if self.inverse and self.kind != "ccep":
            raise ConfigError("inverse applies to ccep only")

    def resolve_prior(self, training_size: int) -> CalibSizePrior:
        if self.prior == "uniform" or self.prior is None:
            return CalibSizePrior.uniform(training_size)
        if self.prior == "semi":
            return CalibSizePrior.semi(training_size)
        if isinstance(self.prior, str):
            raise ConfigError(f"unknown prior {self.prior!r}")
        try:
            return CalibSizePrior(weights=np.asarray(self.prior, dtype=np.float64))
        except ValueError as exc:
            raise ConfigError(f"invalid prior weights: {exc}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    training_size: int
    iterations: int
    master_seed: int
    predictor_specs: tuple[PredictorSpec, ...]
    criterion: str

    def validate(self) -> None:
        if self.training_size < 2:
            raise ConfigError(f"training_size must be >= 2, got {self.training_size}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.criterion not in CRITERIA:
            raise ConfigError(
                f"criterion must be one of {', '.join(CRITERIA)}, got {self.criterion!r}"
            )
        if not self.predictor_specs:
            raise ConfigError("need at least one predictor spec")
        wants_p = self.criterion.startswith("AFS")
        for spec in self.predictor_specs:
            spec.validate(self.training_size)
            if wants_p and spec.kind not in P_KINDS:
                raise ConfigError(
                    f"criterion {self.criterion} needs p-predictors, got {spec.kind!r}"
                )
            if not wants_p and spec.kind not in E_KINDS:
                raise ConfigError(
                    f"criterion {self.criterion} needs e-predictors, got {spec.kind!r}"
                )

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Parse the JSON mirror of this config; unknown keys are an error."""
        known = {"model", "training_size", "iterations", "master_seed",
                 "predictor_specs", "criterion"}
        _reject_unknown(raw, known, "config")
        missing = known - raw.keys()
        if missing:
            raise ConfigError(f"config is missing keys: {', '.join(sorted(missing))}")
        model_raw = raw["model"]
        if not isinstance(model_raw, dict):
            raise ConfigError("model must be an object")
        _reject_unknown(model_raw, {"num_labels", "alpha"}, "model")
        if "num_labels" not in model_raw:
            raise ConfigError("model is missing num_labels")
        try:
            model = ModelSpec(
                num_labels=int(model_raw["num_labels"]),
                alpha=float(model_raw.get("alpha", 0.5)),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        specs_raw = raw["predictor_specs"]
        if not isinstance(specs_raw, list):
            raise ConfigError("predictor_specs must be a list")
        spec_fields = {f.name for f in fields(PredictorSpec)}
        specs = []
        for idx, spec_raw in enumerate(specs_raw):
            if not isinstance(spec_raw, dict):
                raise ConfigError(f"predictor_specs[{idx}] must be an object")
            _reject_unknown(spec_raw, spec_fields, f"predictor_specs[{idx}]")
            if "kind" not in spec_raw:
                raise ConfigError(f"predictor_specs[{idx}] is missing kind")
            if isinstance(spec_raw.get("prior"), list):
                spec_raw = dict(spec_raw, prior=tuple(spec_raw["prior"]))
            specs.append(PredictorSpec(**spec_raw))
        config = cls(
            model=model,
            training_size=int(raw["training_size"]),
            iterations=int(raw["iterations"]),
            master_seed=int(raw["master_seed"]),
            predictor_specs=tuple(specs),
            criterion=str(raw["criterion"]),
        )
        config.validate()
        return config


def _reject_unknown(raw: dict, known: set[str], where: str) -> None:
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class ResultRecord:
    """One averaged figure data point."""

    predictor_id: str
    parameter: float
    mean_quality: float
    std_error: float
    iterations: int
    seed: int


def data_rng(master_seed: int, iteration: int) -> np.random.Generator:
    """The rng that draws iteration i's theta and training set."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(iteration, 0))
    )


def predictor_rng(
    master_seed: int, iteration: int, predictor_index: int
) -> np.random.Generator:
    """The rng owning predictor j's split randomness within iteration i."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(iteration, predictor_index + 1))
    )


def draw_iteration(
    model: ModelSpec, training_size: int, master_seed: int, iteration: int
) -> tuple[np.ndarray, Dataset]:
    """Reproducibly draw iteration i's (theta, training set)."""
    rng = data_rng(master_seed, iteration)
    theta = sample_theta(model, rng)
    return theta, sample_dataset(theta, training_size, rng)


def evaluate_predictor(
    spec: PredictorSpec,
    theta: np.ndarray,
    data: Dataset,
    model: ModelSpec,
    criterion: str,
    rng: np.random.Generator,
) -> float:
    """Quality of one predictor on one realized (theta, training set)."""
    counts = data.to_counts()
    kind = spec.kind
    if kind in P_KINDS:
        if kind == "p-bayes":
            parts = bayes_p_parts(counts, model)
        elif kind == "cp":
            parts = full_cp_p_parts(counts, model)
        elif kind == "icp":
            parts = icp_p_parts(random_split(data, spec.proper_size, rng), model)
        else:
            plan = make_folds(data, spec.num_folds, rng)
            parts = ccp_p_parts(data, plan, model)
        return afs_quality(theta, parts, smoothed=(criterion == "AFS-smoothed"))

    if kind == "e-bayes":
        e = (suboptimal_bayes_e_values if spec.suboptimal else bayes_e_values)(
            counts, model
        )
    elif kind == "cep":
        e = cep_e_values(counts, model, sigma=spec.sigma, suboptimal=spec.suboptimal)
    elif kind == "icep":
        split = random_split(data, spec.proper_size, rng)
        e = icep_e_values(split, model, suboptimal=spec.suboptimal)
    elif kind == "ccep":
        plan = make_folds(data, spec.num_folds, rng)
        e = ccep_e_values(
            data, plan, model, suboptimal=spec.suboptimal, inverse=spec.inverse
        )
    elif kind == "ricep":
        plan = RicepPlan(proper_size=spec.proper_size, repetitions=spec.repetitions)
        e = ricep_e_values(data, plan, model, suboptimal=spec.suboptimal, rng=rng)
    else:
        prior = spec.resolve_prior(len(data))
        e = bicep_e_values(
            data, prior, spec.repetitions, model, suboptimal=spec.suboptimal, rng=rng
        )
    if criterion == "AFES16":
        return afes16_quality(e)
    return afes_quality(theta, e)


def _iteration_qualities(config: ExperimentConfig, iteration: int) -> np.ndarray:
    theta, data = draw_iteration(
        config.model, config.training_size, config.master_seed, iteration
    )
    row = np.empty(len(config.predictor_specs))
    for j, spec in enumerate(config.predictor_specs):
        rng = predictor_rng(config.master_seed, iteration, j)
        row[j] = evaluate_predictor(
            spec, theta, data, config.model, config.criterion, rng
        )
    return row


def run_experiment(config: ExperimentConfig, threads: int = 1) -> list[ResultRecord]:
    """Run the experiment and return one record per predictor spec.

    Iterations may execute concurrently; aggregation always happens in
    iteration order, so the output is a pure function of the config,
    bit-identical for any thread count.
    """
    config.validate()
    qualities = np.empty((config.iterations, len(config.predictor_specs)))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, row in enumerate(
                pool.map(lambda i: _iteration_qualities(config, i),
                         range(config.iterations))
            ):
                qualities[i] = row
    else:
        for i in range(config.iterations):
            qualities[i] = _iteration_qualities(config, i)

    records = []
    for j, spec in enumerate(config.predictor_specs):
        column = qualities[:, j]
        if np.all(np.isfinite(column)):
            mean = float(column.mean())
            se = (
                float(column.std(ddof=1) / math.sqrt(config.iterations))
                if config.iterations > 1
                else 0.0
            )
        else:
            mean, se = -math.inf, math.inf
        records.append(
            ResultRecord(
                predictor_id=spec.predictor_id,
                parameter=spec.x_value,
                mean_quality=mean,
                std_error=se,
                iterations=config.iterations,
                seed=config.master_seed,
            )
        )
    return records


@dataclass(frozen=True)
class HistogramResult:
    """Repeated-split e-values at the least likely label of one fixed dataset."""

    theta: np.ndarray
    target_label: int
    e_values: np.ndarray
    mean_e: float


def run_histogram_experiment(
    training_size: int = 12_000,
    num_labels: int = 10,
    alpha: float = 0.5,
    proper_size: int = 8_000,
    num_splits: int = 1_000,
    seed: int = 20_250_810,
) -> HistogramResult:
    """Instability study: one theta, one dataset, many random splits.

    Draws a single (theta, dataset) pair, then repeatedly splits the dataset
    at the given proper size and records the inductive conformal e-value for
    the label with the smallest theta component (the least likely, hence
    highest-evidence, label). The mean of the recorded e-values is what an
    averaging predictor with this many repetitions would output.
    """
    if not 1 <= proper_size <= training_size - 1:
        raise ValueError(
            f"proper_size must lie in 1..{training_size - 1}, got {proper_size}"
        )
    if num_splits < 1:
        raise ValueError(f"num_splits must be >= 1, got {num_splits}")
    model = ModelSpec(num_labels=num_labels, alpha=alpha)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    theta = sample_theta(model, rng)
    data = sample_dataset(theta, training_size, rng)
    target = int(np.argmin(theta)) + 1
    e_values = np.empty(num_splits)
    for i in range(num_splits):
        split = random_split(data, proper_size, rng)
        e_values[i] = icep_e_values(split, model)[target - 1]
    return HistogramResult(
        theta=theta,
        target_label=target,
        e_values=e_values,
        mean_e=float(e_values.mean()),
    )


CSV_HEADER = ("predictor_id", "parameter", "mean_quality", "std_error",
              "iterations", "seed")


def _format_float(value: float) -> str:
    return f"{value:.17g}"


def write_results(records: list[ResultRecord], path: str | Path) -> None:
    """Write records as CSV; overwrites idempotently.

    Floats carry 17 significant digits with '.' as the decimal point; -inf
    and nan serialize as the literal strings ``-inf`` and ``nan``.
    """
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_HEADER)
            for record in records:
                writer.writerow(
                    (
                        record.predictor_id,
                        _format_float(record.parameter),
                        _format_float(record.mean_quality),
                        _format_float(record.std_error),
                        record.iterations,
                        record.seed,
                    )
                )
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_results(path: str | Path) -> list[ResultRecord]:
    """Parse a results CSV written by :func:`write_results`."""
    path = Path(path)
    try:
        with path.open("r", newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != list(CSV_HEADER):
                raise ValueError(f"unexpected header in {path}: {header}")
            return [
                ResultRecord(
                    predictor_id=row[0],
                    parameter=float(row[1]),
                    mean_quality=float(row[2]),
                    std_error=float(row[3]),
                    iterations=int(row[4]),
                    seed=int(row[5]),
                )
                for row in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc


def histogram_records(result: HistogramResult, seed: int) -> list[ResultRecord]:
    """Flatten a histogram result into the results-CSV schema.

    One row per split e-value (parameter = split index, starting at 1) plus a
    summary row whose parameter is the target label and whose mean is the
    across-splits average.
    """
    records = [
        ResultRecord(
            predictor_id="icep-evalue",
            parameter=float(i + 1),
            mean_quality=float(e),
            std_error=0.0,
            iterations=1,
            seed=seed,
        )
        for i, e in enumerate(result.e_values)
    ]
    n = result.e_values.shape[0]
    se = float(result.e_values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    records.append(
        ResultRecord(
            predictor_id="icep-evalue-mean",
            parameter=float(result.target_label),
            mean_quality=result.mean_e,
            std_error=se,
            iterations=n,
            seed=seed,
        )
    )
    return records
