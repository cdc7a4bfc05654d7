"""Canonical experiment definitions behind the figure CSVs.

Each figure is a set of panels; each panel is one experiment (or a
smoothed/deterministic pair sharing a master seed, which pairs their
iterations exactly). The desk profile is a 10x reduction of the full-scale
profile in both training size and iteration count, with the training size
kept divisor-friendly so fold sweeps are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .harness import (
    ConfigError,
    ExperimentConfig,
    PredictorSpec,
    ResultRecord,
    histogram_records,
    run_experiment,
    run_histogram_experiment,
)
from .model import ModelSpec

FIGURE_IDS = tuple(range(1, 10))


@dataclass(frozen=True)
class Profile:
    training_size: int
    iterations: int
    histogram_proper_size: int
    histogram_splits: int


PROFILES = {
    "desk": Profile(
        training_size=1_200,
        iterations=1_000,
        histogram_proper_size=800,
        histogram_splits=1_000,
    ),
    "paper": Profile(
        training_size=12_000,
        iterations=10_000,
        histogram_proper_size=8_000,
        histogram_splits=1_000,
    ),
}

DEFAULT_SEED_BASE = 20_250_810

SIGMA_GRID = tuple(round(0.1 * i, 1) for i in range(11))

# Fractions of the training size used as proper-training sizes in the
# split-size sweeps; near-extremes included since the interesting action is
# at the edges.
M_FRACTIONS = (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
               0.6, 0.7, 0.8, 0.9, 0.95, 0.99)

RICEP_REPEATS = (1, 10, 100)


def proper_size_grid(training_size: int) -> tuple[int, ...]:
    sizes = sorted(
        {min(max(round(f * training_size), 1), training_size - 1) for f in M_FRACTIONS}
    )
    return tuple(sizes)


def fold_grid(training_size: int, count: int | None = None,
              limit: int | None = None) -> tuple[int, ...]:
    """Smallest divisors of the training size usable as fold counts."""
    divisors = [k for k in range(2, training_size + 1) if training_size % k == 0]
    if limit is not None:
        divisors = [k for k in divisors if k <= limit]
    if count is not None:
        divisors = divisors[:count]
    return tuple(divisors)


def _panel_seed(seed_base: int, figure_id: int, panel: int) -> int:
    return seed_base + figure_id * 1_000 + panel * 100


def _config(model, size, iterations, seed, specs, criterion):
    return ExperimentConfig(
        model=model,
        training_size=size,
        iterations=iterations,
        master_seed=seed,
        predictor_specs=tuple(specs),
        criterion=criterion,
    )


def build_figure(
    figure_id: int,
    profile_name: str = "desk",
    seed_base: int = DEFAULT_SEED_BASE,
    iterations: int | None = None,
    threads: int = 1,
) -> dict[str, list[ResultRecord]]:
    """Run the experiments behind one figure; returns CSV name -> records."""
    if figure_id not in FIGURE_IDS:
        raise ConfigError(f"figure_id must lie in 1..9, got {figure_id}")
    if profile_name not in PROFILES:
        raise ConfigError(f"unknown profile {profile_name!r}")
    profile = PROFILES[profile_name]
    size = profile.training_size
    iters = iterations if iterations is not None else profile.iterations
    builder = _FIGURE_BUILDERS[figure_id]
    return builder(size, iters, seed_base, threads, profile)


def _run(config: ExperimentConfig, threads: int) -> list[ResultRecord]:
    return run_experiment(config, threads=threads)


def _fig1(size, iters, seed_base, threads, profile):
    out = {}
    for panel, num_labels in enumerate((10, 100)):
        specs = [PredictorSpec(kind="cep", sigma=s) for s in SIGMA_GRID]
        specs += [
            PredictorSpec(kind="cep", sigma=s, suboptimal=True) for s in SIGMA_GRID
        ]
        specs += [
            PredictorSpec(kind="e-bayes"),
            PredictorSpec(kind="e-bayes", suboptimal=True),
        ]
        config = _config(
            ModelSpec(num_labels), size, iters,
            _panel_seed(seed_base, 1, panel), specs, "AFES",
        )
        out[f"fig1_Y{num_labels}.csv"] = _run(config, threads)
    return out


def _fig2(size, iters, seed_base, threads, profile):
    out = {}
    grid = proper_size_grid(size)
    for panel, num_labels in enumerate((2, 10, 100)):
        seed = _panel_seed(seed_base, 2, panel)
        model = ModelSpec(num_labels)
        smoothed_specs = [PredictorSpec(kind="icp", proper_size=m) for m in grid]
        smoothed_specs.append(PredictorSpec(kind="p-bayes"))
        det_specs = [
            PredictorSpec(kind="icp", proper_size=m, label="icp-det") for m in grid
        ]
        det_specs.append(PredictorSpec(kind="p-bayes", label="p-bayes-det"))
        records = _run(
            _config(model, size, iters, seed, smoothed_specs, "AFS-smoothed"), threads
        )
        records += _run(
            _config(model, size, iters, seed, det_specs, "AFS-deterministic"), threads
        )
        out[f"fig2_Y{num_labels}.csv"] = records
    return out


def _fig3(size, iters, seed_base, threads, profile):
    out = {}
    grid = proper_size_grid(size)
    for panel, num_labels in enumerate((2, 10, 100)):
        specs = [PredictorSpec(kind="icep", proper_size=m) for m in grid]
        specs += [
            PredictorSpec(kind="icep", proper_size=m, suboptimal=True) for m in grid
        ]
        specs += [
            PredictorSpec(kind="e-bayes"),
            PredictorSpec(kind="e-bayes", suboptimal=True),
        ]
        config = _config(
            ModelSpec(num_labels), size, iters,
            _panel_seed(seed_base, 3, panel), specs, "AFES",
        )
        out[f"fig3_Y{num_labels}.csv"] = _run(config, threads)
    return out


def _fig4(size, iters, seed_base, threads, profile):
    out = {}
    folds = fold_grid(size, limit=24)
    for panel, num_labels in enumerate((10, 100)):
        specs = [PredictorSpec(kind="ccp", num_folds=k) for k in folds]
        specs += [PredictorSpec(kind="cp"), PredictorSpec(kind="p-bayes")]
        config = _config(
            ModelSpec(num_labels), size, iters,
            _panel_seed(seed_base, 4, panel), specs, "AFS-smoothed",
        )
        out[f"fig4_Y{num_labels}.csv"] = _run(config, threads)
    return out


def _fig5(size, iters, seed_base, threads, profile):
    out = {}
    folds = fold_grid(size, limit=24)
    for panel, num_labels in enumerate((10, 100)):
        specs = [PredictorSpec(kind="ccep", num_folds=k) for k in folds]
        specs += [
            PredictorSpec(kind="ccep", num_folds=k, suboptimal=True) for k in folds
        ]
        specs += [
            PredictorSpec(
                kind="icep", proper_size=size - size // k, parameter=float(k)
            )
            for k in folds
        ]
        specs.append(PredictorSpec(kind="e-bayes"))
        config = _config(
            ModelSpec(num_labels), size, iters,
            _panel_seed(seed_base, 5, panel), specs, "AFES",
        )
        out[f"fig5_Y{num_labels}.csv"] = _run(config, threads)

    # Inverse variant for binary labels: each fold serves as the proper
    # training set, so the matching single-split sizes are swapped.
    inverse_folds = fold_grid(size, count=25 if size >= 12_000 else 12)
    specs = [
        PredictorSpec(kind="ccep", num_folds=k, inverse=True) for k in inverse_folds
    ]
    specs += [
        PredictorSpec(kind="icep", proper_size=size // k, parameter=float(k))
        for k in inverse_folds
    ]
    specs.append(PredictorSpec(kind="e-bayes"))
    config = _config(
        ModelSpec(2), size, iters, _panel_seed(seed_base, 5, 2), specs, "AFES"
    )
    out["fig5_Y2_inverse.csv"] = _run(config, threads)
    return out


def _ricep_family_specs(size, folds, inverse):
    specs = [
        PredictorSpec(kind="ccep", num_folds=k, inverse=inverse) for k in folds
    ]
    for repeats in RICEP_REPEATS:
        for k in folds:
            proper = size // k if inverse else size - size // k
            specs.append(
                PredictorSpec(
                    kind="ricep",
                    proper_size=proper,
                    repetitions=repeats,
                    parameter=float(k),
                )
            )
    for repeats in RICEP_REPEATS:
        specs.append(PredictorSpec(kind="bicep", prior="uniform", repetitions=repeats))
        specs.append(PredictorSpec(kind="bicep", prior="semi", repetitions=repeats))
    specs.append(PredictorSpec(kind="e-bayes"))
    return specs


def _fig6(size, iters, seed_base, threads, profile):
    folds = fold_grid(size, count=7)
    specs = _ricep_family_specs(size, folds, inverse=False)
    config = _config(
        ModelSpec(10), size, iters, _panel_seed(seed_base, 6, 0), specs, "AFES"
    )
    return {"fig6_Y10.csv": _run(config, threads)}


def _fig7(size, iters, seed_base, threads, profile):
    folds = fold_grid(size, count=12)
    specs = _ricep_family_specs(size, folds, inverse=False)
    config = _config(
        ModelSpec(100), size, iters, _panel_seed(seed_base, 7, 0), specs, "AFES"
    )
    return {"fig7_Y100.csv": _run(config, threads)}


def _fig8(size, iters, seed_base, threads, profile):
    folds = fold_grid(size, count=25 if size >= 12_000 else 12)
    specs = _ricep_family_specs(size, folds, inverse=True)
    config = _config(
        ModelSpec(2), size, iters, _panel_seed(seed_base, 8, 0), specs, "AFES"
    )
    return {"fig8_Y2_inverse.csv": _run(config, threads)}


def _fig9(size, iters, seed_base, threads, profile):
    seed = _panel_seed(seed_base, 9, 0)
    result = run_histogram_experiment(
        training_size=size,
        num_labels=10,
        alpha=0.5,
        proper_size=profile.histogram_proper_size,
        num_splits=profile.histogram_splits,
        seed=seed,
    )
    return {"fig9_histogram.csv": histogram_records(result, seed)}


_FIGURE_BUILDERS = {
    1: _fig1, 2: _fig2, 3: _fig3, 4: _fig4, 5: _fig5,
    6: _fig6, 7: _fig7, 8: _fig8, 9: _fig9,
}
