"""Conformal e-prediction simulator.

A library and CLI for label-only classification under a symmetric
Dirichlet-categorical model: Bayes-optimal reference predictors, full and
inductive conformal p- and e-predictors, cross-conformal and repeated /
balanced split aggregation, and a reproducible Monte Carlo harness that
scores them all under average-surprisal efficiency criteria.
"""

from .aggregation import (
    CalibSizePrior,
    FoldPlan,
    RicepPlan,
    bicep_e_values,
    ccep_e_values,
    ccp_ab_counts,
    ccp_p_parts,
    icep_split_samples,
    jensen_gap,
    make_folds,
    ricep_e_values,
)
from .bayes import bayes_e_values, bayes_p_parts, suboptimal_bayes_e_values
from .conformal_full import (
    cep_e_values,
    cep_scores,
    full_cp_ab_counts,
    full_cp_p_parts,
)
from .conformal_inductive import (
    Split,
    icep_e_values,
    icep_scores,
    icp_p_parts,
    random_split,
)
from .criteria import (
    PValueParts,
    afes16_quality,
    afes_quality,
    afs_quality,
    deterministic_p_surprisal,
    expected_p_surprisal,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    HistogramResult,
    PredictorSpec,
    ResultRecord,
    data_rng,
    draw_iteration,
    evaluate_predictor,
    histogram_records,
    predictor_rng,
    read_results,
    run_experiment,
    run_histogram_experiment,
    write_results,
)
from .model import (
    Dataset,
    LabelCounts,
    ModelSpec,
    predictive,
    sample_dataset,
    sample_theta,
    validate_theta,
)

__version__ = "0.1.0"

__all__ = [
    "CalibSizePrior",
    "ConfigError",
    "Dataset",
    "ExperimentConfig",
    "FoldPlan",
    "HistogramResult",
    "LabelCounts",
    "ModelSpec",
    "PValueParts",
    "PredictorSpec",
    "ResultRecord",
    "RicepPlan",
    "Split",
    "afes16_quality",
    "afes_quality",
    "afs_quality",
    "bayes_e_values",
    "bayes_p_parts",
    "bicep_e_values",
    "ccep_e_values",
    "ccp_ab_counts",
    "ccp_p_parts",
    "cep_e_values",
    "cep_scores",
    "data_rng",
    "deterministic_p_surprisal",
    "draw_iteration",
    "evaluate_predictor",
    "expected_p_surprisal",
    "full_cp_ab_counts",
    "full_cp_p_parts",
    "histogram_records",
    "icep_e_values",
    "icep_scores",
    "icep_split_samples",
    "icp_p_parts",
    "jensen_gap",
    "make_folds",
    "predictive",
    "predictor_rng",
    "random_split",
    "read_results",
    "ricep_e_values",
    "run_experiment",
    "run_histogram_experiment",
    "sample_dataset",
    "sample_theta",
    "suboptimal_bayes_e_values",
    "validate_theta",
    "write_results",
]
