"""Survival toolkit for non-proportional hazards: weighted log-rank tests,
the weighted-hazard-ratio Cox estimator, matched data-generating mechanisms,
and a reproducible simulation harness."""

from .core import (
    Arm,
    Dataset,
    EventTable,
    Observation,
    SurvivalCurve,
    build_event_table,
    km_estimate,
    km_eval_left,
    read_dataset_csv,
    validate_dataset,
)
from .wlrt import WeightSpec, WlrtResult, fh_weight, logrank, weighted_logrank
from .whr import (
    AdjustmentFactor,
    WhrFit,
    adjustment_factor,
    fit_whr,
    hr_profile,
    partial_loglik,
    score_and_info,
    score_test,
)

__version__ = "0.1.0"
