"""Log-rank and Fleming-Harrington weighted log-rank tests.

The weight at an event time t_j is S(t_j-)^rho * (1 - S(t_j-))^gamma with S
the pooled Kaplan-Meier curve evaluated as a left limit, so the weight at the
first event time is computed from S = 1.  The statistic is standardized by
the weighted variance sum (each term carries the squared weight).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .core import EventTable, SurvivalCurve
from .errors import DegenerateVarianceError, DomainError


@dataclass(frozen=True)
class WeightSpec:
    """Fleming-Harrington weight exponents; rho=gamma=0 is the log-rank test."""

    rho: float
    gamma: float

    def __post_init__(self):
        if self.rho < 0 or self.gamma < 0:
            raise ValueError("rho and gamma must be non-negative")


@dataclass(frozen=True)
class WlrtResult:
    numerator: float
    variance: float
    z: float
    p_two_sided: float


def fh_weight(spec: WeightSpec, s):
    """Evaluate s^rho * (1-s)^gamma for survival probability s (0^0 = 1)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > 1):
        raise DomainError("fh_weight: survival probability must lie in [0, 1]")
    return (s**spec.rho * (1.0 - s) ** spec.gamma)[()]


def _result_from_weights(table: EventTable, weights: np.ndarray) -> WlrtResult:
    """Weighted observed-minus-expected statistic for the given per-row weights."""
    d = table.d
    n = table.n
    e1 = table.n1 * d / n
    numerator = float(np.sum(weights * (table.d1 - e1)))
    # hypergeometric variance term; defined as 0 when only one subject remains
    denom = n * n * np.maximum(n - 1, 1)
    hyper = np.where(n > 1, table.n1 * table.n2 * d * (n - d) / denom, 0.0)
    variance = float(np.sum(weights**2 * hyper))
    if variance <= 0.0:
        raise DegenerateVarianceError(
            "weighted_logrank: zero variance (no weighted event time has both arms at risk)"
        )
    z = numerator / np.sqrt(variance)
    return WlrtResult(
        numerator=numerator,
        variance=variance,
        z=float(z),
        p_two_sided=float(2.0 * stats.norm.sf(abs(z))),
    )


def table_weights(table: EventTable, pooled_km: SurvivalCurve, spec: WeightSpec) -> np.ndarray:
    """Fleming-Harrington weights at the table's event times (left-limit KM)."""
    s_left = np.asarray(pooled_km.eval_left(table.time), dtype=float)
    return s_left**spec.rho * (1.0 - s_left) ** spec.gamma


def weighted_logrank(table: EventTable, pooled_km: SurvivalCurve, spec: WeightSpec) -> WlrtResult:
    """Fleming-Harrington G^(rho,gamma) test from an event table and pooled KM."""
    return _result_from_weights(table, table_weights(table, pooled_km, spec))


def logrank(table: EventTable) -> WlrtResult:
    """Unweighted log-rank test (identical to weighted_logrank with rho=gamma=0)."""
    return _result_from_weights(table, np.ones(len(table)))
