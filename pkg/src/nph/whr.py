"""Weighted-hazard-ratio Cox model with a single binary treatment covariate.

The hazard model is lambda_0(t) * exp(A(t) * beta * X) where A(t) is the
Fleming-Harrington weight normalized to maximum 1 over the observed event
times.  beta is found by damped Newton-Raphson on the Breslow partial
likelihood; the score test at beta=0 matches the weighted log-rank z on
tie-free data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import Dataset, EventTable, SurvivalCurve, build_event_table, km_estimate
from .errors import AllZeroWeightsError, DegenerateVarianceError, NonConvergenceError
from .wlrt import WeightSpec, table_weights

MAX_ITER = 50
SCORE_TOL = 1e-8
BETA_TOL = 1e-10
# |beta| beyond this is treated as a monotone-likelihood divergence: the
# score decays like exp(-|beta|) there and would otherwise fake convergence.
BETA_DIVERGED = 15.0
MIN_INFORMATION = 1e-10


@dataclass(frozen=True)
class AdjustmentFactor:
    """Normalized weight A(t_j) = w(t_j) / max_k w(t_k) at the event times."""

    times: np.ndarray
    values: np.ndarray

    def at(self, t):
        """Step interpolation consistent with w(t) built from the KM left limit.

        The value on (t_j, t_{j+1}] is the value at t_{j+1}; before the first
        event time it is the first value, after the last it is the last.
        """
        idx = np.minimum(
            np.searchsorted(self.times, t, side="left"), self.values.size - 1
        )
        return self.values[idx][()]


@dataclass(frozen=True)
class WhrFit:
    beta_hat: float
    se: float
    iterations: int
    converged: bool
    adjustment: AdjustmentFactor


def normalize_weights(raw: np.ndarray) -> np.ndarray:
    """Scale raw weights to maximum exactly 1; error if all are zero."""
    peak = float(np.max(raw)) if raw.size else 0.0
    if peak <= 0.0:
        raise AllZeroWeightsError(
            "adjustment_factor: every event-time weight is zero "
            "(e.g. gamma > 0 with a single event time)"
        )
    return raw / peak


def adjustment_factor(
    table: EventTable, pooled_km: SurvivalCurve, spec: WeightSpec
) -> AdjustmentFactor:
    """Adjustment factor from the pooled-KM Fleming-Harrington weights."""
    raw = table_weights(table, pooled_km, spec)
    return AdjustmentFactor(times=table.time, values=normalize_weights(raw))


def _check_aligned(table: EventTable, adj: AdjustmentFactor):
    if adj.values.size != len(table) or not np.array_equal(adj.times, table.time):
        raise ValueError("adjustment factor is not aligned with the event table")


def partial_loglik(beta: float, table: EventTable, adj: AdjustmentFactor) -> float:
    """Breslow partial log-likelihood of the time-varying-effect Cox model.

    Per event time: beta*A_j*d1_j - d_j * log(n2_j + n1_j * exp(beta*A_j)).
    Finite for every finite beta.
    """
    _check_aligned(table, adj)
    a = adj.values
    with np.errstate(divide="ignore"):
        log_n1 = np.log(table.n1, where=table.n1 > 0, out=np.full(len(table), -np.inf))
        log_n2 = np.log(table.n2, where=table.n2 > 0, out=np.full(len(table), -np.inf))
    log_denom = np.logaddexp(log_n2, log_n1 + beta * a)
    return float(np.sum(beta * a * table.d1 - table.d * log_denom))


def score_and_info(beta: float, table: EventTable, adj: AdjustmentFactor):
    """Score and observed information (first and negated second derivative).

    score = sum_j A_j (d1_j - d_j pbar_j) and
    info  = sum_j A_j^2 d_j pbar_j (1 - pbar_j) with
    pbar_j = n1_j e^{beta A_j} / (n2_j + n1_j e^{beta A_j}).
    """
    _check_aligned(table, adj)
    a = adj.values
    with np.errstate(divide="ignore"):
        log_n1 = np.log(table.n1, where=table.n1 > 0, out=np.full(len(table), -np.inf))
        log_n2 = np.log(table.n2, where=table.n2 > 0, out=np.full(len(table), -np.inf))
    pbar = expit(beta * a + log_n1 - log_n2)
    score = float(np.sum(a * (table.d1 - table.d * pbar)))
    info = float(np.sum(a**2 * table.d * pbar * (1.0 - pbar)))
    return score, info


def fit_whr(dataset: Dataset, spec: WeightSpec) -> WhrFit:
    """Fit beta by damped Newton-Raphson from beta = 0.

    Convergence: |score| < 1e-8 or |step| < 1e-10 within 50 iterations.
    Raises :class:`NonConvergenceError` (with the last iterate) when the
    likelihood is monotone or the information degenerates.
    """
    table = build_event_table(dataset)
    pooled = km_estimate(dataset, pooled=True)
    adj = adjustment_factor(table, pooled, spec)

    beta = 0.0
    loglik = partial_loglik(beta, table, adj)
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        score, info = score_and_info(beta, table, adj)
        if abs(score) < SCORE_TOL:
            break
        if not np.isfinite(info) or info <= 0.0:
            raise NonConvergenceError(
                f"fit_whr: information {info:.3e} not positive at beta={beta:.6g}",
                beta_last=beta, score_last=score, iterations=iterations,
            )
        step = score / info
        candidate = beta + step
        cand_loglik = partial_loglik(candidate, table, adj)
        halvings = 0
        while cand_loglik < loglik and halvings < 40:
            step *= 0.5
            candidate = beta + step
            cand_loglik = partial_loglik(candidate, table, adj)
            halvings += 1
        if abs(candidate - beta) < BETA_TOL:
            beta = candidate
            break
        beta, loglik = candidate, cand_loglik
        if abs(beta) > BETA_DIVERGED:
            raise NonConvergenceError(
                f"fit_whr: beta diverged past {BETA_DIVERGED:g} "
                "(monotone partial likelihood)",
                beta_last=beta, score_last=score, iterations=iterations,
            )
    else:
        score, _ = score_and_info(beta, table, adj)
        raise NonConvergenceError(
            f"fit_whr: no convergence in {MAX_ITER} iterations "
            f"(last beta={beta:.6g}, score={score:.3e})",
            beta_last=beta, score_last=score, iterations=MAX_ITER,
        )

    _, info = score_and_info(beta, table, adj)
    if info < MIN_INFORMATION:
        raise NonConvergenceError(
            f"fit_whr: information {info:.3e} degenerate at the optimum",
            beta_last=beta, score_last=None, iterations=iterations,
        )
    return WhrFit(
        beta_hat=float(beta),
        se=float(info**-0.5),
        iterations=iterations,
        converged=True,
        adjustment=adj,
    )


def score_test(dataset: Dataset, spec: WeightSpec) -> float:
    """Standardized score statistic U(0)/sqrt(I(0)) of the null beta = 0."""
    table = build_event_table(dataset)
    pooled = km_estimate(dataset, pooled=True)
    adj = adjustment_factor(table, pooled, spec)
    score, info = score_and_info(0.0, table, adj)
    if info <= 0.0:
        raise DegenerateVarianceError(
            "score_test: zero information at beta=0 "
            "(no weighted event time has both arms at risk)"
        )
    return float(score / np.sqrt(info))


def hr_profile(fit: WhrFit, times, a_of_t=None):
    """Hazard-ratio profile exp(beta_hat * a(t)) on a time grid.

    ``a_of_t`` may be a callable t -> A(t) (e.g. an analytic weight built
    from a known survival function); by default the fit's own adjustment
    factor is step-interpolated.
    """
    times = np.asarray(times, dtype=float)
    if a_of_t is None:
        a = np.asarray(fit.adjustment.at(times), dtype=float)
    else:
        a = np.asarray([a_of_t(t) for t in times], dtype=float)
    hr = np.exp(fit.beta_hat * a)
    return list(zip(times.tolist(), hr.tolist()))
