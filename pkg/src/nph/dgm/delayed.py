"""Delayed-treatment-effect data-generating mechanism.

The treatment-arm survival is defined implicitly through the increasing
transform script_l:  script_l(S2(t)) = script_l(S1(t)) + phi,  with constant
control hazard lambda1 and phi pinned by the survival target S2(tau).  Since
script_l diverges as its argument approaches 1 (t -> 0), S2 is recovered from
the equivalent difference form

    integral_{S2(t)}^{S1(t)} ds / (s * big_l(s, gamma)) = -phi

by bisection, which never evaluates script_l near 1.  The true hazard ratio
of the family is big_l(S2(t)) / big_l(S1(t)); it is 1 in the limit t -> 0 and
reaches its extreme value at tau.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import Dataset
from ..errors import DomainError, NumericalError
from .gares import _quad, _script_integrand, big_l, script_l

SOLVE_XTOL = 1e-13
GRID_XTOL = 1e-10
MAX_BISECT = 200


@dataclass(frozen=True)
class DelayedParams:
    """Delayed-effect scenario: shape gamma, control hazard, horizon tau,
    survival target S2(tau), and the derived offset phi.

    Build with :meth:`from_target`, which computes phi from the target; a
    directly supplied phi must be consistent with the target to 1e-8.
    """

    gamma: float
    lambda1: float
    tau: float
    s2_tau: float
    phi: float
    grid_step: float = 0.0005

    def __post_init__(self):
        if not (self.gamma > 0 and self.lambda1 > 0 and self.tau > 0):
            raise ValueError("gamma, lambda1 and tau must be positive")
        if not 0.0 < self.s2_tau < 1.0:
            raise ValueError("s2_tau must lie in (0, 1)")
        if self.grid_step <= 0 or self.tau / self.grid_step < 100:
            raise ValueError("grid_step must divide tau into at least 100 points")
        implied = script_l(self.s2_tau, self.gamma) - script_l(self.s1_tau, self.gamma)
        if abs(implied - self.phi) > 1e-8:
            raise ValueError(
                f"phi={self.phi!r} inconsistent with s2_tau={self.s2_tau!r} "
                f"(implied {implied!r})"
            )

    @property
    def s1_tau(self) -> float:
        return float(np.exp(-self.lambda1 * self.tau))

    @classmethod
    def from_target(
        cls, gamma: float, lambda1: float, tau: float, s2_tau: float,
        grid_step: float = 0.0005,
    ) -> "DelayedParams":
        s1_tau = float(np.exp(-lambda1 * tau))
        phi = script_l(s2_tau, gamma) - script_l(s1_tau, gamma)
        return cls(gamma=gamma, lambda1=lambda1, tau=tau, s2_tau=s2_tau,
                   phi=phi, grid_step=grid_step)


def control_survival(t, p: DelayedParams):
    return np.exp(-p.lambda1 * np.asarray(t, dtype=float))[()]


def _solve_s2(
    s1t: float, phi: float, gamma: float, xtol: float,
    lo: float | None = None, hi: float | None = None,
) -> float:
    """Solve integral_x^{s1t} h = -phi for x, h(s) = 1/(s*big_l(s,gamma)).

    F(x) = integral_x^{s1t} h is strictly decreasing, so bisection keeps
    F(lo) >= -phi >= F(hi).  Callers may pass a warm bracket; it is expanded
    if it does not straddle the root.  Midpoint values are chained off the
    nearest known endpoint so each iteration integrates a narrow interval.
    """
    if phi == 0.0:
        return s1t
    target = -phi

    def seg(a, b):
        return _quad(lambda s: _script_integrand(s, gamma), a, b)

    if hi is None:
        hi = s1t if phi < 0.0 else min(s1t + 0.5 * (1.0 - s1t), 1.0 - 1e-15)
    f_hi = seg(hi, s1t)
    while f_hi > target:  # hi still above the root; push toward 1
        gap = 1.0 - hi
        if gap < 1e-14:
            raise NumericalError(
                f"_solve_s2: no upper bracket below 1 (s1t={s1t!r}, phi={phi!r})"
            )
        new_hi = 1.0 - 0.5 * gap
        f_hi += seg(new_hi, hi)
        hi = new_hi

    if lo is None:
        lo = 0.5 * s1t if phi < 0.0 else s1t
    lo = min(lo, hi)
    f_lo = f_hi + seg(lo, hi)
    while f_lo < target:  # lo still above the root; push toward 0
        if lo < 1e-300:
            raise NumericalError(
                f"_solve_s2: no lower bracket above 0 (s1t={s1t!r}, phi={phi!r})"
            )
        new_lo = 0.5 * lo
        f_lo += seg(new_lo, lo)
        lo = new_lo

    for _ in range(MAX_BISECT):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        # chain off the closer endpoint to keep the integration interval short
        if mid - lo < hi - mid:
            f_mid = f_lo - seg(lo, mid)
        else:
            f_mid = f_hi + seg(mid, hi)
        if f_mid > target:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    else:
        raise NumericalError(
            f"_solve_s2: bisection stalled on [{lo!r}, {hi!r}] (s1t={s1t!r}, phi={phi!r})"
        )
    return 0.5 * (lo + hi)


def s2_from_phi(
    t: float, phi: float, gamma: float, lambda1: float, xtol: float = SOLVE_XTOL
) -> float:
    """Treatment-arm survival at t for an arbitrary offset phi (t=0 gives 1)."""
    if t < 0:
        raise DomainError("s2_from_phi: t must be non-negative")
    if t == 0.0:
        return 1.0
    s1t = float(np.exp(-lambda1 * t))
    return _solve_s2(s1t, phi, gamma, xtol)


def s2_delayed(t: float, p: DelayedParams, xtol: float = SOLVE_XTOL) -> float:
    """Treatment-arm survival probability at t in [0, tau]."""
    if not 0.0 <= t <= p.tau:
        raise DomainError(f"s2_delayed: t must lie in [0, tau], got {t!r}")
    return s2_from_phi(t, p.phi, p.gamma, p.lambda1, xtol)


def true_hr_delayed(t: float, p: DelayedParams) -> float:
    """Hazard ratio big_l(S2(t)) / big_l(S1(t)); equals 1 in the t -> 0 limit."""
    if not 0.0 <= t <= p.tau:
        raise DomainError(f"true_hr_delayed: t must lie in [0, tau], got {t!r}")
    if t == 0.0:
        return 1.0
    s1t = float(np.exp(-p.lambda1 * t))
    s2t = s2_delayed(t, p)
    return big_l(s2t, p.gamma) / big_l(s1t, p.gamma)


@dataclass(frozen=True)
class DelayedGrid:
    """Immutable precomputed (t, S2(t)) table shared by replicate samplers."""

    times: np.ndarray
    s2: np.ndarray
    tau: float = field(default=0.0)

    def __post_init__(self):
        if self.tau == 0.0:
            object.__setattr__(self, "tau", float(self.times[-1]))


def s2_grid(p: DelayedParams) -> DelayedGrid:
    """Tabulate S2 on t = 0, grid_step, ..., tau.

    Each point is solved by the same difference-form bisection as
    :func:`s2_delayed`, warm-started from the previous point (S2 is
    decreasing, so the previous value is always a valid upper bracket).
    """
    n = int(round(p.tau / p.grid_step))
    times = np.linspace(0.0, p.tau, n + 1)
    s2 = np.empty(n + 1)
    s2[0] = 1.0
    if p.phi == 0.0:
        s2[:] = np.exp(-p.lambda1 * times)
        s2[0] = 1.0
        return DelayedGrid(times=times, s2=s2)
    prev = 1.0
    span = 1e-4
    for k in range(1, n + 1):
        s1t = float(np.exp(-p.lambda1 * times[k]))
        hi = min(prev, s1t) if p.phi < 0.0 else prev
        lo = max(hi - span, 1e-300) if p.phi < 0.0 else max(hi - span, s1t)
        value = _solve_s2(s1t, p.phi, p.gamma, GRID_XTOL, lo=lo, hi=hi)
        span = max(4.0 * (prev - value), 1e-6)
        prev = value
        s2[k] = value
    return DelayedGrid(times=times, s2=s2)


def _sample_delayed_many(u: np.ndarray, grid: DelayedGrid):
    """Vectorized sampler: event at the grid time whose S2 is closest to u,
    or censoring at tau when u < S2(tau).  Ties pick the earlier time."""
    u = np.asarray(u, dtype=float)
    censored = u < grid.s2[-1]
    descending = -grid.s2
    pos = np.searchsorted(descending, -u, side="left")
    pos = np.minimum(pos, grid.s2.size - 1)
    before = np.maximum(pos - 1, 0)
    pick_before = np.abs(grid.s2[before] - u) <= np.abs(grid.s2[pos] - u)
    idx = np.where(pick_before, before, pos)
    time = np.where(censored, grid.tau, grid.times[idx])
    status = np.where(censored, 0, 1).astype(np.int8)
    return time, status


def sample_delayed(u: float, grid: DelayedGrid):
    """Draw one treatment-arm observation from a uniform u in (0, 1]."""
    if not 0.0 < u <= 1.0:
        raise DomainError("sample_delayed: u must lie in (0, 1]")
    time, status = _sample_delayed_many(np.asarray([u]), grid)
    return float(time[0]), int(status[0])


def generate_delayed(
    p: DelayedParams, n_per_arm: int, rng: np.random.Generator,
    grid: DelayedGrid | None = None,
) -> Dataset:
    """One simulated trial: control exponential(lambda1), treatment via the
    grid sampler; both arms administratively censored at tau.

    Draw order is control uniforms first, then treatment.  Pass a prebuilt
    ``grid`` when generating many replicates; it is immutable and shareable.
    """
    if grid is None:
        grid = s2_grid(p)
    u_control = 1.0 - rng.random(n_per_arm)
    t_control = -np.log(u_control) / p.lambda1
    status_control = (t_control <= p.tau).astype(np.int8)
    time_control = np.minimum(t_control, p.tau)

    u_treat = 1.0 - rng.random(n_per_arm)
    time_treat, status_treat = _sample_delayed_many(u_treat, grid)

    time = np.concatenate([time_control, time_treat])
    status = np.concatenate([status_control, status_treat])
    treat = np.zeros(2 * n_per_arm, dtype=bool)
    treat[n_per_arm:] = True
    return Dataset.from_arrays(time, status, treat)
