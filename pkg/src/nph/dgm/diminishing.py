"""Diminishing-treatment-effect data-generating mechanism.

The hazard ratio starts at e_delta at t=0 and decays monotonically to 1:

    hr(t) = e_delta / (S1(t)^rho + e_delta * (1 - S1(t)^rho))

with constant control hazard lambda1, so S1(t) = exp(-lambda1 t).  The
treatment-arm survival then has the closed form

    S2(t) = (1 - e_delta + e_delta * exp(rho*lambda1*t))^(-1/rho)

which is inverted analytically for sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Dataset
from ..errors import DomainError


@dataclass(frozen=True)
class DiminishingParams:
    """e_delta: hazard ratio at t=0; rho: decay rate; lambda1: control hazard."""

    e_delta: float
    rho: float
    lambda1: float

    def __post_init__(self):
        if not (self.e_delta > 0 and self.rho > 0 and self.lambda1 > 0):
            raise ValueError("e_delta, rho and lambda1 must all be positive")


def control_survival(t, p: DiminishingParams):
    return np.exp(-p.lambda1 * np.asarray(t, dtype=float))[()]


def true_hr_diminishing(t, p: DiminishingParams):
    """Hazard ratio treatment/control at time t."""
    s1_rho = np.exp(-p.rho * p.lambda1 * np.asarray(t, dtype=float))
    return (p.e_delta / (s1_rho + p.e_delta * (1.0 - s1_rho)))[()]


def s2_diminishing(t, p: DiminishingParams):
    """Treatment-arm survival probability at time t (closed form)."""
    grow = np.exp(p.rho * p.lambda1 * np.asarray(t, dtype=float))
    return ((1.0 - p.e_delta + p.e_delta * grow) ** (-1.0 / p.rho))[()]


def sample_diminishing(u, p: DiminishingParams):
    """Invert S2 at a uniform draw u in (0, 1]: the event time with S2(t) = u."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u > 1):
        raise DomainError("sample_diminishing: u must lie in (0, 1]")
    return (np.log((u**-p.rho - 1.0 + p.e_delta) / p.e_delta) / (p.rho * p.lambda1))[()]


def generate_diminishing(
    p: DiminishingParams, n_per_arm: int, horizon: float, rng: np.random.Generator
) -> Dataset:
    """One simulated trial: control exponential(lambda1), treatment via S2 inversion.

    Subjects with event time past the horizon are administratively censored
    there.  Draw order is control uniforms first, then treatment, so a given
    generator state maps to exactly one dataset.
    """
    u_control = 1.0 - rng.random(n_per_arm)  # in (0, 1]
    t_control = -np.log(u_control) / p.lambda1
    u_treat = 1.0 - rng.random(n_per_arm)
    t_treat = sample_diminishing(u_treat, p)

    event_time = np.concatenate([t_control, t_treat])
    status = (event_time <= horizon).astype(np.int8)
    time = np.minimum(event_time, horizon)
    treat = np.zeros(2 * n_per_arm, dtype=bool)
    treat[n_per_arm:] = True
    return Dataset.from_arrays(time, status, treat)
