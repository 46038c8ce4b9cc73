"""Data-generating mechanisms for the two non-proportional-hazards families."""

from __future__ import annotations

import numpy as np

from .diminishing import (
    DiminishingParams,
    generate_diminishing,
    s2_diminishing,
    sample_diminishing,
    true_hr_diminishing,
)
from .gares import PhiResult, big_l, phi_from_target, script_l, script_l_inv
from .delayed import (
    DelayedGrid,
    DelayedParams,
    generate_delayed,
    s2_delayed,
    s2_from_phi,
    s2_grid,
    sample_delayed,
    true_hr_delayed,
)

__all__ = [
    "DiminishingParams", "true_hr_diminishing", "s2_diminishing",
    "sample_diminishing", "generate_diminishing",
    "big_l", "script_l", "script_l_inv", "phi_from_target", "PhiResult",
    "DelayedParams", "DelayedGrid", "s2_delayed", "s2_from_phi", "s2_grid",
    "sample_delayed", "generate_delayed", "true_hr_delayed",
    "replicate_rng",
]


def replicate_rng(base_seed: int, replicate: int) -> np.random.Generator:
    """Independent PCG64 stream for one Monte Carlo replicate.

    The stream is keyed on the pair (base_seed, replicate) through numpy's
    SeedSequence, so replicate k draws the same numbers no matter how many
    replicates run, in what order, or on how many workers.
    """
    return np.random.default_rng(np.random.SeedSequence([int(base_seed), int(replicate)]))
