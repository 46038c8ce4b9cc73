"""Special functions for the delayed-effect hazard family.

    big_l(x, gamma)    = integral_x^1 (1-s)^gamma / s ds          (decreasing, >= 0)
    script_l(x, gamma) = integral_0.5^x 1 / (s * big_l(s, gamma)) ds   (increasing)

big_l has the elementary form x - ln(x) - 1 at gamma=1, which is used
directly and cross-checked against quadrature in the tests.  script_l
diverges to +inf as x -> 1 and (slowly) to -inf as x -> 0, which is why the
delayed-effect survival solver works with differences of script_l rather
than its raw values near 1.
"""

from __future__ import annotations

import warnings
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate

from ..errors import DomainError, OutOfRangeError, PrecisionLossWarning

QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-11
QUAD_LIMIT = 200

INV_LO = 1e-12
INV_HI = 1.0 - 1e-12
INV_RESIDUAL_TOL = 1e-10
INV_MAX_ITER = 200

PRECISION_EDGE = 1.0 - 1e-6


def _quad(f, a, b):
    # full_output suppresses IntegrationWarning chatter in the divergent
    # tail; accuracy there is governed by the callers' tolerances and the
    # dual-integrator cross-checks in the test suite.
    value = integrate.quad(
        f, a, b, epsabs=QUAD_ABS_TOL, epsrel=QUAD_REL_TOL, limit=QUAD_LIMIT, full_output=1
    )[0]
    return float(value)


def big_l(x: float, gamma: float, method: str = "auto") -> float:
    """integral_x^1 (1-s)^gamma / s ds for x in (0, 1].

    ``method="quadrature"`` forces the generic adaptive-quadrature path even
    where a closed form exists (used by the cross-check tests).
    """
    if gamma < 0:
        raise DomainError("big_l: gamma must be non-negative")
    if not 0.0 < x <= 1.0:
        raise DomainError(f"big_l: x must lie in (0, 1], got {x!r}")
    if x == 1.0:
        return 0.0
    if method == "auto" and gamma == 1.0:
        return x - np.log(x) - 1.0
    return _quad(lambda s: (1.0 - s) ** gamma / s, x, 1.0)


def _script_integrand(s: float, gamma: float) -> float:
    return 1.0 / (s * big_l(s, gamma))


def script_l(x: float, gamma: float) -> float:
    """Signed integral of 1/(s*big_l(s)) from 0.5 to x, for x in (0, 1)."""
    if not 0.0 < x < 1.0:
        raise DomainError(f"script_l: x must lie in (0, 1), got {x!r}")
    if x > PRECISION_EDGE:
        warnings.warn(
            f"script_l evaluated at x={x!r}, inside the divergent tail near 1",
            PrecisionLossWarning,
            stacklevel=2,
        )
    if x == 0.5:
        return 0.0
    return _quad(lambda s: _script_integrand(s, gamma), 0.5, x)


@lru_cache(maxsize=None)
def _script_l_range(gamma: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionLossWarning)
        return script_l(INV_LO, gamma), script_l(INV_HI, gamma)


def script_l_inv(y: float, gamma: float) -> float:
    """Invert script_l by bisection over (1e-12, 1-1e-12).

    Stops when |script_l(x) - y| < 1e-10 (at most 200 iterations, with a
    floating-point floor on the bracket width).
    """
    lo_val, hi_val = _script_l_range(gamma)
    if not lo_val <= y <= hi_val:
        raise OutOfRangeError(
            f"script_l_inv: y={y!r} outside the invertible range "
            f"[{lo_val:.6g}, {hi_val:.6g}]"
        )
    lo, hi = INV_LO, INV_HI
    x = 0.5 * (lo + hi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionLossWarning)
        for _ in range(INV_MAX_ITER):
            x = 0.5 * (lo + hi)
            value = script_l(x, gamma)
            if abs(value - y) < INV_RESIDUAL_TOL:
                return x
            if value < y:
                lo = x
            else:
                hi = x
            if hi - lo < 1e-15:
                break
    return x


class PhiResult(NamedTuple):
    phi: float
    r: float


def phi_from_target(s1_tau: float, s2_tau: float, gamma: float) -> PhiResult:
    """Hazard-family offset phi = script_l(S2(tau)) - script_l(S1(tau)).

    Also reports the discrepancy rate r = (S2(tau)-S1(tau)) / (1-S1(tau)).
    """
    if not 0.0 < s1_tau < 1.0 or not 0.0 < s2_tau < 1.0:
        raise DomainError("phi_from_target: survival targets must lie in (0, 1)")
    phi = script_l(s2_tau, gamma) - script_l(s1_tau, gamma)
    r = (s2_tau - s1_tau) / (1.0 - s1_tau)
    return PhiResult(phi=phi, r=r)
