"""Fenchel-Legendre duals of the deviation function.

psi*_{c,+}(t) = sup_{0 < a < alpha_max} (a t - psi_c(a)) and
psi*_{c,-}(-t) = sup_{a < 0} (-a t - psi_c(a)) are the Cramer-Chernoff tail
exponents of the information content:

    P(h~(X) - h(X) > t)  <= exp(-psi*_{c,+}(t))
    P(h~(X) - h(X) < -t) <= exp(-psi*_{c,-}(-t))

The objectives are smooth and strictly concave in a, so the supremum is
found by solving the stationarity equation psi_c'(a) = +-t by bisection.
On the lower side psi_c' never goes below -beta sum (beta - i)^-1; for t at
or above that slope the supremum is not attained and the exponent is
reported as infinite. At exactly the threshold the supremum is the limit of
an unbounded increasing objective along a -> -inf, which we also report
as infinite.
"""
from dataclasses import dataclass
import math
from typing import Optional

import numpy as np
from aracnid_logger import Logger

from varentropy.bounds import ENDPOINT_GUARD, as_profile
from varentropy.errors import DomainError
from varentropy.solvers import expand_left, solve_increasing

# initialize logging
logger = Logger(__name__).get_logger()

UPPER = 'upper'
LOWER = 'lower'
SIDES = (UPPER, LOWER)
INFINITE = 'inf'


@dataclass(frozen=True)
class TailExponent:
    """Result of a Legendre-dual evaluation.

    Attributes:
        t: Positive deviation.
        side: 'upper' or 'lower'.
        value: The dual value, or None when it is +inf.
        alpha_star: The maximizer, or None when the value is infinite.
    """
    t: float
    side: str
    value: Optional[float]
    alpha_star: Optional[float]

    @property
    def is_infinite(self):
        """True when the exponent is +inf."""
        return self.value is None

    @property
    def probability(self):
        """The tail bound exp(-value), 0 when the value is infinite."""
        if self.value is None:
            return 0.0
        return math.exp(-self.value)

    def to_dict(self):
        """Returns a JSON-ready dictionary; +inf is the string 'inf'."""
        return {
            't': self.t,
            'side': self.side,
            'value': INFINITE if self.value is None else self.value,
            'alpha_star': self.alpha_star,
            'tail_bound': self.probability,
        }


def _check_t(t):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f't must be positive and finite, got {t}')
    return float(t)


def dual_upper(params, t):
    """Evaluates psi*_{c,+}(t).

    Args:
        params: ConvexParams or a deviation profile.
        t: Positive deviation.

    Returns:
        TailExponent with a finite value (psi_c' is unbounded at alpha_max).
    """
    t = _check_t(t)
    profile = as_profile(params)
    upper = profile.alpha_max * (1.0 - ENDPOINT_GUARD)

    def stationarity(alpha):
        return profile.psi_prime(alpha) - t

    if stationarity(upper) < 0:
        logger.warning(f'upper dual at t={t}: maximizer pinned at the endpoint guard')
        alpha_star = upper
    else:
        alpha_star = solve_increasing(stationarity, 0.0, upper,
                                      derivative=profile.psi_second)

    value = alpha_star * (t + profile.lower_slope) - profile.c_increment(alpha_star)
    return TailExponent(t=t, side=UPPER, value=max(value, 0.0), alpha_star=alpha_star)


def dual_lower(params, t):
    """Evaluates psi*_{c,-}(-t).

    Args:
        params: ConvexParams or a deviation profile.
        t: Positive deviation.

    Returns:
        TailExponent; infinite exactly when t >= beta sum (beta - i)^-1.
    """
    t = _check_t(t)
    profile = as_profile(params)
    slope = profile.lower_slope
    if t >= slope:
        logger.debug(f'lower dual at t={t} >= {slope}: infinite')
        return TailExponent(t=t, side=LOWER, value=None, alpha_star=None)

    def stationarity(alpha):
        return profile.psi_prime(alpha) + t

    lower = expand_left(stationarity)
    alpha_star = solve_increasing(stationarity, lower, 0.0,
                                  derivative=profile.psi_second)

    value = alpha_star * (slope - t) - profile.c_increment(alpha_star)
    return TailExponent(t=t, side=LOWER, value=max(value, 0.0), alpha_star=alpha_star)


def tail_exponent(params, t, side):
    """Dispatches to dual_upper or dual_lower."""
    if side == UPPER:
        return dual_upper(params, t)
    if side == LOWER:
        return dual_lower(params, t)
    raise DomainError(f'side must be one of {SIDES}, got {side!r}')


def tail_bound(params, t, side):
    """Returns the Cramer-Chernoff bound on P(+-(h~ - h) > t).

    Args:
        params: ConvexParams or a deviation profile.
        t: Positive deviation.
        side: 'upper' or 'lower'.

    Returns:
        exp(-psi*), 0 when the exponent is infinite.
    """
    return tail_exponent(params, t, side).probability


def dual_by_grid(params, t, side, points=10 ** 6, zoom_points=10 ** 4):
    """Evaluates the dual by dense-grid maximization.

    A coarse uniform grid locates the maximizer, a second grid around the
    best coarse point refines it. No derivative information is used.

    Args:
        params: ConvexParams or a deviation profile.
        t: Positive deviation.
        side: 'upper' or 'lower'.
        points: Size of the coarse grid.
        zoom_points: Size of the refinement grid.

    Returns:
        TailExponent.
    """
    t = _check_t(t)
    profile = as_profile(params)

    if side == UPPER:
        def objective(alpha):
            return alpha * (t + profile.lower_slope) - profile.c_increment(alpha)
        lower, upper = 0.0, profile.alpha_max * (1.0 - ENDPOINT_GUARD)

    elif side == LOWER:
        def objective(alpha):
            return alpha * (profile.lower_slope - t) - profile.c_increment(alpha)

        # by concavity the maximizer lies right of -width once the objective
        # is smaller at -width than at -width/2
        width = 1.0
        for _ in range(200):
            if objective(-width) < objective(-0.5 * width):
                break
            width *= 2.0
        else:
            return TailExponent(t=t, side=LOWER, value=None, alpha_star=None)
        lower, upper = -width, 0.0

    else:
        raise DomainError(f'side must be one of {SIDES}, got {side!r}')

    grid = np.linspace(lower, upper, points)
    values = objective(grid)
    k = int(np.argmax(values))
    fine = np.linspace(grid[max(k - 1, 0)], grid[min(k + 1, points - 1)], zoom_points)
    fine_values = objective(fine)
    j = int(np.argmax(fine_values))

    return TailExponent(t=t, side=side, value=max(float(fine_values[j]), 0.0),
                        alpha_star=float(fine[j]))
