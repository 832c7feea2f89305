"""Closed-form concentration bounds for -1/beta-concave densities.

The normalizer c(alpha) = -sum_i log((1 - alpha) beta - i) makes
alpha -> e^(-c(alpha)) E f(X)^(-alpha) log-concave; every bound below
follows from it. psi_c(alpha) = c(alpha) - c(0) - c'(0) alpha is the
resulting bound on the centered log moment generating function of the
information content, with equality for the Pareto family.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from aracnid_logger import Logger

from varentropy.errors import DomainError
from varentropy.measures import ConvexParams
from varentropy.solvers import solve_increasing

# initialize logging
logger = Logger(__name__).get_logger()

ENDPOINT_GUARD = 1e-12
# largest float below 1
C1_CEILING = math.nextafter(1.0, 0.0)


class DeviationProfile:
    """Evaluable c(alpha), psi_c(alpha) and their first two derivatives.

    All evaluators accept scalars or numpy arrays of alpha.

    Attributes:
        params: ConvexParams.
        n: Dimension.
        alpha_max: Right end of the domain, 1 - n/beta.
    """

    def __init__(self, params):
        self.params = params
        self.n = params.n
        self.beta = params.beta
        self.alpha_max = params.alpha_max
        self._i = params.indices

    def _alpha(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        if np.any(alpha >= self.alpha_max):
            raise DomainError(
                f'alpha must be below alpha_max={self.alpha_max!r}, '
                f'got {np.max(alpha)!r}')
        return alpha

    @staticmethod
    def _out(values):
        return float(values) if np.ndim(values) == 0 else values

    def _gaps(self, alpha):
        """Returns (1 - alpha) beta - i with a trailing axis over i."""
        return (1.0 - alpha[..., None]) * self.beta - self._i

    # region NORMALIZER

    def c(self, alpha):
        """c(alpha) = -sum log((1 - alpha) beta - i)."""
        alpha = self._alpha(alpha)
        return self._out(-np.sum(np.log(self._gaps(alpha)), axis=-1))

    def c_prime(self, alpha):
        """c'(alpha) = sum beta / ((1 - alpha) beta - i)."""
        alpha = self._alpha(alpha)
        return self._out(np.sum(self.beta / self._gaps(alpha), axis=-1))

    def c_second(self, alpha):
        """c''(alpha) = sum beta^2 / ((1 - alpha) beta - i)^2."""
        alpha = self._alpha(alpha)
        return self._out(np.sum((self.beta / self._gaps(alpha)) ** 2, axis=-1))

    # endregion

    # region DEVIATION

    @property
    def lower_slope(self):
        """beta sum (beta - i)^-1, the supremum slope of psi_c on alpha < 0."""
        return float(self.beta * np.sum(1.0 / (self.beta - self._i)))

    @property
    def support_floor(self):
        """Almost-sure lower bound on h~(X) - h(X)."""
        return -self.lower_slope

    def c_increment(self, alpha):
        """c(alpha) - c(0) = -sum log(((1-alpha) beta - i)/(beta - i)), without cancellation."""
        alpha = self._alpha(alpha)
        ratio = alpha[..., None] * self.beta / (self.beta - self._i)
        return self._out(-np.sum(np.log1p(-ratio), axis=-1))

    def psi(self, alpha):
        """psi_c(alpha) = -alpha beta sum (beta-i)^-1 - sum log(((1-alpha) beta - i)/(beta - i))."""
        alpha = np.asarray(alpha, dtype=float)
        return self._out(self.c_increment(alpha) - alpha * self.lower_slope)

    def psi_prime(self, alpha):
        """psi_c'(alpha) = c'(alpha) - c'(0)."""
        alpha = self._alpha(alpha)
        terms = (alpha[..., None] * self.beta ** 2
                 / (self._gaps(alpha) * (self.beta - self._i)))
        return self._out(np.sum(terms, axis=-1))

    def psi_second(self, alpha):
        """psi_c''(alpha) = c''(alpha)."""
        return self.c_second(alpha)

    def varentropy(self):
        """psi_c''(0), the sharp variance bound."""
        return self.psi_second(0.0)

    # endregion

    def describe(self):
        """Returns the profile parameters as a plain dictionary."""
        return {'profile': 'convex', **self.params.to_dict()}


class LogConcaveProfile(DeviationProfile):
    """The beta -> inf limit of the deviation profile.

    psi(alpha) = n (-alpha - log(1 - alpha)), alpha_max = 1. This is the
    sharp profile for log-concave densities.
    """
    # pylint: disable=super-init-not-called

    def __init__(self, n):
        if int(n) != n or n < 1:
            raise DomainError(f'n must be a positive integer, got {n}')
        self.params = None
        self.n = int(n)
        self.beta = math.inf
        self.alpha_max = 1.0

    def c(self, alpha):
        alpha = self._alpha(alpha)
        return self._out(-self.n * np.log1p(-alpha))

    def c_prime(self, alpha):
        alpha = self._alpha(alpha)
        return self._out(self.n / (1.0 - alpha))

    def c_second(self, alpha):
        alpha = self._alpha(alpha)
        return self._out(self.n / (1.0 - alpha) ** 2)

    @property
    def lower_slope(self):
        return float(self.n)

    def c_increment(self, alpha):
        alpha = self._alpha(alpha)
        return self._out(-self.n * np.log1p(-alpha))

    def psi_prime(self, alpha):
        alpha = self._alpha(alpha)
        return self._out(self.n * alpha / (1.0 - alpha))

    def describe(self):
        return {'profile': 'log-concave', 'n': self.n}


def as_profile(params_or_profile):
    """Returns a DeviationProfile for ConvexParams, or the profile itself."""
    if isinstance(params_or_profile, DeviationProfile):
        return params_or_profile
    if isinstance(params_or_profile, ConvexParams):
        return DeviationProfile(params_or_profile)
    raise DomainError(f'expected ConvexParams or a profile, got {params_or_profile!r}')


@dataclass(frozen=True)
class SmallBallResult:
    """Constants of the small-ball estimate P(f(X) >= c0^n ||f||) >= 1 - c1^n.

    Attributes:
        n: Dimension.
        c0: Level constant in (0, 1).
        alpha_star: Root of sum beta / ((1 - a) beta - i) = -n log c0.
        c1: Resulting constant in (0, 1).
        log_c1: Logarithm of c1 (negative). This is the authoritative value
            near the c0 threshold, where exp(log_c1) rounds to 1.
        t: Deviation level -n log c0 - beta sum (beta - i)^-1.
        exponent: psi*_{c,+}(t), equal to -n log c1.
        residual: Residual of the root equation at alpha_star. It is within
            1e-12 relative to -n log c0; for tiny c0 the absolute residual
            is round-off of that target.
    """
    n: int
    c0: float
    alpha_star: float
    c1: float
    log_c1: float
    t: float
    exponent: float
    residual: float = field(default=0.0, compare=False)

    @property
    def probability_bound(self):
        """Lower bound 1 - c1^n on P(f(X) >= c0^n ||f||_inf)."""
        return -math.expm1(self.n * self.log_c1)


# region BOUNDS

def psi_c(params, alpha):
    """Evaluates the deviation function psi_c.

    Args:
        params: ConvexParams.
        alpha: Scalar or array, below 1 - n/beta.

    Returns:
        psi_c(alpha).

    Raises:
        DomainError: if alpha >= 1 - n/beta.
    """
    return DeviationProfile(params).psi(alpha)


def log_mgf_normalized(params, alpha):
    """Returns the exponent of the bound E e^(alpha (h~ - h)) <= e^(psi_c(alpha)).
    """
    return psi_c(params, alpha)


def varentropy_bound(params):
    """Returns the sharp varentropy bound beta^2 sum (beta - i)^-2.
    """
    beta = params.beta
    total = 0.0
    for i in range(1, params.n + 1):
        total += 1.0 / (beta - i) ** 2
    return beta ** 2 * total


def fisher_varentropy_bound(params, trace_sigma, fisher_info):
    """Returns tr(Sigma) beta^2 / n^2 * sum (beta - i)^-2 * J.

    Args:
        params: ConvexParams with beta > n + 2.
        trace_sigma: Trace of the covariance matrix (positive).
        fisher_info: Fisher information J(X) (nonnegative).
    """
    params.require_covariance()
    if not trace_sigma > 0:
        raise DomainError(f'trace_sigma must be positive, got {trace_sigma}')
    if not fisher_info >= 0:
        raise DomainError(f'fisher_info must be nonnegative, got {fisher_info}')

    return trace_sigma * varentropy_bound(params) / params.n ** 2 * fisher_info


def entropy_upper_bound(params, max_density):
    """Returns -log ||f||_inf + beta sum (beta - i)^-1.

    No -1/beta-concave density with this maximal value has larger entropy;
    the Pareto family attains the bound.
    """
    if not max_density > 0:
        raise DomainError(f'max_density must be positive, got {max_density}')
    beta = params.beta
    total = 0.0
    for i in range(1, params.n + 1):
        total += 1.0 / (beta - i)
    return -math.log(max_density) + beta * total


def small_ball(params, c0):
    """Solves for the constants of the small-ball estimate.

    Args:
        params: ConvexParams.
        c0: Level constant with 0 < c0 < 1 and n log c0 < -beta sum (beta-i)^-1.

    Returns:
        SmallBallResult.

    Raises:
        DomainError: if c0 is outside (0, 1) or too large.
    """
    profile = DeviationProfile(params)
    n = params.n
    if not 0 < c0 < 1:
        raise DomainError(f'c0 must lie in (0, 1), got {c0}')
    target = -n * math.log(c0)
    if not target > profile.lower_slope:
        raise DomainError(
            f'c0 too large: need n log c0 < -{profile.lower_slope!r}, '
            f'got n log c0 = {-target!r}')

    upper = profile.alpha_max * (1.0 - ENDPOINT_GUARD)
    alpha_star = solve_increasing(
        lambda a: profile.c_prime(a) - target, 0.0, upper,
        derivative=profile.c_second)
    residual = profile.c_prime(alpha_star) - target

    gaps = (1.0 - alpha_star) * params.beta - params.indices
    ratios = alpha_star * params.beta / gaps
    log_c1 = -float(np.sum(ratios - np.log1p(ratios))) / n
    t = target - profile.lower_slope
    exponent = alpha_star * t - profile.psi(alpha_star)

    logger.debug(f'small ball n={n} beta={params.beta} c0={c0}: '
                 f'alpha*={alpha_star!r} log c1={log_c1!r}')

    return SmallBallResult(n=n, c0=float(c0), alpha_star=alpha_star,
                           c1=min(math.exp(log_c1), C1_CEILING), log_c1=log_c1,
                           t=t, exponent=exponent, residual=residual)


def small_ball_probability_bound(params, c0):
    """Returns the lower bound 1 - c1^n on P(f(X) >= c0^n ||f||_inf)."""
    return small_ball(params, c0).probability_bound

# endregion
