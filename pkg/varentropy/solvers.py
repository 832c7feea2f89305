"""Root finding and quadrature helpers shared by the numerical modules.
"""
import math

import numpy as np
from aracnid_logger import Logger
from scipy import integrate, optimize

from varentropy.errors import QuadratureError, SolverError

# initialize logging
logger = Logger(__name__).get_logger()

QUAD_TOL = 1e-10
QUAD_LIMIT = 200


def solve_increasing(fn, lower, upper, xtol=1e-15, derivative=None):
    """Solves fn(x) = 0 for a strictly increasing function on a bracket.

    Uses bisection, then one Newton step when the derivative is supplied.
    The Newton step is discarded if it leaves the bracket or makes the
    residual worse.

    Args:
        fn: Strictly increasing function of one real variable.
        lower: Left end of the bracket, fn(lower) <= 0.
        upper: Right end of the bracket, fn(upper) >= 0.
        xtol: Absolute tolerance on the root.
        derivative: Optional derivative of fn, used for the polish step.

    Returns:
        The root.
    """
    f_lower = fn(lower)
    f_upper = fn(upper)
    if f_lower > 0 or f_upper < 0:
        raise SolverError(
            f'invalid bracket [{lower}, {upper}]: f = ({f_lower}, {f_upper})')
    if f_lower == 0:
        return lower
    if f_upper == 0:
        return upper

    try:
        root = optimize.bisect(fn, lower, upper, xtol=xtol,
                               rtol=4 * np.finfo(float).eps, maxiter=400)
    except RuntimeError as err:
        raise SolverError(f'bisection failed: {err}') from err

    if derivative is not None:
        residual = fn(root)
        slope = derivative(root)
        if slope > 0 and math.isfinite(slope):
            polished = root - residual / slope
            if lower < polished < upper and abs(fn(polished)) <= abs(residual):
                root = polished

    logger.debug(f'root {root!r} on [{lower}, {upper}]')
    return root


def expand_left(fn, start=-1.0, factor=2.0, max_steps=200):
    """Grows a left bracket end geometrically until fn changes sign.

    Args:
        fn: Strictly increasing function with fn(0) >= 0.
        start: First candidate (negative).
        factor: Growth factor.
        max_steps: Number of expansions before giving up.

    Returns:
        A point b < 0 with fn(b) <= 0.
    """
    point = start
    for _ in range(max_steps):
        if fn(point) <= 0:
            return point
        point *= factor

    raise SolverError(f'no left bracket found down to {point}')


def quad(fn, lower, upper, weight=None, wvar=None, limit=QUAD_LIMIT,
         tol=QUAD_TOL):
    """Adaptive quadrature with an explicit convergence check.

    Thin wrapper over scipy.integrate.quad. A warning from QUADPACK is
    tolerated when the reported error estimate is still small relative to
    the value; anything else raises QuadratureError.

    Args:
        fn: Integrand.
        lower: Lower limit (may be -inf).
        upper: Upper limit (may be inf).
        weight: Optional QUADPACK weight, e.g., 'alg'.
        wvar: Parameters of the weight.
        limit: Subdivision limit.
        tol: Absolute and relative tolerance.

    Returns:
        The value of the integral.
    """
    kwargs = {'limit': limit, 'epsabs': tol, 'epsrel': tol, 'full_output': 1}
    if weight:
        kwargs['weight'] = weight
        kwargs['wvar'] = wvar

    result = integrate.quad(fn, lower, upper, **kwargs)
    value, abserr = result[0], result[1]

    if not math.isfinite(value):
        raise QuadratureError(f'non-finite integral on [{lower}, {upper}]')

    if len(result) > 3:
        allowed = max(1e3 * tol, 1e-7 * abs(value))
        if abserr > allowed:
            raise QuadratureError(
                f'quadrature did not converge on [{lower}, {upper}]: '
                f'error {abserr:.3g}, {result[3].splitlines()[0]}')
        logger.debug(f'quadrature warning tolerated on [{lower}, {upper}]: '
                     f'error {abserr:.3g}')

    return value
