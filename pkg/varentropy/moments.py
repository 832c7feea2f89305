"""Log-concavity of normalized moments of s-concave functions.

Two families of curves are computed and certified here:

- scalar curves p -> N(p)^-1 * integral_0^inf t^(p-1) phi(t) dt for an
  s-concave phi on [0, inf), with the regime normalizer N(p) equal to
  B(p, 1/s + 1) (s > 0), Gamma(p) (s = 0) or B(p, -1/s - p) (s < 0);
- density curves p -> (p + s)...(p + ns) * integral f^p for an s-concave
  density on R^n.

Both are log-concave in p. The extremal functions phi_s and f_(s,U) make
them log-affine.
"""
import csv
from dataclasses import dataclass, field
import io
import math

import numpy as np
from aracnid_logger import Logger
from scipy.special import betaln, gammaln

from varentropy.errors import DomainError
from varentropy.measures import DensityFamily
from varentropy.solvers import quad

# initialize logging
logger = Logger(__name__).get_logger()

DEFAULT_STEP = 0.05
DEFAULT_TOLERANCE = 1e-7
STANDOFF = 0.01
CONCAVITY_TOLERANCE = 1e-9
SPLIT_POINT = 64.0

NORMALIZERS = ('beta', 'reference')


def regime_of(s):
    """Returns the regime label of a concavity degree."""
    if s > 0:
        return 's>0'
    if s < 0:
        return 's<0'
    return 's=0'


@dataclass(eq=False)
class MomentCurve:
    """A sampled moment curve (p, log M(p)).

    Attributes:
        grid: Strictly increasing p values.
        log_m: log of the normalized moment at each p.
        regime: 's>0', 's=0' or 's<0'.
        normalizer: Normalizer tag, e.g., 'beta', 'reference', 'product'.
        s: Concavity degree.
        label: Description of the function or density.
    """
    grid: np.ndarray
    log_m: np.ndarray
    regime: str
    normalizer: str
    s: float = 0.0
    label: str = ''

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.log_m = np.asarray(self.log_m, dtype=float)
        if self.grid.shape != self.log_m.shape:
            raise DomainError('grid and log_m must have the same length')
        if not np.all(np.isfinite(self.log_m)):
            raise DomainError(f'log moments of {self.label} are not finite')

    def second_differences(self):
        """Returns log M(p+h) - 2 log M(p) + log M(p-h) at interior points."""
        return np.diff(self.log_m, 2)

    def to_rows(self):
        """Returns rows (p, logM, second_difference or None)."""
        second = self.second_differences()
        rows = []
        for k, (p, value) in enumerate(zip(self.grid, self.log_m)):
            diff = float(second[k - 1]) if 0 < k < len(self.grid) - 1 else None
            rows.append((float(p), float(value), diff))
        return rows

    def to_csv(self):
        """Renders the curve as CSV with columns p, logM, second_difference."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['p', 'logM', 'second_difference'])
        for p, value, diff in self.to_rows():
            writer.writerow([f'{p:.12g}', f'{value:.12g}',
                             '' if diff is None else f'{diff:.12g}'])
        return buffer.getvalue()


@dataclass
class LogConcavityCertificate:
    """Outcome of a discrete log-concavity check.

    Attributes:
        passed: True when every second difference is <= tolerance.
        tolerance: Allowed positive second difference.
        max_second_difference: Largest second difference observed.
        worst_p: Grid point where it occurs.
        violations: Number of interior points above tolerance.
        second_differences: All interior second differences.
    """
    passed: bool
    tolerance: float
    max_second_difference: float
    worst_p: float
    violations: int
    second_differences: np.ndarray = field(repr=False)

    def to_dict(self):
        """Returns a JSON-ready summary."""
        return {
            'passed': self.passed,
            'tolerance': self.tolerance,
            'max_second_difference': self.max_second_difference,
            'worst_p': self.worst_p,
            'violations': self.violations,
        }


# region GRIDS

def scalar_domain(s):
    """Returns the open p-interval on which the scalar curve is defined."""
    if s < 0:
        return 0.0, -1.0 / s
    return 0.0, math.inf


def density_domain(s, n):
    """Returns the open p-interval on which the density curve is defined."""
    return max(0.0, -n * s), math.inf


def default_grid(lower, upper, step=DEFAULT_STEP, span=10.0):
    """Builds a uniform grid with a 1% standoff from the domain endpoints.

    Args:
        lower: Left domain end (excluded).
        upper: Right domain end (excluded, may be inf).
        step: Grid spacing.
        span: Grid length when the domain is unbounded.
    """
    start = lower + STANDOFF * max(abs(lower), 1.0)
    stop = start + span if math.isinf(upper) else upper - STANDOFF * max(abs(upper), 1.0)
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 3:
        raise DomainError(f'domain ({lower}, {upper}) is too short for step {step}')
    return start + step * np.arange(count)


def validate_grid(grid, lower, upper):
    """Checks that a grid is strictly increasing and inside (lower, upper)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError('grid must be a non-empty 1-D sequence')
    if np.any(np.diff(grid) <= 0):
        raise DomainError('grid must be strictly increasing')
    if grid[0] <= lower or grid[-1] >= upper:
        raise DomainError(
            f'grid [{grid[0]}, {grid[-1]}] leaves the domain ({lower}, {upper})')
    return grid

# endregion


# region SCALAR-CURVES

def log_normalizer(p, s, normalizer='beta'):
    """Returns the log of the regime normalizer at p.

    With normalizer='beta' this is log B(p, 1/s + 1), log Gamma(p) or
    log B(p, -1/s - p). With normalizer='reference' it is the log of
    integral_0^inf t^(p-1) phi_s(t) dt, which differs by -p log|s| and is
    continuous as s -> 0.
    """
    if normalizer not in NORMALIZERS:
        raise DomainError(f'normalizer must be one of {NORMALIZERS}, got {normalizer!r}')
    if s > 0:
        value = betaln(p, 1.0 / s + 1.0)
    elif s < 0:
        value = betaln(p, -1.0 / s - p)
    else:
        return float(gammaln(p))
    if normalizer == 'reference':
        value -= p * math.log(abs(s))
    return float(value)


def mellin_moment(phi, p, limit=None):
    """Returns integral_0^inf t^(p-1) phi(t) dt.

    The t^(p-1) singularity at 0 is handled by an algebraic QUADPACK weight
    on [0, 1]; the range is also split at the support end of phi.

    Args:
        phi: ScalarSConcaveFn.
        p: Positive exponent.
        limit: Optional subdivision limit override.
    """
    kwargs = {'limit': limit} if limit else {}
    end = phi.support_end
    head_end = min(1.0, end)
    total = quad(phi, 0.0, head_end, weight='alg', wvar=(p - 1.0, 0.0), **kwargs)
    if end <= 1.0:
        return total

    def integrand(t):
        return t ** (p - 1.0) * phi(t)

    middle_end = min(SPLIT_POINT, end)
    total += quad(integrand, 1.0, middle_end, **kwargs)
    if end > SPLIT_POINT:
        total += quad(integrand, SPLIT_POINT, end, **kwargs)
    return total


def check_s_concavity(phi, points=1000, tolerance=CONCAVITY_TOLERANCE):
    """Raises DomainError when phi is not s-concave on a discrete grid.
    """
    violation = phi.concavity_violation(points)
    if violation > tolerance:
        raise DomainError(
            f'{phi.name} is not {phi.s:g}-concave: second difference {violation:.3g}')
    return violation


def scalar_moment_curve(phi, grid=None, normalizer='beta', limit=None):
    """Computes the normalized Mellin moment curve of an s-concave phi.

    Args:
        phi: ScalarSConcaveFn.
        grid: p values inside the regime domain (default: uniform, step 0.05).
        normalizer: 'beta' or 'reference'.
        limit: Optional quadrature subdivision limit.

    Returns:
        MomentCurve.
    """
    lower, upper = scalar_domain(phi.s)
    grid = default_grid(lower, upper) if grid is None else validate_grid(grid, lower, upper)
    check_s_concavity(phi)

    log_m = []
    for p in grid:
        moment = mellin_moment(phi, float(p), limit)
        if not moment > 0:
            raise DomainError(f'moment of {phi.name} vanishes at p={p}')
        log_m.append(math.log(moment) - log_normalizer(float(p), phi.s, normalizer))

    logger.debug(f'scalar curve {phi.name}: {len(grid)} points')
    return MomentCurve(grid, np.array(log_m), regime_of(phi.s), normalizer,
                       s=phi.s, label=phi.name)

# endregion


# region DENSITY-CURVES

def density_moment_curve(family, s=None, grid=None, quadrature=False,
                         normalized=False):
    """Computes p -> (p + s)...(p + ns) integral f^p for an s-concave density.

    By default f is the unnormalized shape of the family (for f_(s,U) the
    curve is then the constant log(C_U n!)); normalizing only adds the
    log-affine term -p log Z.

    Args:
        family: DensityFamily.
        s: Concavity degree (default: the family's own).
        grid: p values in (max(0, -ns), inf) (default: uniform, step 0.05).
        quadrature: If True, integral f^p is always computed by level
            quadrature instead of a closed form.
        normalized: If True, use the probability density itself.

    Returns:
        MomentCurve with normalizer tag 'product'.
    """
    s = family.s if s is None else float(s)
    n = family.n
    lower, upper = density_domain(s, n)
    grid = default_grid(lower, upper) if grid is None else validate_grid(grid, lower, upper)
    indices = np.arange(1, n + 1)
    shift = 0.0 if normalized else family.log_normalizer()

    log_m = []
    for p in grid:
        p = float(p)
        if quadrature:
            integral = DensityFamily.power_integral(family, p)
        else:
            integral = family.power_integral(p)
        log_m.append(float(np.sum(np.log(p + indices * s))) + math.log(integral)
                     + p * shift)

    logger.debug(f'density curve {family!r}: {len(grid)} points')
    return MomentCurve(grid, np.array(log_m), regime_of(s), 'product', s=s,
                       label=repr(family))


def sublevel_moment(sublevel_volume, n, p):
    """Returns p * integral_0^inf t^(p-n-1) phi(t) dt with phi(t) = t^n psi(1/t).

    For f = 1/g with g convex and psi(u) = |{g <= u}|, this equals the
    integral of f^p over R^n.

    Args:
        sublevel_volume: Callable u -> |{g <= u}|.
        n: Dimension.
        p: Exponent, p > n.
    """
    if not p > n:
        raise DomainError(f'the level-set reduction needs p > n, got p={p}, n={n}')

    def phi(t):
        return 0.0 if t == 0 else t ** n * sublevel_volume(1.0 / t)

    head = quad(phi, 0.0, 1.0, weight='alg', wvar=(p - n - 1.0, 0.0))
    tail = quad(lambda t: t ** (p - n - 1.0) * phi(t), 1.0, math.inf)
    return p * (head + tail)

# endregion


def synthetic_convex_curve(grid=None):
    """Returns the log-convex curve log M(p) = p^2, a known failing input."""
    grid = default_grid(0.0, math.inf) if grid is None else np.asarray(grid, dtype=float)
    return MomentCurve(grid, grid ** 2, 's=0', 'synthetic', label='p^2')


def certify_log_concavity(curve, tolerance=DEFAULT_TOLERANCE):
    """Certifies that a sampled curve is log-concave.

    Args:
        curve: MomentCurve on a uniform grid with at least 3 points.
        tolerance: Largest second difference accepted.

    Returns:
        LogConcavityCertificate.
    """
    grid = curve.grid
    if len(grid) < 3:
        raise DomainError('certification needs at least 3 grid points')
    steps = np.diff(grid)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise DomainError('certification needs a uniform grid')

    second = curve.second_differences()
    k = int(np.argmax(second))
    violations = int(np.sum(second > tolerance))
    certificate = LogConcavityCertificate(
        passed=violations == 0,
        tolerance=tolerance,
        max_second_difference=float(second[k]),
        worst_p=float(grid[k + 1]),
        violations=violations,
        second_differences=second,
    )
    if not certificate.passed:
        logger.warning(f'{curve.label}: {violations} log-concavity violations, '
                       f'worst {certificate.max_second_difference:.3g} '
                       f'at p={certificate.worst_p:g}')
    return certificate
