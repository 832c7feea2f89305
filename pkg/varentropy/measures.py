"""Density family module for Varentropy.

Every family here is evaluated through a one-dimensional "level" variable:
the density is a function of level(x) only, and the Lebesgue measure of
{level <= r} is known in closed form. Integrals of functions of the density
over R^n therefore reduce to one-dimensional quadrature.
"""
from dataclasses import dataclass
import math

import numpy as np
from aracnid_logger import Logger
from scipy import integrate
from scipy.special import betaln, digamma, gammaln

from varentropy.errors import (
    ConfigError, DomainError, QuadratureError, SupportError)
from varentropy.solvers import quad

# initialize logging
logger = Logger(__name__).get_logger()

NORM_ORDERS = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class ConvexParams:
    """Dimension and concavity exponent of a -1/beta-concave density.

    The measure is kappa-concave with kappa = -1/(beta - n).

    Attributes:
        n: Dimension.
        beta: Concavity exponent, must exceed n.
    """
    n: int
    beta: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f'n must be a positive integer, got {self.n}')
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'beta', float(self.beta))
        if not math.isfinite(self.beta) or self.beta <= self.n:
            raise DomainError(
                f'beta must exceed n (n={self.n}, beta={self.beta})')

    @classmethod
    def from_kappa(cls, n, kappa):
        """Builds the parameters from kappa < 0 via beta = n - 1/kappa.
        """
        if not kappa < 0:
            raise DomainError(f'kappa must be negative, got {kappa}')
        return cls(n, n - 1.0 / kappa)

    @property
    def kappa(self):
        """Convexity parameter of the measure."""
        return -1.0 / (self.beta - self.n)

    @property
    def alpha_max(self):
        """Right end of the domain of the moment generating function."""
        return 1.0 - self.n / self.beta

    @property
    def indices(self):
        """The integers 1..n as floats."""
        return np.arange(1, self.n + 1, dtype=float)

    def require_covariance(self):
        """Raises DomainError unless beta > n + 2 (finite second moments).
        """
        if self.beta <= self.n + 2:
            raise DomainError(
                f'beta must exceed n + 2 for the covariance to exist '
                f'(n={self.n}, beta={self.beta})')

    def to_dict(self):
        """Returns the parameters as a plain dictionary."""
        return {'n': self.n, 'beta': self.beta}


def unit_ball_volume(n, q):
    """Returns the Lebesgue measure of the unit l_q ball in R^n.

    Args:
        n: Dimension.
        q: One of 1, 2, inf.
    """
    if q == math.inf:
        return 2.0 ** n
    log_vol = n * (math.log(2.0) + gammaln(1.0 + 1.0 / q)) - gammaln(1.0 + n / q)
    return math.exp(log_vol)


def parse_norm_order(value):
    """Parses a norm order given as a number or the string 'inf'.
    """
    if isinstance(value, str):
        value = value.strip().lower()
        value = math.inf if value in ('inf', 'infinity') else float(value)
    value = float(value)
    if value not in NORM_ORDERS:
        raise DomainError(f'norm_q must be one of 1, 2, inf, got {value}')
    return value


class DensityFamily:
    """Base class for the density families.

    Subclasses supply the level map, the unnormalized log profile on levels,
    the level weight d|{level <= r}|/dr and the log normalizing constant.
    Everything else (entropy, power integrals, exact moment generating
    functions) is derived here by one-dimensional quadrature.

    Attributes:
        name: Short family identifier used in configs and reports.
        n: Dimension.
        s: Concavity degree of the density (s-concave).
        params: ConvexParams when the family is -1/beta-concave, else None.
        level_scale: Typical level, used to split quadrature ranges.
    """
    name = 'family'
    level_scale = 1.0

    def __init__(self, n, s, params=None):
        self.n = int(n)
        self.s = float(s)
        self.params = params

    # region LEVEL-INTERFACE

    def level(self, x):
        """Returns the level variable of points x with shape (..., n)."""
        raise NotImplementedError

    def in_support(self, x):
        """Returns a boolean mask of the points inside the support."""
        return np.ones(x.shape[:-1], dtype=bool)

    def log_profile(self, r):
        """Returns the unnormalized log density as a function of the level."""
        raise NotImplementedError

    def level_weight(self, r):
        """Returns d|{level <= r}|/dr."""
        raise NotImplementedError

    def level_support(self):
        """Returns the (lower, upper) range of the level variable."""
        return 0.0, math.inf

    def log_normalizer(self):
        """Returns log of the integral of the unnormalized density."""
        raise NotImplementedError

    def support_box(self):
        """Returns per-coordinate (lower, upper) limits enclosing the support."""
        return [(-math.inf, math.inf)] * self.n

    # endregion

    # region EVALUATION

    def _as_points(self, x):
        points = np.asarray(x, dtype=float)
        single = points.ndim <= 1
        if points.ndim == 0:
            points = points.reshape(1)
        if points.shape[-1] != self.n:
            raise DomainError(
                f'point dimension {points.shape[-1]} does not match n={self.n}')
        return points, single

    def log_density(self, x, normalized=True):
        """Evaluates log f at one point or an array of points.

        Args:
            x: A point of dimension n or an array with shape (..., n).
            normalized: If False, the normalizing constant is omitted.

        Returns:
            log f(x), -inf outside the support.
        """
        points, single = self._as_points(x)
        inside = self.in_support(points)
        level = np.where(inside, self.level(points), self.level_support()[0])
        with np.errstate(divide='ignore', invalid='ignore'):
            values = self.log_profile(level)
        if normalized:
            values = values - self.log_normalizer()
        values = np.where(inside, values, -np.inf)

        if single:
            return float(values)
        return values

    def information_content(self, x):
        """Returns the information content -log f(x).

        Raises:
            SupportError: if a point lies outside the support.
        """
        values = self.log_density(x)
        if np.any(np.isneginf(values)):
            raise SupportError('point outside the support: '
                               'information content is infinite')
        return -values

    def max_density(self):
        """Returns the essential supremum of the density."""
        lower, _ = self.level_support()
        return math.exp(float(self.log_profile(np.asarray(lower)))
                        - self.log_normalizer())

    # endregion

    # region INTEGRALS

    def level_integral(self, fn):
        """Integrates fn(level) * level_weight(level) over the level range.

        This equals the integral over R^n of fn(level(x)).
        """
        lower, upper = self.level_support()
        scale = self.level_scale

        def integrand(r):
            return fn(r) * self.level_weight(r)

        if math.isinf(upper):
            return (quad(integrand, lower, lower + scale)
                    + quad(integrand, lower + scale, math.inf))
        return quad(integrand, lower, upper)

    def power_integral(self, p):
        """Returns the integral of f^p over R^n by level quadrature.

        Args:
            p: Positive exponent.
        """
        log_z = self.log_normalizer()

        def integrand(r):
            return math.exp(p * (float(self.log_profile(r)) - log_z))

        value = self.level_integral(integrand)
        if not value > 0:
            raise QuadratureError(f'power integral is not positive at p={p}')
        return value

    def exact_entropy(self):
        """Returns the differential entropy in nats by level quadrature."""
        log_z = self.log_normalizer()

        def integrand(r):
            log_f = float(self.log_profile(r)) - log_z
            return -math.exp(log_f) * log_f if math.isfinite(log_f) else 0.0

        return self.level_integral(integrand)

    def exact_varentropy(self):
        """Returns Var(-log f(X)) by level quadrature."""
        log_z = self.log_normalizer()
        entropy = self.exact_entropy()

        def integrand(r):
            log_f = float(self.log_profile(r)) - log_z
            if not math.isfinite(log_f):
                return 0.0
            return math.exp(log_f) * (log_f + entropy) ** 2

        return self.level_integral(integrand)

    def centered_log_mgf(self, alpha):
        """Returns log E exp(alpha * (h~(X) - h(X))).

        Uses E f(X)^(-alpha) = integral of f^(1 - alpha).
        """
        if alpha == 0:
            return 0.0
        return math.log(self.power_integral(1.0 - alpha)) - alpha * self.exact_entropy()

    # endregion

    def describe(self):
        """Returns the family parameters as a plain dictionary."""
        return {'family': self.name, 'n': self.n}

    def __repr__(self):
        args = ', '.join(f'{key}={value!r}' for key, value in self.describe().items()
                         if key != 'family')
        return f'{type(self).__name__}({args})'


class ParetoFamily(DensityFamily):
    """Multivariate Pareto density on the positive orthant.

    f(x) = (a + x_1 + ... + x_n)^(-beta) / Z_n(a, beta), the equality case of
    every bound in the bounds module.

    Attributes:
        params: ConvexParams.
        a: Positive scale.
    """
    name = 'pareto'

    def __init__(self, params, a=1.0):
        if not a > 0:
            raise DomainError(f'a must be positive, got {a}')
        super().__init__(params.n, -1.0 / params.beta, params)
        self.a = float(a)
        self.level_scale = self.a

    def level(self, x):
        return np.sum(x, axis=-1)

    def in_support(self, x):
        return np.all(x >= 0, axis=-1) & (self.a + np.sum(x, axis=-1) > 0)

    def log_profile(self, r):
        return -self.params.beta * np.log(self.a + r)

    def level_weight(self, r):
        n = self.n
        return r ** (n - 1) / math.factorial(n - 1)

    def support_box(self):
        return [(0.0, math.inf)] * self.n

    def log_normalizer(self):
        """Returns log Z_n(a, beta) = log(a^(n-beta) B(n, beta-n) / (n-1)!)."""
        n, beta = self.n, self.params.beta
        return (n - beta) * math.log(self.a) + betaln(n, beta - n) - gammaln(n)

    def exact_entropy(self):
        beta = self.params.beta
        return (-math.log(self.max_density())
                + beta * float(np.sum(1.0 / (beta - self.params.indices))))

    def power_integral(self, p):
        n, beta = self.n, self.params.beta
        if not p * beta > n:
            raise DomainError(f'f^p is not integrable for p={p} (need p*beta > n)')
        log_value = (-p * self.log_normalizer() + (n - p * beta) * math.log(self.a)
                     + betaln(n, p * beta - n) - gammaln(n))
        return math.exp(log_value)

    def describe(self):
        return {'family': self.name, 'n': self.n, 'beta': self.params.beta, 'a': self.a}


class HomogeneousFamily(DensityFamily):
    """The extremal s-concave family f_{s,U} = (1 - sU)_+^(1/s), f_{0,U} = e^(-U).

    U is restricted to a positive multiple of an l_q norm, so that the
    measure C_U of {U <= 1} is known in closed form.

    Attributes:
        q: Norm order, one of 1, 2, inf.
        scale: Positive multiplier c in U = c * ||.||_q.
    """
    name = 'homogeneous'

    def __init__(self, s, n, q=2.0, scale=1.0):
        q = parse_norm_order(q)
        if not scale > 0:
            raise DomainError(f'norm_scale must be positive, got {scale}')
        if not 1.0 + n * s > 0:
            raise DomainError(
                f'f_(s,U) is not integrable for s={s}, n={n} (need 1 + n*s > 0)')
        super().__init__(n, s)
        self.q = q
        self.scale = float(scale)

    def u(self, x):
        """Evaluates the homogeneous function U at points (..., n)."""
        x = np.asarray(x, dtype=float)
        return self.scale * np.linalg.norm(x, ord=self.q, axis=-1)

    def level(self, x):
        return self.u(x)

    def in_support(self, x):
        if self.s > 0:
            return 1.0 - self.s * self.u(x) > 0
        return super().in_support(x)

    def log_profile(self, r):
        if self.s == 0:
            return -np.asarray(r, dtype=float)
        return np.log1p(-self.s * np.asarray(r, dtype=float)) / self.s

    @property
    def c_u(self):
        """Lebesgue measure of {U <= 1}."""
        return unit_ball_volume(self.n, self.q) / self.scale ** self.n

    def level_weight(self, r):
        return self.n * self.c_u * r ** (self.n - 1)

    def level_support(self):
        if self.s > 0:
            return 0.0, 1.0 / self.s
        return 0.0, math.inf

    def support_box(self):
        if self.s > 0:
            radius = 1.0 / (self.s * self.scale)
            return [(-radius, radius)] * self.n
        return super().support_box()

    def shape_power_integral(self, p):
        """Returns the integral of the unnormalized f_{s,U}^p, C_U n! / prod(p + i s).
        """
        terms = p + self.s * np.arange(1, self.n + 1)
        if np.any(terms <= 0):
            raise DomainError(f'f^p is not integrable for p={p}, s={self.s}')
        return math.exp(math.log(self.c_u) + gammaln(self.n + 1)
                        - float(np.sum(np.log(terms))))

    def log_normalizer(self):
        return math.log(self.shape_power_integral(1.0))

    def power_integral(self, p):
        return self.shape_power_integral(p) * math.exp(-p * self.log_normalizer())

    def describe(self):
        q = 'inf' if math.isinf(self.q) else self.q
        return {'family': self.name, 'n': self.n, 's': self.s, 'norm_q': q,
                'norm_scale': self.scale}


class RadialStudentFamily(DensityFamily):
    """Student-type density proportional to (1 + |x|^2)^(-beta) on R^n.

    f^(-1/beta) = 1 + |x|^2 is convex, so f is -1/beta-concave, but it is not
    of the extremal form: it satisfies every bound strictly.
    """
    name = 'student'

    def __init__(self, params):
        super().__init__(params.n, -1.0 / params.beta, params)

    def level(self, x):
        return np.linalg.norm(x, axis=-1)

    def log_profile(self, r):
        return -self.params.beta * np.log1p(np.asarray(r, dtype=float) ** 2)

    def level_weight(self, r):
        return self.n * unit_ball_volume(self.n, 2.0) * r ** (self.n - 1)

    def log_normalizer(self):
        n, beta = self.n, self.params.beta
        return 0.5 * n * math.log(math.pi) + gammaln(beta - 0.5 * n) - gammaln(beta)

    def exact_entropy(self):
        n, beta = self.n, self.params.beta
        return self.log_normalizer() + beta * (digamma(beta) - digamma(beta - 0.5 * n))

    def power_integral(self, p):
        n, beta = self.n, self.params.beta
        if not p * beta > 0.5 * n:
            raise DomainError(f'f^p is not integrable for p={p} (need 2 p beta > n)')
        log_value = (0.5 * n * math.log(math.pi) + gammaln(p * beta - 0.5 * n)
                     - gammaln(p * beta) - p * self.log_normalizer())
        return math.exp(log_value)

    def describe(self):
        return {'family': self.name, 'n': self.n, 'beta': self.params.beta}


class GaussianFamily(DensityFamily):
    """Standard Gaussian on R^n, the log-concave limit (beta -> inf).
    """
    name = 'gaussian'

    def __init__(self, n):
        super().__init__(n, 0.0)

    def level(self, x):
        return np.linalg.norm(x, axis=-1)

    def log_profile(self, r):
        return -0.5 * np.asarray(r, dtype=float) ** 2

    def level_weight(self, r):
        return self.n * unit_ball_volume(self.n, 2.0) * r ** (self.n - 1)

    def log_normalizer(self):
        return 0.5 * self.n * math.log(2.0 * math.pi)

    def exact_entropy(self):
        return 0.5 * self.n * (1.0 + math.log(2.0 * math.pi))

    def power_integral(self, p):
        if not p > 0:
            raise DomainError(f'f^p is not integrable for p={p}')
        return (2.0 * math.pi) ** (0.5 * self.n * (1.0 - p)) * p ** (-0.5 * self.n)


class ScalarSConcaveFn:
    """An s-concave function phi: [0, inf) -> [0, inf) for the 1-D moment tests.

    Attributes:
        s: Concavity degree.
        evaluator: Vectorized callable returning phi(t) on its support.
        support_end: Right end of the support (inf allowed).
        name: Label for reports.
    """

    def __init__(self, s, evaluator, support_end=math.inf, name='phi'):
        self.s = float(s)
        self.evaluator = evaluator
        self.support_end = float(support_end)
        self.name = name

    @classmethod
    def reference(cls, s):
        """Returns phi_s = (1 - s t)_+^(1/s), or e^(-t) for s = 0."""
        s = float(s)
        if s == 0:
            return cls(0.0, lambda t: np.exp(-np.asarray(t, dtype=float)),
                       name='phi_0')
        end = 1.0 / s if s > 0 else math.inf

        def evaluator(t):
            base = np.clip(1.0 - s * np.asarray(t, dtype=float), 0.0, None)
            with np.errstate(divide='ignore'):
                return base ** (1.0 / s)

        return cls(s, evaluator, end, name=f'phi_{s:g}')

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t < self.support_end)
        with np.errstate(divide='ignore', invalid='ignore'):
            values = np.where(inside, self.evaluator(np.where(inside, t, 0.0)), 0.0)
        if values.ndim == 0:
            return float(values)
        return values

    def concavity_violation(self, points=1000):
        """Measures how far phi is from s-concavity on a grid.

        phi^s must be concave for s > 0, phi^s convex for s < 0 and
        log phi concave for s = 0. Second differences are taken on a uniform
        grid strictly inside the support.

        Args:
            points: Number of grid points.

        Returns:
            The largest wrong-signed second difference (0 when s-concave),
            relative to the magnitude of the transformed values.
        """
        end = self.support_end if math.isfinite(self.support_end) else 50.0
        grid = np.linspace(0.0, end, points + 1)[:-1]
        values = np.asarray(self(grid), dtype=float)
        if np.any(values <= 0):
            raise DomainError(f'{self.name} vanishes inside its declared support')

        if self.s == 0:
            transformed = np.log(values)
            sign = 1.0
        else:
            transformed = values ** self.s
            sign = 1.0 if self.s > 0 else -1.0
        second = sign * np.diff(transformed, 2)
        scale = max(1.0, float(np.max(np.abs(transformed))))
        return max(0.0, float(np.max(second)) / scale)


def integrate_density(family, fn=None):
    """Integrates a function of the density over R^n by direct tensor quadrature.

    Reserved for sanity checks in low dimension.

    Args:
        family: A DensityFamily with n <= 3.
        fn: Function of the density value; defaults to the identity,
            i.e., the total mass.

    Returns:
        The value of the n-dimensional integral.
    """
    if family.n > 3:
        raise DomainError(f'direct quadrature supports n <= 3, got n={family.n}')

    def integrand(*coords):
        value = math.exp(family.log_density(np.array(coords)))
        return fn(value) if fn else value

    value, abserr = integrate.nquad(
        integrand, family.support_box(), opts={'epsabs': 1e-10, 'epsrel': 1e-10,
                                               'limit': 200})
    logger.debug(f'direct quadrature of {family!r}: {value} +- {abserr}')
    return value


def family_from_config(config):
    """Builds a density family from plain key=value settings.

    Args:
        config: Mapping with the keys family, n, beta, a, s, norm_q, norm_scale.

    Returns:
        The DensityFamily instance.
    """
    name = str(config.get('family', 'pareto')).lower()
    n = int(config.get('n', 1))

    if name == 'pareto':
        return ParetoFamily(ConvexParams(n, _required(config, 'beta')),
                            float(config.get('a', 1.0)))
    if name == 'student':
        return RadialStudentFamily(ConvexParams(n, _required(config, 'beta')))
    if name == 'gaussian':
        return GaussianFamily(n)
    if name == 'homogeneous':
        return HomogeneousFamily(float(_required(config, 's')), n,
                                 config.get('norm_q', 2.0),
                                 float(config.get('norm_scale', 1.0)))

    raise ConfigError(f'unknown density family: {name}')


def _required(config, key):
    value = config.get(key)
    if value is None:
        raise ConfigError(f'missing required setting: {key}')
    return float(value)
