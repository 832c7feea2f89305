"""Monte Carlo confirmation of the information-content bounds.

Samples are drawn in fixed-size chunks. Chunk i of a run with seed s uses
the stream Generator(PCG64(SeedSequence(s, spawn_key=(i,)))), so a run is
a pure function of (family, seed, count, grids) whatever the number of
worker processes. Each chunk reduces its draws to power sums and counts;
the chunk results are combined in chunk order.

Deviations are measured from the exact entropy of the family rather than
from the sample mean, so the empirical moment generating function is an
unbiased estimate of E exp(alpha (h~(X) - h(X))).
"""
from dataclasses import asdict, dataclass, field
import json
import math
from multiprocessing import Pool
from typing import List, Optional

import numpy as np
from aracnid_logger import Logger
from numpy.random import PCG64, Generator, SeedSequence
from scipy import stats
from tqdm import tqdm

from varentropy.bounds import DeviationProfile, LogConcaveProfile, as_profile, small_ball
from varentropy.errors import DomainError, UnsupportedFamilyError
from varentropy.legendre import LOWER, UPPER, tail_bound
from varentropy.measures import GaussianFamily, ParetoFamily, RadialStudentFamily
from varentropy.report_data import render_csv

# initialize logging
logger = Logger(__name__).get_logger()

SCHEMA_VERSION = 1
CHUNK_SIZE = 65536
ALPHA_STANDOFF = 0.05
ALPHA_CAP = 0.5
SE_MULTIPLIER = 3.0
FLOOR_SE_MULTIPLIER = 5.0
T_MULTIPLES = (0.5, 1.0, 2.0, 4.0, 8.0)


def chunk_generator(seed, index):
    """Returns the random generator of chunk `index` of a run with `seed`."""
    return Generator(PCG64(SeedSequence(seed, spawn_key=(index,))))


def chunk_sizes(count, chunk_size=CHUNK_SIZE):
    """Splits a sample count into chunk sizes; only the last chunk is short."""
    if int(count) != count or count < 2:
        raise DomainError(f'count must be an integer >= 2, got {count}')
    full, rest = divmod(int(count), chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


# region SAMPLERS

def _draw_pareto(family, rng, size):
    n, beta = family.n, family.params.beta
    t = rng.beta(n, beta - n, size)
    radius = family.a * t / (1.0 - t)
    weights = rng.dirichlet(np.ones(n), size)
    return radius[:, None] * weights


def _draw_student(family, rng, size):
    n, beta = family.n, family.params.beta
    normal = rng.standard_normal((size, n))
    chi2 = rng.chisquare(2.0 * beta - n, size)
    return normal / np.sqrt(chi2)[:, None]


def _draw_gaussian(family, rng, size):
    return rng.standard_normal((size, family.n))


SAMPLERS = {
    ParetoFamily.name: _draw_pareto,
    RadialStudentFamily.name: _draw_student,
    GaussianFamily.name: _draw_gaussian,
}


def sampler_for(family):
    """Returns the chunk sampler (family, rng, size) -> points of a family.

    Raises:
        UnsupportedFamilyError: if the family has no sampler.
    """
    try:
        return SAMPLERS[family.name]
    except KeyError as err:
        raise UnsupportedFamilyError(f'no sampler for family {family.name!r}') from err


def draw_points(family, seed, count):
    """Draws `count` points of a family using the chunked stream layout.

    Returns:
        Array with shape (count, n).
    """
    draw = sampler_for(family)
    chunks = [draw(family, chunk_generator(seed, index), size)
              for index, size in enumerate(chunk_sizes(count))]
    return np.concatenate(chunks)


def sample_pareto(family, seed, count):
    """Draws i.i.d. points from a multivariate Pareto density.

    T ~ Beta(n, beta - n), S = a T / (1 - T), W uniform on the simplex and
    X = S W.
    """
    if not isinstance(family, ParetoFamily):
        raise UnsupportedFamilyError(f'expected a ParetoFamily, got {family!r}')
    return draw_points(family, seed, count)


def sample_student(family, seed, count):
    """Draws points from (1 + |x|^2)^-beta as Z / sqrt(chi2 with 2 beta - n dof)."""
    if not isinstance(family, RadialStudentFamily):
        raise UnsupportedFamilyError(f'expected a RadialStudentFamily, got {family!r}')
    return draw_points(family, seed, count)


def sample_gaussian(family, seed, count):
    """Draws standard Gaussian points."""
    if not isinstance(family, GaussianFamily):
        raise UnsupportedFamilyError(f'expected a GaussianFamily, got {family!r}')
    return draw_points(family, seed, count)


def ks_statistic(samples, cdf):
    """Returns the Kolmogorov-Smirnov distance between samples and a CDF."""
    return float(stats.kstest(np.ravel(samples), cdf).statistic)

# endregion


# region REPORT

@dataclass(frozen=True)
class MgfPoint:
    """Empirical E exp(alpha (h~ - h)) with its standard error."""
    alpha: float
    value: float
    se: float


@dataclass(frozen=True)
class TailFrequency:
    """Empirical P(h~ - h > t) (upper) or P(h~ - h < -t) (lower)."""
    t: float
    side: str
    frequency: float
    se: float


@dataclass(frozen=True)
class SmallBallFrequency:
    """Empirical P(f(X) >= c0^n ||f||_inf)."""
    c0: float
    frequency: float
    se: float


@dataclass
class SampleReport:
    """Information-content statistics of one seeded run.

    Attributes:
        family: Family description (DensityFamily.describe()).
        seed: Root seed.
        count: Number of draws.
        center: Exact entropy the deviations are measured from.
        mean_h: Empirical mean of h~.
        var_h: Empirical (unbiased) variance of h~.
        se_mean: Standard error of mean_h.
        se_var: Standard error of var_h (fourth-moment formula).
        min_deviation: Smallest observed h~ - center.
        mgf_points: MgfPoint per alpha.
        tail_freqs: TailFrequency per (t, side).
        small_ball: SmallBallFrequency per c0.
        chunk_size: Draws per stream chunk.
    """
    family: dict
    seed: int
    count: int
    center: float
    mean_h: float
    var_h: float
    se_mean: float
    se_var: float
    min_deviation: float
    mgf_points: List[MgfPoint] = field(default_factory=list)
    tail_freqs: List[TailFrequency] = field(default_factory=list)
    small_ball: List[SmallBallFrequency] = field(default_factory=list)
    chunk_size: int = CHUNK_SIZE

    def to_dict(self):
        """Returns the versioned JSON document as a dictionary."""
        return {
            'version': SCHEMA_VERSION,
            'family': self.family,
            'seed': self.seed,
            'count': self.count,
            'chunk_size': self.chunk_size,
            'statistics': {
                'center': self.center,
                'mean_h': self.mean_h,
                'var_h': self.var_h,
                'se_mean': self.se_mean,
                'se_var': self.se_var,
                'min_deviation': self.min_deviation,
            },
            'grids': {
                'alpha': [point.alpha for point in self.mgf_points],
                't': sorted({freq.t for freq in self.tail_freqs}),
                'c0': [point.c0 for point in self.small_ball],
            },
            'mgf': [asdict(point) for point in self.mgf_points],
            'tails': [asdict(freq) for freq in self.tail_freqs],
            'small_ball': [asdict(point) for point in self.small_ball],
        }

    def to_json(self):
        """Serializes the report; numbers are written unrounded."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'

    @classmethod
    def from_json(cls, text):
        """Parses a document written by to_json."""
        doc = json.loads(text)
        version = doc.get('version')
        if version != SCHEMA_VERSION:
            raise DomainError(f'unsupported report version: {version}')
        numbers = doc['statistics']
        return cls(
            family=doc['family'],
            seed=doc['seed'],
            count=doc['count'],
            chunk_size=doc['chunk_size'],
            mgf_points=[MgfPoint(**point) for point in doc['mgf']],
            tail_freqs=[TailFrequency(**freq) for freq in doc['tails']],
            small_ball=[SmallBallFrequency(**point) for point in doc['small_ball']],
            **numbers,
        )

    def mgf_csv(self):
        """Renders the MGF grid as CSV with columns alpha, mgf, se."""
        return render_csv(['alpha', 'mgf', 'se'],
                          [(p.alpha, p.value, p.se) for p in self.mgf_points])

    def tail_csv(self):
        """Renders the tail grid as CSV with columns t, side, frequency, se."""
        return render_csv(['t', 'side', 'frequency', 'se'],
                          [(f.t, f.side, f.frequency, f.se) for f in self.tail_freqs])


# endregion


# region STATISTICS

@dataclass
class ChunkStats:
    """Power sums and counts of h~ - center over one chunk."""
    count: int
    sums: np.ndarray
    mgf_sums: np.ndarray
    mgf_squares: np.ndarray
    upper_counts: np.ndarray
    lower_counts: np.ndarray
    small_ball_counts: np.ndarray
    min_deviation: float

    def merge(self, other):
        """Adds another chunk into this one."""
        self.count += other.count
        self.sums = self.sums + other.sums
        self.mgf_sums = self.mgf_sums + other.mgf_sums
        self.mgf_squares = self.mgf_squares + other.mgf_squares
        self.upper_counts = self.upper_counts + other.upper_counts
        self.lower_counts = self.lower_counts + other.lower_counts
        self.small_ball_counts = self.small_ball_counts + other.small_ball_counts
        self.min_deviation = min(self.min_deviation, other.min_deviation)
        return self


def _chunk_statistics(task):
    """Draws one chunk and reduces it; runs in worker processes."""
    family, seed, index, size, alphas, ts, levels, center = task
    points = sampler_for(family)(family, chunk_generator(seed, index), size)
    deviation = family.information_content(points) - center

    alphas = np.asarray(alphas, dtype=float)
    ts = np.asarray(ts, dtype=float)
    levels = np.asarray(levels, dtype=float)
    weights = np.exp(np.outer(alphas, deviation))

    return ChunkStats(
        count=size,
        sums=np.array([np.sum(deviation ** k) for k in range(1, 5)]),
        mgf_sums=np.sum(weights, axis=1),
        mgf_squares=np.sum(weights ** 2, axis=1),
        upper_counts=np.sum(deviation[None, :] > ts[:, None], axis=1),
        lower_counts=np.sum(deviation[None, :] < -ts[:, None], axis=1),
        small_ball_counts=np.sum(deviation[None, :] <= levels[:, None], axis=1),
        min_deviation=float(np.min(deviation)),
    )


def profile_for(family):
    """Returns the deviation profile that bounds a sampled family."""
    if family.params is not None:
        return DeviationProfile(family.params)
    if isinstance(family, GaussianFamily):
        return LogConcaveProfile(family.n)
    raise UnsupportedFamilyError(f'no deviation profile for {family!r}')


def default_alpha_grid(alpha_max):
    """Returns {-2, -1, -0.5, 0.25 alpha_max, 0.5 alpha_max}."""
    return [-2.0, -1.0, -0.5, 0.25 * alpha_max, 0.5 * alpha_max]


def default_t_grid(varentropy):
    """Returns {0.5, 1, 2, 4, 8} times the standard deviation bound."""
    scale = math.sqrt(varentropy)
    return [multiple * scale for multiple in T_MULTIPLES]


def check_alpha_grid(alphas, alpha_max):
    """Rejects alpha values within 5% of alpha_max."""
    limit = (1.0 - ALPHA_STANDOFF) * alpha_max
    for alpha in alphas:
        if not alpha < limit:
            raise DomainError(
                f'alpha={alpha} is too close to alpha_max={alpha_max} '
                f'(must stay below {limit})')
    return [float(alpha) for alpha in alphas]


def information_stats(family, seed, count, t_grid=None, alpha_grid=None,
                      c0_grid=(), workers=1):
    """Estimates the information-content statistics of a family.

    Args:
        family: A family with a sampler (pareto, student, gaussian).
        seed: Non-negative integer root seed.
        count: Number of draws.
        t_grid: Positive deviations for the tail frequencies.
        alpha_grid: Exponents for the empirical moment generating function.
        c0_grid: Level constants for the small-ball frequencies.
        workers: Number of worker processes; does not change the result.

    Returns:
        SampleReport.
    """
    sampler_for(family)
    if int(seed) != seed or seed < 0:
        raise DomainError(f'seed must be a non-negative integer, got {seed}')
    profile = profile_for(family)

    alphas = check_alpha_grid(
        default_alpha_grid(profile.alpha_max) if alpha_grid is None else alpha_grid,
        profile.alpha_max)
    ts = default_t_grid(profile.varentropy()) if t_grid is None else [float(t) for t in t_grid]
    if any(not t > 0 for t in ts):
        raise DomainError(f't grid must be positive, got {ts}')
    c0s = [float(c0) for c0 in c0_grid]
    if any(not 0 < c0 < 1 for c0 in c0s):
        raise DomainError(f'c0 values must lie in (0, 1), got {c0s}')

    center = family.exact_entropy()
    # f(X) >= c0^n ||f|| iff h~ - h <= -n log c0 - log ||f|| - h
    log_max = math.log(family.max_density())
    levels = [-family.n * math.log(c0) - log_max - center for c0 in c0s]

    sizes = chunk_sizes(count)
    tasks = [(family, int(seed), index, size, tuple(alphas), tuple(ts), tuple(levels), center)
             for index, size in enumerate(sizes)]
    logger.info(f'sampling {family!r}: {count} draws in {len(tasks)} chunks, '
                f'{workers} worker(s)')

    if workers > 1:
        with Pool(processes=min(int(workers), len(tasks))) as pool:
            results = list(tqdm(pool.imap(_chunk_statistics, tasks),
                                total=len(tasks), desc='chunks'))
    else:
        results = [_chunk_statistics(task) for task in tqdm(tasks, desc='chunks')]

    total = results[0]
    for result in results[1:]:
        total.merge(result)

    report = _summarize(family, int(seed), total, center, alphas, ts, c0s)
    logger.info(f'{family!r}: mean_h={report.mean_h:.6g} var_h={report.var_h:.6g} '
                f'(se {report.se_var:.2g})')
    return report


def _summarize(family, seed, total, center, alphas, ts, c0s):
    size = total.count
    m1, r2, r3, r4 = total.sums / size
    m2 = r2 - m1 ** 2
    m4 = r4 - 4 * m1 * r3 + 6 * m1 ** 2 * r2 - 3 * m1 ** 4
    var_h = max(m2, 0.0) * size / (size - 1)

    mgf_mean = total.mgf_sums / size
    mgf_var = np.maximum(total.mgf_squares / size - mgf_mean ** 2, 0.0)

    def frequency(hits):
        p = float(hits) / size
        return p, math.sqrt(p * (1.0 - p) / size)

    tails = []
    for k, t in enumerate(ts):
        for side, hits in ((UPPER, total.upper_counts[k]), (LOWER, total.lower_counts[k])):
            p, se = frequency(hits)
            tails.append(TailFrequency(t=t, side=side, frequency=p, se=se))

    balls = []
    for k, c0 in enumerate(c0s):
        p, se = frequency(total.small_ball_counts[k])
        balls.append(SmallBallFrequency(c0=c0, frequency=p, se=se))

    return SampleReport(
        family=family.describe(),
        seed=seed,
        count=size,
        center=center,
        mean_h=float(center + m1),
        var_h=float(var_h),
        se_mean=math.sqrt(var_h / size),
        se_var=math.sqrt(max(m4 - m2 ** 2, 0.0) / size),
        min_deviation=total.min_deviation,
        mgf_points=[MgfPoint(alpha=alpha, value=float(mgf_mean[k]),
                             se=math.sqrt(float(mgf_var[k]) / size))
                    for k, alpha in enumerate(alphas)],
        tail_freqs=tails,
        small_ball=balls,
    )

# endregion


# region VERDICTS

@dataclass(frozen=True)
class Verdict:
    """One row of the bound verification table.

    Attributes:
        check: 'entropy', 'variance', 'mgf', 'tail-upper', 'tail-lower',
            'support-floor' or 'small-ball'.
        point: Grid value the row refers to (alpha, t, c0), or None.
        observed: Empirical value.
        bound: Theoretical value it is compared with.
        tolerance: Allowed statistical slack.
        passed: Outcome.
        relation: '<=', '>=' or '=='.
    """
    check: str
    point: Optional[float]
    observed: float
    bound: float
    tolerance: float
    passed: bool
    relation: str = '<='

    def to_dict(self):
        """Returns the row as a dictionary."""
        return asdict(self)


def _compare(check, point, observed, bound, tolerance, relation):
    if relation == '==':
        passed = abs(observed - bound) <= tolerance
    elif relation == '>=':
        passed = observed >= bound - tolerance
    else:
        passed = observed <= bound + tolerance
    if not passed:
        logger.warning(f'{check} at {point}: observed {observed!r} '
                       f'vs bound {bound!r} (tolerance {tolerance!r})')
    return Verdict(check=check, point=point, observed=observed, bound=bound,
                   tolerance=tolerance, passed=passed, relation=relation)


def verify_bounds(report, params):
    """Compares a SampleReport with the closed-form bounds.

    For the Pareto family the variance and the moment generating function
    are checked for equality within three standard errors; otherwise as
    upper bounds. Exponents above half of alpha_max are not checked.

    Args:
        report: SampleReport.
        params: ConvexParams or a deviation profile for the sampled family.

    Returns:
        List of Verdict rows.
    """
    profile = as_profile(params)
    equality = report.family.get('family') == ParetoFamily.name
    exact = '==' if equality else '<='
    verdicts = [
        _compare('entropy', None, report.mean_h, report.center,
                 SE_MULTIPLIER * report.se_mean, '=='),
        _compare('variance', None, report.var_h, profile.varentropy(),
                 SE_MULTIPLIER * report.se_var, exact),
    ]

    cap = ALPHA_CAP * profile.alpha_max
    for point in report.mgf_points:
        if point.alpha > cap:
            logger.warning(f'alpha={point.alpha} above {cap}: mgf not verified')
            continue
        bound = math.exp(profile.psi(point.alpha))
        if equality:
            tolerance = SE_MULTIPLIER * point.se
        else:
            tolerance = bound * SE_MULTIPLIER * point.se / point.value
        verdicts.append(_compare('mgf', point.alpha, point.value, bound, tolerance, exact))

    for freq in report.tail_freqs:
        verdicts.append(_compare(f'tail-{freq.side}', freq.t, freq.frequency,
                                 tail_bound(profile, freq.t, freq.side),
                                 SE_MULTIPLIER * freq.se, '<='))

    verdicts.append(_compare('support-floor', None, report.min_deviation,
                             profile.support_floor,
                             FLOOR_SE_MULTIPLIER * report.se_mean, '>='))

    for point in report.small_ball:
        if profile.params is None:
            logger.warning(f'small-ball bound needs a finite beta: c0={point.c0} skipped')
            continue
        bound = small_ball(profile.params, point.c0).probability_bound
        verdicts.append(_compare('small-ball', point.c0, point.frequency, bound,
                                 SE_MULTIPLIER * point.se, '>='))

    return verdicts


def all_passed(verdicts):
    """True when every verdict row passed."""
    return all(verdict.passed for verdict in verdicts)

# endregion
