"""Command-line interface: varentropy {bounds, dual, verify-moments, simulate}.

Every subcommand takes plain key=value settings, e.g.

    varentropy bounds n=2 beta=6 alpha=-1,0.25 t=1,2
    varentropy simulate family=pareto n=1 beta=2 count=1000000 seed=42

Exit status: 0 on success, 1 when a verdict or certificate fails,
2 on an input error.
"""
import argparse
import sys

from aracnid_logger import Logger

from varentropy import __version__
from varentropy import bounds, measures, moments, montecarlo
from varentropy.config import COMMANDS, FORMATS, RunConfig
from varentropy.errors import VarentropyError
from varentropy.report_data import ReportData, write_output

# initialize logging
logger = Logger(__name__).get_logger()

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def cmd_bounds(config):
    """Computes the closed-form bounds table.

    Returns:
        (ReportData, True).
    """
    report = ReportData(config)
    report.get_bounds_data()
    return report, True


def cmd_dual(config):
    """Computes both tail exponents over the t grid with a grid cross-check.

    Without a t grid, {0.5, 1, 2, 4, 8} times the standard deviation bound
    is used.
    """
    if not config.t:
        profile = bounds.DeviationProfile(config.params())
        config.t = tuple(montecarlo.default_t_grid(profile.varentropy()))
    report = ReportData(config)
    report.get_dual_data()
    return report, True


def moment_curve(config):
    """Builds the moment curve described by the settings."""
    grid = config.p or None
    if config.family == 'scalar':
        phi = measures.ScalarSConcaveFn.reference(config.s)
        curve = moments.scalar_moment_curve(phi, grid=grid)
    else:
        family = measures.family_from_config(config.family_settings())
        curve = moments.density_moment_curve(family, grid=grid)

    if config.inject == 'convex':
        logger.warning('injecting a log-convex curve (test mode)')
        curve = moments.synthetic_convex_curve(curve.grid)
    return curve


def cmd_verify_moments(config):
    """Certifies log-concavity of a moment curve.

    Returns:
        (ReportData, passed).
    """
    curve = moment_curve(config)
    certificate = moments.certify_log_concavity(curve, config.tolerance)
    report = ReportData(config)
    report.get_moments_data(curve, certificate)
    return report, certificate.passed


def cmd_simulate(config):
    """Runs a seeded simulation and verifies the bounds against it.

    Returns:
        (ReportData, True when every verdict passed).
    """
    family = measures.family_from_config(config.family_settings())
    montecarlo.sampler_for(family)
    sample = montecarlo.information_stats(
        family, config.seed, config.count,
        t_grid=config.t or None,
        alpha_grid=config.alpha or None,
        c0_grid=config.c0,
        workers=config.workers)
    verdicts = montecarlo.verify_bounds(sample, montecarlo.profile_for(family))

    report = ReportData(config)
    report.get_simulation_data(sample, verdicts)
    return report, montecarlo.all_passed(verdicts)


HANDLERS = {
    'bounds': cmd_bounds,
    'dual': cmd_dual,
    'verify-moments': cmd_verify_moments,
    'simulate': cmd_simulate,
}


def build_parser():
    """Builds the argument parser."""
    parser = argparse.ArgumentParser(
        prog='varentropy',
        description='Concentration bounds for the information content of convex measures.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=HANDLERS[command].__doc__.splitlines()[0])
        sub.add_argument('settings', nargs='*', metavar='key=value',
                         help='run settings, e.g., n=2 beta=6')
        sub.add_argument('--config', help='key=value file; wins conflicts')
        sub.add_argument('--workers', type=int, help='worker processes')
        sub.add_argument('--format', choices=FORMATS, help='output format')
        sub.add_argument('--output', help='output path (default: stdout)')

    return parser


def main(argv=None):
    """Runs the command line and returns the exit status."""
    args = build_parser().parse_args(argv)

    tokens = list(args.settings)
    for key in ('workers', 'format', 'output'):
        value = getattr(args, key)
        if value is not None:
            tokens.append(f'{key}={value}')

    try:
        config = RunConfig.from_tokens(args.command, tokens, args.config).validate()
        report, passed = HANDLERS[args.command](config)
        write_output(report.render(config.format), config.output_path())
    except VarentropyError as err:
        logger.error(f'{args.command}: {err}')
        return EXIT_INPUT

    if not passed:
        logger.warning(f'{args.command}: verification failed')
        return EXIT_FAILED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
