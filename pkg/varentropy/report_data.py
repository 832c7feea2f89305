"""Report data assembled for the command-line tools.

Floats in CSV output carry 12 significant digits; JSON numbers are
written unrounded and an infinite exponent is the string 'inf'.
"""
import csv
import io
import json
import math

from aracnid_logger import Logger

from varentropy import bounds, legendre
from varentropy.legendre import INFINITE, SIDES

# initialize logging
logger = Logger(__name__).get_logger()

BOUNDS_COLUMNS = ['quantity', 'point', 'value']
DUAL_COLUMNS = ['t', 'side', 'value', 'alpha_star', 'tail_bound', 'grid_value']
VERDICT_COLUMNS = ['check', 'point', 'relation', 'observed', 'bound', 'tolerance', 'passed']


class ReportData():
    """ReportData class.

    Collects the numbers of one run into a structured dictionary that can
    be rendered as CSV or JSON.

    Attributes:
        config: RunConfig of the run.
        data: The report dictionary.
    """
    def __init__(self, config) -> None:
        """Initializes the ReportData class.

        Args:
            config: A validated RunConfig.
        """
        self.config = config

        # initialize data
        self.data = {}

    def init_data(self):
        """Initialize the report data.

        Returns:
            A structured data dictionary holding the run settings.
        """
        self.data = {
            'command': self.config.command,
            'config': self.config.to_text().splitlines(),
        }
        return self.data

    # region BOUNDS

    def get_bounds_data(self):
        """Computes every closed-form bound the settings allow.
        """
        self.init_data()
        self.set_params_data()
        self.set_psi_data()
        self.set_varentropy_data()
        self.set_entropy_data()
        self.set_fisher_data()
        self.set_small_ball_data()
        self.set_dual_data(check=False)

        return self.data

    def set_params_data(self):
        """Sets n, beta, kappa and the domain of the deviation function."""
        params = self.config.params()
        profile = bounds.DeviationProfile(params)
        self.data['params'] = {
            'n': params.n,
            'beta': params.beta,
            'kappa': params.kappa,
            'alpha_max': params.alpha_max,
            'lower_slope': profile.lower_slope,
        }

    def set_psi_data(self):
        """Sets psi_c over the alpha grid."""
        params = self.config.params()
        self.data['psi'] = [
            {'alpha': alpha, 'psi': bounds.psi_c(params, alpha),
             'mgf_bound': math.exp(bounds.psi_c(params, alpha))}
            for alpha in self.config.alpha
        ]

    def set_varentropy_data(self):
        """Sets the sharp varentropy bound."""
        self.data['varentropy_bound'] = bounds.varentropy_bound(self.config.params())

    def set_entropy_data(self):
        """Sets the entropy upper bound when max_density is given."""
        if self.config.max_density is None:
            return
        self.data['entropy_upper_bound'] = bounds.entropy_upper_bound(
            self.config.params(), self.config.max_density)

    def set_fisher_data(self):
        """Sets the covariance-Fisher varentropy bound when both inputs are given."""
        if self.config.trace_sigma is None or self.config.fisher_info is None:
            return
        self.data['fisher_varentropy_bound'] = bounds.fisher_varentropy_bound(
            self.config.params(), self.config.trace_sigma, self.config.fisher_info)

    def set_small_ball_data(self):
        """Sets the small-ball constants for each c0."""
        params = self.config.params()
        rows = []
        for c0 in self.config.c0:
            result = bounds.small_ball(params, c0)
            rows.append({
                'c0': c0,
                'alpha_star': result.alpha_star,
                'c1': result.c1,
                'log_c1': result.log_c1,
                'probability_bound': result.probability_bound,
                'residual': result.residual,
            })
        self.data['small_ball'] = rows

    def set_dual_data(self, check=True):
        """Sets both tail exponents over the t grid.

        Args:
            check: If True, adds the dense-grid value next to the solver value.
        """
        params = self.config.params()
        rows = []
        for t in self.config.t:
            for side in SIDES:
                row = legendre.tail_exponent(params, t, side).to_dict()
                if check:
                    oracle = legendre.dual_by_grid(params, t, side)
                    row['grid_value'] = INFINITE if oracle.value is None else oracle.value
                rows.append(row)
        self.data['dual'] = rows

    def get_dual_data(self):
        """Computes the dual table with its grid cross-check."""
        self.init_data()
        self.set_params_data()
        self.set_dual_data(check=True)

        return self.data

    # endregion

    # region MOMENTS

    def get_moments_data(self, curve, certificate):
        """Collects a moment curve and its certificate.

        Args:
            curve: MomentCurve.
            certificate: LogConcavityCertificate.
        """
        self.init_data()
        self.data['curve'] = {
            'label': curve.label,
            'regime': curve.regime,
            'normalizer': curve.normalizer,
            's': curve.s,
            'rows': [{'p': p, 'logM': value, 'second_difference': diff}
                     for p, value, diff in curve.to_rows()],
        }
        self.data['certificate'] = certificate.to_dict()

        return self.data

    # endregion

    # region SIMULATION

    def get_simulation_data(self, report, verdicts):
        """Collects a SampleReport and its verdict rows.

        The run settings are left out so that the worker count cannot
        change the document.
        """
        self.data = report.to_dict()
        self.data['verdicts'] = [verdict.to_dict() for verdict in verdicts]
        self.data['passed'] = all(verdict.passed for verdict in verdicts)

        return self.data

    # endregion

    # region RENDERING

    def to_json(self):
        """Renders the report as JSON."""
        return json.dumps(self.data, indent=2, sort_keys=True) + '\n'

    def to_csv(self):
        """Renders the report as CSV according to its command."""
        if 'verdicts' in self.data:
            return render_csv(VERDICT_COLUMNS, [
                [row[column] for column in VERDICT_COLUMNS] for row in self.data['verdicts']])
        if self.data.get('command') == 'dual':
            return render_csv(DUAL_COLUMNS, [
                [row.get(column, '') for column in DUAL_COLUMNS] for row in self.data['dual']])
        if 'curve' in self.data:
            curve = render_csv(['p', 'logM', 'second_difference'], [
                [row['p'], row['logM'], row['second_difference']]
                for row in self.data['curve']['rows']])
            summary = render_csv(['key', 'value'], list(self.data['certificate'].items()))
            return curve + '\n' + summary
        return render_csv(BOUNDS_COLUMNS, self.bounds_rows())

    def bounds_rows(self):
        """Flattens the bounds report into (quantity, point, value) rows."""
        rows = [[key, '', value] for key, value in self.data.get('params', {}).items()]
        for row in self.data.get('psi', []):
            rows.append(['psi_c', row['alpha'], row['psi']])
            rows.append(['mgf_bound', row['alpha'], row['mgf_bound']])
        for key in ('varentropy_bound', 'entropy_upper_bound', 'fisher_varentropy_bound'):
            if key in self.data:
                rows.append([key, '', self.data[key]])
        for row in self.data.get('small_ball', []):
            for key in ('alpha_star', 'c1', 'log_c1', 'probability_bound'):
                rows.append([f'small_ball_{key}', row['c0'], row[key]])
        for row in self.data.get('dual', []):
            rows.append([f'dual_{row["side"]}', row['t'], row['value']])
        return rows

    def render(self, fmt):
        """Renders the report in 'csv' or 'json'."""
        return self.to_json() if fmt == 'json' else self.to_csv()

    # endregion


def format_value(value):
    """Formats one CSV cell; floats get 12 significant digits."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return 'inf' if math.isinf(value) else f'{value:.12g}'
    return str(value)


def render_csv(header, rows):
    """Renders rows under a header as CSV text."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def write_output(text, path=None):
    """Writes text to a file, or to stdout when path is None."""
    if path is None:
        print(text, end='')
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8')
    logger.info(f'report written to {path}')
