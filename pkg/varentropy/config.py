"""Run configuration for the command-line tools.

A run is described by plain key=value settings. They come from built-in
defaults, then command-line tokens, then an optional config file; the file
wins conflicts.

Environment Variables:
    VARENTROPY_OUTPUT_DIR: Directory for relative output paths.
"""
from dataclasses import dataclass, fields, replace
import math
import os
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from aracnid_logger import Logger

from varentropy.errors import ConfigError, DomainError
from varentropy.measures import ConvexParams, parse_norm_order

# initialize logging
logger = Logger(__name__).get_logger()

COMMANDS = ('bounds', 'dual', 'verify-moments', 'simulate')
FAMILIES = ('pareto', 'student', 'gaussian', 'homogeneous', 'scalar')
FORMATS = ('csv', 'json')
INJECTIONS = ('none', 'convex')
GRID_KEYS = ('alpha', 't', 'p', 'c0')
OPTIONAL_KEYS = ('beta', 's', 'max_density', 'trace_sigma', 'fisher_info')
OUTPUT_DIR_VAR = 'VARENTROPY_OUTPUT_DIR'


@dataclass
class RunConfig:
    """Canonical description of one command-line run.

    Attributes:
        command: Subcommand name.
        family: Density family name.
        n: Dimension.
        beta: Concavity exponent, required by the -1/beta-concave families.
        a: Pareto scale.
        s: Concavity degree for the homogeneous and scalar families.
        norm_q: Norm order of U, 1, 2 or inf.
        norm_scale: Multiplier of the norm in U.
        alpha: Grid of MGF exponents.
        t: Grid of tail deviations.
        p: Grid of moment exponents.
        c0: Grid of small-ball level constants.
        max_density: ||f||_inf for the entropy bound.
        trace_sigma: Trace of the covariance for the Fisher bound.
        fisher_info: Fisher information for the Fisher bound.
        seed: Root seed of a simulation.
        count: Number of draws.
        workers: Worker processes (never changes results).
        output: Output path, '-' or None for stdout.
        format: 'csv' or 'json'.
        inject: 'convex' replaces the moment curve by a log-convex one.
        tolerance: Log-concavity tolerance.
    """
    command: str = 'bounds'
    family: str = 'pareto'
    n: int = 1
    beta: Optional[float] = None
    a: float = 1.0
    s: Optional[float] = None
    norm_q: float = 2.0
    norm_scale: float = 1.0
    alpha: Tuple[float, ...] = ()
    t: Tuple[float, ...] = ()
    p: Tuple[float, ...] = ()
    c0: Tuple[float, ...] = ()
    max_density: Optional[float] = None
    trace_sigma: Optional[float] = None
    fisher_info: Optional[float] = None
    seed: int = 0
    count: int = 1000000
    workers: int = 1
    output: Optional[str] = None
    format: str = 'csv'
    inject: str = 'none'
    tolerance: float = 1e-7

    # region PARSING

    @classmethod
    def keys(cls):
        """Returns the recognized setting names."""
        return [f.name for f in fields(cls)]

    @classmethod
    def from_tokens(cls, command, tokens, config_path=None):
        """Builds a config from key=value tokens and an optional file.

        A `config=path` token is treated like config_path.

        Args:
            command: Subcommand name.
            tokens: Sequence of 'key=value' strings.
            config_path: Optional path of a key=value config file.

        Returns:
            RunConfig.
        """
        settings = parse_pairs(tokens, source='command line')
        config_path = settings.pop('config', config_path)
        config = cls(command=command).update(settings)

        if config_path:
            path = Path(config_path)
            try:
                text = path.read_text(encoding='utf-8')
            except OSError as err:
                raise ConfigError(f'cannot read config file {path}: {err}') from err
            from_file = parse_pairs(text.splitlines(), source=str(path))
            from_file.pop('config', None)
            for key, value in from_file.items():
                if key in settings and settings[key] != value:
                    logger.warning(f'config file {path} overrides {key}: '
                                   f'{settings[key]} -> {value}')
            config = config.update(from_file)

        return config

    def update(self, settings):
        """Returns a copy with the given raw string settings applied."""
        values = {key: _convert(key, raw) for key, raw in settings.items()}
        return replace(self, **values)

    def to_text(self):
        """Renders the canonical text form: sorted key=value lines."""
        lines = []
        for key in sorted(self.keys()):
            value = getattr(self, key)
            if value is None or value == ():
                continue
            lines.append(f'{key}={_format(value)}')
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text):
        """Parses the canonical text form written by to_text."""
        settings = parse_pairs(text.splitlines(), source='text')
        command = settings.pop('command', 'bounds')
        return cls(command=command).update(settings)

    # endregion

    # region VALIDATION

    def validate(self):
        """Checks every numeric constraint before any computation.

        Raises:
            ConfigError: with an actionable message.
        """
        if self.command not in COMMANDS:
            raise ConfigError(f'command must be one of {COMMANDS}, got {self.command!r}')
        if self.family not in FAMILIES:
            raise ConfigError(f'family must be one of {FAMILIES}, got {self.family!r}')
        if self.format not in FORMATS:
            raise ConfigError(f'format must be one of {FORMATS}, got {self.format!r}')
        if self.inject not in INJECTIONS:
            raise ConfigError(f'inject must be one of {INJECTIONS}, got {self.inject!r}')
        if self.n < 1:
            raise ConfigError(f'n must be a positive integer, got {self.n}')
        if self.count < 2:
            raise ConfigError(f'count must be at least 2, got {self.count}')
        if self.workers < 1:
            raise ConfigError(f'workers must be at least 1, got {self.workers}')
        if self.seed < 0:
            raise ConfigError(f'seed must be non-negative, got {self.seed}')
        if not self.tolerance > 0:
            raise ConfigError(f'tolerance must be positive, got {self.tolerance}')
        if not self.a > 0:
            raise ConfigError(f'a must be positive, got {self.a}')
        if not self.norm_scale > 0:
            raise ConfigError(f'norm_scale must be positive, got {self.norm_scale}')
        if any(not t > 0 for t in self.t):
            raise ConfigError(f't values must be positive, got {self.t}')
        if any(not 0 < c0 < 1 for c0 in self.c0):
            raise ConfigError(f'c0 values must lie in (0, 1), got {self.c0}')
        for key in ('max_density', 'trace_sigma'):
            value = getattr(self, key)
            if value is not None and not value > 0:
                raise ConfigError(f'{key} must be positive, got {value}')
        if self.fisher_info is not None and not self.fisher_info >= 0:
            raise ConfigError(f'fisher_info must be nonnegative, got {self.fisher_info}')

        if self.needs_beta():
            params = self.params()
            for alpha in self.alpha:
                if not alpha < params.alpha_max:
                    raise ConfigError(
                        f'alpha={alpha} must be below 1 - n/beta = {params.alpha_max}')
        if self.family in ('homogeneous', 'scalar') and self.s is None:
            raise ConfigError(f'family {self.family} needs s')
        if self.family == 'homogeneous' and not 1.0 + self.n * self.s > 0:
            raise ConfigError(f'homogeneous family needs 1 + n*s > 0 '
                              f'(n={self.n}, s={self.s})')
        return self

    def needs_beta(self):
        """True when the run is about a -1/beta-concave density."""
        return self.command in ('bounds', 'dual') or self.family in ('pareto', 'student')

    def params(self):
        """Returns ConvexParams for n and beta.

        Raises:
            ConfigError: if beta is missing or not above n.
        """
        if self.beta is None:
            raise ConfigError(f'{self.command} needs beta (e.g., beta={self.n + 1})')
        try:
            return ConvexParams(self.n, self.beta)
        except DomainError as err:
            raise ConfigError(str(err)) from err

    def family_settings(self):
        """Returns the mapping understood by measures.family_from_config."""
        return {'family': self.family, 'n': self.n, 'beta': self.beta, 'a': self.a,
                's': self.s, 'norm_q': self.norm_q, 'norm_scale': self.norm_scale}

    def output_path(self):
        """Resolves the output path; None means stdout.

        Relative paths are placed under VARENTROPY_OUTPUT_DIR when it is set.
        """
        if self.output in (None, '', '-'):
            return None
        path = Path(self.output)
        base = os.environ.get(OUTPUT_DIR_VAR)
        if base and not path.is_absolute():
            path = Path(base) / path
        return path

    # endregion


def parse_pairs(lines, source='command line'):
    """Parses key=value lines into a dict of raw strings.

    Blank lines and '#' comments are skipped; unknown keys are rejected.
    """
    allowed = set(RunConfig.keys()) | {'config'}
    settings = {}
    for line in lines:
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigError(f'{source}: expected key=value, got {line!r}')
        if key not in allowed:
            raise ConfigError(f'{source}: unknown setting {key!r}')
        settings[key] = value.strip()
    return settings


def parse_grid(text):
    """Parses a comma list or a start:stop:step range (stop included)."""
    text = text.strip()
    if not text:
        return ()
    if ':' in text:
        try:
            start, stop, step = (float(part) for part in text.split(':'))
        except ValueError as err:
            raise ConfigError(f'expected start:stop:step, got {text!r}') from err
        if not step > 0 or stop < start:
            raise ConfigError(f'empty or invalid range {text!r}')
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(float(v) for v in start + step * np.arange(count))
    try:
        return tuple(float(part) for part in text.split(','))
    except ValueError as err:
        raise ConfigError(f'expected a comma-separated list of numbers, got {text!r}') from err


def _convert(key, raw):
    try:
        if key in GRID_KEYS:
            return parse_grid(raw)
        if key in ('n', 'seed', 'count', 'workers'):
            value = float(raw)
            if value != int(value):
                raise ConfigError(f'{key} must be an integer, got {raw!r}')
            return int(value)
        if key == 'norm_q':
            return parse_norm_order(raw)
        if key in ('command', 'family', 'format', 'inject'):
            return raw.lower()
        if key == 'output':
            return raw or None
        if raw.lower() in ('', 'none'):
            if key not in OPTIONAL_KEYS:
                raise ConfigError(f'{key} needs a value, got {raw!r}')
            return None
        return float(raw)
    except (ValueError, DomainError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f'invalid value for {key}: {raw!r}') from err


def _format(value):
    if isinstance(value, tuple):
        return ','.join(_format(v) for v in value)
    if isinstance(value, float):
        return 'inf' if math.isinf(value) else repr(value)
    return str(value)
