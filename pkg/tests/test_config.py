"""Test functions for config.py.
"""
import math

import pytest

from varentropy.config import OUTPUT_DIR_VAR, RunConfig, parse_grid, parse_pairs
from varentropy.errors import ConfigError
from varentropy.measures import ConvexParams


@pytest.fixture(name='config_file')
def fixture_config_file(tmp_path):
    """Pytest fixture for a config file setting beta=6 and a t grid.
    """
    path = tmp_path / 'run.cfg'
    path.write_text('# bounds for the planar case\nbeta = 6\nt=1,2\n\n', encoding='utf-8')
    return path


def test_defaults():
    """Tests the built-in defaults.
    """
    config = RunConfig()

    assert config.command == 'bounds'
    assert config.family == 'pareto'
    assert config.count == 1000000
    assert config.workers == 1
    assert config.format == 'csv'


def test_from_tokens():
    """Tests parsing command-line tokens.
    """
    config = RunConfig.from_tokens(
        'bounds', ['n=2', 'beta=6', 'alpha=-1,0.25', 't=0.5:1.5:0.5', 'norm_q=inf'])

    assert config.n == 2
    assert config.beta == 6.0
    assert config.alpha == (-1.0, 0.25)
    assert config.t == (0.5, 1.0, 1.5)
    assert math.isinf(config.norm_q)
    assert config.params() == ConvexParams(2, 6.0)


def test_config_file_wins(config_file):
    """Tests that the config file overrides command-line tokens.
    """
    config = RunConfig.from_tokens('dual', ['n=2', 'beta=3'], config_path=str(config_file))

    assert config.beta == 6.0
    assert config.t == (1.0, 2.0)
    assert config.n == 2


def test_config_token(config_file):
    """Tests the config=path token.
    """
    config = RunConfig.from_tokens('dual', [f'config={config_file}'])

    assert config.beta == 6.0


def test_config_file_missing(tmp_path):
    """Tests that an unreadable config file raises ConfigError.
    """
    with pytest.raises(ConfigError, match='cannot read'):
        RunConfig.from_tokens('bounds', [], config_path=str(tmp_path / 'missing.cfg'))


def test_parse_pairs_errors():
    """Tests malformed and unknown settings.
    """
    with pytest.raises(ConfigError, match='unknown setting'):
        parse_pairs(['gamma=2'])
    with pytest.raises(ConfigError, match='expected key=value'):
        parse_pairs(['beta'])


def test_parse_grid():
    """Tests lists and inclusive ranges.
    """
    assert parse_grid('1, 2,4') == (1.0, 2.0, 4.0)
    assert parse_grid('0:1:0.25') == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert parse_grid('') == ()
    with pytest.raises(ConfigError):
        parse_grid('1:0:0.5')
    with pytest.raises(ConfigError):
        parse_grid('a,b')


def test_integer_settings():
    """Tests that integer settings refuse fractions.
    """
    assert RunConfig().update({'count': '1e4'}).count == 10000
    with pytest.raises(ConfigError):
        RunConfig().update({'n': '1.5'})
    with pytest.raises(ConfigError):
        RunConfig().update({'beta': 'six'})


def test_text_round_trip():
    """Tests that the canonical text form parses back to the same config.
    """
    config = RunConfig.from_tokens(
        'simulate', ['family=student', 'n=2', 'beta=5', 'alpha=-1,0.1', 'seed=7'])
    text = config.to_text()

    assert 'beta=5.0' in text.splitlines()
    assert 'alpha=-1.0,0.1' in text.splitlines()
    assert RunConfig.from_text(text) == config


def test_validate_ok():
    """Tests a valid configuration.
    """
    config = RunConfig.from_tokens('bounds', ['n=2', 'beta=6', 'alpha=0.5'])

    assert config.validate() is config


@pytest.mark.parametrize('tokens, message', [
    (['n=2', 'beta=1.5'], 'beta must exceed n'),
    (['n=1'], 'needs beta'),
    (['n=1', 'beta=2', 'alpha=0.5'], 'alpha=0.5'),
    (['n=1', 'beta=2', 't=0,1'], 't values'),
    (['n=1', 'beta=2', 'c0=1.5'], 'c0 values'),
    (['n=1', 'beta=2', 'format=xml'], 'format'),
    (['n=0', 'beta=2'], 'n must be'),
    (['n=1', 'beta=2', 'max_density=0'], 'max_density'),
])
def test_validate_errors(tokens, message):
    """Tests that invalid settings raise ConfigError before any computation.
    """
    with pytest.raises(ConfigError, match=message):
        RunConfig.from_tokens('bounds', tokens).validate()


def test_validate_family_settings():
    """Tests the homogeneous and scalar requirements.
    """
    with pytest.raises(ConfigError, match='needs s'):
        RunConfig.from_tokens('verify-moments', ['family=scalar']).validate()
    with pytest.raises(ConfigError, match='1 \\+ n\\*s'):
        RunConfig.from_tokens('verify-moments',
                              ['family=homogeneous', 'n=2', 's=-0.5']).validate()
    RunConfig.from_tokens('verify-moments', ['family=gaussian', 'n=2']).validate()


def test_output_path(monkeypatch, tmp_path):
    """Tests stdout and the output directory variable.
    """
    monkeypatch.delenv(OUTPUT_DIR_VAR, raising=False)
    assert RunConfig().output_path() is None
    assert RunConfig(output='-').output_path() is None

    monkeypatch.setenv(OUTPUT_DIR_VAR, str(tmp_path))
    assert RunConfig(output='report.csv').output_path() == tmp_path / 'report.csv'
    assert RunConfig(output='/tmp/report.csv').output_path().as_posix() == '/tmp/report.csv'


@pytest.mark.parametrize('token', ['a=', 'a=none', 'norm_scale=', 'tolerance=None'])
def test_required_value(token):
    """Tests that a setting with a default cannot be cleared.
    """
    with pytest.raises(ConfigError, match='needs a value'):
        RunConfig.from_tokens('simulate', ['n=1', 'beta=2', token])


def test_optional_value_cleared():
    """Tests that an optional setting can be cleared with none.
    """
    config = RunConfig.from_tokens('bounds', ['n=1', 'beta=2', 'max_density=none'])

    assert config.max_density is None
    assert 'overrides' not in RunConfig.keys()
