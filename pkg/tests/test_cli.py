"""Test functions for cli.py.
"""
import json

import pytest

from varentropy import __version__
from varentropy.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    """Runs the command line and returns (exit status, stdout lines)."""
    status = main(list(argv))
    return status, capsys.readouterr().out.splitlines()


def test_bounds(capsys):
    """Tests the bounds table for n=2, beta=6.
    """
    status, lines = run(capsys, 'bounds', 'n=2', 'beta=6', 'alpha=-1,0.5')

    assert status == EXIT_OK
    assert 'varentropy_bound,,3.69' in lines
    assert any(line.startswith('psi_c,0.5,0.95258509299') for line in lines)


def test_bounds_dual_rows(capsys):
    """Tests the tail exponents in the bounds table.
    """
    status, lines = run(capsys, 'bounds', 'n=1', 'beta=2', 't=2')

    assert status == EXIT_OK
    assert any(line.startswith('dual_upper,2,0.3068528194') for line in lines)
    assert 'dual_lower,2,inf' in lines


def test_bounds_beta_too_small(capsys):
    """Tests that beta <= n is an input error.
    """
    status, _ = run(capsys, 'bounds', 'n=2', 'beta=1.5')

    assert status == EXIT_INPUT


def test_unknown_setting(capsys):
    """Tests that an unknown key is an input error.
    """
    status, _ = run(capsys, 'bounds', 'n=1', 'beta=2', 'gamma=3')

    assert status == EXIT_INPUT


@pytest.mark.parametrize('token', ['a=', 'norm_scale=none', 'tolerance='])
def test_empty_required_setting(capsys, token):
    """Tests that an empty value for a required setting is an input error.
    """
    status, _ = run(capsys, 'simulate', 'family=pareto', 'n=1', 'beta=2', 'count=100', token)

    assert status == EXIT_INPUT


def test_bad_subcommand():
    """Tests that argparse rejects an unknown subcommand with status 2.
    """
    with pytest.raises(SystemExit) as exc_info:
        main(['integrate'])

    assert exc_info.value.code == 2


def test_version(capsys):
    """Tests the --version flag.
    """
    with pytest.raises(SystemExit):
        main(['--version'])

    assert __version__ in capsys.readouterr().out


def test_dual_default_grid(capsys):
    """Tests the dual table over the default t grid.
    """
    status, lines = run(capsys, 'dual', 'n=1', 'beta=2')
    rows = [line for line in lines if line[:1].isdigit()]

    assert status == EXIT_OK
    assert 't,side,value,alpha_star,tail_bound,grid_value' in lines
    assert len(rows) == 10
    assert rows[0].startswith('1,upper,')


def test_dual_json(tmp_path):
    """Tests the JSON rendering of the dual table.
    """
    output = tmp_path / 'dual.json'
    status = main(['dual', 'n=1', 'beta=2', 't=2', '--format', 'json',
                   '--output', str(output)])
    data = json.loads(output.read_text(encoding='utf-8'))

    assert status == EXIT_OK
    assert data['command'] == 'dual'
    assert data['dual'][1]['value'] == 'inf'
    assert data['dual'][1]['grid_value'] == 'inf'


def test_verify_moments_scalar(capsys):
    """Tests the certificate of the s = 0 reference function.
    """
    status, lines = run(capsys, 'verify-moments', 'family=scalar', 's=0')

    assert status == EXIT_OK
    assert 'p,logM,second_difference' in lines
    assert 'passed,true' in lines


def test_verify_moments_injected_failure(capsys):
    """Tests that an injected log-convex curve exits with status 1.
    """
    status, lines = run(capsys, 'verify-moments', 'family=scalar', 's=0', 'inject=convex')

    assert status == EXIT_FAILED
    assert 'passed,false' in lines


def test_verify_moments_homogeneous(tmp_path):
    """Tests the constant curve of f_(s,U).
    """
    output = tmp_path / 'moments.json'
    status = main(['verify-moments', 'family=homogeneous', 'n=2', 's=0.5', 'p=1:3:0.5',
                   '--format', 'json', '--output', str(output)])
    data = json.loads(output.read_text(encoding='utf-8'))

    assert status == EXIT_OK
    assert data['certificate']['passed'] is True
    assert len(data['curve']['rows']) == 5


def test_verify_moments_out_of_domain(capsys):
    """Tests that a p grid outside the domain is an input error.
    """
    status, _ = run(capsys, 'verify-moments', 'family=scalar', 's=-0.5', 'p=1,2,3')

    assert status == EXIT_INPUT


def test_simulate_unsupported_family(capsys):
    """Tests that simulating a family without a sampler is an input error.
    """
    status, _ = run(capsys, 'simulate', 'family=homogeneous', 's=1')

    assert status == EXIT_INPUT


def test_simulate_alpha_too_close(capsys):
    """Tests that alpha within 5% of alpha_max is refused.
    """
    status, _ = run(capsys, 'simulate', 'n=1', 'beta=2', 'alpha=0.49', 'count=1000')

    assert status == EXIT_INPUT


def test_simulate_workers_identical(tmp_path):
    """Tests that the worker count does not change the JSON report.
    """
    outputs = []
    statuses = []
    for workers in (1, 4, 8):
        output = tmp_path / f'simulate_{workers}.json'
        statuses.append(main(['simulate', 'n=2', 'beta=6', 'count=600000', 'seed=5',
                              't=1,2', 'c0=0.05', '--workers', str(workers),
                              '--format', 'json', '--output', str(output)]))
        outputs.append(output.read_bytes())

    assert len(set(statuses)) == 1
    assert outputs[1:] == outputs[:1] * 2
    assert json.loads(outputs[0])['count'] == 600000


def test_config_file(tmp_path, capsys):
    """Tests that a config file supplies and overrides settings.
    """
    path = tmp_path / 'run.cfg'
    path.write_text('n=2\nbeta=6\n', encoding='utf-8')
    status, lines = run(capsys, 'bounds', 'beta=3', '--config', str(path))

    assert status == EXIT_OK
    assert 'varentropy_bound,,3.69' in lines


def test_output_dir(tmp_path, monkeypatch):
    """Tests relative output paths under VARENTROPY_OUTPUT_DIR.
    """
    monkeypatch.setenv('VARENTROPY_OUTPUT_DIR', str(tmp_path))
    status = main(['bounds', 'n=1', 'beta=2', '--output', 'bounds.csv'])

    assert status == EXIT_OK
    assert (tmp_path / 'bounds.csv').read_text(encoding='utf-8').startswith('quantity')


@pytest.mark.slow
def test_simulate_pareto(tmp_path):
    """Tests that a 10^6-draw Pareto run passes every verdict.
    """
    output = tmp_path / 'pareto.json'
    status = main(['simulate', 'family=pareto', 'n=1', 'beta=2', 'count=1000000',
                   'seed=42', 'alpha=-1,-0.5,0.1', '--workers', '2',
                   '--format', 'json', '--output', str(output)])
    data = json.loads(output.read_text(encoding='utf-8'))

    assert status == EXIT_OK
    assert data['passed'] is True
    assert data['statistics']['var_h'] == pytest.approx(4.0, rel=0.05)
