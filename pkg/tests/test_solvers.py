"""Test functions for solvers.py.
"""
import math

import pytest

from varentropy.errors import QuadratureError, SolverError
from varentropy.solvers import expand_left, quad, solve_increasing


def test_solve_increasing():
    """Tests bisection on a cubic.
    """
    root = solve_increasing(lambda x: x ** 3 - 2.0, 0.0, 2.0)

    assert root == pytest.approx(2.0 ** (1 / 3), abs=1e-14)


def test_solve_increasing_newton_polish():
    """Tests that the Newton polish keeps the residual small.
    """
    root = solve_increasing(lambda x: math.exp(x) - 3.0, -5.0, 5.0,
                            derivative=math.exp)

    assert abs(math.exp(root) - 3.0) < 1e-14


def test_solve_increasing_endpoint_root():
    """Tests that a root at the bracket end is returned as is.
    """
    assert solve_increasing(lambda x: x, 0.0, 1.0) == 0.0


def test_solve_increasing_bad_bracket():
    """Tests that an invalid bracket raises SolverError.
    """
    with pytest.raises(SolverError):
        solve_increasing(lambda x: x + 10.0, 0.0, 1.0)


def test_expand_left():
    """Tests geometric bracket expansion.
    """
    point = expand_left(lambda x: x + 100.0)

    assert point == -128.0


def test_expand_left_gives_up():
    """Tests that a missing sign change raises SolverError.
    """
    with pytest.raises(SolverError):
        expand_left(lambda x: 1.0, max_steps=5)


def test_quad_infinite_range():
    """Tests quadrature on a half line.
    """
    value = quad(lambda t: math.exp(-t), 0.0, math.inf)

    assert value == pytest.approx(1.0, abs=1e-9)


def test_quad_algebraic_weight():
    """Tests the algebraic endpoint weight.
    """
    value = quad(lambda t: 1.0, 0.0, 1.0, weight='alg', wvar=(-0.5, 0.0))

    assert value == pytest.approx(2.0, rel=1e-10)


def test_quad_divergent():
    """Tests that a divergent integral raises QuadratureError.
    """
    with pytest.raises(QuadratureError):
        quad(lambda t: 1.0 / t, 0.0, 1.0)
