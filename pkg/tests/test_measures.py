"""Test functions for measures.py.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from varentropy.bounds import entropy_upper_bound, psi_c
from varentropy.errors import ConfigError, DomainError, SupportError
from varentropy.measures import (
    ConvexParams, DensityFamily, GaussianFamily, HomogeneousFamily, ParetoFamily,
    RadialStudentFamily, ScalarSConcaveFn, family_from_config, integrate_density,
    unit_ball_volume)
from varentropy.montecarlo import sample_pareto


@pytest.fixture(name='pareto')
def fixture_pareto():
    """Pytest fixture for the Pareto family with n=1, beta=2, a=1.
    """
    return ParetoFamily(ConvexParams(1, 2.0))


@pytest.fixture(name='pareto2')
def fixture_pareto2():
    """Pytest fixture for the Pareto family with n=2, beta=6, a=1.
    """
    return ParetoFamily(ConvexParams(2, 6.0))


def test_convex_params():
    """Tests the derived quantities of ConvexParams.
    """
    params = ConvexParams(1, 2)

    assert params.kappa == -1.0
    assert params.alpha_max == 0.5
    assert ConvexParams.from_kappa(1, -1.0) == params


def test_convex_params_beta_too_small():
    """Tests that beta <= n is rejected.
    """
    with pytest.raises(DomainError, match='beta must exceed n'):
        ConvexParams(2, 1.5)


def test_convex_params_require_covariance():
    """Tests the finite-covariance precondition.
    """
    with pytest.raises(DomainError):
        ConvexParams(1, 3.0).require_covariance()
    ConvexParams(1, 3.5).require_covariance()


def test_unit_ball_volume():
    """Tests the unit ball volumes for the supported norms.
    """
    assert unit_ball_volume(2, 2.0) == pytest.approx(math.pi)
    assert unit_ball_volume(3, 1.0) == pytest.approx(8.0 / 6.0)
    assert unit_ball_volume(3, math.inf) == 8.0


def test_pareto_log_density(pareto):
    """Tests log f at the origin and outside the orthant.
    """
    assert pareto.log_density([0.0]) == pytest.approx(0.0, abs=1e-14)
    assert pareto.log_density([-1.0]) == -math.inf


def test_pareto_information_content(pareto, pareto2):
    """Tests the information content -log f(x).
    """
    assert pareto.information_content([math.e - 1.0]) == pytest.approx(2.0, rel=1e-14)
    assert pareto.information_content([0.0]) == pytest.approx(0.0, abs=1e-14)
    assert pareto2.information_content([0.0, 0.0]) == pytest.approx(
        -math.log(pareto2.max_density()), rel=1e-14)


def test_information_content_outside_support(pareto):
    """Tests that a point outside the support raises SupportError.
    """
    with pytest.raises(SupportError):
        pareto.information_content([-1.0])


def test_dimension_mismatch(pareto2):
    """Tests that a point of the wrong dimension is rejected.
    """
    with pytest.raises(DomainError):
        pareto2.log_density([1.0, 2.0, 3.0])


def test_vectorized_information_content(pareto2):
    """Tests evaluation on an array of points.
    """
    points = np.array([[0.0, 0.0], [1.0, 2.0], [0.5, 0.5]])
    values = pareto2.information_content(points)

    assert values.shape == (3,)
    assert values[1] == pytest.approx(6.0 * math.log(4.0) + pareto2.log_normalizer())


def test_pareto_max_density(pareto):
    """Tests the maximal density value.
    """
    assert pareto.max_density() == pytest.approx(1.0, rel=1e-14)


def test_pareto_max_density_scale():
    """Tests that the maximal density is f(0) and scales as a^-n.
    """
    params = ConvexParams(2, 5.0)
    unit = ParetoFamily(params)
    for a in (0.5, 3.0, 10.0):
        family = ParetoFamily(params, a=a)

        assert family.max_density() == pytest.approx(
            math.exp(family.log_density([0.0, 0.0])), rel=1e-12)
        assert family.max_density() == pytest.approx(
            a ** -params.n * unit.max_density(), rel=1e-12)


def test_pareto_normalizer_by_quadrature(pareto2):
    """Tests the closed-form normalizer against level quadrature.
    """
    mass = pareto2.level_integral(lambda r: math.exp(pareto2.log_profile(r)))

    assert math.log(mass) == pytest.approx(pareto2.log_normalizer(), abs=1e-9)


def test_pareto_entropy(pareto):
    """Tests the Pareto entropy, closed form and quadrature.
    """
    assert pareto.exact_entropy() == pytest.approx(2.0, rel=1e-14)
    assert DensityFamily.exact_entropy(pareto) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize('n', [1, 2, 3])
@pytest.mark.parametrize('gap', [1.5, 4.0])
def test_pareto_entropy_bound_equality(n, gap):
    """Tests that the Pareto entropy attains the entropy upper bound.
    """
    params = ConvexParams(n, n + gap)
    family = ParetoFamily(params)
    bound = entropy_upper_bound(params, family.max_density())

    assert family.exact_entropy() == pytest.approx(bound, abs=1e-9)
    assert DensityFamily.exact_entropy(family) == pytest.approx(bound, abs=1e-7)


@pytest.mark.parametrize('n, beta', [(1, 2.0), (2, 5.0), (3, 4.5)])
def test_student_entropy_strictly_below_bound(n, beta):
    """Tests the Student-type entropy and its strict inequality.
    """
    params = ConvexParams(n, beta)
    family = RadialStudentFamily(params)
    entropy = family.exact_entropy()

    assert DensityFamily.exact_entropy(family) == pytest.approx(entropy, abs=1e-7)
    assert entropy < entropy_upper_bound(params, family.max_density()) - 1e-6


def test_student_power_integral():
    """Tests the Student-type closed form of integral (1 + x^2)^-p.
    """
    family = RadialStudentFamily(ConvexParams(1, 2.0))
    for p in (0.4, 1.0, 2.5):
        shape = family.power_integral(p) * math.exp(p * family.log_normalizer())
        q = p * family.params.beta
        expected = math.exp(0.5 * math.log(math.pi) + gammaln(q - 0.5) - gammaln(q))

        assert shape == pytest.approx(expected, rel=1e-12)
        assert DensityFamily.power_integral(family, p) == pytest.approx(
            family.power_integral(p), rel=1e-8)


def test_pareto_power_integral(pareto2):
    """Tests the Pareto closed form against level quadrature.
    """
    assert DensityFamily.power_integral(pareto2, 1.5) == pytest.approx(
        pareto2.power_integral(1.5), rel=1e-8)
    assert pareto2.power_integral(1.0) == pytest.approx(1.0, rel=1e-12)


def test_pareto_power_integral_domain(pareto2):
    """Tests that f^p is rejected when it is not integrable.
    """
    with pytest.raises(DomainError):
        pareto2.power_integral(1.0 / 3.0)


def test_pareto_varentropy(pareto, pareto2):
    """Tests the exact varentropy against the sharp bound.
    """
    assert pareto.exact_varentropy() == pytest.approx(4.0, rel=1e-6)
    assert pareto2.exact_varentropy() == pytest.approx(3.69, rel=1e-6)


def test_pareto_centered_log_mgf(pareto, pareto2):
    """Tests that the Pareto moment generating function equals psi_c.
    """
    for alpha in (-1.0, -0.5, 0.25):
        assert pareto.centered_log_mgf(alpha) == pytest.approx(
            -2.0 * alpha - math.log(1.0 - 2.0 * alpha), abs=1e-12)
    for alpha in (-2.0, 0.3, 0.6):
        assert pareto2.centered_log_mgf(alpha) == pytest.approx(
            psi_c(pareto2.params, alpha), abs=1e-10)
    assert pareto.centered_log_mgf(0.0) == 0.0


def test_gaussian_family():
    """Tests the Gaussian entropy, varentropy and moment generating function.
    """
    family = GaussianFamily(1)

    assert family.exact_entropy() == pytest.approx(0.5 * (1.0 + math.log(2.0 * math.pi)))
    assert family.exact_varentropy() == pytest.approx(0.5, rel=1e-7)
    assert family.centered_log_mgf(0.3) == pytest.approx(
        -0.5 * math.log(0.7) - 0.15, abs=1e-12)
    assert family.params is None


def test_homogeneous_shape():
    """Tests the unnormalized f_(0,U) at the origin.
    """
    family = HomogeneousFamily(0.0, 1)

    assert family.log_density([0.0], normalized=False) == 0.0


def test_homogeneous_entropy():
    """Tests the entropy of the two-sided exponential density.
    """
    family = HomogeneousFamily(0.0, 1)

    assert family.exact_entropy() == pytest.approx(1.0 + math.log(2.0), rel=1e-9)


def test_homogeneous_triangle():
    """Tests the peak and the power integrals of (1 - |x|)_+.
    """
    family = HomogeneousFamily(1.0, 1)

    assert family.max_density() == pytest.approx(1.0)
    assert family.shape_power_integral(3.0) == pytest.approx(0.5)
    assert family.log_density([1.5]) == -math.inf


def test_homogeneous_not_integrable():
    """Tests that 1 + n*s <= 0 is rejected.
    """
    with pytest.raises(DomainError):
        HomogeneousFamily(-0.5, 2)


@settings(max_examples=50, deadline=None)
@given(x=st.lists(st.floats(-10.0, 10.0), min_size=3, max_size=3),
       t=st.floats(0.01, 100.0),
       q=st.sampled_from([1.0, 2.0, math.inf]))
def test_homogeneity_of_u(x, t, q):
    """Tests U(t x) = t U(x).
    """
    family = HomogeneousFamily(0.5, 3, q=q, scale=1.7)
    x = np.array(x)

    assert family.u(t * x) == pytest.approx(t * family.u(x), rel=1e-12, abs=1e-12)


def test_integrate_density():
    """Tests direct tensor quadrature of the total mass.
    """
    assert integrate_density(GaussianFamily(2)) == pytest.approx(1.0, abs=1e-6)
    assert integrate_density(ParetoFamily(ConvexParams(1, 3.0))) == pytest.approx(
        1.0, abs=1e-8)


@pytest.mark.parametrize('family', [
    ParetoFamily(ConvexParams(1, 2.0)),
    ParetoFamily(ConvexParams(2, 6.0), a=10.0),
    RadialStudentFamily(ConvexParams(1, 2.0)),
    RadialStudentFamily(ConvexParams(3, 4.5)),
    GaussianFamily(2),
    HomogeneousFamily(0.0, 1),
    HomogeneousFamily(1.0, 1),
    HomogeneousFamily(0.5, 2, q=math.inf, scale=2.0),
    HomogeneousFamily(0.5, 3, q=1.0),
    HomogeneousFamily(-0.2, 2, q=1.0),
], ids=repr)
def test_max_density_dominates(family):
    """Tests f(x) <= ||f||_inf at random points, with equality at the mode.
    """
    rng = np.random.default_rng(11)
    points = rng.standard_cauchy((5000, family.n))
    points = np.concatenate([points, np.abs(points)])
    log_max = math.log(family.max_density())

    assert np.all(family.log_density(points) <= log_max + 1e-12)
    assert family.log_density(np.zeros(family.n)) == pytest.approx(log_max, abs=1e-12)


def test_pareto_deviation_scale_invariance():
    """Tests that h~ - h does not depend on the Pareto scale a.
    """
    params = ConvexParams(2, 6.0)
    unit = ParetoFamily(params)
    scaled = ParetoFamily(params, a=10.0)
    deviations = [family.information_content(sample_pareto(family, 3, 1000))
                  - family.exact_entropy() for family in (unit, scaled)]

    np.testing.assert_allclose(deviations[1], deviations[0], atol=1e-9)
    assert scaled.exact_varentropy() == pytest.approx(
        unit.exact_varentropy(), rel=1e-6)
    for alpha in (-1.0, 0.3):
        assert scaled.centered_log_mgf(alpha) == pytest.approx(
            unit.centered_log_mgf(alpha), abs=1e-10)


@pytest.mark.parametrize('family', [
    RadialStudentFamily(ConvexParams(1, 2.0)),
    RadialStudentFamily(ConvexParams(2, 5.0)),
    HomogeneousFamily(0.0, 1),
    HomogeneousFamily(1.0, 1),
    HomogeneousFamily(0.5, 2, q=1.0, scale=2.0),
    HomogeneousFamily(0.5, 2, q=2.0, scale=2.0),
    HomogeneousFamily(0.5, 2, q=math.inf, scale=2.0),
], ids=repr)
def test_integrate_density_families(family):
    """Tests that the student and homogeneous densities have total mass 1.
    """
    assert integrate_density(family) == pytest.approx(1.0, abs=1e-6)


def test_integrate_density_dimension():
    """Tests that direct quadrature is refused above n=3.
    """
    with pytest.raises(DomainError):
        integrate_density(GaussianFamily(4))


def test_scalar_reference():
    """Tests the reference functions phi_s.
    """
    phi = ScalarSConcaveFn.reference(1.0)

    assert phi(0.5) == pytest.approx(0.5)
    assert phi(2.0) == 0.0
    assert ScalarSConcaveFn.reference(0.0)(1.0) == pytest.approx(math.exp(-1.0))
    assert ScalarSConcaveFn.reference(-0.5)(2.0) == pytest.approx(0.25)
    assert phi.concavity_violation() == pytest.approx(0.0, abs=1e-12)


def test_scalar_concavity_violation():
    """Tests that a function that is not s-concave is detected.
    """
    phi = ScalarSConcaveFn(1.0, lambda t: (1.0 - t) ** 2, support_end=1.0)

    assert phi.concavity_violation() > 1e-9


def test_family_from_config():
    """Tests building families from plain settings.
    """
    family = family_from_config({'family': 'pareto', 'n': '2', 'beta': '6', 'a': '2'})

    assert isinstance(family, ParetoFamily)
    assert family.a == 2.0
    assert isinstance(family_from_config({'family': 'gaussian', 'n': 3}), GaussianFamily)
    homogeneous = family_from_config({'family': 'homogeneous', 's': 1, 'norm_q': 'inf'})
    assert math.isinf(homogeneous.q)


def test_family_from_config_errors():
    """Tests that unknown families and missing settings raise ConfigError.
    """
    with pytest.raises(ConfigError):
        family_from_config({'family': 'cauchy'})
    with pytest.raises(ConfigError):
        family_from_config({'family': 'student', 'n': 1})
