import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_entropy import gaussian, model
from harmonic_entropy.errors import BipartitionError, UncertaintyViolation

from conftest import random_spd


def test_symplectic_form():
    om = gaussian.symplectic_form(3)
    np.testing.assert_array_equal(om.T, -om)
    np.testing.assert_array_equal(om @ om, -np.eye(6))


def test_ground_state_blocks_are_inverse():
    sys = model.anderson_system(model.Graph.path(12), model.DisorderEnsemble(seed=3), 0)
    cov = gaussian.ground_state_covariance(sys)
    np.testing.assert_allclose(cov.a @ cov.b, np.eye(12), atol=1e-10)


def test_ground_state_is_pure():
    cov = gaussian.ground_state_covariance(model.ordered_chain(15))
    for spec in (gaussian.symplectic_spectrum_williamson(cov), gaussian.symplectic_spectrum(cov)):
        np.testing.assert_allclose(spec.values, 1.0, atol=1e-9)


def test_single_mode_thermal_value():
    cov = gaussian.CovarianceMatrix(a=[[3.0]], b=[[3.0]])
    assert gaussian.symplectic_spectrum(cov).min() == pytest.approx(3.0)
    assert gaussian.symplectic_spectrum_williamson(cov).min() == pytest.approx(3.0)


def test_uncertainty_violation():
    cov = gaussian.CovarianceMatrix(a=[[0.5]], b=[[0.5]])
    assert not gaussian.check_uncertainty(cov)
    with pytest.raises(UncertaintyViolation) as info:
        gaussian.symplectic_spectrum(cov)
    assert info.value.minimum == pytest.approx(0.5)


def test_clamp_within_tolerance():
    cov = gaussian.CovarianceMatrix(a=[[1.0 - 1e-10]], b=[[1.0]])
    assert gaussian.symplectic_spectrum(cov).min() == 1.0
    with pytest.raises(UncertaintyViolation):
        gaussian.symplectic_spectrum(cov, tol=0.0)


def test_truncate():
    cov = gaussian.ground_state_covariance(model.ordered_chain(5))
    sub = gaussian.truncate(cov, model.Region(5, (1, 3)))
    assert sub.labels == (1, 3)
    np.testing.assert_array_equal(sub.a, cov.a[np.ix_([1, 3], [1, 3])])
    full = gaussian.truncate(cov, model.Region(5, range(5)))
    np.testing.assert_array_equal(full.a, cov.a)
    with pytest.raises(BipartitionError):
        gaussian.truncate(cov, model.Region(4, (0,)))
    dense = gaussian.CovarianceMatrix(full=cov.matrix())
    np.testing.assert_array_equal(gaussian.truncate(dense, model.Region(5, (1, 3))).matrix(), sub.matrix())


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_routes_agree(n, seed):
    rng = np.random.default_rng(seed)
    a = random_spd(rng, n, 20.0)
    b = np.linalg.inv(a) + 0.3 * random_spd(rng, n, 20.0)
    cov = gaussian.CovarianceMatrix(a=a, b=b)
    w = gaussian.symplectic_spectrum_williamson(cov).values
    s = gaussian.symplectic_spectrum_block(a, b).values
    np.testing.assert_allclose(w, s, atol=1e-8)
    assert np.all(s >= 1.0)


def test_invariance_under_symplectic_transformation(rng):
    a = random_spd(rng, 4, 10.0)
    b = np.linalg.inv(a) + random_spd(rng, 4, 10.0)
    cov = gaussian.CovarianceMatrix(a=a, b=b)
    s = rng.standard_normal((4, 4)) + 3 * np.eye(4)
    t = np.block([[s, np.zeros((4, 4))], [np.zeros((4, 4)), np.linalg.inv(s).T]])
    moved = gaussian.CovarianceMatrix(full=t @ cov.matrix() @ t.T)
    np.testing.assert_allclose(gaussian.symplectic_spectrum(moved).values,
                               gaussian.symplectic_spectrum(cov).values, rtol=1e-8)
