import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmonic_entropy import entropy, gaussian, model
from harmonic_entropy.errors import AssumptionViolation, DomainError

from conftest import random_spd


def f_reference(x):
    return (x + 1) / 2 * math.log((x + 1) / 2) - (x - 1) / 2 * math.log((x - 1) / 2)


def test_entropy_function_values():
    assert entropy.entropy_function(1.0) == 0.0
    assert entropy.entropy_function(3.0) == pytest.approx(2 * math.log(2), abs=1e-15)
    for x in (1.5, 2.0, 10.0, 1e4):
        assert entropy.entropy_function(x) == pytest.approx(f_reference(x), rel=1e-13)
    with pytest.raises(DomainError):
        entropy.entropy_function(0.999)


def test_entropy_function_near_one():
    t = 1e-10
    x = 1 + t
    expected = t / 2 * (1 - math.log(t / 2))
    assert entropy.entropy_function(x) == pytest.approx(expected, rel=1e-6)
    arr = entropy.entropy_function(np.array([1.0, 1 + 1e-16, x, 3.0]))
    np.testing.assert_allclose(arr, [0.0, 0.0, expected, 2 * math.log(2)], rtol=1e-6)


def test_entropy_function_monotone_and_continuous():
    # below ~1e-12 neighbouring grid points round to the same double
    xs = 1 + np.logspace(-12, 2, 2000)
    fx = entropy.entropy_function(xs)
    assert np.all(np.diff(fx) > 0)
    # no jump where the asymptotic branch hands over
    lo = entropy.entropy_function(1 + 1e-8 * (1 - 1e-9))
    hi = entropy.entropy_function(1 + 1e-8 * (1 + 1e-9))
    assert abs(hi - lo) < 1e-14


def test_two_site_golden_value():
    cov = gaussian.ground_state_covariance(model.ordered_chain(2))
    s = entropy.entanglement_entropy(cov, model.Region(2, (0,))).nats
    # hq has spectrum (1, 3) with eigenvectors (1, +-1)/sqrt 2
    a11 = (1 + 1 / math.sqrt(3)) / 2
    b11 = (1 + math.sqrt(3)) / 2
    oracle = f_reference(math.sqrt(a11 * b11))
    assert s == pytest.approx(oracle, abs=1e-12)
    assert s == pytest.approx(0.0943924659444, abs=1e-12)


def test_entropy_of_full_region_is_zero():
    cov = gaussian.ground_state_covariance(model.ordered_chain(6))
    assert entropy.entanglement_entropy(cov, model.Region(6, range(6))).nats == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**32 - 1))
def test_entropy_symmetry(n, seed):
    rng = np.random.default_rng(seed)
    k = rng.uniform(0.0, 8.0, n)
    k[0] += 0.1
    cov = gaussian.ground_state_covariance(model.spring_system(model.Graph.path(n), k))
    size = int(rng.integers(1, n))
    region = model.Region(n, tuple(sorted(rng.choice(n, size, replace=False))))
    s1 = entropy.entanglement_entropy(cov, region).nats
    s2 = entropy.entanglement_entropy(cov, region.complement()).nats
    assert abs(s1 - s2) <= 1e-9


def test_upper_bound_holds_and_checks_assumption():
    sys = model.ordered_chain(40)
    cov = gaussian.ground_state_covariance(sys)
    region = model.Region.centered(10, 40)
    ub = entropy.upper_bound_matrix_elements(sys, region, 4.0, cov)
    assert entropy.entanglement_entropy(cov, region).nats <= ub
    with pytest.raises(AssumptionViolation):
        entropy.upper_bound_matrix_elements(sys, region, 2.0, cov)


def test_lower_bounds_below_entropy():
    for lattice, n_sub, n_full in (("N", 3, 200), ("Z", 5, 201), ("N", 1, 2)):
        pw = model.truncated_chain_powers(n_sub, n_full, (-0.5, 0.5), lattice)
        s = entropy.entropy_from_spectrum(gaussian.symplectic_spectrum_block(pw[-0.5], pw[0.5])).nats
        lb = entropy.lower_bounds_det_and_max(n_sub, n_full, lattice)
        assert lb.det_bound <= s + 1e-9 and lb.max_bound <= s + 1e-9
    with pytest.raises(ValueError):
        entropy.lower_bounds_det_and_max(4, 4)


def test_eigenvalue_comparison(rng):
    for _ in range(20):
        k, n = 3, 7
        a = random_spd(rng, k, 100.0)
        b = random_spd(rng, n, 100.0)
        alpha = float(rng.uniform(-1, 1))
        assert entropy.eigenvalue_comparison_check(a, b, alpha)
        emb = sorted(rng.choice(n, k, replace=False))
        assert entropy.eigenvalue_comparison_margin(a, b, alpha, emb) >= -1e-10
    with pytest.raises(ValueError):
        entropy.eigenvalue_comparison_margin(np.eye(3), np.eye(3), 0.5)


def test_optimal_constant():
    bc = entropy.find_optimal_constant()
    assert bc.crossing_x0 == pytest.approx(1.63673147, abs=1e-7)
    # tangency: C equals f(x0)/sqrt(x0^2 - 1)
    x0 = bc.crossing_x0
    assert bc.optimal_c == pytest.approx(f_reference(x0) / math.sqrt(x0 * x0 - 1), rel=1e-10)
    xs = 1 + np.logspace(-10, 4, 5000)
    ratio = entropy.entropy_function(xs) / np.sqrt(xs * xs - 1)
    assert ratio.max() <= bc.optimal_c + 1e-12
    assert ratio.max() == pytest.approx(bc.optimal_c, rel=1e-6)


def test_f_between_log_and_sqrt():
    xs = np.concatenate([[1.0], 1 + np.logspace(-12, 4, 3000)])
    fx = entropy.entropy_function(xs)
    assert np.all(fx >= np.log(xs) - 1e-15)
    assert np.all(fx <= 0.5645 * np.sqrt(xs * xs - 1) + 1e-15)


def test_comparison_equality_for_diagonal_b(rng):
    a = random_spd(rng, 3, 10.0)
    b = np.diag(rng.uniform(0.5, 3.0, 6))
    for alpha in (-1.0, -0.5, 0.25, 0.5, 1.0):
        assert abs(entropy.eigenvalue_comparison_margin(a, b, alpha)) <= 1e-12


def test_two_site_det_bound_golden():
    def h11(alpha):
        return (1.0 + 3.0**alpha) / 2.0

    lb = entropy.lower_bounds_det_and_max(1, 2)
    m1 = 0.5 * math.log(h11(-0.25) * h11(0.5) * h11(-0.25))
    m2 = 0.5 * math.log(h11(0.25) * h11(-0.5) * h11(0.25))
    assert lb.det_bound == pytest.approx(max(m1, m2), abs=1e-14)
    # one eigenvalue: determinant and top eigenvalue coincide
    assert lb.max_bound == pytest.approx(lb.det_bound, abs=1e-14)


def test_max_bound_below_det_bound_when_spectrum_above_one():
    pw = model.truncated_chain_powers(2, 300, (-0.5, -0.25, 0.25, 0.5), "Z")
    m1 = pw[-0.25] @ pw[0.5] @ pw[-0.25]
    m2 = pw[0.25] @ pw[-0.5] @ pw[0.25]
    assert np.linalg.eigvalsh(m1)[0] >= 1 and np.linalg.eigvalsh(m2)[0] >= 1
    lb = entropy.lower_bounds_from_truncations(pw)
    assert lb.max_bound <= lb.det_bound
