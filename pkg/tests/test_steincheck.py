import math

import numpy as np
import pytest

from steindecomp.gaussint import expect_h
from steindecomp.geometry import Ball, HalfSpace
from steindecomp.steincheck import (QuadratureSpec, StepSizeError, f_value, g_value,
                                    hermite_combination, lemma5_check, stein_residual)

HALF_LINE = HalfSpace([1.0], 0.0)
DISK = Ball([0.0, 0.0], 1.0)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="gauss-hermite", nodes=4)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.1, 1.5])
def test_tau_domain(tau):
    with pytest.raises(ValueError):
        g_value(HALF_LINE, 0.5, [0.0], tau)


def test_g_deep_inside():
    A = HalfSpace([1.0], 10.0)
    eps, tau = 0.1, 0.3
    eh = expect_h(A, eps).value
    assert g_value(A, eps, [-20.0], tau) == pytest.approx(-(1 - eh) / (2 * (1 - tau)), abs=1e-3)


def test_g_vanishes_at_origin_for_small_eps():
    for tau in (0.2, 0.5, 0.8):
        assert abs(g_value(HALF_LINE, 1e-3, [0.0], tau)) < 1e-3


def test_g_near_one_is_finite():
    assert math.isfinite(g_value(DISK, 0.5, [0.3, 0.2], 1 - 1e-6))


def test_g_schemes_agree():
    w, tau = [0.4, -0.2], 0.4
    ref = g_value(DISK, 0.5, w, tau)
    gh = g_value(DISK, 0.5, w, tau, QuadratureSpec(scheme="gauss-hermite", nodes=48))
    mc = g_value(DISK, 0.5, w, tau, QuadratureSpec(scheme="mc", samples=200_000))
    # tensor Gauss-Hermite converges slowly on the kinks of h
    assert gh == pytest.approx(ref, abs=1e-2)
    assert mc == pytest.approx(ref, abs=1e-2)


def test_f_vanishes_for_everything_set():
    A = HalfSpace([1.0], 50.0)
    assert f_value(A, 0.5, np.array([0.3])).value == pytest.approx(0.0, abs=1e-12)


def test_f_node_doubling():
    fv = f_value(DISK, 0.5, np.array([0.4, 0.1]), tau_nodes=128)
    assert fv.error < 1e-4
    assert fv.value == pytest.approx(f_value(DISK, 0.5, np.array([0.4, 0.1]), tau_nodes=64).value,
                                     abs=1e-4)


def test_residual_examples():
    assert abs(stein_residual(HALF_LINE, 0.5, [0.3]).residual) < 1e-3
    assert abs(stein_residual(DISK, 0.5, [0.4, 0.1]).residual) < 1e-3
    A = Ball([0.0, 0.0], 3.0)
    res = stein_residual(A, 0.1, [0.2, 0.1])
    assert res.rhs == pytest.approx(1 - expect_h(A, 0.1).value)
    assert abs(res.residual) < 1e-3


def test_residual_rotation_invariance():
    c, s = math.cos(1.1), math.sin(1.1)
    rot = np.array([[c, -s], [s, c]])
    A = HalfSpace([1.0, 0.0], 0.4)
    w = np.array([0.2, -0.7])
    B = HalfSpace(rot @ np.array(A.u), 0.4)
    assert f_value(A, 0.5, w).value == pytest.approx(f_value(B, 0.5, rot @ w).value, abs=1e-12)


def test_tiny_step_is_flagged():
    with pytest.raises(StepSizeError):
        stein_residual(DISK, 0.5, [0.4, 0.1], steps=(1e-4, 1e-7), check_steps=True)
    stein_residual(DISK, 0.5, [0.4, 0.1], check_steps=True)


def test_residual_dimension_guard():
    with pytest.raises(ValueError):
        stein_residual(Ball([0.0, 0.0, 0.0], 1.0), 0.5, [0.0, 0.0, 0.0])


def test_hermite_patterns_match_derivatives():
    # phi_{i..}/phi by finite differences of the standard normal density in d = 2
    def phi(z):
        return math.exp(-0.5 * float(z @ z)) / (2 * math.pi)

    z = np.array([0.3, -0.8])
    h = 1e-3
    e = np.eye(2)
    for i in range(2):
        a = np.zeros(2)
        a[i] = 1
        fd = (phi(z + h * e[i]) - phi(z - h * e[i])) / (2 * h) / phi(z)
        assert hermite_combination(a, z[None, :])[0] == pytest.approx(fd, abs=1e-5)
        for j in range(2):
            a2 = np.zeros((2, 2))
            a2[i, j] = 1
            fd = (phi(z + h * e[i] + h * e[j]) - phi(z + h * e[i] - h * e[j])
                  - phi(z - h * e[i] + h * e[j]) + phi(z - h * e[i] - h * e[j])) / (4 * h * h) / phi(z)
            assert hermite_combination(a2, z[None, :])[0] == pytest.approx(fd, abs=1e-4)


def test_third_order_pattern():
    z = np.array([[0.5, -1.2, 0.7]])
    a = np.zeros((3, 3, 3))
    a[0, 0, 1] = 1.0
    # phi_001/phi = -z0^2 z1 + z1
    assert hermite_combination(a, z)[0] == pytest.approx(-0.25 * -1.2 + -1.2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_one_dimensional_equality(k):
    res = lemma5_check(np.ones((1,) * k), QuadratureSpec(scheme="mc", samples=400_000, seed=1))
    assert abs(res.lhs - math.factorial(k)) <= 5 * res.stderr
    exact = lemma5_check(np.ones((1,) * k), QuadratureSpec(scheme="gauss-hermite", nodes=8))
    assert exact.lhs == pytest.approx(math.factorial(k), rel=1e-12)


def test_symmetric_maps_attain_equality():
    g = np.random.default_rng(4)
    a = g.normal(size=(3, 3))
    a = a + a.T
    res = lemma5_check(a, QuadratureSpec(scheme="gauss-hermite", nodes=8))
    assert res.lhs == pytest.approx(res.rhs, rel=1e-10)


def test_random_maps_pass():
    g = np.random.default_rng(5)
    for _ in range(100):
        a = g.normal(size=(3, 3))
        assert lemma5_check(a, QuadratureSpec(scheme="mc", samples=20_000)).passed


def test_lemma5_range():
    with pytest.raises(ValueError):
        lemma5_check(np.ones((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        lemma5_check(np.ones(5))
