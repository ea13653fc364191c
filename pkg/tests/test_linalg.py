import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steindecomp.linalg import (ConvergenceError, NotPositiveDefiniteError, as_symmetric, cholesky,
                                from_csv, inv_sqrt, operator_norm, sym_eigen, to_csv)

C4 = np.array([[1.25, -0.75], [-0.75, 1.25]])


def random_spd(seed, d):
    g = np.random.default_rng(seed)
    a = g.normal(size=(d, d))
    return a @ a.T + 0.1 * np.eye(d)


def test_identity_eigen():
    dec = sym_eigen(np.eye(3))
    assert np.allclose(dec.eigenvalues, [1, 1, 1], atol=1e-14)


def test_diagonal_eigen():
    dec = sym_eigen(np.diag([9.0, 4.0]))
    assert np.allclose(dec.eigenvalues, [4, 9])
    assert np.allclose(np.abs(dec.eigenvectors), [[0, 1], [1, 0]])


def test_two_by_two_roots():
    # characteristic polynomial t^2 - 2.5 t + 1 = (t - 0.5)(t - 2)
    dec = sym_eigen(C4)
    assert np.allclose(dec.eigenvalues, [0.5, 2.0], atol=1e-14)


@pytest.mark.parametrize("d", [1, 2, 5, 16, 64])
def test_reconstruction_and_orthogonality(d):
    g = np.random.default_rng(d)
    a = g.normal(size=(d, d))
    m = a + a.T
    dec = sym_eigen(m)
    q = dec.eigenvectors
    assert np.max(np.abs(dec.reconstruct() - m)) < 1e-10
    assert np.max(np.abs(q.T @ q - np.eye(d))) < 1e-10
    assert np.all(np.diff(dec.eigenvalues) >= 0)


def test_permutation_similarity_keeps_spectrum():
    m = random_spd(3, 6)
    p = np.eye(6)[np.random.default_rng(0).permutation(6)]
    assert np.allclose(sym_eigen(p @ m @ p.T).eigenvalues, sym_eigen(m).eigenvalues, atol=1e-12)


def test_iteration_cap(monkeypatch):
    import steindecomp.linalg as la
    monkeypatch.setattr(la, "MAX_SWEEPS", 0)
    with pytest.raises(ConvergenceError) as info:
        la.sym_eigen(C4)
    assert info.value.residual > 0


def test_inv_sqrt_examples():
    assert np.allclose(inv_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(inv_sqrt(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]), atol=1e-15)
    r = inv_sqrt(C4)
    assert np.max(np.abs(r @ C4 @ r - np.eye(2))) < 1e-10
    assert operator_norm(r) == pytest.approx(math.sqrt(2), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 16))
def test_inv_sqrt_whitens(seed, d):
    m = random_spd(seed, d)
    r = inv_sqrt(m)
    assert np.max(np.abs(r @ m @ r - np.eye(d))) < 1e-9
    lo = sym_eigen(m).eigenvalues[0]
    assert operator_norm(r) == pytest.approx(1 / math.sqrt(lo), rel=1e-10)


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefiniteError) as info:
        inv_sqrt(np.diag([1.0, -2.0]))
    assert info.value.eigenvalue == pytest.approx(-2.0)
    with pytest.raises(NotPositiveDefiniteError):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_operator_norm_examples():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    assert operator_norm(np.diag([4.0, 9.0])) == pytest.approx(9.0)
    assert operator_norm(np.diag([1.0, -3.0])) == pytest.approx(3.0)


def test_cholesky_examples():
    assert np.allclose(cholesky(np.eye(3)), np.eye(3))
    assert np.allclose(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    low = cholesky(C4)
    assert np.allclose(low, np.tril(low))
    assert np.max(np.abs(low @ low.T - C4)) < 1e-12


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        as_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_csv_round_trip():
    m = random_spd(1, 4)
    assert np.array_equal(from_csv(to_csv(m)), m)
