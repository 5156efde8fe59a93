import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qcemu import eigensolver as es


def hermitian(n, rng, real=False):
    a = rng.normal(size=(n, n))
    if not real:
        a = a + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("n", [1, 2, 3, 5, 17, 64])
@pytest.mark.parametrize("real", [True, False])
def test_eigh_against_lapack(n, real):
    rng = np.random.default_rng(n)
    A = hermitian(n, rng, real)
    w, V = es.eigh(A)
    assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-11)
    assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-11)
    assert_allclose(A @ V, V * w, atol=1e-10)


def test_tridiagonalize_reconstructs():
    rng = np.random.default_rng(1)
    A = hermitian(12, rng)
    d, e, Q = es.tridiagonalize(A)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.all(e >= 0)
    assert_allclose(Q @ T @ Q.conj().T, A, atol=1e-12)


def test_degenerate_and_diagonal():
    A = np.diag([3.0, 1.0, 1.0, -2.0])
    w, V = es.eigh(A)
    assert_allclose(w, [-2, 1, 1, 3])
    assert_allclose(V.conj().T @ A @ V, np.diag(w), atol=1e-14)
    w, V = es.eigh(np.zeros((5, 5)))
    assert_allclose(w, 0)


def test_tridiagonal_only_values():
    d = np.array([2.0, -1.0, 0.5, 4.0])
    e = np.array([0.3, 1.0, 0.0])
    w, Z = es.tridiagonal_eigh(d, e, vectors=False)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert Z is None
    assert_allclose(w, np.linalg.eigvalsh(T), atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 2 ** 32 - 1))
def test_spectral_decomposition_property(n, seed):
    rng = np.random.default_rng(seed)
    A = hermitian(n, rng)
    w, V = es.eigh(A)
    assert np.all(np.diff(w) >= -1e-12)
    assert_allclose(V @ np.diag(w) @ V.conj().T, A, atol=1e-10)
