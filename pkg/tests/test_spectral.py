import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gaussentropy._spectral import arrowhead_eigh, rank_one_eigvalsh

floats = st.floats(-1.0, 1.0, allow_nan=False)


def arrow(d, w, alpha):
    m = d.size
    A = np.diag(np.r_[d, alpha])
    A[:m, m] = A[m, :m] = w
    return A


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 25), elements=floats),
       arrays(np.float64, 25, elements=floats), st.floats(-3, 3))
def test_rank_one_matches_dense(d, w, rho):
    d = np.sort(d)
    w = w[: d.size]
    ref = np.linalg.eigvalsh(np.diag(d) + rho * np.outer(w, w))
    np.testing.assert_allclose(rank_one_eigvalsh(d, w, rho), ref, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 25), elements=floats),
       arrays(np.float64, 25, elements=floats), floats)
def test_arrowhead_matches_dense(d, w, alpha):
    d = np.sort(d)
    w = w[: d.size]
    lam, V = arrowhead_eigh(d, w, alpha)
    A = arrow(d, w, alpha)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(A), atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(d.size + 1), atol=1e-10)
    np.testing.assert_allclose(A @ V, V * lam, atol=1e-10)


def test_arrowhead_deflates_repeated_poles_and_zero_weights():
    d = np.array([0.1, 0.1, 0.1, 0.5, 0.7])
    w = np.array([0.2, 0.3, 0.0, 0.1, 0.0])
    lam, V = arrowhead_eigh(d, w, 0.3)
    A = arrow(d, w, 0.3)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(A), atol=1e-14)
    np.testing.assert_allclose(V.T @ V, np.eye(6), atol=1e-13)
    np.testing.assert_allclose(A @ V, V * lam, atol=1e-13)


def test_large_arrowhead_stays_orthogonal(rng):
    m = 300
    d = np.sort(rng.uniform(0, 1, m))
    w = rng.uniform(0, 0.02, m)
    lam, V = arrowhead_eigh(d, w, 0.5)
    assert np.abs(V.T @ V - np.eye(m + 1)).max() < 1e-12
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(arrow(d, w, 0.5)), atol=1e-13)


@pytest.mark.parametrize("rho", [0.0, 1e-300])
def test_rank_one_trivial_updates(rho):
    d = np.array([0.1, 0.2])
    np.testing.assert_allclose(rank_one_eigvalsh(d, [1.0, 1.0], rho), d, atol=1e-15)
