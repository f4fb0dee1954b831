import os
import subprocess
import sys

import numpy as np
import pytest

from gaussentropy import _kernels
from gaussentropy._kernels import _fallback
from gaussentropy.fermion_exact import sector_states
from gaussentropy.fock_probability import hermite_workspace

core = pytest.importorskip("gaussentropy._kernels._core")


def test_backend_is_compiled_by_default():
    assert _kernels.BACKEND == "cython"


def test_env_var_forces_pure_python_backend():
    env = dict(os.environ, GAUSSENTROPY_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import gaussentropy._kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


def test_hermite_backends_agree(rng):
    A = rng.normal(size=(4, 4))
    Sigma = A @ A.T * 0.2 + 0.6 * np.eye(4)
    ws = hermite_workspace(Sigma, rng.normal(size=4) * 0.3)
    a = core.hermite_diagonal(ws.R, ws.Ry, 8)
    b = _fallback.hermite_diagonal(ws.R, ws.Ry, 8)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_sector_hamiltonian_backends_agree(rng):
    n = 6
    h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = h + h.conj().T
    for N in range(n + 1):
        st = sector_states(n, N)
        np.testing.assert_allclose(core.sector_hamiltonian(h, st, n),
                                   _fallback.sector_hamiltonian(h, st, n), atol=1e-13)


@pytest.mark.parametrize("beta", [0, 1])
def test_secular_roots_backends_agree(rng, beta):
    d = np.sort(rng.uniform(-1, 1, 40))
    w2 = rng.uniform(0.001, 0.1, 40)
    alpha = 0.1 if beta else -2.0
    o1, u1 = core.secular_roots(d, w2, alpha, beta)
    o2, u2 = _fallback.secular_roots(d, w2, alpha, beta)
    np.testing.assert_allclose(d[o1] + u1, d[o2] + u2, atol=1e-14)


def test_arrowhead_vectors_backends_agree(rng):
    d = np.sort(rng.uniform(0, 1, 60))
    w2 = rng.uniform(0.001, 0.05, 60)
    o, u = core.secular_roots(d, w2, 0.4, 1)
    np.testing.assert_allclose(core.arrowhead_vectors(d, o, u),
                               _fallback.arrowhead_vectors(d, o, u), atol=1e-12)
