import numpy as np
import pytest

from gaussentropy.fermion_gaussian import FermionBathSpec


def relax_spec(K, W=3.0, Gamma=1.0, beta=1.0, mu=0.0, eps0=-0.5):
    """Single fermionic bath on ``[-W/2, W/2]`` with a level below the Fermi energy."""
    return FermionBathSpec.uniform(K, W, Gamma, beta, mu=mu, eps0=eps0, band_center=0.0)


def random_correlation_matrix(rng, n, complex_=True):
    """Valid correlation matrix: random unitary and eigenvalues in (0, 1)."""
    X = rng.normal(size=(n, n)) + (1j * rng.normal(size=(n, n)) if complex_ else 0)
    Q, _ = np.linalg.qr(X)
    g = rng.uniform(0.02, 0.98, size=n)
    C = (Q * g) @ Q.conj().T
    return (C + C.conj().T) / 2


def random_covariance(rng, N, purity_margin=0.3):
    """Valid covariance matrix: thermal diagonal conjugated by a random symplectic map."""
    from gaussentropy.boson_gaussian import symplectic_form
    from scipy.linalg import expm

    A = rng.normal(size=(2 * N, 2 * N)) * 0.3
    S = expm(symplectic_form(N) @ (A + A.T))
    nu = 0.5 + purity_margin + rng.uniform(0, 1, size=N)
    return S @ np.diag(np.r_[nu, nu]) @ S.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


# ------------------------------------------------------------ acceptance report

ACCEPTANCE = {}


class _Check:
    """Context manager recording one sub-assertion of an acceptance criterion."""

    def __init__(self, number, label):
        self.number, self.label, self.detail = number, label, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ACCEPTANCE.setdefault(self.number, []).append((self.label, exc_type is None, self.detail))
        return False


@pytest.fixture
def criterion():
    return _Check


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[number]
        status = "PASS" if all(ok for _, ok, _ in checks) else "FAIL"
        parts = [f"{label}: {'ok' if ok else 'FAILED'}{' (' + detail + ')' if detail else ''}"
                 for label, ok, detail in checks]
        terminalreporter.write_line(f"criterion {number:2d} {status}  " + "; ".join(parts))
