"""Bosonic Gaussian states of harmonic modes via covariance matrices.

The covariance matrix ``Sigma`` is real symmetric ``2N x 2N`` in the ordering
``(q_0, ..., q_{N-1}, p_0, ..., p_{N-1})`` with ``Sigma_ij = <{x_i, x_j}>/2``
(vacuum is ``1/2``). The system oscillator is mode 0, bath modes follow. All
states here have zero mean.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .fock_probability import DEFAULT_CUTOFF, DEFAULT_MAX_LEAKAGE, fock_mutual_information, \
    hermite_fock_probabilities, quadrature_rotation
from .ledger import EntropyLedger

NU_TOL = 1e-6
COND_LIMIT = 1e12
DRIFT_LIMIT = 1e-7

__all__ = [
    "BosonBathSpec",
    "CovariancePropagator",
    "TwoModeBose",
    "bose",
    "bose_entropy",
    "stationary_occupancy_bose",
    "build_bosonic_hamiltonian",
    "quadrature_hamiltonian",
    "init_covariance",
    "evolve_covariance",
    "evolve_covariance_real",
    "symplectic_form",
    "symplectic_drift",
    "symplectic_eigenvalues",
    "vn_entropy_bose",
    "wehrl_entropy",
    "wehrl_mutual_information",
    "mode_block",
    "mode_energies",
    "bose_entropy_ledger",
    "two_mode_covariance",
    "two_mode_eps_max",
    "two_mode_bose",
    "simulate_bose",
]


def bose(omega, beta):
    """Bose-Einstein occupation ``1 / (exp(beta omega) - 1)``; ``beta = inf`` gives 0."""
    w = np.asarray(omega, dtype=np.float64)
    if np.isinf(beta):
        return np.zeros_like(w)
    if np.any(w <= 0):
        raise ValueError("Bose occupation diverges for non-positive frequency at finite temperature")
    return 1.0 / np.expm1(beta * w)


def bose_entropy(nu):
    """Elementwise ``(nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2)``, zero at ``nu = 1/2``."""
    nu = np.maximum(np.asarray(nu, dtype=np.float64), 0.5)
    hi = nu + 0.5
    lo = nu - 0.5
    out = hi * np.log(hi) - lo * np.log(np.where(lo > 0, lo, 1.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class BosonBathSpec:
    """One oscillator reservoir coupled through ``-kappa_i q_0 q_i``.

    Build with :meth:`ohmic` (frequencies ``j omega_c / K``) or :meth:`band`
    (frequencies uniform on ``[omega0 - W/2, omega0 + W/2]``), or pass explicit
    ``frequencies`` and ``couplings``. ``gamma`` is the dimensionless slope of
    the Ohmic spectral density ``J(omega) = gamma omega``.
    """

    frequencies: np.ndarray
    couplings: np.ndarray
    beta: float
    omega0: float = 1.0
    gamma: float = float("nan")
    omega_c: float = float("nan")
    W: float = float("nan")
    name: str = ""

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.frequencies, dtype=np.float64))
        k = np.atleast_1d(np.asarray(self.couplings, dtype=np.float64))
        if w.ndim != 1 or w.shape != k.shape:
            raise ValueError("frequencies and couplings must be 1-D arrays of equal length")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not np.isinf(self.beta) and np.any(w <= 0):
            raise ValueError("bath frequencies must be positive at finite temperature")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", k)

    @staticmethod
    def _check(K, gamma):
        if int(K) != K or K < 2:
            raise ValueError(f"K must be an integer >= 2, got {K}")
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        return int(K)

    @classmethod
    def ohmic(cls, K, omega_c, gamma, beta, omega0=1.0, name=""):
        """``omega_j = j omega_c / K`` and ``kappa_j = sqrt(2 gamma omega_j d_omega / pi)``."""
        K = cls._check(K, gamma)
        if not omega_c > 0:
            raise ValueError(f"omega_c must be positive, got {omega_c}")
        dw = omega_c / K
        w = dw * np.arange(1, K + 1)
        kappa = np.sqrt(2 * gamma * w * dw / math.pi)
        return cls(w, kappa, beta, omega0, gamma, omega_c, float("nan"), name)

    @classmethod
    def band(cls, K, W, gamma, beta, omega0=1.0, name=""):
        """Uniform band around ``omega0`` with ``d_omega = W / (K - 1)``."""
        K = cls._check(K, gamma)
        if not W > 0:
            raise ValueError(f"W must be positive, got {W}")
        if omega0 - W / 2 <= 0:
            raise ValueError(f"band [omega0 - W/2, omega0 + W/2] must stay above zero (W={W}, omega0={omega0})")
        dw = W / (K - 1)
        w = np.linspace(omega0 - W / 2, omega0 + W / 2, K)
        kappa = np.sqrt(2 * gamma * w * dw / math.pi)
        return cls(w, kappa, beta, omega0, gamma, float("nan"), W, name)

    @property
    def K(self):
        return self.frequencies.size

    def occupations(self):
        return bose(self.frequencies, self.beta)


def _as_specs(spec):
    specs = [spec] if isinstance(spec, BosonBathSpec) else list(spec)
    if not specs:
        raise ValueError("at least one bath is required")
    w0 = specs[0].omega0
    if any(s.omega0 != w0 for s in specs):
        raise ValueError("all baths must share the same system frequency omega0")
    return specs


def _bath_slices(specs):
    out, start = [], 1
    for s in specs:
        out.append(slice(start, start + s.K))
        start += s.K
    return out


def _frequencies(specs):
    return np.concatenate([[specs[0].omega0]] + [s.frequencies for s in specs])


def _coupling_row(specs):
    return np.concatenate([s.couplings for s in specs])


def stationary_occupancy_bose(specs):
    """Coupling-weighted mean of the bath occupations at ``omega0``."""
    specs = _as_specs(specs)
    g = np.array([s.gamma for s in specs])
    if not np.all(g > 0):
        raise ValueError("stationary occupancy needs positive gamma on every bath")
    n = np.array([float(bose(s.omega0, s.beta)) for s in specs])
    return float(g @ n / g.sum())


def build_bosonic_hamiltonian(spec):
    """Matrix ``H`` with ``H_op = d^dag H d / 2`` for ``d = (a, a^dag)``.

    ``H = [[A, B], [B, A]]`` with ``A = diag(omega) - Kc`` and ``B = -Kc``, where
    ``Kc`` holds ``kappa_i / 2`` on row and column 0. An empty list of baths is
    not accepted; a bath with zero couplings gives a free system mode.
    """
    specs = _as_specs(spec)
    w = _frequencies(specs)
    n = w.size
    Kc = np.zeros((n, n))
    Kc[0, 1:] = Kc[1:, 0] = _coupling_row(specs) / 2
    A = np.diag(w) - Kc
    return np.block([[A, -Kc], [-Kc, A]])


def quadrature_hamiltonian(spec):
    """Real matrix ``M`` with ``H_op = x^T M x / 2`` for ``x = (q, p)``."""
    specs = _as_specs(spec)
    w = _frequencies(specs)
    n = w.size
    Mq = np.diag(w)
    Mq[0, 1:] = Mq[1:, 0] = -_coupling_row(specs)
    return np.block([[Mq, np.zeros((n, n))], [np.zeros((n, n)), np.diag(w)]])


def init_covariance(spec, system_occupancy="stationary", system_beta=None):
    """Product initial state ``diag(s, s) + 1/2`` with ``s = diag(n0, n(omega_1), ...)``.

    Parameters
    ----------
    system_occupancy : float or "stationary"
        Mean quanta ``n0`` of the system mode. Ignored if ``system_beta`` is set.
    system_beta : float, optional
        Start the system in the thermal state at this inverse temperature.
    """
    specs = _as_specs(spec)
    if system_beta is not None:
        n0 = float(bose(specs[0].omega0, system_beta))
    elif isinstance(system_occupancy, str):
        if system_occupancy != "stationary":
            raise ValueError(f"unknown system occupancy {system_occupancy!r}")
        n0 = stationary_occupancy_bose(specs)
    else:
        n0 = float(system_occupancy)
    if not n0 >= 0:
        raise ValueError(f"system occupancy must be non-negative, got {n0}")
    s = np.concatenate([[n0]] + [sp.occupations() for sp in specs])
    return np.diag(np.concatenate([s, s]) + 0.5)


def symplectic_form(N):
    I = np.eye(N)
    Z = np.zeros((N, N))
    return np.block([[Z, I], [-I, Z]])


def symplectic_drift(S):
    """``max |S Omega S^T - Omega|`` for a real quadrature map ``S``."""
    n = S.shape[0] // 2
    X = S[:, :n] @ S[:, n:].T
    return float(np.abs(X - X.T - symplectic_form(n)).max())


def _check_cov(Sigma):
    Sigma = np.asarray(Sigma, dtype=np.float64)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1] or Sigma.shape[0] % 2:
        raise ValueError(f"covariance matrix must be square with even size, got {Sigma.shape}")
    return Sigma


class CovariancePropagator:
    """Propagation ``Sigma^C(t) = S Sigma^C(0) S^dag`` with ``S = exp(-i K H t)``.

    ``K = diag(1, -1)`` in the ``(a, a^dag)`` blocks. ``K H`` is diagonalised once;
    if its eigenvector matrix has condition number above ``1e12`` every call
    falls back to a dense matrix exponential.
    """

    def __init__(self, H):
        H = np.asarray(H)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] % 2:
            raise ValueError(f"H must be square with even size, got {H.shape}")
        if not np.allclose(H, H.conj().T, atol=1e-12):
            raise ValueError("H must be Hermitian")
        n = H.shape[0] // 2
        self.H = H
        self.N = n
        self.KH = np.concatenate([H[:n], -H[n:]])
        self.U = quadrature_rotation(n)
        lam, V = np.linalg.eig(self.KH)
        self.cond = float(np.linalg.cond(V))
        self.use_expm = not self.cond < COND_LIMIT
        if not self.use_expm:
            self.lam = lam
            # quadratures -> eigenbasis of K H, and back
            self.to_eig = np.linalg.solve(V, self.U)
            self.from_eig = self.U.conj().T @ V

    @property
    def dim(self):
        return 2 * self.N

    def symplectic(self, t):
        """Real symplectic map ``x(t) = S_x x(0)`` on quadratures."""
        if self.use_expm:
            S = scipy.linalg.expm(-1j * self.KH * t)
            S = self.U.conj().T @ S @ self.U
        else:
            S = (self.from_eig * np.exp(-1j * self.lam * t)) @ self.to_eig
        return np.ascontiguousarray(S.real)

    def __call__(self, Sigma0, t):
        Sigma0 = _check_cov(Sigma0)
        if Sigma0.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: Sigma0 is {Sigma0.shape[0]}, H is {self.dim}")
        if t == 0:
            return Sigma0.copy()
        S = self.symplectic(t)
        drift = symplectic_drift(S)
        if drift > DRIFT_LIMIT:
            raise FloatingPointError(f"propagator drifted {drift:.2e} from symplectic; H is ill-conditioned")
        out = S @ Sigma0 @ S.T
        return (out + out.T) / 2


def evolve_covariance(Sigma0, H, t):
    """Covariance matrix at time ``t`` under the ``(a, a^dag)`` Hamiltonian ``H``."""
    return CovariancePropagator(H)(Sigma0, t)


def evolve_covariance_real(Sigma0, M, t):
    """Independent route: ``S = expm(Omega M t)`` on quadratures directly."""
    Sigma0 = _check_cov(Sigma0)
    M = np.asarray(M, dtype=np.float64)
    if M.shape != Sigma0.shape:
        raise ValueError(f"dimension mismatch: Sigma0 {Sigma0.shape} vs M {M.shape}")
    S = scipy.linalg.expm(symplectic_form(M.shape[0] // 2) @ M * t)
    return S @ Sigma0 @ S.T


def symplectic_eigenvalues(Sigma):
    """Symplectic eigenvalues, descending, from ``L^T (i Omega) L`` with ``Sigma = L L^T``."""
    Sigma = _check_cov(Sigma)
    N = Sigma.shape[0] // 2
    try:
        L = np.linalg.cholesky((Sigma + Sigma.T) / 2)
    except np.linalg.LinAlgError:
        raise ValueError("covariance matrix is not positive definite") from None
    Om = symplectic_form(N)
    ev = np.linalg.eigvalsh(1j * (L.T @ Om @ L))
    nu = ev[N:][::-1]
    if nu.size and nu[-1] < 0.5 - NU_TOL:
        raise ValueError(f"uncertainty relation violated: symplectic eigenvalue {nu[-1]:.9g} < 1/2")
    return nu


def _single_mode_nu(blocks):
    det = blocks[:, 0, 0] * blocks[:, 1, 1] - blocks[:, 0, 1] ** 2
    nu = np.sqrt(np.maximum(det, 0.0))
    if np.any(nu < 0.5 - NU_TOL):
        raise ValueError(f"uncertainty relation violated: single-mode nu {nu.min():.9g} < 1/2")
    return nu


def mode_block(Sigma, modes):
    """Reduced covariance of ``modes`` (rows and columns ``i`` and ``N + i``)."""
    Sigma = _check_cov(Sigma)
    N = Sigma.shape[0] // 2
    idx = np.asarray(modes, dtype=np.intp)
    sel = np.r_[idx, idx + N]
    return Sigma[np.ix_(sel, sel)]


def _mode_blocks(Sigma):
    N = Sigma.shape[0] // 2
    d = np.diagonal(Sigma)
    off = np.diagonal(Sigma[:N, N:])
    return np.stack([np.stack([d[:N], off], -1), np.stack([off, d[N:]], -1)], -2)


def vn_entropy_bose(Sigma):
    """Von Neumann entropy of the Gaussian state with covariance ``Sigma``."""
    Sigma = _check_cov(Sigma)
    if Sigma.shape[0] == 0:
        return 0.0
    return float(bose_entropy(symplectic_eigenvalues(Sigma)).sum())


def wehrl_entropy(Sigma):
    """Wehrl entropy ``ln det(Sigma + 1/2) / 2 + N``."""
    Sigma = _check_cov(Sigma)
    N = Sigma.shape[0] // 2
    sign, logdet = np.linalg.slogdet(Sigma + np.eye(2 * N) / 2)
    if sign <= 0:
        raise ValueError("Sigma + 1/2 is not positive definite")
    return float(logdet / 2 + N)


def _wehrl_single(blocks):
    b = blocks + np.eye(2) / 2
    det = b[:, 0, 0] * b[:, 1, 1] - b[:, 0, 1] ** 2
    return np.log(det) / 2 + 1


def wehrl_mutual_information(Sigma, partition="modes"):
    """Mutual information of heterodyne outcomes across ``partition``.

    ``"modes"`` splits into single modes, ``"system"`` into mode 0 against the
    rest; a list of mode-index lists gives an arbitrary partition.
    """
    Sigma = _check_cov(Sigma)
    N = Sigma.shape[0] // 2
    total = wehrl_entropy(Sigma)
    if isinstance(partition, str):
        if partition == "modes":
            return float(_wehrl_single(_mode_blocks(Sigma)).sum() - total)
        if partition == "system":
            partition = [[0], list(range(1, N))]
        else:
            raise ValueError(f"unknown partition {partition!r}")
    parts = [list(p) for p in partition]
    if sorted(i for p in parts for i in p) != list(range(N)):
        raise ValueError("partition must cover every mode exactly once")
    return float(sum(wehrl_entropy(mode_block(Sigma, p)) for p in parts) - total)


def mode_energies(Sigma, omega):
    """``omega_i (<q_i^2> + <p_i^2>) / 2`` per mode."""
    Sigma = _check_cov(Sigma)
    N = Sigma.shape[0] // 2
    d = np.diagonal(Sigma)
    return np.asarray(omega) / 2 * (d[:N] + d[N:])


def bose_entropy_ledger(Sigma_t, Sigma_0, spec, *, t=float("nan")):
    """Entropy production and its decomposition for an evolved covariance matrix.

    Heat is the bath energy lost; the per-mode relative entropy uses
    ``D = beta (E - E_eq) + S_eq - S`` on each single-mode block.
    """
    specs = _as_specs(spec)
    Sigma_t = _check_cov(Sigma_t)
    Sigma_0 = _check_cov(Sigma_0)
    w = _frequencies(specs)
    if Sigma_t.shape[0] != 2 * w.size:
        raise ValueError(f"covariance has {Sigma_t.shape[0] // 2} modes, specs describe {w.size}")
    E_t = mode_energies(Sigma_t, w)
    E_0 = mode_energies(Sigma_0, w)
    nu_t = _single_mode_nu(_mode_blocks(Sigma_t))
    nu_0 = _single_mode_nu(_mode_blocks(Sigma_0))
    s_t = bose_entropy(nu_t)

    dS = float(s_t[0] - bose_entropy(nu_0[:1])[0])
    heat = flow = D_env = 0.0
    for s, sl in zip(specs, _bath_slices(specs)):
        Q = -float(np.sum(E_t[sl] - E_0[sl]))
        heat += Q
        flow -= s.beta * Q
        n_eq = s.occupations()
        E_eq = s.frequencies * (n_eq + 0.5)
        if np.isinf(s.beta):
            raise ValueError("the bosonic ledger needs a finite bath temperature")
        D_env += float(np.sum(s.beta * (E_t[sl] - E_eq) + bose_entropy(n_eq + 0.5) - s_t[sl]))
    sigma = dS + flow

    S_S = float(s_t[0])
    S_k = float(s_t[1:].sum())
    S_SE = vn_entropy_bose(Sigma_t)
    S_E = vn_entropy_bose(mode_block(Sigma_t, np.arange(1, w.size)))
    W_SE = wehrl_entropy(Sigma_t)
    blocks_W = _wehrl_single(_mode_blocks(Sigma_t))
    W_E = wehrl_entropy(mode_block(Sigma_t, np.arange(1, w.size)))
    return EntropyLedger(
        t=float(t), sigma=sigma, I_M=S_S + S_k - S_SE, D_env=D_env,
        I_SE=S_S + S_E - S_SE, I_env=S_k - S_E, heat_Q=heat, dS_system=dS,
        entropy_flow=flow, J_W_M=float(blocks_W.sum() - W_SE),
        J_W_SE=float(blocks_W[0] + W_E - W_SE),
    )


def two_mode_covariance(n_i, n_j, eps_q, eps_p):
    """Standard-form two-mode covariance with ``<q_i q_j> = eps_q`` and ``<p_i p_j> = eps_p``."""
    a, b = n_i + 0.5, n_j + 0.5
    return np.array([
        [a, eps_q, 0.0, 0.0],
        [eps_q, b, 0.0, 0.0],
        [0.0, 0.0, a, eps_p],
        [0.0, 0.0, eps_p, b],
    ])


def two_mode_eps_max(n_i, n_j, symmetry):
    """Largest physical ``eps`` for ``symmetry`` in {"squeezed", "equal", "q_only"}.

    ``squeezed`` is ``eps_q = -eps_p = eps``, ``equal`` is ``eps_q = eps_p = eps``
    and ``q_only`` is ``eps_q = eps, eps_p = 0``.
    """
    if symmetry == "squeezed":
        hi, lo = max(n_i, n_j), min(n_i, n_j)
        return math.sqrt((hi + 1) * lo)
    if symmetry == "equal":
        return math.sqrt(n_i * n_j)
    if symmetry == "q_only":
        return 2 * math.sqrt(n_i * (1 + n_i) * n_j * (1 + n_j) / ((1 + 2 * n_i) * (1 + 2 * n_j)))
    raise ValueError(f"unknown symmetry {symmetry!r}")


def _symmetry_of(eps_q, eps_p):
    if eps_p == 0:
        return "q_only"
    if eps_q == eps_p:
        return "equal"
    if eps_q == -eps_p:
        return "squeezed"
    return None


@dataclass(frozen=True)
class TwoModeBose:
    """Correlations of a two-mode bosonic Gaussian state.

    ``J_F_ij`` is NaN when not requested; ``leakage`` is the Fock mass beyond the cutoff.
    """

    I_ij: float
    J_W_ij: float
    J_F_ij: float
    leakage: float = float("nan")


def two_mode_bose(n_i, n_j, eps_q, eps_p, *, fock=True, cutoff=DEFAULT_CUTOFF,
                  max_leakage=DEFAULT_MAX_LEAKAGE):
    """Quantum, heterodyne and Fock-basis mutual information of the standard two-mode state.

    Parameters
    ----------
    n_i, n_j : float
        Mean occupations.
    eps_q, eps_p : float
        Position and momentum cross-correlations.
    fock : bool
        Compute the Fock-basis term (costs ``(cutoff+1)^4``).
    cutoff, max_leakage
        Passed to the Hermite evaluation; ``max_leakage=None`` skips the check.
    """
    if n_i < 0 or n_j < 0:
        raise ValueError("occupations must be non-negative")
    Sigma = two_mode_covariance(n_i, n_j, eps_q, eps_p)
    try:
        nu = symplectic_eigenvalues(Sigma)
    except ValueError as exc:
        sym = _symmetry_of(eps_q, eps_p)
        hint = f"; eps_max = {two_mode_eps_max(n_i, n_j, sym):.9g} for the {sym} family" if sym else ""
        raise ValueError(f"unphysical two-mode state (eps_q={eps_q}, eps_p={eps_p}){hint}") from exc
    single = bose_entropy(np.array([n_i + 0.5, n_j + 0.5]))
    I = float(single.sum() - bose_entropy(nu).sum())
    J_W = wehrl_mutual_information(Sigma)
    J_F = leak = float("nan")
    if fock:
        dist = hermite_fock_probabilities(Sigma, cutoff=cutoff)
        leak = dist.leakage
        J_F = fock_mutual_information(dist, max_leakage=max_leakage)
    return TwoModeBose(max(I, 0.0), max(J_W, 0.0), J_F, leak)


def simulate_bose(spec, times, system_occupancy="stationary", system_beta=None):
    """Ledger at each time for the product initial state of ``spec``."""
    specs = _as_specs(spec)
    H = build_bosonic_hamiltonian(specs)
    S0 = init_covariance(specs, system_occupancy, system_beta)
    prop = CovariancePropagator(H)
    return [bose_entropy_ledger(prop(S0, t), S0, specs, t=t) for t in times]
