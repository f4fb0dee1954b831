"""Number-conserving fermionic Gaussian states via correlation matrices.

A state is a Hermitian matrix ``C[i, j] = <c_i^dag c_j>`` with the system mode at
index 0 and the bath modes after it. Everything here is a pure function of
plain ``ndarray`` inputs.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.special import expit

from ._spectral import arrowhead_eigh, rank_one_eigvalsh
from .ledger import EntropyLedger

EIG_TOL = 1e-8
DEGENERATE_TOL = 1e-9
LN2 = math.log(2.0)

__all__ = [
    "FermionBathSpec",
    "CorrelationPropagator",
    "ConditionalStates",
    "Localization",
    "TwoModeFermi",
    "fermi",
    "binary_entropy",
    "stationary_occupancy",
    "build_single_particle_hamiltonian",
    "init_correlation_matrix",
    "evolve_correlation",
    "vn_entropy_fermi",
    "entropy_ledger",
    "perturbative_total_correlation",
    "perturbative_fock_correlation",
    "hs_lower_bound",
    "conditional_correlation_matrices",
    "holevo_chain_bound",
    "holevo_chain_terms",
    "householder_localize",
    "two_mode_fermi",
    "two_mode_correlation_matrix",
    "chain_order",
    "simulate",
]


def fermi(energy, beta, mu=0.0):
    """Fermi-Dirac occupation ``1 / (1 + exp(beta (e - mu)))``; ``beta = inf`` allowed."""
    x = np.asarray(energy, dtype=np.float64) - mu
    if np.isinf(beta):
        return np.where(x < 0, 1.0, np.where(x > 0, 0.0, 0.5))
    return expit(-beta * x)


def binary_entropy(g):
    """Elementwise ``-g ln g - (1-g) ln(1-g)`` with ``s(0) = s(1) = 0``."""
    g = np.clip(np.asarray(g, dtype=np.float64), 0.0, 1.0)
    out = np.zeros_like(g)
    inner = (g > 0) & (g < 1)
    x = g[inner]
    out[inner] = -x * np.log(x) - (1 - x) * np.log1p(-x)
    return out


@dataclass(frozen=True, eq=False)
class FermionBathSpec:
    """One fermionic reservoir tunnel-coupled to the system level.

    Build with :meth:`uniform` for the equally spaced band, or pass explicit
    ``energies`` and ``couplings``.
    """

    energies: np.ndarray
    couplings: np.ndarray
    beta: float
    mu: float = 0.0
    eps0: float = 0.0
    Gamma: float = float("nan")
    W: float = float("nan")
    name: str = ""

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.energies, dtype=np.float64))
        t = np.atleast_1d(np.asarray(self.couplings, dtype=np.complex128))
        if e.ndim != 1 or e.shape != t.shape:
            raise ValueError("energies and couplings must be 1-D arrays of equal length")
        if e.size < 1:
            raise ValueError("a bath needs at least one mode")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if np.all(t.imag == 0):
            t = t.real.copy()
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "couplings", t)

    @classmethod
    def uniform(cls, K, W, Gamma, beta, mu=0.0, eps0=0.0, band_center=None, name=""):
        """Equally spaced band ``[c - W/2, c + W/2]`` with ``t = sqrt(Gamma W / (2 pi (K-1)))``.

        ``band_center`` defaults to ``eps0``.
        """
        if int(K) != K or K < 2:
            raise ValueError(f"K must be an integer >= 2, got {K}")
        if not Gamma > 0:
            raise ValueError(f"Gamma must be positive, got {Gamma}")
        if not W > 0:
            raise ValueError(f"W must be positive, got {W}")
        K = int(K)
        c = eps0 if band_center is None else band_center
        energies = np.linspace(c - W / 2, c + W / 2, K)
        couplings = np.full(K, math.sqrt(Gamma * W / (2 * math.pi * (K - 1))))
        return cls(energies, couplings, beta, mu, eps0, Gamma, W, name)

    @property
    def K(self):
        return self.energies.size

    def occupations(self):
        return fermi(self.energies, self.beta, self.mu)


def _as_specs(spec):
    specs = [spec] if isinstance(spec, FermionBathSpec) else list(spec)
    if not specs:
        raise ValueError("at least one bath is required")
    eps0 = specs[0].eps0
    if any(s.eps0 != eps0 for s in specs):
        raise ValueError("all baths must share the same system energy eps0")
    return specs


def _bath_slices(specs):
    out, start = [], 1
    for s in specs:
        out.append(slice(start, start + s.K))
        start += s.K
    return out


def stationary_occupancy(specs):
    """Coupling-weighted mean of the bath occupations at the system level."""
    specs = _as_specs(specs)
    G = np.array([s.Gamma for s in specs])
    if not np.all(G > 0):
        raise ValueError("stationary occupancy needs positive Gamma on every bath")
    f = np.array([float(fermi(s.eps0, s.beta, s.mu)) for s in specs])
    return float(G @ f / G.sum())


def build_single_particle_hamiltonian(spec):
    """Single-particle matrix: ``eps0`` at 0, bath energies on the diagonal, couplings on row/column 0."""
    specs = _as_specs(spec)
    n = 1 + sum(s.K for s in specs)
    dtype = np.complex128 if any(np.iscomplexobj(s.couplings) for s in specs) else np.float64
    H = np.zeros((n, n), dtype=dtype)
    H[0, 0] = specs[0].eps0
    for s, sl in zip(specs, _bath_slices(specs)):
        H[sl, sl] = np.diag(s.energies)
        H[0, sl] = s.couplings
        H[sl, 0] = np.conj(s.couplings)
    return H


def init_correlation_matrix(spec, system_occupancy="stationary"):
    """Product initial state ``diag(n0, f(e_1), ..., f(e_K))``.

    ``system_occupancy="stationary"`` uses :func:`stationary_occupancy`.
    """
    specs = _as_specs(spec)
    if isinstance(system_occupancy, str):
        if system_occupancy != "stationary":
            raise ValueError(f"unknown system occupancy {system_occupancy!r}")
        n0 = stationary_occupancy(specs)
    else:
        n0 = float(system_occupancy)
    if not 0.0 <= n0 <= 1.0:
        raise ValueError(f"system occupancy must lie in [0, 1], got {n0}")
    diag = np.concatenate([[n0]] + [s.occupations() for s in specs])
    return np.diag(diag).astype(np.complex128)


def _check_square(C, name="C"):
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {C.shape}")
    return C


class CorrelationPropagator:
    """Exact propagation ``C(t) = U^* C U^T`` with ``U = exp(-i H t)``.

    ``H`` is diagonalised once; each call costs three matrix products. For a
    real ``H`` this equals ``exp(iHt) C exp(-iHt)``.
    """

    def __init__(self, H):
        H = _check_square(H, "H")
        if not np.allclose(H, H.conj().T, atol=1e-12):
            raise ValueError("H must be Hermitian")
        self.H = H
        self.energies, self.modes = np.linalg.eigh(H)

    @property
    def dim(self):
        return self.H.shape[0]

    def unitary(self, t):
        return (self.modes * np.exp(-1j * self.energies * t)) @ self.modes.conj().T

    def __call__(self, C0, t):
        C0 = _check_square(C0, "C0")
        if C0.shape[0] != self.dim:
            raise ValueError(f"dimension mismatch: C0 is {C0.shape[0]}, H is {self.dim}")
        if t == 0:
            return np.array(C0, dtype=np.complex128)
        U = self.unitary(t)
        return U.conj() @ C0 @ U.T


def evolve_correlation(C0, H, t):
    """Correlation matrix at time ``t`` under the single-particle Hamiltonian ``H``."""
    C0 = _check_square(C0, "C0")
    H = _check_square(H, "H")
    if C0.shape != H.shape:
        raise ValueError(f"dimension mismatch: C0 {C0.shape} vs H {H.shape}")
    return CorrelationPropagator(H)(C0, t)


def _spectrum(C):
    g = np.linalg.eigvalsh(C)
    if g.size and (g.min() < -EIG_TOL or g.max() > 1 + EIG_TOL):
        raise ValueError(
            f"correlation-matrix eigenvalue outside [0, 1]: [{g.min():.3e}, {g.max():.3e}]"
        )
    return g


def vn_entropy_fermi(C):
    """Von Neumann entropy of the Gaussian state with correlation matrix ``C``."""
    C = _check_square(C)
    if C.shape[0] == 0:
        return 0.0
    return float(binary_entropy(_spectrum(C)).sum())


def chain_order(specs):
    """System first, then bath modes by ascending energy (stable: earlier bath first on ties)."""
    specs = _as_specs(specs)
    e = np.concatenate([s.energies for s in specs])
    return np.r_[0, 1 + np.argsort(e, kind="stable")]


def entropy_ledger(C_t, C_0, spec, *, t=float("nan"), chain_bound=True, localize=True,
                   chain_order_mode="energy", chain_method="secular"):
    """Entropy production and its decomposition for an evolved correlation matrix.

    Parameters
    ----------
    C_t, C_0 : ndarray
        Evolved and initial correlation matrices (system at index 0).
    spec : FermionBathSpec or list of FermionBathSpec
        Baths in the order their modes appear in ``C``.
    chain_bound : bool
        Evaluate the Holevo chain bound (the dominant cost for large baths).
    localize : bool
        Evaluate ``J_SE`` after Householder localisation.
    chain_order_mode : {"energy", "index"} or array
        Mode ordering for the chain rule.
    chain_method : {"secular", "dense"}
        Incremental rank-one updates or one dense eigensolve per step.
    """
    specs = _as_specs(spec)
    C_t = _check_square(C_t, "C_t")
    C_0 = _check_square(C_0, "C_0")
    n_t = C_t.diagonal().real
    n_0 = C_0.diagonal().real

    dS = float(binary_entropy(n_t[0]) - binary_entropy(n_0[0]))
    heat = 0.0
    flow = 0.0
    D_env = 0.0
    for s, sl in zip(specs, _bath_slices(specs)):
        e = s.energies
        dN = n_t[sl] - n_0[sl]
        Q = -(e @ dN) + s.mu * dN.sum()
        heat += Q
        flow -= s.beta * Q
        f = s.occupations()
        # per-mode relative entropy to the thermal state, via the grand-potential identity
        D_env += float(np.sum(s.beta * (e - s.mu) * (n_t[sl] - f)
                              + binary_entropy(f) - binary_entropy(n_t[sl])))
    sigma = dS + flow

    S_S = float(binary_entropy(n_t[0]))
    S_k = float(binary_entropy(n_t[1:]).sum())
    S_SE = vn_entropy_fermi(C_t)
    S_E = vn_entropy_fermi(C_t[1:, 1:])
    I_M = S_S + S_k - S_SE
    I_SE = S_S + S_E - S_SE
    I_env = S_k - S_E
    bounds = hs_lower_bound(C_t)

    J_bound = float("nan")
    if chain_bound:
        if isinstance(chain_order_mode, str):
            if chain_order_mode == "energy":
                order = chain_order(specs)
            elif chain_order_mode == "index":
                order = None
            else:
                raise ValueError(f"unknown chain ordering {chain_order_mode!r}")
        else:
            order = np.asarray(chain_order_mode)
        J_bound = holevo_chain_bound(C_t, order=order, method=chain_method)
    J_SE = householder_localize(C_t).J_SE if localize else float("nan")

    return EntropyLedger(
        t=float(t), sigma=sigma, I_M=I_M, D_env=D_env, J_bound=J_bound, I_SE=I_SE,
        I_env=I_env, J_SE=J_SE, heat_Q=heat, dS_system=dS,
        hs_lower=bounds["bernigau"], gh_lower=bounds["gullans_huse"], entropy_flow=flow,
    )


def _pair_kernel(a, b):
    """``ln[a(1-b) / (b(1-a))] / (a - b)``, continuous across ``a = b``."""
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    out = np.empty(a.shape)
    close = np.abs(a - b) < DEGENERATE_TOL
    m = 0.5 * (a[close] + b[close])
    out[close] = 1.0 / (m * (1 - m))
    x, y = a[~close], b[~close]
    out[~close] = (np.log(x) + np.log1p(-y) - np.log(y) - np.log1p(-x)) / (x - y)
    return out


def _check_extreme_rows(C, occ):
    off = np.abs(C - np.diag(np.diag(C)))
    extreme = (occ <= 0) | (occ >= 1)
    if np.any(extreme & (off.max(axis=1) > 0)):
        i = int(np.nonzero(extreme & (off.max(axis=1) > 0))[0][0])
        raise ValueError(f"mode {i} has occupancy {occ[i]} but nonzero correlations")
    return extreme


def perturbative_total_correlation(C):
    """Leading-order total correlation as a sum of pairwise terms.

    ``sum_{i != j} |C_ij|^2 / 2 * ln[n_i(1-n_j) / (n_j(1-n_i))] / (n_i - n_j)``.
    """
    C = _check_square(C)
    occ = C.diagonal().real
    extreme = _check_extreme_rows(C, occ)
    live = np.nonzero(~extreme)[0]
    sub = C[np.ix_(live, live)]
    w = np.abs(sub) ** 2
    np.fill_diagonal(w, 0.0)
    h = _pair_kernel(occ[live][:, None], occ[live][None, :])
    return float(0.5 * np.sum(w * h))


def perturbative_fock_correlation(C):
    """Leading-order Fock-basis mutual information ``sum_{i<j} |C_ij|^4 / (2 v_i v_j)`` with ``v = n(1-n)``."""
    C = _check_square(C)
    occ = C.diagonal().real
    extreme = _check_extreme_rows(C, occ)
    live = np.nonzero(~extreme)[0]
    v = occ[live] * (1 - occ[live])
    w = np.abs(C[np.ix_(live, live)]) ** 4
    np.fill_diagonal(w, 0.0)
    return float(0.25 * np.sum(w / np.outer(v, v)))


def hs_lower_bound(C):
    """Lower bounds on the total correlation from the off-diagonal weight.

    Returns ``{"bernigau": 2 F, "gullans_huse": D F^2 / (N (D - N))}`` where
    ``F = sum_{i != j} |C_ij|^2``, ``D`` the dimension and ``N = Tr C``.
    """
    C = _check_square(C)
    D = C.shape[0]
    F = float(np.sum(np.abs(C) ** 2) - np.sum(np.abs(C.diagonal()) ** 2))
    F = max(F, 0.0)
    N = float(C.diagonal().real.sum())
    gh = D * F * F / (N * (D - N)) if 0 < N < D else 0.0
    return {"bernigau": 2.0 * F, "gullans_huse": gh}


@dataclass(frozen=True)
class ConditionalStates:
    """Post-measurement correlation matrices for the empty and occupied outcomes.

    The outcome with zero probability is ``None``.
    """

    C0: np.ndarray | None
    C1: np.ndarray | None
    p_occupied: float


def conditional_correlation_matrices(C, mode_index):
    """Condition on the occupation of one mode; the measured row/column is removed."""
    C = _check_square(C)
    m = int(mode_index)
    n = float(C[m, m].real)
    keep = np.r_[0:m, m + 1:C.shape[0]]
    A = C[np.ix_(keep, keep)]
    v = C[keep, m]
    vv = np.outer(v, v.conj())
    C0 = A + vv / (1 - n) if n < 1 else None
    C1 = A - vv / n if n > 0 else None
    if n <= 0:
        C0 = A.copy()
    if n >= 1:
        C1 = A.copy()
    return ConditionalStates(C0, C1, n)


def _holevo_terms_dense(C):
    n = C.shape[0]
    terms = np.empty(n - 1)
    for k in range(n - 1):
        A = C[: k + 1, : k + 1]
        v = C[: k + 1, k + 1]
        p = float(C[k + 1, k + 1].real)
        vv = np.outer(v, v.conj())
        S = vn_entropy_fermi(A)
        if p < 1:
            S -= (1 - p) * vn_entropy_fermi(A + vv / (1 - p))
        if p > 0:
            S -= p * vn_entropy_fermi(A - vv / p)
        terms[k] = S
    return terms


def _holevo_terms_secular(C):
    # Keeps the leading block diagonal: lam (spectrum) and Y = Q^dag C[:m, m:].
    n = C.shape[0]
    occ = C.diagonal().real
    terms = np.empty(n - 1)
    lam = np.array([occ[0]])
    Y = np.array(C[0:1, 1:], dtype=np.complex128)
    for k in range(n - 1):
        z = Y[:, 0]
        p = float(occ[k + 1])
        w = np.abs(z)
        S = float(binary_entropy(lam).sum())
        if p < 1:
            S -= (1 - p) * float(binary_entropy(rank_one_eigvalsh(lam, w, 1.0 / (1 - p))).sum())
        if p > 0:
            S -= p * float(binary_entropy(rank_one_eigvalsh(lam, w, -1.0 / p)).sum())
        terms[k] = S
        if k == n - 2:
            break
        phase = np.ones_like(z)
        nz = w > 0
        phase[nz] = z[nz] / w[nz]
        lam, V = arrowhead_eigh(lam, w, p)
        X = np.empty((lam.size, n - k - 2), dtype=np.complex128)
        X[:-1] = phase.conj()[:, None] * Y[:, 1:]
        X[-1] = C[k + 1, k + 2:]
        # real V acts on interleaved (re, im) columns in a single real product
        Y = (V.T @ X.view(np.float64)).view(np.complex128)
    return terms


def holevo_chain_terms(C, order=None, method="secular"):
    """Per-step Holevo quantities of the chain rule, one per added mode.

    Step ``k`` bounds the classical information that measuring mode ``k+1``
    carries about modes ``0..k``.
    """
    C = _check_square(C)
    if order is not None:
        order = np.asarray(order)
        C = C[np.ix_(order, order)]
    if C.shape[0] < 2:
        return np.zeros(0)
    if method == "secular":
        terms = _holevo_terms_secular(C)
    elif method == "dense":
        terms = _holevo_terms_dense(C)
    else:
        raise ValueError(f"unknown method {method!r}")
    # each term is a Holevo quantity; only round-off can push it below zero
    return np.where(np.abs(terms) < 1e-12, np.maximum(terms, 0.0), terms)


def holevo_chain_bound(C, order=None, method="secular"):
    """Upper bound on the classical correlation from the chain rule and the Holevo bound.

    ``order`` permutes modes before chaining (default: index order, which for a
    single equally spaced bath is system first then ascending energy).
    """
    return float(np.sum(holevo_chain_terms(C, order, method)))


@dataclass(frozen=True)
class Localization:
    """Environment rotated so the system couples to a single environment mode."""

    C_tilde: np.ndarray
    J_SE: float
    I_SE: float
    separable_witness: bool = field(default=False)


def householder_localize(C):
    """Householder rotation of the environment that moves all system-environment
    correlation onto mode 1, then the two-mode Fock mutual information.

    ``separable_witness`` is True when ``I_SE`` exceeds ``ln 2``, the maximum for
    separable states with a two-level system.
    """
    from .fock_probability import fock_mutual_information, wick_fermi_distribution

    C = np.array(_check_square(C), dtype=np.complex128)
    if C.shape[0] < 2:
        raise ValueError("localisation needs at least one environment mode")
    x = C[1:, 0].copy()
    norm = np.linalg.norm(x)
    Ct = C.copy()
    if norm > 0 and np.linalg.norm(x[1:]) > 0:
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm
        u = x.copy()
        u[0] -= alpha
        u /= np.linalg.norm(u)
        # P = 1 - 2 u u^dag applied on both sides of the environment block
        E = Ct[1:, 1:]
        E = E - 2.0 * np.outer(u, u.conj() @ E)
        E = E - 2.0 * np.outer(E @ u, u.conj())
        Ct[1:, 1:] = E
        col = np.zeros_like(x)
        col[0] = alpha
        Ct[1:, 0] = col
        Ct[0, 1:] = col.conj()
    S_S = float(binary_entropy(C[0, 0].real))
    I_SE = S_S + vn_entropy_fermi(C[1:, 1:]) - vn_entropy_fermi(C)
    J_SE = fock_mutual_information(wick_fermi_distribution(Ct[:2, :2]))
    return Localization(Ct, J_SE, I_SE, bool(I_SE > LN2))


@dataclass(frozen=True)
class TwoModeFermi:
    """Correlations of a two-mode fermionic Gaussian state.

    ``probabilities`` is ordered ``(p00, p01, p10, p11)`` in ``(n_i, n_j)``.
    """

    probabilities: np.ndarray
    I_ij: float
    J_F_ij: float


def two_mode_correlation_matrix(n_i, n_j, eps):
    return np.array([[n_i, eps], [eps, n_j]], dtype=np.complex128)


def two_mode_fermi(n_i, n_j, eps):
    """Total and Fock-basis mutual information of ``[[n_i, eps], [eps, n_j]]``."""
    eps_max = min(math.sqrt(n_i * n_j), math.sqrt((1 - n_i) * (1 - n_j)))
    if eps < 0 or eps > eps_max * (1 + 1e-12):
        raise ValueError(f"eps={eps} outside [0, eps_max={eps_max:.6g}]")
    e2 = eps * eps
    p = np.array([
        (1 - n_i) * (1 - n_j) - e2,
        (1 - n_i) * n_j + e2,
        n_i * (1 - n_j) + e2,
        n_i * n_j - e2,
    ])
    p = np.clip(p, 0.0, None)
    C = two_mode_correlation_matrix(n_i, n_j, eps)
    I = float(binary_entropy(n_i) + binary_entropy(n_j) - vn_entropy_fermi(C))
    pi = np.array([(1 - n_i) * (1 - n_j), (1 - n_i) * n_j, n_i * (1 - n_j), n_i * n_j])
    nz = p > 0
    J = float(np.sum(p[nz] * np.log(p[nz] / pi[nz])))
    return TwoModeFermi(p, max(I, 0.0), max(J, 0.0))


def simulate(spec, times, system_occupancy="stationary", **ledger_kwargs):
    """Ledger at each time for the product initial state of ``spec``."""
    specs = _as_specs(spec)
    H = build_single_particle_hamiltonian(specs)
    C0 = init_correlation_matrix(specs, system_occupancy)
    prop = CorrelationPropagator(H)
    return [entropy_ledger(prop(C0, t), C0, specs, t=t, **ledger_kwargs) for t in times]
