"""Brute-force many-body oracle for small fermionic baths.

The density matrix lives on the ``2^(K+1)`` Fock space, stored block-diagonally
by total particle number (the Hamiltonian conserves it and the initial state
is diagonal). Basis index ``sum_i n_i 2^(K-i)``: mode 0 is the most
significant bit, so the ordering is lexicographic in ``(n_0, ..., n_K)``.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from ._kernels import sector_hamiltonian
from .fermion_gaussian import (
    binary_entropy,
    build_single_particle_hamiltonian,
    init_correlation_matrix,
    _as_specs,
    _bath_slices,
)
from .fock_probability import FockDistribution, fock_mutual_information
from .ledger import EntropyLedger

MAX_BATH_MODES = 12

__all__ = [
    "ManyBodyHamiltonian",
    "ManyBodyState",
    "build_many_body",
    "evolve_density",
    "exact_fock_mutual_information",
    "exact_ledger",
    "correlation_from_density",
    "occupations_from_density",
    "jordan_wigner_annihilators",
    "sector_states",
]


def sector_states(n_modes, N):
    """Sorted basis indices with exactly ``N`` occupied modes."""
    states = [sum(1 << (n_modes - 1 - i) for i in occ)
              for occ in itertools.combinations(range(n_modes), N)]
    return np.array(sorted(states), dtype=np.int64)


def _occupation_table(states, n_modes):
    shifts = n_modes - 1 - np.arange(n_modes)
    return (states[:, None] >> shifts[None, :]) & 1


@dataclass(eq=False)
class ManyBodyHamiltonian:
    """Second-quantised number-conserving Hamiltonian, one block per sector."""

    n_modes: int
    states: dict
    blocks: dict
    _eig: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return 1 << self.n_modes

    def eig(self, N):
        if N not in self._eig:
            self._eig[N] = np.linalg.eigh(self.blocks[N])
        return self._eig[N]

    def dense(self):
        H = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for N, st in self.states.items():
            H[np.ix_(st, st)] = self.blocks[N]
        return H


@dataclass(eq=False)
class ManyBodyState:
    """Density matrix, block-diagonal in total particle number."""

    n_modes: int
    states: dict
    blocks: dict

    @property
    def dim(self):
        return 1 << self.n_modes

    def trace(self):
        return float(sum(np.trace(b).real for b in self.blocks.values()))

    def diagonal(self):
        p = np.zeros(self.dim)
        for N, st in self.states.items():
            p[st] = self.blocks[N].diagonal().real
        return p

    def dense(self):
        rho = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for N, st in self.states.items():
            rho[np.ix_(st, st)] = self.blocks[N]
        return rho

    def spectrum(self):
        return np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks.values()])

    def validate(self, tol=1e-10):
        if abs(self.trace() - 1) > tol:
            raise ValueError(f"trace {self.trace()} differs from 1")
        for N, b in self.blocks.items():
            if np.abs(b - b.conj().T).max() > 1e-12:
                raise ValueError(f"sector N={N} is not Hermitian")
        if self.spectrum().min() < -tol:
            raise ValueError("density matrix has negative eigenvalues")
        return self


def _memory_estimate(n_modes):
    # rho and H blocks: sum_N C(n, N)^2 = C(2n, n) complex entries each
    return 2 * 16 * math.comb(2 * n_modes, n_modes)


def build_many_body(spec, system_occupancy=0.0):
    """Many-body Hamiltonian and the product initial state for ``spec``.

    Parameters
    ----------
    spec : FermionBathSpec or list of FermionBathSpec
    system_occupancy : float or "stationary"

    Returns
    -------
    H_many : ManyBodyHamiltonian
    rho0 : ManyBodyState
    """
    specs = _as_specs(spec)
    K = sum(s.K for s in specs)
    if K > MAX_BATH_MODES:
        raise ValueError(
            f"K={K} bath modes exceeds the oracle limit {MAX_BATH_MODES}: dense sector blocks "
            f"would need about {_memory_estimate(K + 1) / 2**30:.1f} GiB"
        )
    n = K + 1
    h = build_single_particle_hamiltonian(specs)
    occ = init_correlation_matrix(specs, system_occupancy).diagonal().real
    states, Hb, rb = {}, {}, {}
    for N in range(n + 1):
        st = sector_states(n, N)
        states[N] = st
        Hb[N] = sector_hamiltonian(h, st, n)
        table = _occupation_table(st, n)
        probs = np.prod(np.where(table == 1, occ[None, :], 1 - occ[None, :]), axis=1)
        rb[N] = np.diag(probs).astype(np.complex128)
    return ManyBodyHamiltonian(n, states, Hb), ManyBodyState(n, states, rb)


def evolve_density(rho0, H_many, t):
    """``rho(t) = exp(-iHt) rho0 exp(iHt)``, sector by sector."""
    if rho0.n_modes != H_many.n_modes:
        raise ValueError(f"dimension mismatch: state has {rho0.n_modes} modes, H has {H_many.n_modes}")
    blocks = {}
    for N, r in rho0.blocks.items():
        if t == 0:
            blocks[N] = r.copy()
            continue
        E, V = H_many.eig(N)
        U = (V * np.exp(-1j * E * t)) @ V.conj().T
        blocks[N] = U @ r @ U.conj().T
    return ManyBodyState(rho0.n_modes, rho0.states, blocks)


def occupations_from_density(rho):
    """Single-mode occupations ``<n_i>`` from the diagonal."""
    n = rho.n_modes
    p = rho.diagonal()
    table = _occupation_table(np.arange(rho.dim), n)
    return p @ table


def correlation_from_density(rho):
    """``C_ij = Tr(rho c_i^dag c_j)`` with Jordan-Wigner signs."""
    n = rho.n_modes
    C = np.zeros((n, n), dtype=np.complex128)
    for N, st in rho.states.items():
        block = rho.blocks[N]
        pos = {int(s): a for a, s in enumerate(st)}
        table = _occupation_table(st, n)
        for i in range(n):
            for j in range(n):
                if i == j:
                    C[i, i] += np.sum(block.diagonal().real * table[:, i])
                    continue
                src = np.nonzero((table[:, j] == 1) & (table[:, i] == 0))[0]
                if src.size == 0:
                    continue
                lo, hi = min(i, j), max(i, j)
                between = table[src, lo + 1:hi].sum(axis=1)
                sign = np.where(between % 2 == 1, -1.0, 1.0)
                tgt = (st[src] ^ (1 << (n - 1 - j))) | (1 << (n - 1 - i))
                tidx = np.array([pos[int(x)] for x in tgt])
                C[i, j] += np.sum(sign * block[src, tidx])
    return C


def _entropy(eigs):
    e = eigs[eigs > 1e-300]
    return float(-np.sum(e * np.log(e)))


def _environment_entropy(rho):
    # trace out mode 0 (most significant bit) by index-map summation within sectors
    n = rho.n_modes
    env_bit = 1 << (n - 1)
    S = 0.0
    for NE in range(n):
        acc = None
        for s, N in ((0, NE), (1, NE + 1)):
            if N not in rho.states:
                continue
            st = rho.states[N]
            sel = np.nonzero(((st & env_bit) != 0) == bool(s))[0]
            if sel.size == 0:
                continue
            part = rho.blocks[N][np.ix_(sel, sel)]
            acc = part if acc is None else acc + part
        if acc is not None:
            S += _entropy(np.linalg.eigvalsh(acc))
    return S


def exact_fock_mutual_information(rho):
    """Fock-basis mutual information of the full joint occupation distribution."""
    p = np.clip(rho.diagonal(), 0.0, None).reshape((2,) * rho.n_modes)
    return fock_mutual_information(FockDistribution(tuple(range(rho.n_modes)), 1, p, "fermi"))


def exact_ledger(rho_t, rho_0, spec, *, t=float("nan")):
    """Entropy ledger from exact reduced density matrices (plus exact ``J_M``).

    Fields the oracle does not provide (chain and lower bounds, localisation)
    are NaN.
    """
    specs = _as_specs(spec)
    n_t = occupations_from_density(rho_t)
    n_0 = occupations_from_density(rho_0)
    dS = float(binary_entropy(n_t[0]) - binary_entropy(n_0[0]))
    heat = flow = D_env = 0.0
    for s, sl in zip(specs, _bath_slices(specs)):
        dN = n_t[sl] - n_0[sl]
        Q = -(s.energies @ dN) + s.mu * dN.sum()
        heat += Q
        flow -= s.beta * Q
        f = s.occupations()
        D_env += float(np.sum(s.beta * (s.energies - s.mu) * (n_t[sl] - f)
                              + binary_entropy(f) - binary_entropy(n_t[sl])))
    S_S = float(binary_entropy(n_t[0]))
    S_k = float(binary_entropy(n_t[1:]).sum())
    S_SE = _entropy(rho_t.spectrum())
    S_E = _environment_entropy(rho_t)
    return EntropyLedger(
        t=float(t), sigma=dS + flow, I_M=S_S + S_k - S_SE, D_env=D_env,
        I_SE=S_S + S_E - S_SE, I_env=S_k - S_E, heat_Q=heat, dS_system=dS,
        entropy_flow=flow, J_M=exact_fock_mutual_information(rho_t),
    )


def jordan_wigner_annihilators(n_modes):
    """Dense annihilation operators on the full Fock space (mode 0 leftmost)."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)
    ops = []
    for i in range(n_modes):
        factors = [Z] * i + [a] + [I] * (n_modes - i - 1)
        op = np.array([[1.0]])
        for f in factors:
            op = np.kron(op, f)
        ops.append(op)
    return ops
