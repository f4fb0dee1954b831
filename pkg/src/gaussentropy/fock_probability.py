"""Joint occupation-number distributions of Gaussian states.

Fermions use the determinant form of Wick's theorem. Bosons use the
generating function of multidimensional Hermite polynomials, expanded by a
coefficient recurrence in extended precision.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from ._kernels import hermite_diagonal

MAX_WICK_MODES = 12
MAX_HERMITE_GRID = 5_000_000
NEG_TOL = 1e-12
DEFAULT_CUTOFF = 30
DEFAULT_MAX_LEAKAGE = 1e-6

__all__ = [
    "CutoffError",
    "FockDistribution",
    "HermiteWorkspace",
    "wick_fermi_distribution",
    "hermite_workspace",
    "hermite_fock_probabilities",
    "fock_mutual_information",
    "quadrature_rotation",
]


class CutoffError(ValueError):
    """Probability mass outside the Fock cutoff is too large for the requested use."""


@dataclass(frozen=True, eq=False)
class FockDistribution:
    """Joint distribution ``probs[n_0, ..., n_{m-1}]`` over occupation numbers.

    ``leakage`` is the probability mass beyond ``cutoff`` (zero for fermions).
    """

    modes: tuple
    cutoff: int
    probs: np.ndarray
    statistics: str
    leakage: float = 0.0

    @property
    def n_modes(self):
        return self.probs.ndim

    @property
    def total(self):
        return float(self.probs.sum())

    def marginal(self, axis):
        other = tuple(a for a in range(self.n_modes) if a != axis)
        return self.probs.sum(axis=other)

    def __getitem__(self, occupation):
        return float(self.probs[tuple(occupation)])

    def as_dict(self):
        return {n: float(self.probs[n]) for n in itertools.product(*map(range, self.probs.shape))}


def wick_fermi_distribution(C_sub, modes=None):
    """Fock-basis distribution of a fermionic Gaussian state.

    ``p(n) = det M(n)`` with ``M_ij = n_i C_ij + (1 - n_i)(delta_ij - C_ij)``,
    the determinant form of Wick's theorem. Outcomes are ordered with mode 0
    as the most significant index.
    """
    C = np.asarray(C_sub, dtype=np.complex128)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"correlation matrix must be square, got {C.shape}")
    m = C.shape[0]
    if m > MAX_WICK_MODES:
        raise ValueError(f"{m} modes requested; at most {MAX_WICK_MODES} (2^m outcomes) supported")
    occ = np.array(list(itertools.product((0, 1), repeat=m)), dtype=np.float64)
    hole = np.eye(m) - C
    M = occ[:, :, None] * C[None] + (1 - occ)[:, :, None] * hole[None]
    p = np.linalg.det(M).real.reshape((2,) * m) if m else np.ones(())
    if p.min(initial=0.0) < -1e-10:
        raise ValueError(f"negative probability {p.min():.3e}; C is not a valid state")
    p = np.clip(p, 0.0, None)
    return FockDistribution(tuple(range(m)) if modes is None else tuple(modes), 1, p, "fermi")


def quadrature_rotation(N):
    """Map from ``(q, p)`` quadratures to ``(a, a^dag)`` amplitudes."""
    I = np.eye(N)
    return np.block([[I, 1j * I], [I, -1j * I]]) / np.sqrt(2)


@dataclass(frozen=True)
class HermiteWorkspace:
    """Inputs of the Hermite recurrence: quadratic form ``R``, linear term ``R y`` and vacuum probability."""

    R: np.ndarray
    Ry: np.ndarray
    P0: float


def hermite_workspace(Sigma, xbar=None):
    """``R = U^* (1 - 2 Sigma)(1 + 2 Sigma)^{-1} U^dag`` and ``R y = 2 U^* (1 + 2 Sigma)^{-1} xbar``.

    The product ``R y`` is formed directly, which stays finite for pure states
    where ``1 - 2 Sigma`` is singular.
    """
    Sigma = np.asarray(Sigma, dtype=np.float64)
    D = Sigma.shape[0]
    if D % 2:
        raise ValueError("covariance matrix must have even dimension")
    xbar = np.zeros(D) if xbar is None else np.asarray(xbar, dtype=np.float64)
    U = quadrature_rotation(D // 2)
    I = np.eye(D)
    inv = np.linalg.inv(I + 2 * Sigma)
    R = U.conj() @ (I - 2 * Sigma) @ inv @ U.conj().T
    Ry = 2 * U.conj() @ inv @ xbar
    P0 = float(np.linalg.det(Sigma + I / 2) ** -0.5 * np.exp(-xbar @ inv @ xbar * 2 / 2))
    if not 0 < P0 <= 1 + 1e-12:
        raise ValueError(f"vacuum probability {P0} outside (0, 1]; Sigma is not physical")
    return HermiteWorkspace(R, Ry, min(P0, 1.0))


def hermite_fock_probabilities(Sigma, xbar=None, cutoff=DEFAULT_CUTOFF, modes=None):
    """Bosonic Fock distribution up to ``cutoff`` quanta per mode.

    ``p(n) = P0 G[(n, n)]`` where ``G`` are the generating-function coefficients
    scaled by ``sqrt(k!)``, filled by
    ``G[k + e_i] = (Ry_i G[k] - sum_j R_ij sqrt(k_j) G[k - e_j]) / sqrt(k_i + 1)``.
    """
    Sigma = np.asarray(Sigma, dtype=np.float64)
    N = Sigma.shape[0] // 2
    grid = (cutoff + 1) ** (2 * N)
    if grid > MAX_HERMITE_GRID:
        raise ValueError(
            f"Hermite grid (cutoff+1)^(2N) = {grid:.3g} exceeds {MAX_HERMITE_GRID:.1g}; "
            f"lower the cutoff (N={N})"
        )
    ws = hermite_workspace(Sigma, xbar)
    p = ws.P0 * hermite_diagonal(ws.R, ws.Ry, int(cutoff))
    if p.min() < -NEG_TOL:
        raise FloatingPointError(
            f"negative probability {p.min():.3e} from the Hermite recurrence; "
            "lower the cutoff or move away from the pure-state boundary"
        )
    p = np.clip(p, 0.0, None)
    leakage = max(0.0, 1.0 - float(p.sum()))
    return FockDistribution(tuple(range(N)) if modes is None else tuple(modes),
                            int(cutoff), p, "bose", leakage)


def fock_mutual_information(dist, max_leakage=DEFAULT_MAX_LEAKAGE):
    """Mutual information of the joint distribution against the product of its marginals.

    For bosonic distributions ``dist.leakage`` must not exceed ``max_leakage``
    (pass ``None`` to skip the check).
    """
    if dist.statistics == "bose" and max_leakage is not None and dist.leakage > max_leakage:
        raise CutoffError(
            f"cutoff {dist.cutoff} leaves {dist.leakage:.3e} probability outside the grid "
            f"(limit {max_leakage:.1e})"
        )
    p = np.clip(dist.probs, 0.0, None)
    if p.ndim < 2:
        return 0.0
    # condition on the grid so that truncated product states carry no information
    p = p / p.sum()
    pi = np.ones_like(p)
    for a in range(p.ndim):
        other = tuple(b for b in range(p.ndim) if b != a)
        shape = [1] * p.ndim
        shape[a] = -1
        pi = pi * p.sum(axis=other).reshape(shape)
    nz = p > 0
    return float(max(np.sum(p[nz] * np.log(p[nz] / pi[nz])), 0.0))
