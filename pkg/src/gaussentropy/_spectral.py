"""Rank-one and bordered (arrowhead) symmetric eigenproblems in O(m^2).

Both reduce to a secular equation over the poles ``d``. Tiny weights and
near-coincident poles are deflated first; eigenvectors of the arrowhead use
Loewner's recomputed weights so that they are orthogonal to working precision.
"""

import numpy as np

from ._kernels import arrowhead_vectors, secular_roots

_EPS = np.finfo(np.float64).eps


def _deflate(d, w, scale):
    """Split poles into deflated and active sets.

    Returns ``(active, w_active, rotations)``. Each rotation ``(i, j, c, s)``
    moves the weight of pole ``i`` onto pole ``j`` (``j`` stays active).
    """
    tol = 8.0 * _EPS * scale
    w = np.array(w, dtype=np.float64)
    keep = np.abs(w) > tol
    rotations = []
    idx = np.nonzero(keep)[0]
    for a, b in zip(idx[:-1], idx[1:]):
        if d[b] - d[a] <= tol:
            r = np.hypot(w[a], w[b])
            c, s = w[b] / r, w[a] / r
            rotations.append((a, b, c, s))
            w[b] = r
            w[a] = 0.0
            keep[a] = False
    return np.nonzero(keep)[0], w, rotations


def rank_one_eigvalsh(d, w, rho):
    """Eigenvalues of ``diag(d) + rho * w w^T`` (``d`` ascending), ascending."""
    d = np.asarray(d, dtype=np.float64)
    w = np.abs(np.asarray(w, dtype=np.float64))
    m = d.size
    if m == 0:
        return d.copy()
    if rho == 0:
        return d.copy()
    if rho < 0:
        return -rank_one_eigvalsh(-d[::-1], w[::-1], -rho)[::-1]
    scale = max(1.0, np.abs(d).max(), rho * float(w @ w))
    active, wd, _ = _deflate(d, w, scale)
    out = d.copy()
    if active.size:
        o, u = secular_roots(d[active], wd[active] ** 2, -1.0 / rho, 0)
        out[active] = d[active][o] + u
    return np.sort(out)


def arrowhead_eigh(d, w, alpha):
    """Eigen-decomposition of ``[[diag(d), w], [w^T, alpha]]`` for real ``w``.

    ``d`` must be ascending. Returns ``(lam, V)`` with ``lam`` ascending and
    ``V`` orthogonal of size ``m + 1``.
    """
    d = np.asarray(d, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    m = d.size
    sign = np.where(w < 0, -1.0, 1.0)
    w = np.abs(w)
    scale = max(1.0, np.abs(d).max(initial=0.0), abs(alpha), float(np.sqrt(w @ w)))
    active, wd, rotations = _deflate(d, w, scale)

    lam = np.empty(m + 1)
    V = np.zeros((m + 1, m + 1))
    inactive = np.setdiff1d(np.arange(m), active)
    lam[inactive] = d[inactive]
    V[inactive, inactive] = 1.0

    p = active.size
    cols = np.r_[active, m]
    if p == 0:
        lam[m] = alpha
        V[m, m] = 1.0
    else:
        da = d[active]
        o, u = secular_roots(da, wd[active] ** 2, float(alpha), 1)
        lam[cols] = da[o] + u
        X = arrowhead_vectors(da, o, u)
        V[np.ix_(cols, cols)] = X

    for a, b, c, s in reversed(rotations):
        ra, rb = V[a].copy(), V[b].copy()
        V[a] = c * ra + s * rb
        V[b] = -s * ra + c * rb
    V[:m] *= sign[:, None]

    order = np.argsort(lam, kind="stable")
    return lam[order], V[:, order]
