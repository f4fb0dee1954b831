"""Pure numpy implementations of the compiled kernels.

Same signatures and results as the Cython module; used when the extension
was not built or ``GAUSSENTROPY_PURE_PYTHON`` is set.
"""

import numpy as np


def hermite_diagonal(R, Ry, cutoff):
    """Renormalised Hermite coefficients ``G[(n, n)]`` in extended precision.

    The grid is filled axis by axis: along axis ``a`` every entry with zero
    indices on axes ``< a`` is reached from a slab that is already complete,
    so each step is one vectorised slab update.
    """
    R = np.asarray(R, dtype=np.clongdouble)
    Ry = np.asarray(Ry, dtype=np.clongdouble)
    D = R.shape[0]
    N = D // 2
    c1 = cutoff + 1
    sq = np.sqrt(np.arange(c1, dtype=np.longdouble))
    G = np.zeros((c1,) * D, dtype=np.clongdouble)

    for a in range(D - 1, -1, -1):
        lead = (0,) * a
        rest = D - a - 1
        if a == D - 1:
            G[lead + (0,)] = 1.0
        for k in range(c1 - 1):
            cur = G[lead + (k,)]
            new = Ry[a] * cur
            if k > 0:
                new = new - R[a, a] * sq[k] * G[lead + (k - 1,)]
            for j in range(a + 1, D):
                ax = j - a - 1
                shifted = np.zeros_like(cur)
                dst = [slice(None)] * rest
                src = [slice(None)] * rest
                dst[ax] = slice(1, None)
                src[ax] = slice(None, -1)
                weights = sq[1:].reshape((-1,) + (1,) * (rest - ax - 1))
                shifted[tuple(dst)] = weights * cur[tuple(src)]
                new = new - R[a, j] * shifted
            G[lead + (k + 1,)] = new / sq[k + 1]

    idx = np.indices((c1,) * N).reshape(N, -1)
    diag = G[tuple(idx) + tuple(idx)]
    return diag.real.astype(np.float64).reshape((c1,) * N)


def sector_hamiltonian(h, states, n_modes):
    """Number-conserving Hamiltonian on one N sector (Jordan-Wigner signs)."""
    h = np.asarray(h, dtype=np.complex128)
    states = np.asarray(states, dtype=np.int64)
    dim = states.size
    pos = np.full(1 << n_modes, -1, dtype=np.int64)
    pos[states] = np.arange(dim)
    shifts = n_modes - 1 - np.arange(n_modes)
    occ = (states[:, None] >> shifts[None, :]) & 1
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[np.arange(dim), np.arange(dim)] = occ @ np.diag(h)
    for i in range(n_modes):
        for j in range(n_modes):
            if i == j or h[i, j] == 0:
                continue
            src = np.nonzero((occ[:, j] == 1) & (occ[:, i] == 0))[0]
            if src.size == 0:
                continue
            lo, hi = min(i, j), max(i, j)
            between = occ[src, lo + 1:hi].sum(axis=1)
            sign = np.where(between % 2 == 1, -1.0, 1.0)
            s = states[src]
            t = (s ^ (1 << int(shifts[j]))) | (1 << int(shifts[i]))
            out[pos[t], src] += sign * h[i, j]
    return out


def secular_roots(d, w2, alpha, beta):
    """Roots of ``f(x) = alpha - beta*x - sum_i w2_i / (d_i - x)``.

    Vectorised over roots: every iteration advances all brackets at once with
    the same two-pole rational model and bisection safeguard as the compiled
    version. Returns ``(origin, offset)`` with ``x_j = d[origin_j] + offset_j``.
    """
    d = np.ascontiguousarray(d, dtype=np.float64)
    w2 = np.ascontiguousarray(w2, dtype=np.float64)
    m = d.size
    beta = int(beta)
    R = m + beta
    eps = np.finfo(np.float64).eps
    wsum = w2.sum()
    j = np.arange(R)
    lp = j - 1 if beta == 1 else j
    rp = j if beta == 1 else j + 1
    has_l = lp >= 0
    has_r = rp < m
    lpc = np.clip(lp, 0, m - 1)
    rpc = np.clip(rp, 0, m - 1)

    def evaluate(o, u, lps):
        den = (d[None, :] - d[o][:, None]) - u[:, None]
        t = w2[None, :] / den
        f = alpha - beta * (d[o] + u) - t.sum(axis=1)
        err = np.abs(alpha - beta * d[o]) + beta * np.abs(u) + np.abs(t).sum(axis=1)
        left = np.arange(m)[None, :] <= lps[:, None]
        q = t / den
        return f, np.where(left, q, 0.0).sum(axis=1), np.where(left, 0.0, q).sum(axis=1), err

    both = has_l & has_r
    half = np.where(both, 0.5 * (d[rpc] - d[lpc]), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        fm, _, _, _ = evaluate(lpc, half, lp)
    right_origin = both & (fm >= 0)
    o = np.where(right_origin | ~has_l, rpc, lpc)
    lo = np.where(right_origin, -half, 0.0)
    hi = np.where(both & ~right_origin, half, 0.0)
    top = np.maximum(alpha - d[lpc], 0.0) + np.sqrt(wsum) if beta == 1 else wsum / (-alpha)
    hi = np.where(~has_r, top * (1 + 1e-12) + 1e-300, hi)
    bottom = np.minimum(alpha - d[rpc], 0.0) - np.sqrt(wsum)
    lo = np.where(~has_l, bottom * (1 + 1e-12) - 1e-300, lo)
    pL = np.where(has_l, d[lpc] - d[o], 0.0)
    pR = np.where(has_r, d[rpc] - d[o], 0.0)
    u = 0.5 * (lo + hi)
    active = np.ones(R, dtype=bool)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(100):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            f, dL, dR, err = evaluate(o[idx], u[idx], lp[idx])
            done = np.abs(f) <= 8 * eps * err
            pos = f > 0
            lo[idx] = np.where(pos & ~done, u[idx], lo[idx])
            hi[idx] = np.where(~pos & ~done, u[idx], hi[idx])
            l_, h_ = lo[idx], hi[idx]
            done |= h_ - l_ <= 4 * eps * np.maximum(np.abs(l_), np.abs(h_))
            uu = u[idx]
            bl, br = has_l[idx], has_r[idx]
            a_pL, a_pR = pL[idx], pR[idx]

            A = dL * (uu - a_pL) ** 2
            B = (dR + beta) * (uu - a_pR) ** 2
            c = f - A / (uu - a_pL) - B / (uu - a_pR)
            a2 = c
            a1 = -c * (a_pL + a_pR) + A + B
            a0 = c * a_pL * a_pR - A * a_pR - B * a_pL
            disc = np.sqrt(np.maximum(a1 * a1 - 4 * a2 * a0, 0.0))
            qq = -0.5 * (a1 + np.where(a1 >= 0, disc, -disc))
            y1 = qq / a2
            y2 = a0 / qq
            y_int = np.where((y1 > l_) & (y1 < h_), y1, y2)
            y_int = np.where(np.abs(a2) <= eps * (np.abs(a1) + np.abs(a0) / (h_ - l_)), -a0 / a1, y_int)

            Ae = (dL + dR) * uu * uu
            ce = f - Ae / uu + beta * uu
            if beta == 1:
                de = np.sqrt(ce * ce + 4 * Ae)
                y_right = np.where(ce >= 0, 0.5 * (ce + de), 2 * Ae / (de - ce))
                y_left = np.where(ce <= 0, 0.5 * (ce - de), -2 * Ae / (ce + de))
            else:
                y_right = np.where(ce < 0, -Ae / ce, np.nan)
                y_left = np.full_like(uu, np.nan)

            y = np.where(bl & br, y_int, np.where(br, y_left, y_right))
            bad = ~((y > l_) & (y < h_)) | (y == uu)
            y = np.where(bad, 0.5 * (l_ + h_), y)
            u[idx] = np.where(done, uu, y)
            active[idx] = ~done
    return o.astype(np.int64), u


def arrowhead_vectors(d, origin, offset):
    d = np.asarray(d, dtype=np.float64)
    origin = np.asarray(origin, dtype=np.intp)
    offset = np.asarray(offset, dtype=np.float64)
    m = d.size
    # gaps[i, j] = lambda_j - d_i, formed relative to each root's own pole
    gaps = (d[origin][None, :] - d[:, None]) + offset[None, :]
    pole_gaps = d[None, :] - d[:, None]
    np.fill_diagonal(pole_gaps, 1.0)
    logw2 = np.log(np.abs(gaps)).sum(axis=1) - np.log(np.abs(pole_gaps)).sum(axis=1)
    X = np.empty((m + 1, m + 1))
    X[:m] = np.exp(0.5 * logw2)[:, None] / gaps
    X[m] = 1.0
    X /= np.linalg.norm(X, axis=0)[None, :]
    return X
