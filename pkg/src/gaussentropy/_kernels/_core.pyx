# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Signatures mirror :mod:`._fallback` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrtl, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()


def hermite_diagonal(cnp.ndarray R, cnp.ndarray Ry, int cutoff):
    """Renormalised multidimensional Hermite coefficients on the diagonal.

    Runs ``G[k + e_i] = (Ry_i G[k] - sum_j R_ij sqrt(k_j) G[k - e_j]) / sqrt(k_i + 1)``
    over the full ``(cutoff + 1) ** (2N)`` grid in long-double arithmetic and
    returns ``G[(n, n)]`` (real part) as an ``N``-dimensional float64 array.
    """
    cdef Py_ssize_t D = R.shape[0]
    cdef Py_ssize_t N = D // 2
    cdef Py_ssize_t c1 = cutoff + 1
    cdef Py_ssize_t total = 1
    cdef Py_ssize_t a, j, flat, i, prev, prev2, kj
    for a in range(D):
        total *= c1

    cdef long double *rr = <long double *> malloc(D * D * sizeof(long double))
    cdef long double *ri = <long double *> malloc(D * D * sizeof(long double))
    cdef long double *yr = <long double *> malloc(D * sizeof(long double))
    cdef long double *yi = <long double *> malloc(D * sizeof(long double))
    cdef long double *sq = <long double *> malloc(c1 * sizeof(long double))
    cdef Py_ssize_t *stride = <Py_ssize_t *> malloc(D * sizeof(Py_ssize_t))
    cdef Py_ssize_t *k = <Py_ssize_t *> malloc(D * sizeof(Py_ssize_t))
    cdef long double *gr = <long double *> malloc(total * sizeof(long double))
    cdef long double *gi = <long double *> malloc(total * sizeof(long double))
    if (rr == NULL or ri == NULL or yr == NULL or yi == NULL or sq == NULL
            or stride == NULL or k == NULL or gr == NULL or gi == NULL):
        free(rr); free(ri); free(yr); free(yi); free(sq)
        free(stride); free(k); free(gr); free(gi)
        raise MemoryError("Hermite grid of %d entries does not fit in memory" % total)

    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Rc = np.ascontiguousarray(R, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] yc = np.ascontiguousarray(Ry, dtype=np.complex128)
    for a in range(D):
        yr[a] = yc[a].real
        yi[a] = yc[a].imag
        for j in range(D):
            rr[a * D + j] = Rc[a, j].real
            ri[a * D + j] = Rc[a, j].imag
    for a in range(c1):
        sq[a] = sqrtl(<long double> a)
    stride[D - 1] = 1
    for a in range(D - 2, -1, -1):
        stride[a] = stride[a + 1] * c1
    for a in range(D):
        k[a] = 0

    cdef long double accr, acci, cr, ci, inv
    gr[0] = 1.0
    gi[0] = 0.0
    for flat in range(1, total):
        # odometer increment of the multi-index (C order)
        a = D - 1
        while True:
            k[a] += 1
            if k[a] < c1:
                break
            k[a] = 0
            a -= 1
        i = 0
        while k[i] == 0:
            i += 1
        prev = flat - stride[i]
        accr = yr[i] * gr[prev] - yi[i] * gi[prev]
        acci = yr[i] * gi[prev] + yi[i] * gr[prev]
        for j in range(D):
            kj = k[j] - 1 if j == i else k[j]
            if kj > 0:
                prev2 = prev - stride[j]
                cr = sq[kj]
                ci = rr[i * D + j] * gr[prev2] - ri[i * D + j] * gi[prev2]
                accr -= cr * ci
                ci = rr[i * D + j] * gi[prev2] + ri[i * D + j] * gr[prev2]
                acci -= cr * ci
        inv = 1.0 / sq[k[i]]
        gr[flat] = accr * inv
        gi[flat] = acci * inv

    out_shape = (c1,) * N
    cdef Py_ssize_t nout = 1
    for a in range(N):
        nout *= c1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nout, dtype=np.float64)
    cdef Py_ssize_t m, rem, idx
    for m in range(nout):
        # decode m into the N-index n, map to the 2N-index (n, n)
        rem = m
        idx = 0
        for a in range(N - 1, -1, -1):
            j = rem % c1
            rem //= c1
            idx += j * (stride[a] + stride[a + N])
        out[m] = <double> gr[idx]

    free(rr); free(ri); free(yr); free(yi); free(sq)
    free(stride); free(k); free(gr); free(gi)
    return out.reshape(out_shape)


def sector_hamiltonian(cnp.ndarray h, cnp.ndarray states, int n_modes):
    """Number-conserving many-body Hamiltonian restricted to one N sector.

    ``states`` holds sorted bitmasks; mode ``i`` lives on bit ``n_modes - 1 - i``.
    Matrix element of ``h_ij c_i^dag c_j`` carries the Jordan-Wigner sign
    ``(-1)**(occupied modes strictly between i and j)``.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] hc = np.ascontiguousarray(h, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] st = np.ascontiguousarray(states, dtype=np.int64)
    cdef Py_ssize_t dim = st.shape[0]
    cdef Py_ssize_t nfull = 1 << n_modes
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pos = np.full(nfull, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((dim, dim), dtype=np.complex128)
    cdef Py_ssize_t a, b, i, j, lo, hi, between
    cdef long long s, t, bi, bj, mask, s_masked
    cdef double complex diag
    for a in range(dim):
        pos[st[a]] = a
    for a in range(dim):
        s = st[a]
        diag = 0
        for i in range(n_modes):
            if (s >> (n_modes - 1 - i)) & 1:
                diag = diag + hc[i, i]
        out[a, a] = diag
        for j in range(n_modes):
            bj = 1LL << (n_modes - 1 - j)
            if not (s & bj):
                continue
            for i in range(n_modes):
                if i == j:
                    continue
                bi = 1LL << (n_modes - 1 - i)
                if s & bi or hc[i, j] == 0:
                    continue
                t = (s ^ bj) | bi
                lo = i if i < j else j
                hi = j if i < j else i
                # bits of modes lo+1 .. hi-1
                mask = ((1LL << (n_modes - 1 - lo)) - 1) ^ ((1LL << (n_modes - hi)) - 1)
                between = 0
                s_masked = s & mask
                while s_masked:
                    s_masked &= s_masked - 1
                    between += 1
                b = pos[t]
                if between & 1:
                    out[b, a] = out[b, a] - hc[i, j]
                else:
                    out[b, a] = out[b, a] + hc[i, j]
    return out


cdef inline double _secular_eval(double *d, double *w2, Py_ssize_t m, Py_ssize_t o,
                                 Py_ssize_t lp, Py_ssize_t rp, double alpha, int beta,
                                 double u, double *dL, double *dR, double *err) nogil:
    # f = alpha - beta*x - sum w2_i / (d_i - x) at x = d_o + u
    cdef double f = alpha - beta * (d[o] + u)
    cdef double den, t, sl = 0.0, sr = 0.0, e = fabs(alpha - beta * d[o]) + beta * fabs(u)
    cdef Py_ssize_t i
    for i in range(m):
        den = (d[i] - d[o]) - u
        t = w2[i] / den
        f -= t
        e += fabs(t)
        if i <= lp:
            sl += t / den
        else:
            sr += t / den
    dL[0] = sl
    dR[0] = sr
    err[0] = e
    return f


def secular_roots(cnp.ndarray d_in, cnp.ndarray w2_in, double alpha, int beta):
    """Roots of ``f(x) = alpha - beta*x - sum_i w2_i / (d_i - x)``.

    ``d`` strictly ascending, ``w2 > 0``. With ``beta = 1`` (arrowhead) there
    are ``m + 1`` roots; with ``beta = 0`` and ``alpha < 0`` (positive rank-one
    update) there are ``m``. Each root is returned as the index of its nearest
    pole and the offset from it, so gaps ``x_j - d_i`` stay accurate.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dv = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wv = np.ascontiguousarray(w2_in, dtype=np.float64)
    cdef Py_ssize_t m = dv.shape[0]
    cdef Py_ssize_t nroots = m + beta
    cdef cnp.ndarray[cnp.int64_t, ndim=1] origin = np.empty(nroots, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] offset = np.empty(nroots, dtype=np.float64)
    cdef double *d = &dv[0]
    cdef double *w2 = &wv[0]
    cdef double wsum = 0.0, eps = 2.220446049250313e-16
    cdef Py_ssize_t i, j, lp, rp, o, it
    cdef double lo, hi, u, f, fm, dL, dR, err, pL, pR, A, B, c, a2, a1, a0, disc, q, y1, y2, y
    for i in range(m):
        wsum += w2[i]
    with nogil:
        for j in range(nroots):
            if beta == 1:
                lp = j - 1
                rp = j
            else:
                lp = j
                rp = j + 1
            if lp >= 0 and rp < m:
                u = 0.5 * (d[rp] - d[lp])
                fm = _secular_eval(d, w2, m, lp, lp, rp, alpha, beta, u, &dL, &dR, &err)
                if fm >= 0:
                    o = rp
                    lo = -u
                    hi = 0.0
                else:
                    o = lp
                    lo = 0.0
                    hi = u
            elif rp >= m:
                o = lp
                lo = 0.0
                if beta == 1:
                    hi = (alpha - d[lp] if alpha > d[lp] else 0.0) + sqrtl(wsum)
                else:
                    hi = wsum / (-alpha)
                hi = hi * (1.0 + 1e-12) + 1e-300
            else:
                o = rp
                hi = 0.0
                lo = (alpha - d[rp] if alpha < d[rp] else 0.0) - sqrtl(wsum)
                lo = lo * (1.0 + 1e-12) - 1e-300
            pL = d[lp] - d[o] if lp >= 0 else 0.0
            pR = d[rp] - d[o] if rp < m else 0.0
            u = 0.5 * (lo + hi)
            for it in range(100):
                f = _secular_eval(d, w2, m, o, lp, rp, alpha, beta, u, &dL, &dR, &err)
                if fabs(f) <= 8.0 * eps * err:
                    break
                if f > 0:
                    lo = u
                else:
                    hi = u
                if hi - lo <= 4.0 * eps * (fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)):
                    break
                y = u
                if lp >= 0 and rp < m:
                    A = dL * (u - pL) * (u - pL)
                    B = (dR + beta) * (u - pR) * (u - pR)
                    c = f - A / (u - pL) - B / (u - pR)
                    a2 = c
                    a1 = -c * (pL + pR) + A + B
                    a0 = c * pL * pR - A * pR - B * pL
                    if fabs(a2) <= eps * (fabs(a1) + fabs(a0) / (hi - lo)):
                        y = -a0 / a1
                    else:
                        disc = a1 * a1 - 4.0 * a2 * a0
                        if disc >= 0:
                            q = -0.5 * (a1 + (sqrtl(disc) if a1 >= 0 else -sqrtl(disc)))
                            y1 = q / a2
                            y2 = a0 / q if q != 0 else y1
                            y = y1 if (y1 > lo and y1 < hi) else y2
                elif rp >= m:
                    A = (dL + dR) * u * u
                    c = f - A / u + beta * u
                    if beta == 1:
                        disc = sqrtl(c * c + 4.0 * A)
                        y = 0.5 * (c + disc) if c >= 0 else 2.0 * A / (disc - c)
                    elif c < 0:
                        y = -A / c
                else:
                    B = (dL + dR) * u * u
                    c = f - B / u + beta * u
                    disc = sqrtl(c * c + 4.0 * B)
                    y = 0.5 * (c - disc) if c <= 0 else -2.0 * B / (c + disc)
                if not (y > lo and y < hi) or y == u:
                    y = 0.5 * (lo + hi)
                u = y
            origin[j] = o
            offset[j] = u
    return origin, offset


def arrowhead_vectors(cnp.ndarray d_in, cnp.ndarray origin_in, cnp.ndarray offset_in):
    """Orthonormal eigenvectors of an arrowhead from its poles and roots.

    Root ``j`` is ``d[origin[j]] + offset[j]`` (``m + 1`` roots interlacing
    the ``m`` poles). Weights are recomputed from the roots by the Loewner
    product, accumulated as interlaced ratios so it neither over- nor
    underflows. Returns the ``(m + 1, m + 1)`` column-normalised matrix.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dv = np.ascontiguousarray(d_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ov = np.ascontiguousarray(origin_in, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uv = np.ascontiguousarray(offset_in, dtype=np.float64)
    cdef Py_ssize_t m = dv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] X = np.empty((m + 1, m + 1), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] what = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] norm2 = np.ones(m + 1, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double prod, g, x, s
    with nogil:
        for i in range(m):
            # |lambda_i - d_i| |lambda_m - d_i| prod_{j != i} |lambda_j - d_i| / |d_j - d_i|
            prod = fabs((dv[ov[i]] - dv[i]) + uv[i]) * fabs((dv[ov[m]] - dv[i]) + uv[m])
            for j in range(m):
                if j != i:
                    prod *= fabs((dv[ov[j]] - dv[i]) + uv[j]) / fabs(dv[j] - dv[i])
            what[i] = sqrtl(prod)
        for i in range(m):
            for j in range(m + 1):
                g = (dv[ov[j]] - dv[i]) + uv[j]
                x = what[i] / g
                X[i, j] = x
                norm2[j] += x * x
        for j in range(m + 1):
            X[m, j] = 1.0
            norm2[j] = 1.0 / sqrtl(norm2[j])
        for i in range(m + 1):
            for j in range(m + 1):
                X[i, j] *= norm2[j]
    return X
