"""numba kernels for the hot inner loops.

Each kernel has a numpy/LAPACK counterpart in the public modules; the
public functions pick one through :mod:`omp_lab._backend`.
"""

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps


@njit(cache=True)
def _tridiagonalize(a, d, e):
    # Householder reduction of a symmetric matrix (overwritten) to
    # tridiagonal form: diagonal d, off-diagonal e[i] couples i and i+1.
    n = a.shape[0]
    for k in range(n - 2):
        sigma = 0.0
        for i in range(k + 1, n):
            sigma += a[i, k] * a[i, k]
        norm_x = np.sqrt(sigma)
        d[k] = a[k, k]
        if norm_x == 0.0:
            e[k] = 0.0
            continue
        x0 = a[k + 1, k]
        alpha = -norm_x if x0 >= 0.0 else norm_x
        m = n - k - 1
        v = np.empty(m)
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] -= alpha
        vnorm = 0.0
        for i in range(m):
            vnorm += v[i] * v[i]
        vnorm = np.sqrt(vnorm)
        e[k] = alpha
        if vnorm == 0.0:
            continue
        for i in range(m):
            v[i] /= vnorm
        # A22 <- H A22 H with H = I - 2 v v^T
        p = np.zeros(m)
        for i in range(m):
            s = 0.0
            for j in range(m):
                s += a[k + 1 + i, k + 1 + j] * v[j]
            p[i] = s
        vp = 0.0
        for i in range(m):
            vp += v[i] * p[i]
        for i in range(m):
            p[i] -= vp * v[i]
        for i in range(m):
            for j in range(m):
                a[k + 1 + i, k + 1 + j] -= 2.0 * (v[i] * p[j] + p[i] * v[j])
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2]
        e[n - 2] = a[n - 1, n - 2]
    d[n - 1] = a[n - 1, n - 1]
    e[n - 1] = 0.0


@njit(cache=True)
def _tridiagonal_ql(d, e):
    # Implicit QL with Wilkinson-style shifts; eigenvalues left in d.
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 200:
                break
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


@njit(cache=True)
def sym_eigvals(a):
    """All eigenvalues of a symmetric matrix, unsorted."""
    n = a.shape[0]
    work = a.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    if n == 1:
        d[0] = work[0, 0]
        return d
    _tridiagonalize(work, d, e)
    _tridiagonal_ql(d, e)
    return d


@njit(cache=True)
def sym_extremes(a):
    ev = sym_eigvals(a)
    return ev.min(), ev.max()


@njit(cache=True)
def _householder(x):
    # Returns (v, beta, alpha) with (I - beta v v^T) x = alpha e_1, v[0] = 1.
    m = x.shape[0]
    sigma = 0.0
    for i in range(1, m):
        sigma += x[i] * x[i]
    v = x.copy()
    v[0] = 1.0
    if sigma == 0.0:
        return v, 0.0, x[0]
    mu = np.sqrt(x[0] * x[0] + sigma)
    if x[0] <= 0.0:
        v0 = x[0] - mu
    else:
        v0 = -sigma / (x[0] + mu)
    beta = 2.0 * v0 * v0 / (sigma + v0 * v0)
    for i in range(1, m):
        v[i] = x[i] / v0
    v[0] = 1.0
    return v, beta, mu


@njit(cache=True)
def _reflect_rows(v, beta, mat, col0, row0):
    # Rows of ``mat`` are vectors; apply (I - beta v v^T) to the tail
    # mat[r, col0:] of every row r >= row0.
    m = v.shape[0]
    for r in range(row0, mat.shape[0]):
        s = 0.0
        for i in range(m):
            s += v[i] * mat[r, col0 + i]
        s *= beta
        for i in range(m):
            mat[r, col0 + i] -= s * v[i]


@njit(cache=True)
def lstsq_min_norm(a, y, rtol):
    """Minimum-norm least squares via pivoted QR and a complete orthogonal
    decomposition. Pivots below ``rtol * |R[0, 0]|`` count as zero.

    Returns (coefficients, numerical rank).
    """
    n, k = a.shape
    # column j of a is row j of ct, so reflections touch contiguous memory
    ct = np.ascontiguousarray(a.T)
    qty = np.empty((1, n))
    for i in range(n):
        qty[0, i] = y[i]
    perm = np.arange(k)
    norms = np.empty(k)
    steps = min(n, k)
    for j in range(steps):
        for c in range(j, k):
            s = 0.0
            for i in range(j, n):
                s += ct[c, i] * ct[c, i]
            norms[c] = s
        best = j
        for c in range(j + 1, k):
            if norms[c] > norms[best]:
                best = c
        if best != j:
            for i in range(n):
                tmp = ct[j, i]
                ct[j, i] = ct[best, i]
                ct[best, i] = tmp
            tp = perm[j]
            perm[j] = perm[best]
            perm[best] = tp
        v, beta, alpha = _householder(ct[j, j:].copy())
        if beta != 0.0:
            _reflect_rows(v, beta, ct, j, j + 1)
            _reflect_rows(v, beta, qty, j, 0)
        ct[j, j] = alpha
        for i in range(j + 1, n):
            ct[j, i] = 0.0

    # R[i, c] == ct[c, i]
    coef = np.zeros(k)
    if steps == 0 or ct[0, 0] == 0.0:
        return coef, 0
    threshold = rtol * abs(ct[0, 0])
    rank = 0
    while rank < steps and abs(ct[rank, rank]) > threshold:
        rank += 1

    u = np.zeros(k)
    if rank == k:
        for i in range(k - 1, -1, -1):
            s = qty[0, i]
            for j in range(i + 1, k):
                s -= ct[j, i] * u[j]
            u[i] = s / ct[i, i]
    else:
        # W = [R11 R12]^T (k x rank) = Z T; then u = Z T^{-T} (Q^T y)[:rank].
        # wt holds W transposed (rows are W's columns).
        wt = np.empty((rank, k))
        for j in range(rank):
            for i in range(k):
                wt[j, i] = ct[i, j]
        vs = np.zeros((rank, k))
        betas = np.zeros(rank)
        for j in range(rank):
            v, beta, alpha = _householder(wt[j, j:].copy())
            if beta != 0.0:
                _reflect_rows(v, beta, wt, j, j + 1)
            wt[j, j] = alpha
            for i in range(j + 1, k):
                wt[j, i] = 0.0
            betas[j] = beta
            for i in range(k - j):
                vs[j, j + i] = v[i]
        # T[i, j] == wt[j, i]; solve T^T t = c by forward substitution
        t = np.zeros(rank)
        for i in range(rank):
            s = qty[0, i]
            for j in range(i):
                s -= wt[i, j] * t[j]
            t[i] = s / wt[i, i]
        u_row = np.zeros((1, k))
        for i in range(rank):
            u_row[0, i] = t[i]
        for j in range(rank - 1, -1, -1):
            if betas[j] != 0.0:
                _reflect_rows(vs[j, j:].copy(), betas[j], u_row, j, 0)
        for i in range(k):
            u[i] = u_row[0, i]
    for i in range(k):
        coef[perm[i]] = u[i]
    return coef, rank


@njit(cache=True)
def fill_combinations(first, n_items, out):
    """Write lexicographically consecutive k-subsets of range(n_items) into
    ``out`` starting at ``first`` (modified in place to the next subset).

    Returns the number of rows written; fewer than ``out.shape[0]`` means the
    enumeration is exhausted.
    """
    k = first.shape[0]
    rows = out.shape[0]
    written = 0
    while written < rows:
        if first[0] < 0:
            break
        for j in range(k):
            out[written, j] = first[j]
        written += 1
        i = k - 1
        while i >= 0 and first[i] == n_items - k + i:
            i -= 1
        if i < 0:
            first[0] = -1
            break
        first[i] += 1
        for j in range(i + 1, k):
            first[j] = first[j - 1] + 1
    return written


@njit(cache=True)
def gram_extremes_batch(gram, supports):
    """(lambda_min, lambda_max) of gram[T, T] for every row T of supports."""
    m, k = supports.shape
    lo = np.empty(m)
    hi = np.empty(m)
    sub = np.empty((k, k))
    for s in range(m):
        for i in range(k):
            for j in range(k):
                sub[i, j] = gram[supports[s, i], supports[s, j]]
        a, b = sym_extremes(sub)
        lo[s] = a
        hi[s] = b
    return lo, hi
