"""Compiled search for 2-vanishing subspaces over GF(p).

The form enters as a pair-constraint tensor ``T`` of shape (n, R, n): for a
vector v, ``A(v) = Σ_a v_a T[a]`` and  A(v) x = 0  ⇔  ι_x ι_v Ψ = 0.

A witness is searched as its reduced echelon basis w_1..w_r. w_1 runs over the
projective points of GF(p)^n in enumeration order (pivot 0 first, then tails
in lexicographic order); deeper rows are drawn from the linear space

    S_t = ∩_{i≤t} ker A(w_i) ∩ {x : x_j = 0 for j ≤ pivot(w_t)}

kept in reduced echelon form, with pivots not used by earlier rows.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _inv(a, p):
    # Fermat; p is prime
    result = 1
    b = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * b % p
        b = b * b % p
        e >>= 1
    return result


@njit(cache=True)
def _rref(M, nr, nc, p, piv, limit):
    """Reduce M[:nr, :nc] in place. Stops once rank exceeds ``limit`` and returns limit + 1."""
    r = 0
    for c in range(nc):
        if r == nr:
            break
        sel = -1
        for i in range(r, nr):
            if M[i, c] != 0:
                sel = i
                break
        if sel < 0:
            continue
        if sel != r:
            for j in range(c, nc):
                tmp = M[r, j]
                M[r, j] = M[sel, j]
                M[sel, j] = tmp
        inv = _inv(M[r, c], p)
        if inv != 1:
            for j in range(c, nc):
                M[r, j] = M[r, j] * inv % p
        for i in range(nr):
            if i != r:
                f = M[i, c]
                if f != 0:
                    for j in range(c, nc):
                        M[i, j] = (M[i, j] - f * M[r, j]) % p
        piv[r] = c
        r += 1
        if r > limit:
            return r
    return r


@njit(cache=True)
def _kernel_rref(M, nc, p, rank, piv, K, kpiv):
    """Kernel of an RREF matrix (rank rows, nc cols) written to K in RREF; returns its dim."""
    d = 0
    pi = 0
    for f in range(nc):
        if pi < rank and piv[pi] == f:
            pi += 1
            continue
        for j in range(nc):
            K[d, j] = 0
        K[d, f] = 1
        for i in range(rank):
            K[d, piv[i]] = (p - M[i, f]) % p
        d += 1
    _rref(K, d, nc, p, kpiv, nc)
    return d


@njit(cache=True)
def _decode(idx, n, p, v):
    """Write the idx-th projective point into v; return its pivot position."""
    for j in range(n):
        v[j] = 0
    lead = 0
    size = p ** (n - 1)
    while idx >= size:
        idx -= size
        lead += 1
        size //= p
    v[lead] = 1
    pos = n - 1
    while idx > 0:
        v[pos] = idx % p
        idx //= p
        pos -= 1
    return lead


@njit(cache=True)
def _form_matrix(T, x, p, A):
    n, R = T.shape[0], T.shape[1]
    for i in range(R):
        for j in range(n):
            A[i, j] = 0
    for a in range(n):
        xa = x[a]
        if xa != 0:
            for i in range(R):
                for j in range(n):
                    A[i, j] = (A[i, j] + xa * T[a, i, j]) % p


@njit(cache=True, nogil=True)
def search_range(T, p, r, start, stop, W):
    """Search first-row indices in [start, stop).

    Returns (index of the first row of the witness or -1, nodes visited).
    On success the witness basis is in W[:r].
    """
    n, R = T.shape[0], T.shape[1]
    v = np.zeros(n, dtype=np.int64)
    A = np.zeros((R, n), dtype=np.int64)
    Ax = np.zeros((R, n), dtype=np.int64)
    M = np.zeros((max(R, 1), n), dtype=np.int64)
    piv = np.zeros(n + 1, dtype=np.int64)
    K = np.zeros((n, n), dtype=np.int64)
    kpiv = np.zeros(n + 1, dtype=np.int64)
    bases = np.zeros((r + 1, n, n), dtype=np.int64)
    bpiv = np.zeros((r + 1, n), dtype=np.int64)
    dims = np.zeros(r + 1, dtype=np.int64)
    lead_row = np.zeros(r + 1, dtype=np.int64)
    coef = np.zeros((r + 1, n), dtype=np.int64)
    nodes = 0

    if start >= stop:
        return -1, nodes
    idx = start
    lead = _decode(idx, n, p, v)
    _form_matrix(T, v, p, A)

    while True:
        nodes += 1
        found = False
        if r == 1:
            for j in range(n):
                W[0, j] = v[j]
            return idx, nodes
        c0 = n - lead - 1
        if c0 >= r - 1:
            # S_1 = ker A(v) restricted to columns after the pivot
            for i in range(R):
                for j in range(c0):
                    M[i, j] = A[i, lead + 1 + j]
            rk = _rref(M, R, c0, p, piv, c0 - (r - 1))
            if c0 - rk >= r - 1:
                d = _kernel_rref(M, c0, p, rk, piv, K, kpiv)
                for i in range(d):
                    for j in range(n):
                        bases[1, i, j] = 0
                    for j in range(c0):
                        bases[1, i, lead + 1 + j] = K[i, j]
                    bpiv[1, i] = lead + 1 + kpiv[i]
                dims[1] = d
                for j in range(n):
                    W[0, j] = v[j]
                # depth-first over deeper rows
                t = 1
                lead_row[1] = -1
                while t >= 1:
                    d = dims[t]
                    need = r - t - 1
                    got = False
                    if lead_row[t] >= 0:
                        pos = d - 1
                        while pos > lead_row[t]:
                            coef[t, pos] += 1
                            if coef[t, pos] == p:
                                coef[t, pos] = 0
                                pos -= 1
                            else:
                                break
                        if pos > lead_row[t]:
                            got = True
                    if not got:
                        l = lead_row[t] + 1
                        while l < d and d - l - 1 >= need:
                            col = bpiv[t, l]
                            blocked = False
                            for i in range(t):
                                if W[i, col] != 0:
                                    blocked = True
                                    break
                            if not blocked:
                                break
                            l += 1
                        if l < d and d - l - 1 >= need:
                            lead_row[t] = l
                            for j in range(d):
                                coef[t, j] = 0
                            got = True
                    if not got:
                        t -= 1
                        continue
                    l = lead_row[t]
                    for j in range(n):
                        acc = bases[t, l, j]
                        for i in range(l + 1, d):
                            if coef[t, i] != 0:
                                acc += coef[t, i] * bases[t, i, j]
                        W[t, j] = acc % p
                    nodes += 1
                    if need == 0:
                        found = True
                        break
                    # S_{t+1} = span(rows after l) ∩ ker A(w_t)
                    dsub = d - l - 1
                    _form_matrix(T, W[t], p, Ax)
                    for i in range(R):
                        for c in range(dsub):
                            acc = 0
                            for j in range(n):
                                acc += Ax[i, j] * bases[t, l + 1 + c, j]
                            M[i, c] = acc % p
                    rk = _rref(M, R, dsub, p, piv, dsub - need)
                    if dsub - rk < need:
                        continue
                    dk = _kernel_rref(M, dsub, p, rk, piv, K, kpiv)
                    for i in range(dk):
                        for j in range(n):
                            acc = 0
                            for c in range(dsub):
                                if K[i, c] != 0:
                                    acc += K[i, c] * bases[t, l + 1 + c, j]
                            bases[t + 1, i, j] = acc % p
                    _rref(bases[t + 1], dk, n, p, kpiv, n)
                    for i in range(dk):
                        bpiv[t + 1, i] = kpiv[i]
                    dims[t + 1] = dk
                    t += 1
                    lead_row[t] = -1
        if found:
            return idx, nodes
        idx += 1
        if idx >= stop:
            return -1, nodes
        pos = n - 1
        while pos > lead:
            v[pos] += 1
            for i in range(R):
                for j in range(n):
                    A[i, j] = (A[i, j] + T[pos, i, j]) % p
            if v[pos] == p:
                v[pos] = 0
                pos -= 1
            else:
                break
        if pos == lead:
            lead = _decode(idx, n, p, v)
            _form_matrix(T, v, p, A)
