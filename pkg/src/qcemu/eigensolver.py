"""Dense Hermitian eigensolver: Householder reduction to a real symmetric
tridiagonal matrix followed by implicit-shift QL iteration.

Plain numpy; O(n^3) with Python-level loops only over rotations, which is
fine for the few-thousand dimensional matrices the exact-diagonalization
backend is allowed to build.
"""
from __future__ import annotations

import math

import numpy as np

_EPS = np.finfo(float).eps


def tridiagonalize(A: np.ndarray):
    """A = Q T Q^H with T real symmetric tridiagonal.

    Returns (d, e, Q): d the diagonal (n,), e the sub-diagonal (n-1,) with
    e >= 0, and Q unitary. Real symmetric input stays in real arithmetic.
    """
    A = np.asarray(A)
    real = not np.iscomplexobj(A) or not np.any(A.imag)
    A = np.array(A.real if real else A, dtype=float if real else complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    sub = np.zeros(max(n - 1, 0), dtype=A.dtype)
    vs = []
    for k in range(n - 2):
        x = A[k + 1:, k]
        nx = np.linalg.norm(x)
        x0 = x[0]
        if nx == 0.0 or nx == abs(x0) and np.all(x[1:] == 0):
            sub[k] = x0
            vs.append(None)
            continue
        ph = x0 / abs(x0) if abs(x0) > 0 else 1.0
        v = x.copy()
        v[0] += ph * nx          # reflect onto -ph*|x| e1, no cancellation
        v /= np.linalg.norm(v)
        sub[k] = -ph * nx
        # trailing block: H A H with H = 1 - 2 v v^H, as a rank-2 update
        blk = A[k + 1:, k + 1:]
        p = 2.0 * (blk @ v)
        w = p - (v.conj() @ p) * v
        blk -= np.outer(v, w.conj())
        blk -= np.outer(w, v.conj())
        vs.append(v)
    if n >= 2:
        sub[n - 2] = A[n - 1, n - 2]
    d = A.diagonal().real.copy()
    # Q = H_0 H_1 ... H_{n-3}, accumulated from the right
    Q = np.eye(n, dtype=A.dtype)
    for k in range(n - 3, -1, -1):
        v = vs[k]
        if v is None:
            continue
        blk = Q[k + 1:, k + 1:]
        blk -= 2.0 * np.outer(v, v.conj() @ blk)
    # diagonal phase similarity making the off-diagonal real and >= 0
    e = np.abs(sub)
    if real:
        delta = np.ones(n)
        for k in range(n - 1):
            delta[k + 1] = delta[k] * (1.0 if sub[k] >= 0 else -1.0)
    else:
        delta = np.ones(n, dtype=complex)
        for k in range(n - 1):
            a = e[k]
            delta[k + 1] = delta[k] * (sub[k] / a if a > 0 else 1.0)
    return d, e, Q * delta[None, :]


def tridiagonal_eigh(d, e, vectors=True):
    """Eigen-decomposition of the real symmetric tridiagonal (d, e).

    Implicit-shift QL with Wilkinson-type shift. Returns (w, Z) with
    T = Z diag(w) Z^T, eigenvalues ascending.
    """
    d = np.array(d, dtype=float)
    n = d.shape[0]
    e = np.append(np.array(e, dtype=float), 0.0)
    if e.shape[0] != n:
        raise ValueError("sub-diagonal must have length n-1")
    ZT = np.eye(n) if vectors else None   # rows of ZT are eigenvector columns
    dl = d.tolist()
    el = e.tolist()
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(dl[m]) + abs(dl[m + 1])
                if abs(el[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > 100:
                raise RuntimeError("QL iteration did not converge")
            g = (dl[l + 1] - dl[l]) / (2.0 * el[l])
            r = math.hypot(g, 1.0)
            g = dl[m] - dl[l] + el[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * el[i]
                b = c * el[i]
                r = math.hypot(f, g)
                el[i + 1] = r
                if r == 0.0:
                    dl[i + 1] -= p
                    el[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = dl[i + 1] - p
                r = (dl[i] - g) * s + 2.0 * c * b
                p = s * r
                dl[i + 1] = g + p
                g = c * r - b
                if ZT is not None:
                    zi = ZT[i]
                    zi1 = ZT[i + 1]
                    tmp = zi1.copy()
                    zi1 *= c
                    zi1 += s * zi
                    zi *= c
                    zi -= s * tmp
                i -= 1
            if underflow and i >= l:
                continue
            dl[l] -= p
            el[l] = g
            el[m] = 0.0
    w = np.array(dl)
    order = np.argsort(w, kind="stable")
    w = w[order]
    if ZT is None:
        return w, None
    return w, ZT[order].T.copy()


def eigh(A: np.ndarray):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    A = np.asarray(A)
    n = A.shape[0]
    if n == 1:
        return np.array([float(np.real(A[0, 0]))]), np.ones((1, 1), dtype=complex)
    d, e, Q = tridiagonalize(A)
    w, Z = tridiagonal_eigh(d, e)
    return w, Q @ Z
