"""Hot numeric kernels: mod-p row reduction, matrix products, characteristic
polynomials, and the norm-form box scan used by the quadratic-field search.

Two interchangeable implementations are provided:

* ``numba`` -- @njit-compiled loops (the default when numba imports cleanly),
* ``numpy`` -- pure-numpy fallback with identical semantics.

Selection is controlled by the environment variable ``K0LAT_BACKEND``
(``numba`` | ``numpy`` | ``auto``, default ``auto``).  All kernels work on
int64 arrays; callers are responsible for keeping p small enough that
products fit (guarded in FpMatrix).  ``benchmarks/bench_kernels.py`` compares
the two backends.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "K0LAT_BACKEND"


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _py_modinv(a: int, p: int) -> int:
    return pow(int(a), p - 2, p)


def np_rref(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Reduced row echelon form of ``a`` mod p.

    Returns (rref matrix, pivot column indices, rank).
    """
    m = (a % p).astype(np.int64).copy()
    rows, cols = m.shape
    pivots = np.full(min(rows, cols), -1, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = _py_modinv(int(m[r, c]), p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        m -= np.outer(col, m[r])
        m %= p
        pivots[r] = c
        r += 1
    return m, pivots[:r].copy(), r


def np_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) % p


def np_charpoly(a: np.ndarray, p: int) -> np.ndarray:
    """Characteristic polynomial of ``a`` mod p via the Hessenberg recurrence.

    Returns coefficients c[0..n] with char(x) = sum c[k] x^k, monic (c[n]=1).
    """
    n = a.shape[0]
    h = (a % p).astype(np.int64).copy()
    # reduce to upper Hessenberg form by similarity transforms
    for j in range(n - 2):
        piv = -1
        for i in range(j + 1, n):
            if h[i, j] % p != 0:
                piv = i
                break
        if piv == -1:
            continue
        if piv != j + 1:
            h[[j + 1, piv]] = h[[piv, j + 1]]
            h[:, [j + 1, piv]] = h[:, [piv, j + 1]]
        inv = _py_modinv(int(h[j + 1, j]), p)
        for i in range(j + 2, n):
            f = (h[i, j] * inv) % p
            if f:
                h[i] = (h[i] - f * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + f * h[:, i]) % p
    # p_m(x) over the leading m x m Hessenberg blocks
    polys = [np.zeros(n + 1, dtype=np.int64) for _ in range(n + 1)]
    polys[0][0] = 1
    for m in range(1, n + 1):
        pm = np.zeros(n + 1, dtype=np.int64)
        pm[1:m + 1] = polys[m - 1][:m]
        pm = (pm - h[m - 1, m - 1] * polys[m - 1]) % p
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = (prod * h[i, i - 1]) % p
            pm = (pm - ((h[i - 1, m - 1] * prod) % p) * polys[i - 1]) % p
        polys[m] = pm % p
    return polys[n]


def np_norm_box_scan(d: int, two: int, target: int, bx: int, by: int) -> np.ndarray:
    """Coordinates (x, y) with |q(x,y)| == target on the box
    0 <= x <= bx, -by <= y <= by, where

        two == 0:  q = x^2 - d y^2          (basis 1, sqrt(d))
        two == 1:  q = ((2x + y)^2 - d y^2) / 4   (basis 1, (1+sqrt(d))/2)

    Returns an (k, 2) int64 array.
    """
    xs = np.arange(0, bx + 1, dtype=np.int64)
    ys = np.arange(-by, by + 1, dtype=np.int64)
    X = xs[:, None]
    Y = ys[None, :]
    if two:
        q = (2 * X + Y) ** 2 - d * Y * Y
        hit = np.abs(q) == 4 * target
    else:
        q = X * X - d * Y * Y
        hit = np.abs(q) == target
    xi, yi = np.nonzero(hit)
    out = np.empty((xi.size, 2), dtype=np.int64)
    out[:, 0] = xs[xi]
    out[:, 1] = ys[yi]
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def _modinv(a, p):  # pragma: no cover - compiled
        # extended Euclid; p prime, a != 0 mod p
        old_r, r = a % p, p
        old_s, s = 1, 0
        while r != 0:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
        return old_s % p

    @njit(cache=True)
    def nb_rref(a, p):  # pragma: no cover - compiled
        rows, cols = a.shape
        m = np.empty((rows, cols), dtype=np.int64)
        for i in range(rows):
            for j in range(cols):
                m[i, j] = a[i, j] % p
        pivots = np.empty(min(rows, cols), dtype=np.int64)
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            piv = -1
            for i in range(r, rows):
                if m[i, c] != 0:
                    piv = i
                    break
            if piv == -1:
                continue
            if piv != r:
                for j in range(cols):
                    t = m[r, j]
                    m[r, j] = m[piv, j]
                    m[piv, j] = t
            inv = _modinv(m[r, c], p)
            for j in range(cols):
                m[r, j] = (m[r, j] * inv) % p
            for i in range(rows):
                if i != r and m[i, c] != 0:
                    f = m[i, c]
                    for j in range(cols):
                        m[i, j] = (m[i, j] - f * m[r, j]) % p
            pivots[r] = c
            r += 1
        return m, pivots[:r].copy(), r

    @njit(cache=True)
    def nb_matmul(a, b, p):  # pragma: no cover - compiled
        n, k = a.shape
        k2, m = b.shape
        out = np.zeros((n, m), dtype=np.int64)
        for i in range(n):
            for t in range(k):
                v = a[i, t] % p
                if v == 0:
                    continue
                for j in range(m):
                    out[i, j] = (out[i, j] + v * b[t, j]) % p
        return out

    @njit(cache=True)
    def nb_charpoly(a, p):  # pragma: no cover - compiled
        n = a.shape[0]
        h = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                h[i, j] = a[i, j] % p
        for j in range(n - 2):
            piv = -1
            for i in range(j + 1, n):
                if h[i, j] != 0:
                    piv = i
                    break
            if piv == -1:
                continue
            if piv != j + 1:
                for t in range(n):
                    tmp = h[j + 1, t]
                    h[j + 1, t] = h[piv, t]
                    h[piv, t] = tmp
                for t in range(n):
                    tmp = h[t, j + 1]
                    h[t, j + 1] = h[t, piv]
                    h[t, piv] = tmp
            inv = _modinv(h[j + 1, j], p)
            for i in range(j + 2, n):
                f = (h[i, j] * inv) % p
                if f != 0:
                    for t in range(n):
                        h[i, t] = (h[i, t] - f * h[j + 1, t]) % p
                    for t in range(n):
                        h[t, j + 1] = (h[t, j + 1] + f * h[t, i]) % p
        polys = np.zeros((n + 1, n + 1), dtype=np.int64)
        polys[0, 0] = 1
        for m in range(1, n + 1):
            pm = np.zeros(n + 1, dtype=np.int64)
            for t in range(m):
                pm[t + 1] = polys[m - 1, t]
            c = h[m - 1, m - 1] % p
            for t in range(n + 1):
                pm[t] = (pm[t] - c * polys[m - 1, t]) % p
            prod = 1
            for i in range(m - 1, 0, -1):
                prod = (prod * h[i, i - 1]) % p
                f = (h[i - 1, m - 1] * prod) % p
                if f != 0:
                    for t in range(n + 1):
                        pm[t] = (pm[t] - f * polys[i - 1, t]) % p
            for t in range(n + 1):
                polys[m, t] = pm[t] % p
        return polys[n].copy()

    @njit(cache=True)
    def nb_norm_box_scan(d, two, target, bx, by):  # pragma: no cover
        cap = 64
        out = np.empty((cap, 2), dtype=np.int64)
        k = 0
        for x in range(0, bx + 1):
            for y in range(-by, by + 1):
                if two:
                    q = (2 * x + y) ** 2 - d * y * y
                    ok = q == 4 * target or q == -4 * target
                else:
                    q = x * x - d * y * y
                    ok = q == target or q == -target
                if ok:
                    if k == cap:
                        cap *= 2
                        grown = np.empty((cap, 2), dtype=np.int64)
                        grown[:k] = out[:k]
                        out = grown
                    out[k, 0] = x
                    out[k, 1] = y
                    k += 1
        return out[:k].copy()

    return {
        "rref": nb_rref,
        "matmul": nb_matmul,
        "charpoly": nb_charpoly,
        "norm_box_scan": nb_norm_box_scan,
    }


_NUMPY_IMPL = {
    "rref": np_rref,
    "matmul": np_matmul,
    "charpoly": np_charpoly,
    "norm_box_scan": np_norm_box_scan,
}


def load_backend(name: str = "auto") -> tuple[str, dict]:
    """Resolve a kernel table by name ('numba', 'numpy' or 'auto')."""
    if name not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name in ("auto", "numba"):
        try:
            return "numba", _build_numba()
        except ImportError:
            if name == "numba":
                raise
    return "numpy", _NUMPY_IMPL


BACKEND_NAME, _IMPL = load_backend(os.environ.get(_ENV_FLAG, "auto"))

rref = _IMPL["rref"]
matmul = _IMPL["matmul"]
charpoly = _IMPL["charpoly"]
norm_box_scan = _IMPL["norm_box_scan"]
