"""Exact linear algebra over the integers and over prime fields.

Integer matrices carry arbitrary-precision Python ints; nothing here ever
touches floating point.  Mod-p matrices are thin wrappers over int64 numpy
arrays driven by the kernels in ``_kernels``.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels


class IntMatrix:
    """Immutable integer matrix (row-major tuple of tuples)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable[int]], cols: Optional[int] = None):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        self.rows = len(rows)
        if rows:
            self.cols = len(rows[0])
            if any(len(r) != self.cols for r in rows):
                raise ValueError("ragged rows")
        else:
            self.cols = 0 if cols is None else int(cols)
        self.data = rows

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(tuple((0,) * cols for _ in range(rows)), cols=cols)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int) -> "IntMatrix":
        return cls(rows, cols=cols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"IntMatrix({list(map(list, self.data))!r})"

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.data)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.data, other.data)),
            cols=self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-a for a in r) for r in self.data), cols=self.cols)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.data), cols=self.cols)

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = tuple(zip(*other.data)) if other.data else ()
        out = []
        for r in self.data:
            out.append(tuple(sum(a * b for a, b in zip(r, c)) for c in ot) if ot else (0,) * other.cols)
        return IntMatrix(tuple(out), cols=other.cols)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.data)) if self.data else (), cols=self.rows)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.data)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def is_identity(self) -> bool:
        return self.rows == self.cols and all(
            self.data[i][j] == (1 if i == j else 0) for i in range(self.rows) for j in range(self.cols)
        )

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = [list(r) for r in self.data]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if piv is None:
                    return 0
                m[k], m[piv] = m[piv], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def inverse_unimodular(self) -> "IntMatrix":
        """Inverse of a matrix with det +-1 (integer adjugate route)."""
        d = self.det()
        if d not in (1, -1):
            raise ValueError("matrix is not unimodular")
        n = self.rows
        aug = [list(self.data[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
        H, U = hnf(IntMatrix(aug))
        # H = U*[A|I]; A unimodular so the left block of H is the identity
        left = IntMatrix([r[:n] for r in H.data], cols=n)
        if not left.is_identity():
            raise ValueError("matrix is not unimodular")
        return IntMatrix([r[n:] for r in H.data], cols=n)

    def stack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("shape mismatch")
        return IntMatrix(self.data + other.data, cols=self.cols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("shape mismatch")
        return IntMatrix(tuple(a + b for a, b in zip(self.data, other.data)), cols=self.cols + other.cols)

    def kronecker(self, other: "IntMatrix") -> "IntMatrix":
        out = []
        for r1 in self.data:
            for r2 in other.data:
                out.append(tuple(a * b for a in r1 for b in r2))
        return IntMatrix(tuple(out), cols=self.cols * other.cols)


def _row_op_swap(m: list, u: list, i: int, j: int) -> None:
    m[i], m[j] = m[j], m[i]
    u[i], u[j] = u[j], u[i]


def _row_op_negate(m: list, u: list, i: int) -> None:
    m[i] = [-a for a in m[i]]
    u[i] = [-a for a in u[i]]


def _row_op_addmul(m: list, u: list, dst: int, src: int, q: int) -> None:
    if q == 0:
        return
    m[dst] = [a + q * b for a, b in zip(m[dst], m[src])]
    u[dst] = [a + q * b for a, b in zip(u[dst], u[src])]


def hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form: returns (H, U) with U unimodular, U*M = H.

    Pivots are positive, entries above each pivot reduced into [0, pivot),
    zero rows at the bottom.  Pivot selection takes the minimal nonzero
    absolute value in the column to limit entry growth.
    """
    m = [list(r) for r in M.data]
    rows, cols = M.rows, M.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    r = 0
    pivot_cols = []
    for c in range(cols):
        if r >= rows:
            break
        # repeatedly reduce entries in column c below row r against the
        # minimal-absolute-value pivot until a single nonzero remains
        while True:
            live = [i for i in range(r, rows) if m[i][c] != 0]
            if not live:
                break
            piv = min(live, key=lambda i: (abs(m[i][c]), i))
            if len(live) == 1:
                _row_op_swap(m, u, r, piv)
                break
            for i in live:
                if i == piv:
                    continue
                q = m[i][c] // m[piv][c]
                _row_op_addmul(m, u, i, piv, -q)
        if m[r][c] if r < rows and c < cols else 0:
            if m[r][c] < 0:
                _row_op_negate(m, u, r)
            pivot_cols.append((r, c))
            r += 1
    # reduce entries above pivots
    for r0, c0 in pivot_cols:
        for i in range(r0):
            q = m[i][c0] // m[r0][c0]
            _row_op_addmul(m, u, i, r0, -q)
    return IntMatrix(m, cols=cols), IntMatrix(u, cols=rows)


def snf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns (S, U, V), U*M*V = S diagonal with
    nonnegative d_1 | d_2 | ... divisor chain."""
    m = [list(r) for r in M.data]
    rows, cols = M.rows, M.cols
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    # column ops tracked on v as row ops on its transpose
    vt = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def col_swap(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        vt[i], vt[j] = vt[j], vt[i]

    def col_negate(i):
        for row in m:
            row[i] = -row[i]
        vt[i] = [-a for a in vt[i]]

    def col_addmul(dst, src, q):
        if q == 0:
            return
        for row in m:
            row[dst] += q * row[src]
        vt[dst] = [a + q * b for a, b in zip(vt[dst], vt[src])]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        while True:
            # move the minimal-absolute-value entry of the trailing block
            # into the pivot slot (fresh selection each pass limits growth)
            piv = None
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    a = abs(m[i][j])
                    if a and (best is None or a < best):
                        best = a
                        piv = (i, j)
            if piv is None:
                break
            if piv != (t, t):
                if piv[0] != t:
                    _row_op_swap(m, u, t, piv[0])
                if piv[1] != t:
                    col_swap(t, piv[1])
            # one reduction sweep against the current pivot
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    _row_op_addmul(m, u, i, t, -q)
                    if m[i][t] != 0:
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    col_addmul(j, t, -q)
                    if m[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            if any(m[i][t] for i in range(t + 1, rows)) or any(
                m[t][j] for j in range(t + 1, cols)
            ):
                continue
            # divisibility sweep: fold in a row holding a non-divisible entry
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if m[i][j] % m[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _row_op_addmul(m, u, t, bad, 1)
        if m[t][t] < 0:
            _row_op_negate(m, u, t)
        t += 1
    S = IntMatrix(m, cols=cols)
    U = IntMatrix(u, cols=rows)
    V = IntMatrix(vt, cols=cols).transpose()
    return S, U, V


def invariant_factors(M: IntMatrix) -> list[int]:
    """Nonzero diagonal of the Smith form (the divisor chain)."""
    S, _, _ = snf(M)
    out = []
    for i in range(min(S.rows, S.cols)):
        if S.data[i][i] != 0:
            out.append(S.data[i][i])
    return out


def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """A solution x of A x = b over the integers, or None when none exists."""
    b = tuple(int(v) for v in b)
    if len(b) != A.rows:
        raise ValueError("dimension mismatch")
    if A.cols == 0:
        return () if all(v == 0 for v in b) else None
    # column HNF: A * W = C with C in column staircase form
    Ht, Ut = hnf(A.transpose())
    C = Ht.transpose()  # C = A * Ut^T, columns in staircase form
    W = Ut.transpose()
    # forward substitution along staircase columns
    y = [0] * A.cols
    resid = list(b)
    for j in range(A.cols):
        piv_row = next((i for i in range(A.rows) if C.data[i][j] != 0), None)
        if piv_row is None:
            continue
        if resid[piv_row] % C.data[piv_row][j] != 0:
            return None
        q = resid[piv_row] // C.data[piv_row][j]
        y[j] = q
        if q:
            for i in range(A.rows):
                resid[i] -= q * C.data[i][j]
    if any(v != 0 for v in resid):
        return None
    x = W.apply(y)
    assert A.apply(x) == b
    return x


def kernel_basis(A: IntMatrix) -> list[tuple[int, ...]]:
    """Basis of the saturated integer kernel lattice {x : A x = 0},
    HNF-reduced for deterministic output."""
    if A.cols == 0:
        return []
    Ht, Ut = hnf(A.transpose())
    # rows of Ut matching zero rows of Ht are a basis of the kernel
    vecs = [Ut.data[i] for i in range(Ht.rows) if all(a == 0 for a in Ht.data[i])]
    if not vecs:
        return []
    H, _ = hnf(IntMatrix(vecs, cols=A.cols))
    return [r for r in H.data if any(a != 0 for a in r)]


def member_of_lattice(basis: Sequence[Sequence[int]], vec: Sequence[int], dim: int) -> Optional[tuple[int, ...]]:
    """Coordinates of ``vec`` in the integer span of ``basis`` rows, or None."""
    if not basis:
        return () if all(v == 0 for v in vec) else None
    B = IntMatrix(basis, cols=dim).transpose()
    return solve_integer(B, vec)


class FpMatrix:
    """Matrix over the prime field F_p (entries reduced into [0, p))."""

    __slots__ = ("p", "a")

    def __init__(self, p: int, data, copy: bool = True):
        p = int(p)
        if p < 2 or not is_prime(p):
            raise ValueError(f"{p} is not prime")
        a = np.asarray(data, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("need a 2d array")
        # int64 products must stay exact: p^2 * cols < 2^62
        if a.shape[1] and p * p * max(a.shape) >= 2 ** 62:
            raise ValueError("p too large for the int64 kernels")
        self.p = p
        self.a = np.mod(a, p) if copy or a.base is not None else a

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
        )

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.a.tolist()!r})"

    def __mul__(self, other: "FpMatrix") -> "FpMatrix":
        if self.p != other.p or self.cols != other.rows:
            raise ValueError("shape/field mismatch")
        return FpMatrix(self.p, _kernels.matmul(self.a, other.a, self.p), copy=False)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, (self.a + other.a) % self.p, copy=False)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, (self.a - other.a) % self.p, copy=False)

    def scale(self, c: int) -> "FpMatrix":
        return FpMatrix(self.p, (self.a * (c % self.p)) % self.p, copy=False)

    def rank(self) -> int:
        if self.a.size == 0:
            return 0
        _, _, r = _kernels.rref(self.a, self.p)
        return r

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "FpMatrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("not square")
        aug = np.hstack([self.a, np.eye(n, dtype=np.int64)])
        red, _, r = _kernels.rref(aug, self.p)
        if r < n or not np.array_equal(red[:, :n], np.eye(n, dtype=np.int64)):
            raise ZeroDivisionError("matrix not invertible mod p")
        return FpMatrix(self.p, red[:, n:], copy=False)

    def charpoly(self) -> list[int]:
        if self.rows != self.cols:
            raise ValueError("not square")
        if self.rows == 0:
            return [1]
        return [int(c) for c in _kernels.charpoly(self.a, self.p)]


def fp_nullspace(A: FpMatrix) -> list[np.ndarray]:
    """Basis vectors of {x : A x = 0} over F_p."""
    p, a = A.p, A.a
    rows, cols = a.shape
    if cols == 0:
        return []
    if rows == 0:
        return [np.eye(cols, dtype=np.int64)[i] for i in range(cols)]
    red, pivots, r = _kernels.rref(a, p)
    piv = set(int(c) for c in pivots)
    free = [c for c in range(cols) if c not in piv]
    out = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[int(c)] = (-red[i, f]) % p
        out.append(v)
    return out


def fp_solve(A: FpMatrix, b: np.ndarray) -> Optional[np.ndarray]:
    """One solution of A x = b mod p (free variables set to 0), or None."""
    p, a = A.p, A.a
    rows, cols = a.shape
    bb = np.mod(np.asarray(b, dtype=np.int64).reshape(rows, -1), p)
    aug = np.hstack([a, bb])
    red, pivots, _ = _kernels.rref(aug, p)
    for i in range(rows):
        if not red[i, :cols].any() and red[i, cols:].any():
            return None
    x = np.zeros((cols, bb.shape[1]), dtype=np.int64)
    for i, c in enumerate(pivots):
        if int(c) < cols:
            x[int(c)] = red[i, cols:]
        elif red[i, cols:].any():
            return None
    return x if bb.shape[1] > 1 else x[:, 0]


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for 64-bit range
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(bound ** 0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.nonzero(sieve)[0]]


def factorint(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk scale)."""
    n = int(n)
    if n <= 0:
        raise ValueError("need a positive integer")
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
