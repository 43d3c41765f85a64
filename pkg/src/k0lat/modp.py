"""Finite-dimensional algebras and modules over prime fields: Jacobson
radicals, decomposition into summands with local endomorphism rings,
isomorphism testing, split-K0 classes, and unit lifting through surjections
of finite rings.

Module homomorphism spaces are computed from a spinning presentation
(generators + dependency relations) rather than the full Kronecker system,
which keeps the endomorphism computation cheap on 20-dimensional modules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels, fppoly
from .linalg import FpMatrix, fp_nullspace, fp_solve, is_prime


class FpAlgebra:
    """Associative unital algebra over F_p given by structure constants
    c[i, j, k] (b_i b_j = sum_k c[i,j,k] b_k) and a unit vector."""

    __slots__ = ("p", "dim", "consts", "unit", "_radical_coords")

    def __init__(self, p: int, consts, unit, validate: bool = True):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.consts = np.mod(np.asarray(consts, dtype=np.int64), p)
        if self.consts.ndim != 3 or len({*self.consts.shape}) > 1:
            raise ValueError("structure constants must be n x n x n")
        self.dim = self.consts.shape[0]
        self.unit = np.mod(np.asarray(unit, dtype=np.int64), p)
        if self.unit.shape != (self.dim,):
            raise ValueError("unit vector has wrong length")
        self._radical_coords = None
        if validate:
            self._validate()

    def _validate(self):
        c, p = self.consts, self.p
        lhs = np.einsum("ijk,klm->ijlm", c, c) % p
        rhs = np.einsum("jlk,ikm->ijlm", c, c) % p
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise ValueError(f"not associative at basis triple {tuple(int(x) for x in bad[:3])}")
        left = np.einsum("i,ijk->jk", self.unit, c) % p
        right = np.einsum("j,ijk->ik", self.unit, c) % p
        eye = np.eye(self.dim, dtype=np.int64)
        if not (np.array_equal(left, eye) and np.array_equal(right, eye)):
            raise ValueError("unit does not act as two-sided identity")

    def multiply(self, a, b) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a % self.p, b % self.p, self.consts) % self.p

    def left_mult_matrix(self, a) -> np.ndarray:
        # column j = a * b_j
        return np.einsum("i,ijk->kj", a % self.p, self.consts) % self.p

    def regular_rep(self) -> np.ndarray:
        """Stack of left multiplication matrices of the basis elements."""
        return np.stack([self.left_mult_matrix(e) for e in np.eye(self.dim, dtype=np.int64)])

    def regular_module(self) -> "FpModule":
        return FpModule(self, self.regular_rep(), validate=False)

    def radical_coords(self) -> np.ndarray:
        """Rows = coordinates of a basis of the Jacobson radical."""
        if self._radical_coords is None:
            self._radical_coords = matrix_algebra_radical(self.regular_rep(), self.p)
        return self._radical_coords

    def __eq__(self, other):
        return (
            isinstance(other, FpAlgebra)
            and self.p == other.p
            and np.array_equal(self.consts, other.consts)
            and np.array_equal(self.unit, other.unit)
        )

    def __hash__(self):
        return hash((self.p, self.consts.tobytes(), self.unit.tobytes()))

    def __repr__(self):
        return f"FpAlgebra(p={self.p}, dim={self.dim})"


class FpModule:
    """Module over an FpAlgebra: one action matrix per algebra basis element."""

    __slots__ = ("algebra", "dim", "actions", "_spin", "_fingerprint", "_decomp_cache")

    def __init__(self, algebra: FpAlgebra, actions, validate: bool = True):
        self.algebra = algebra
        acts = np.mod(np.asarray(actions, dtype=np.int64), algebra.p)
        if acts.ndim != 3 or acts.shape[0] != algebra.dim or acts.shape[1] != acts.shape[2]:
            raise ValueError("need one square action matrix per algebra basis element")
        self.actions = acts
        self.dim = acts.shape[1]
        self._spin = None
        self._fingerprint = None
        self._decomp_cache = {}
        if validate:
            self._validate()

    def _validate(self):
        p = self.algebra.p
        if self.dim == 0:
            return
        lhs = np.einsum("iab,jbc->ijac", self.actions, self.actions) % p
        rhs = np.einsum("ijk,kac->ijac", self.algebra.consts, self.actions) % p
        if not np.array_equal(lhs, rhs):
            raise ValueError("action does not respect the structure constants")
        unit_act = np.einsum("i,iab->ab", self.algebra.unit, self.actions) % p
        if not np.array_equal(unit_act, np.eye(self.dim, dtype=np.int64)):
            raise ValueError("unit does not act as the identity")

    @property
    def p(self) -> int:
        return self.algebra.p

    def act(self, coeffs) -> np.ndarray:
        return np.einsum("i,iab->ab", np.mod(coeffs, self.p), self.actions) % self.p

    def direct_sum(self, other: "FpModule") -> "FpModule":
        if self.algebra != other.algebra:
            raise ValueError("modules live over different algebras")
        n, m = self.dim, other.dim
        acts = np.zeros((self.algebra.dim, n + m, n + m), dtype=np.int64)
        acts[:, :n, :n] = self.actions
        acts[:, n:, n:] = other.actions
        return FpModule(self.algebra, acts, validate=False)

    def conjugate(self, T: np.ndarray) -> "FpModule":
        """Base change by an invertible matrix (isomorphic copy)."""
        p = self.p
        Tm = FpMatrix(p, T)
        Ti = Tm.inverse()
        acts = [
            _kernels.matmul(_kernels.matmul(Tm.a, a, p), Ti.a, p) for a in self.actions
        ]
        return FpModule(self.algebra, np.stack(acts) if acts else self.actions, validate=False)

    def __eq__(self, other):
        return (
            isinstance(other, FpModule)
            and self.algebra == other.algebra
            and np.array_equal(self.actions, other.actions)
        )

    def __hash__(self):
        return hash((self.algebra, self.actions.tobytes()))

    def __repr__(self):
        return f"FpModule(p={self.p}, dim={self.dim})"


def zero_module(algebra: FpAlgebra) -> FpModule:
    return FpModule(algebra, np.zeros((algebra.dim, 0, 0), dtype=np.int64), validate=False)


def quotient_module(M: FpModule, rows: np.ndarray) -> FpModule:
    """Quotient of M by the submodule spanned by ``rows`` (must be closed
    under the action); basis = standard vectors at the non-pivot columns."""
    p = M.p
    rows = np.mod(np.asarray(rows, dtype=np.int64).reshape(-1, M.dim), p)
    red, pivots, r = _kernels.rref(rows, p) if rows.size else (rows, np.array([], dtype=np.int64), 0)
    piv = [int(c) for c in pivots[:r]] if r else []
    free = [c for c in range(M.dim) if c not in piv]

    def reduce_vec(v):
        w = v % p
        for i, c in enumerate(piv):
            if w[c]:
                w = (w - w[c] * red[i]) % p
        return w[free]

    k = len(free)
    acts = []
    for a in M.actions:
        cols = []
        for f in free:
            img = a[:, f] % p
            cols.append(reduce_vec(img))
        acts.append(np.stack(cols, axis=1) if k else np.zeros((0, 0), dtype=np.int64))
    return FpModule(M.algebra, np.stack(acts) if acts else np.zeros((M.algebra.dim, 0, 0), dtype=np.int64))


# ---------------------------------------------------------------------------
# radical
# ---------------------------------------------------------------------------

def matrix_algebra_radical(mats: np.ndarray, p: int) -> np.ndarray:
    """Jacobson radical of the algebra spanned by ``mats`` (a stack of m
    matrices of size n x n over F_p, closed under products).

    Returns rows of coefficients with respect to ``mats``.  Uses the iterated
    characteristic-coefficient pairings: at stage i the form
    (x, y) -> c_{p^i}(xy) is biadditive on the current subspace, and the
    chain of its kernels terminates at the radical.  Stage 0 is the plain
    trace form, which settles it for p > n.
    """
    m = mats.shape[0]
    n = mats.shape[1]
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    coords = np.eye(m, dtype=np.int64)
    if n == 0:
        return coords
    i = 0
    while p ** i <= n:
        r = coords.shape[0]
        if r == 0:
            break
        elems = np.einsum("ab,bnm->anm", coords, mats) % p
        pairing = np.zeros((r, r), dtype=np.int64)
        coeff_index = n - p ** i
        for a in range(r):
            for b in range(r):
                prod = _kernels.matmul(elems[a], elems[b], p)
                if i == 0:
                    pairing[a, b] = int(np.trace(prod) % p)
                else:
                    cp = _kernels.charpoly(prod, p)
                    pairing[a, b] = int(cp[coeff_index])
        ns = fp_nullspace(FpMatrix(p, pairing))
        coords = (np.stack(ns) @ coords) % p if ns else np.zeros((0, m), dtype=np.int64)
        i += 1
    return coords


def radical(A: FpAlgebra) -> list[np.ndarray]:
    """Basis (coordinate vectors) of the Jacobson radical of A."""
    return [row.copy() for row in A.radical_coords()]


# ---------------------------------------------------------------------------
# hom spaces via spinning presentations
# ---------------------------------------------------------------------------

@dataclass
class _SpinData:
    gens: list[int]                    # which basis slot each generator occupies
    gen_vectors: np.ndarray            # the generator seed vectors (g x n)
    origin: list[tuple]                # per basis row: ("seed", j) or ("act", i, parent)
    basis: np.ndarray                  # n x n invertible, rows = spun basis
    deps: list[tuple[int, int, np.ndarray]]  # (row t, algebra gen i, coords of rho_i s_t)


def _spin_presentation(M: FpModule) -> _SpinData:
    """Greedy generating tuple plus the dependency relations discovered while
    spinning the standard basis through the action."""
    if M._spin is not None:
        return M._spin
    p, n, a = M.p, M.dim, M.algebra.dim
    rows: list[np.ndarray] = []
    origin: list[tuple] = []
    deps_raw: list[tuple[int, int, np.ndarray]] = []
    gens: list[int] = []
    gen_vectors: list[np.ndarray] = []

    # rref tracker for membership
    red = np.zeros((0, n), dtype=np.int64)

    def in_span(v) -> bool:
        r = red
        w = v.copy() % p
        for row in r:
            c = int(np.nonzero(row)[0][0]) if row.any() else None
            if c is not None and w[c]:
                w = (w - w[c] * row) % p
        return not w.any()

    def add_row(v):
        nonlocal red
        stacked = np.vstack([red, v % p])
        red, _, _ = _kernels.rref(stacked, p)
        red = red[red.any(axis=1)]

    seed_idx = 0
    while len(rows) < n:
        while seed_idx < n and in_span(np.eye(n, dtype=np.int64)[seed_idx]):
            seed_idx += 1
        assert seed_idx < n
        seed = np.eye(n, dtype=np.int64)[seed_idx]
        gens.append(len(rows))
        gen_vectors.append(seed)
        rows.append(seed)
        origin.append(("seed", len(gens) - 1))
        add_row(seed)
        # BFS closure under the action
        t = len(rows) - 1
        queue = [t]
        while queue:
            t = queue.pop(0)
            for i in range(a):
                w = (M.actions[i] @ rows[t]) % p
                if in_span(w):
                    deps_raw.append((t, i, w))
                else:
                    rows.append(w)
                    origin.append(("act", i, t))
                    add_row(w)
                    queue.append(len(rows) - 1)

    basis = np.stack(rows) % p
    # coordinates of each dependent vector in the completed basis
    Bt = FpMatrix(p, basis.T)
    deps = []
    if deps_raw:
        stacked = np.stack([w for (_, _, w) in deps_raw]).T
        sols = fp_solve(Bt, stacked)
        assert sols is not None
        if sols.ndim == 1:
            sols = sols.reshape(-1, 1)
        for k, (t, i, _) in enumerate(deps_raw):
            deps.append((t, i, sols[:, k].copy()))
    data = _SpinData(gens, np.stack(gen_vectors), origin, basis, deps)
    M._spin = data
    return data


def hom_basis(M: FpModule, N: FpModule) -> list[np.ndarray]:
    """Basis of Hom_A(M, N) as matrices (N.dim x M.dim) over F_p."""
    if M.algebra != N.algebra:
        raise ValueError("modules live over different algebras")
    p = M.p
    if M.dim == 0 or N.dim == 0:
        return []
    sp = _spin_presentation(M)
    g = len(sp.gens)
    nN = N.dim
    # word operators: phi(s_t) = W_t @ u_{j(t)}
    W: list[np.ndarray] = [None] * M.dim
    J: list[int] = [0] * M.dim
    for t, org in enumerate(sp.origin):
        if org[0] == "seed":
            W[t] = np.eye(nN, dtype=np.int64)
            J[t] = org[1]
        else:
            _, i, parent = org
            W[t] = _kernels.matmul(N.actions[i], W[parent], p)
            J[t] = J[parent]
    # constraints from dependencies
    rows = []
    for (t, i, coords) in sp.deps:
        block = np.zeros((nN, g * nN), dtype=np.int64)
        lhs = _kernels.matmul(N.actions[i], W[t], p)
        block[:, J[t] * nN : (J[t] + 1) * nN] += lhs
        for r, c in enumerate(coords):
            if c:
                block[:, J[r] * nN : (J[r] + 1) * nN] -= (c * W[r]) % p
        rows.append(block % p)
    if rows:
        system = np.vstack(rows) % p
        sols = fp_nullspace(FpMatrix(p, system))
    else:
        sols = [np.eye(g * nN, dtype=np.int64)[k] for k in range(g * nN)]
    # assemble matrices: phi columns on the spun basis, then change basis
    basis_inv = FpMatrix(p, sp.basis.T).inverse().a
    out = []
    for sol in sols:
        u = sol.reshape(g, nN)
        images = np.stack([(W[t] @ u[J[t]]) % p for t in range(M.dim)], axis=1)
        phi = _kernels.matmul(images, basis_inv, p)
        out.append(phi)
    return out


def end_basis(M: FpModule) -> list[np.ndarray]:
    return hom_basis(M, M)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

@dataclass
class Summand:
    module: FpModule
    rows: np.ndarray          # basis of the summand inside the parent (k x n)
    local_certificate: dict = field(default_factory=dict)


def _submodule(M: FpModule, rows: np.ndarray) -> FpModule:
    """Module structure induced on the row space of ``rows`` (must be
    action-invariant)."""
    p = M.p
    k = rows.shape[0]
    Bt = FpMatrix(p, rows.T % p)
    acts = []
    for a in M.actions:
        img = (a @ rows.T) % p
        sol = fp_solve(Bt, img)
        assert sol is not None, "row space is not action-invariant"
        acts.append(sol.reshape(k, k) if k else np.zeros((0, 0), dtype=np.int64))
    return FpModule(M.algebra, np.stack(acts) if acts else np.zeros((M.algebra.dim, 0, 0), dtype=np.int64), validate=False)


def _poly_of_matrix(coeffs: Sequence[int], mat: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    power = np.eye(n, dtype=np.int64)
    for c in coeffs:
        if c:
            out = (out + c * power) % p
        power = _kernels.matmul(power, mat, p)
    return out


def _fitting_split(M: FpModule, e: np.ndarray) -> Optional[list[np.ndarray]]:
    """Split M along the primary components of the charpoly of the
    endomorphism e; None when the charpoly is primary."""
    p = M.p
    cp = [int(c) for c in _kernels.charpoly(e, p)]
    fac = fppoly.factor(cp, p)
    if len(fac) <= 1:
        return None
    blocks = []
    for q, mult in sorted(fac.items()):
        qm = _poly_of_matrix(list(q), e, p)
        mat = np.eye(M.dim, dtype=np.int64)
        for _ in range(mult):
            mat = _kernels.matmul(mat, qm, p)
        ker = fp_nullspace(FpMatrix(p, mat))
        assert ker, "primary component cannot be trivial"
        blocks.append(np.stack(ker) % p)
    assert sum(b.shape[0] for b in blocks) == M.dim
    return blocks


def _semisimple_quotient(ebasis: list[np.ndarray], rad_coords: np.ndarray, p: int):
    """Structure constants of E/rad(E) plus a lift map.

    Returns (dim_s, consts, lift) where lift maps quotient coordinate vectors
    to elements of E (coordinates w.r.t. ebasis)."""
    m = len(ebasis)
    rad = rad_coords.reshape(-1, m) if rad_coords.size else np.zeros((0, m), dtype=np.int64)
    red, pivots, r = _kernels.rref(rad, p) if rad.shape[0] else (rad, np.array([], dtype=np.int64), 0)
    piv = {int(c) for c in pivots[:r]} if r else set()
    comp = [i for i in range(m) if i not in piv]
    s = len(comp)
    # projection of an E-coordinate vector onto the complement coords mod rad
    def project(vec):
        w = vec % p
        for i in range(r):
            c = int(pivots[i])
            if w[c]:
                w = (w - w[c] * red[i]) % p
        return w[comp]

    flat = np.stack([b.reshape(-1) for b in ebasis], axis=1)  # n^2 x m
    Fm = FpMatrix(p, flat)

    def coords_of_matrix(mat):
        sol = fp_solve(Fm, mat.reshape(-1))
        assert sol is not None
        return sol

    consts = np.zeros((s, s, s), dtype=np.int64)
    for a in range(s):
        for b in range(s):
            prod = _kernels.matmul(ebasis[comp[a]], ebasis[comp[b]], p)
            consts[a, b] = project(coords_of_matrix(prod))

    def lift(qvec):
        out = np.zeros(m, dtype=np.int64)
        for a, c in enumerate(qvec):
            if c:
                out[comp[a]] = c
        return out

    return s, consts % p, lift, project, comp


def _is_field_semisimple_commutative(consts: np.ndarray, p: int) -> bool:
    """For a commutative semisimple algebra: single factor iff the Frobenius
    fixed space is one-dimensional."""
    s = consts.shape[0]
    if s == 0:
        return False
    # matrix of x -> x^p in the given basis
    cols = []
    for a in range(s):
        v = np.zeros(s, dtype=np.int64)
        v[a] = 1
        w = v
        for _ in range(p - 1):
            w = np.einsum("i,j,ijk->k", w, v, consts) % p
        cols.append(w)
    frob = np.stack(cols, axis=1) % p
    fixed = fp_nullspace(FpMatrix(p, (frob - np.eye(s, dtype=np.int64)) % p))
    return len(fixed) == 1


def _locality_or_split(M: FpModule, ebasis: list[np.ndarray], rng) -> tuple[bool, Optional[list[np.ndarray]], dict]:
    """Certify End(M) local, or produce a Fitting split.

    Returns (is_local, blocks_or_None, certificate)."""
    p = M.p
    mats = np.stack(ebasis)
    rad_coords = matrix_algebra_radical(mats, p)
    s, consts, lift, project, comp = _semisimple_quotient(ebasis, rad_coords, p)
    cert = {"dim_end": len(ebasis), "dim_rad_end": int(rad_coords.shape[0]), "dim_quotient": s}
    commutative = np.array_equal(consts, np.transpose(consts, (1, 0, 2)))
    if commutative and _is_field_semisimple_commutative(consts, p):
        cert["quotient_is_field"] = True
        return True, None, cert
    # not local: hunt for an element whose charpoly on M has coprime factors
    def try_split(evec_coords):
        e = np.einsum("a,anm->nm", evec_coords % p, mats) % p
        return _fitting_split(M, e)

    candidates = []
    for a in range(s):
        v = np.zeros(s, dtype=np.int64)
        v[a] = 1
        candidates.append(lift(v))
    for a in range(s):
        for b in range(a + 1, s):
            v = np.zeros(s, dtype=np.int64)
            v[a] = 1
            v[b] = 1
            candidates.append(lift(v))
    for cand in candidates:
        blocks = try_split(cand)
        if blocks is not None:
            return False, blocks, cert
    for _ in range(256):
        cand = rng.integers(0, p, size=len(ebasis))
        blocks = try_split(np.asarray(cand, dtype=np.int64))
        if blocks is not None:
            return False, blocks, cert
    if s <= 12:
        for combo in itertools.product(range(p), repeat=s):
            if sum(combo) == 0:
                continue
            blocks = try_split(lift(np.array(combo, dtype=np.int64)))
            if blocks is not None:
                return False, blocks, cert
    raise RuntimeError("endomorphism ring is not local but no splitting was found")


def _split_recursive(M: FpModule, rng) -> list[Summand]:
    if M.dim == 0:
        return []
    ebasis = end_basis(M)
    if len(ebasis) == 1:
        return [Summand(M, np.eye(M.dim, dtype=np.int64), {"dim_end": 1, "dim_rad_end": 0})]
    # randomized Fitting attempts first
    for _ in range(24):
        coeffs = np.asarray(rng.integers(0, M.p, size=len(ebasis)), dtype=np.int64)
        e = np.einsum("a,anm->nm", coeffs, np.stack(ebasis)) % M.p
        blocks = _fitting_split(M, e)
        if blocks is not None:
            out = []
            for rows in blocks:
                sub = _submodule(M, rows)
                for inner in _split_recursive(sub, rng):
                    out.append(Summand(inner.module, (inner.rows @ rows) % M.p, inner.local_certificate))
            return out
    is_local, blocks, cert = _locality_or_split(M, ebasis, rng)
    if is_local:
        return [Summand(M, np.eye(M.dim, dtype=np.int64), cert)]
    out = []
    for rows in blocks:
        sub = _submodule(M, rows)
        for inner in _split_recursive(sub, rng):
            out.append(Summand(inner.module, (inner.rows @ rows) % M.p, inner.local_certificate))
    return out


# ---------------------------------------------------------------------------
# fingerprints and isomorphism tests
# ---------------------------------------------------------------------------

def fingerprint(M: FpModule) -> tuple:
    """Cheap isomorphism invariant: dimension, charpolys of the fixed algebra
    generators, radical filtration and socle dimensions."""
    if M._fingerprint is not None:
        return M._fingerprint
    p = M.p
    polys = tuple(tuple(int(c) for c in _kernels.charpoly(a, p)) for a in M.actions) if M.dim else ()
    rad = M.algebra.radical_coords()
    layers = []
    space = np.eye(M.dim, dtype=np.int64)
    for _ in range(M.dim):
        if space.shape[0] == 0:
            break
        imgs = []
        for coords in rad:
            act = np.einsum("i,iab->ab", coords, M.actions) % p
            imgs.append((space @ act.T) % p)
        if not imgs:
            layers.append(0)
            break
        stacked = np.vstack(imgs) % p
        red, _, r = _kernels.rref(stacked, p)
        space = red[:r]
        layers.append(r)
        if r == 0:
            break
    fp_tuple = (M.dim, polys, tuple(layers))
    M._fingerprint = fp_tuple
    return fp_tuple


def _find_invertible_combo(homs: list[np.ndarray], p: int, rng) -> Optional[np.ndarray]:
    if not homs:
        return None
    for h in homs:
        if h.shape[0] == h.shape[1] and FpMatrix(p, h).is_invertible():
            return h
    h = len(homs)
    for _ in range(128):
        coeffs = np.asarray(rng.integers(0, p, size=h), dtype=np.int64)
        cand = np.einsum("a,anm->nm", coeffs, np.stack(homs)) % p
        if cand.shape[0] == cand.shape[1] and FpMatrix(p, cand).is_invertible():
            return cand
    if h <= 8:
        for combo in itertools.product(range(p), repeat=h):
            cand = np.einsum("a,anm->nm", np.array(combo, dtype=np.int64), np.stack(homs)) % p
            if cand.shape[0] == cand.shape[1] and FpMatrix(p, cand).is_invertible():
                return cand
    return None


def _indecomposable_iso(X: FpModule, Y: FpModule, rng) -> Optional[np.ndarray]:
    """Explicit isomorphism between indecomposables, or a certified None.

    Soundness: all compositions Y -> X -> Y between non-isomorphic
    indecomposables land in the radical of End(Y); conversely an
    isomorphism produces a composition outside it."""
    if X.dim != Y.dim or fingerprint(X) != fingerprint(Y):
        return None
    p = X.p
    fs = hom_basis(X, Y)
    if not fs:
        return None
    gs = hom_basis(Y, X)
    if not gs:
        return None
    for f in fs:
        if FpMatrix(p, f).is_invertible():
            return f
    # span{g f} against rad End(X)
    ebasis = end_basis(X)
    mats = np.stack(ebasis)
    flat = np.stack([b.reshape(-1) for b in ebasis], axis=1)
    Fm = FpMatrix(p, flat)
    rad = matrix_algebra_radical(mats, p)
    rad_rows = rad.reshape(-1, len(ebasis)) if rad.size else np.zeros((0, len(ebasis)), dtype=np.int64)
    prods = []
    for f in fs:
        for g in gs:
            comp = _kernels.matmul(g, f, p)
            coords = fp_solve(Fm, comp.reshape(-1))
            assert coords is not None
            prods.append(coords)
    stacked = np.vstack([rad_rows, np.stack(prods)]) % p
    _, _, r_all = _kernels.rref(stacked, p)
    r_rad = rad_rows.shape[0]
    if r_all == r_rad:
        return None  # every composition is radical: no isomorphism exists
    iso = _find_invertible_combo(fs, p, rng)
    if iso is None:
        raise RuntimeError("isomorphism exists but no invertible combination found")
    return iso


# ---------------------------------------------------------------------------
# public decomposition API
# ---------------------------------------------------------------------------

@dataclass
class Decomposition:
    module: FpModule
    groups: list[tuple[FpModule, int]]            # (representative, multiplicity)
    summands: list[Summand]
    member_isos: list[tuple[int, int, np.ndarray]]  # (summand idx, group idx, iso rep -> summand)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(0 if seed is None else int(seed))


def decompose_full(M: FpModule, seed=0) -> Decomposition:
    key = 0 if seed is None else int(seed)
    if key in M._decomp_cache:
        return M._decomp_cache[key]
    rng = _rng(seed)
    summands = _split_recursive(M, rng)
    groups: list[tuple[FpModule, int]] = []
    member_isos: list[tuple[int, int, np.ndarray]] = []
    reps: list[FpModule] = []
    counts: list[int] = []
    for idx, sm in enumerate(summands):
        placed = False
        for gidx, rep in enumerate(reps):
            iso = _indecomposable_iso(rep, sm.module, rng)
            if iso is not None:
                counts[gidx] += 1
                member_isos.append((idx, gidx, iso))
                placed = True
                break
        if not placed:
            reps.append(sm.module)
            counts.append(1)
            member_isos.append((idx, len(reps) - 1, np.eye(sm.module.dim, dtype=np.int64)))
    order = sorted(range(len(reps)), key=lambda g: (reps[g].dim, fingerprint(reps[g])))
    remap = {g: k for k, g in enumerate(order)}
    groups = [(reps[g], counts[g]) for g in order]
    member_isos = [(idx, remap[g], iso) for (idx, g, iso) in member_isos]
    result = Decomposition(M, groups, summands, member_isos)
    M._decomp_cache[key] = result
    return result


def decompose(M: FpModule, seed=0) -> list[tuple[FpModule, int]]:
    """Indecomposable summands with multiplicities (Krull-Schmidt)."""
    return decompose_full(M, seed).groups


class K0ClassFp:
    """Class of a module in the split Grothendieck group: multiset of
    indecomposable summands.  Equality matches summands through explicit
    isomorphisms (fingerprints are used to order entries and prune)."""

    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries: list[tuple[FpModule, int]]):
        self.p = p
        self.entries = sorted(entries, key=lambda e: (e[0].dim, fingerprint(e[0])))

    @property
    def total_dim(self) -> int:
        return sum(m.dim * mult for m, mult in self.entries)

    def fingerprint_multiset(self) -> tuple:
        return tuple((m.dim, fingerprint(m), mult) for m, mult in self.entries)

    def __eq__(self, other):
        if not isinstance(other, K0ClassFp) or self.p != other.p:
            return NotImplemented
        if self.fingerprint_multiset() != other.fingerprint_multiset():
            return False
        rng = _rng(0)
        used = [False] * len(other.entries)
        for m, mult in self.entries:
            hit = False
            for j, (n, mult2) in enumerate(other.entries):
                if used[j] or mult2 != mult:
                    continue
                if _indecomposable_iso(m, n, rng) is not None:
                    used[j] = True
                    hit = True
                    break
            if not hit:
                return False
        return all(used)

    def __hash__(self):
        return hash((self.p, self.fingerprint_multiset()))

    def __add__(self, other: "K0ClassFp") -> "K0ClassFp":
        if self.p != other.p:
            raise ValueError("classes over different primes")
        rng = _rng(0)
        merged = [(m, k) for m, k in self.entries]
        for n, k2 in other.entries:
            for i, (m, k) in enumerate(merged):
                if m.dim == n.dim and _indecomposable_iso(m, n, rng) is not None:
                    merged[i] = (m, k + k2)
                    break
            else:
                merged.append((n, k2))
        return K0ClassFp(self.p, merged)

    def __repr__(self):
        parts = ", ".join(f"{mult} x dim{m.dim}" for m, mult in self.entries)
        return f"K0ClassFp({parts or '0'})"


def k0_class_fp(M: FpModule, seed=0) -> K0ClassFp:
    return K0ClassFp(M.p, decompose(M, seed))


def modules_isomorphic(M: FpModule, N: FpModule, seed=0) -> Optional[np.ndarray]:
    """An explicit invertible intertwiner M -> N, or None (decided through
    the Krull-Schmidt classes)."""
    if M.algebra != N.algebra:
        raise ValueError("modules live over different algebras")
    if M.dim != N.dim:
        return None
    p = M.p
    if M.dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if np.array_equal(M.actions, N.actions):
        return np.eye(M.dim, dtype=np.int64)
    rng = _rng(seed)
    dm = decompose_full(M, seed)
    dn = decompose_full(N, seed)
    if K0ClassFp(p, dm.groups) != K0ClassFp(p, dn.groups):
        return None
    # pair the group representatives of M with those of N
    rep_iso: dict[int, tuple[int, np.ndarray]] = {}
    used = set()
    for gm, (repm, multm) in enumerate(dm.groups):
        for gn, (repn, multn) in enumerate(dn.groups):
            if gn in used or multn != multm:
                continue
            iso = _indecomposable_iso(repm, repn, rng)
            if iso is not None:
                rep_iso[gm] = (gn, iso)
                used.add(gn)
                break
        else:
            return None
    # assemble the block isomorphism through the decomposition bases
    S_M = np.vstack([sm.rows for sm in dm.summands]) % p
    m_members: dict[int, list[tuple[int, np.ndarray]]] = {}
    for idx, g, iso in dm.member_isos:
        m_members.setdefault(g, []).append((idx, iso))
    n_members: dict[int, list[tuple[int, np.ndarray]]] = {}
    for idx, g, iso in dn.member_isos:
        n_members.setdefault(g, []).append((idx, iso))
    n_offsets = []
    off = 0
    for sm in dn.summands:
        n_offsets.append(off)
        off += sm.module.dim
    S_N = np.vstack([sm.rows for sm in dn.summands]) % p
    phi_block = np.zeros((N.dim, M.dim), dtype=np.int64)
    m_off = 0
    m_offsets = []
    for sm in dm.summands:
        m_offsets.append(m_off)
        m_off += sm.module.dim
    for g, (gn, rep_h) in rep_iso.items():
        for (mi, iso_m), (ni, iso_n) in zip(m_members[g], n_members[gn]):
            # member_M -> rep_M -> rep_N -> member_N
            inv_m = FpMatrix(p, iso_m).inverse().a
            h = _kernels.matmul(iso_n, _kernels.matmul(rep_h, inv_m, p), p)
            k = dm.summands[mi].module.dim
            phi_block[n_offsets[ni] : n_offsets[ni] + k, m_offsets[mi] : m_offsets[mi] + k] = h
    SMi = FpMatrix(p, S_M.T).inverse().a
    phi = _kernels.matmul(S_N.T, _kernels.matmul(phi_block, SMi, p), p)
    assert FpMatrix(p, phi).is_invertible()
    for i in range(M.algebra.dim):
        lhs = _kernels.matmul(phi, M.actions[i], p)
        rhs = _kernels.matmul(N.actions[i], phi, p)
        assert np.array_equal(lhs, rhs)
    return phi
