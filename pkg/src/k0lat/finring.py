"""Rings presented on a finitely generated abelian group (product of cyclic
groups Z/d_i, with d_i = 0 standing for a free Z summand), and constructive
unit lifting through surjections.

The lifting algorithm mirrors the artinian argument: lift the unit modulo
the Jacobson radical, where the kernel ideal splits off through its central
idempotent, then correct by a radical element.  Surjections out of a ring
with free summands reduce to the finite case modulo N = |kernel| via the
fiber product of R/NR and S over S/NS; an infinite kernel is rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .linalg import IntMatrix, factorint, hnf, kernel_basis, member_of_lattice, solve_integer
from .modp import FpAlgebra
from .linalg import FpMatrix, fp_nullspace


class NotSurjective(ValueError):
    pass


class NotUnit(ValueError):
    pass


class KernelInfinite(ValueError):
    pass


class NotSplit(ValueError):
    pass


class TooLarge(ValueError):
    def __init__(self, cutoff):
        self.cutoff = cutoff
        super().__init__(f"enumeration cutoff {cutoff} exceeded")


class FiniteRing:
    """Ring on the abelian group Z/d_1 x ... x Z/d_r given by a generator
    multiplication table.  d_i = 0 encodes a free summand; most instances are
    finite and `size` reports the order (None when infinite)."""

    __slots__ = ("moduli", "table", "unit", "rank")

    def __init__(self, moduli: Sequence[int], table, unit, validate: bool = True):
        self.moduli = tuple(int(d) for d in moduli)
        if any(d < 0 for d in self.moduli):
            raise ValueError("moduli must be nonnegative")
        self.rank = len(self.moduli)
        self.table = tuple(
            tuple(self._reduce(row) for row in plane) for plane in table
        )
        self.unit = self._reduce(unit)
        if len(self.table) != self.rank or any(len(p) != self.rank for p in self.table):
            raise ValueError("table has wrong shape")
        if validate:
            self._validate()

    def _reduce(self, v) -> tuple[int, ...]:
        return tuple(
            int(x) % d if d else int(x) for x, d in zip(v, self.moduli)
        )

    @property
    def size(self) -> Optional[int]:
        if any(d == 0 for d in self.moduli):
            return None
        return math.prod(self.moduli) if self.moduli else 1

    def add(self, a, b):
        return self._reduce([x + y for x, y in zip(a, b)])

    def neg(self, a):
        return self._reduce([-x for x in a])

    def multiply(self, a, b):
        out = [0] * self.rank
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                t = self.table[i][j]
                f = ai * bj
                for k in range(self.rank):
                    if t[k]:
                        out[k] += f * t[k]
        return self._reduce(out)

    def _validate(self):
        r = self.rank
        basis = [tuple(1 if t == i else 0 for t in range(r)) for i in range(r)]
        # the table must respect the relations d_i g_i = 0
        for i in range(r):
            for j in range(r):
                for side in (
                    [self.moduli[i] * x for x in self.table[i][j]],
                    [self.moduli[j] * x for x in self.table[i][j]],
                ):
                    if any((x % d if d else x) for x, d in zip(side, self.moduli)):
                        raise ValueError(f"product g_{i} g_{j} ill-defined under the relations")
        for i in range(r):
            if self.multiply(self.unit, basis[i]) != basis[i] or self.multiply(basis[i], self.unit) != basis[i]:
                raise ValueError(f"unit law fails at generator {i}")
        for i in range(r):
            for j in range(r):
                for k in range(r):
                    left = self.multiply(self.table[i][j], basis[k])
                    right = self.multiply(basis[i], self.table[j][k])
                    if left != right:
                        raise ValueError(f"not associative at ({i}, {j}, {k})")

    def relations_rows(self) -> list[tuple[int, ...]]:
        return [
            tuple(self.moduli[i] if t == i else 0 for t in range(self.rank))
            for i in range(self.rank)
            if self.moduli[i]
        ]

    def left_mult_rows(self, x) -> IntMatrix:
        """Matrix L with (x * y) = y L for row vectors y."""
        rows = []
        for j in range(self.rank):
            acc = [0] * self.rank
            for i, xi in enumerate(x):
                if xi:
                    for k in range(self.rank):
                        acc[k] += xi * self.table[i][j][k]
            rows.append(acc)
        return IntMatrix(rows, cols=self.rank)

    def right_mult_rows(self, x) -> IntMatrix:
        """Matrix R with (y * x) = y R for row vectors y."""
        rows = []
        for j in range(self.rank):
            acc = [0] * self.rank
            for i, xi in enumerate(x):
                if xi:
                    for k in range(self.rank):
                        acc[k] += xi * self.table[j][i][k]
            rows.append(acc)
        return IntMatrix(rows, cols=self.rank)

    def inverse(self, x) -> Optional[tuple[int, ...]]:
        """Two-sided inverse of x, or None."""
        r = self.rank
        L = self.left_mult_rows(x)
        R = self.right_mult_rows(x)
        rel = self.relations_rows()
        nrel = len(rel)
        # unknowns: v (r), t (nrel), s (nrel); equations: v L + t rel = unit,
        # v R + s rel = unit   (all as row-vector identities, transposed below)
        rows = []
        for k in range(r):
            rows.append(
                [L.data[j][k] for j in range(r)]
                + [rel[t][k] for t in range(nrel)]
                + [0] * nrel
            )
        for k in range(r):
            rows.append(
                [R.data[j][k] for j in range(r)]
                + [0] * nrel
                + [rel[t][k] for t in range(nrel)]
            )
        A = IntMatrix(rows, cols=r + 2 * nrel)
        b = list(self.unit) + list(self.unit)
        sol = solve_integer(A, b)
        if sol is None:
            return None
        v = self._reduce(sol[:r])
        assert self.multiply(x, v) == self.unit and self.multiply(v, x) == self.unit
        return v

    def is_unit(self, x) -> bool:
        return self.inverse(x) is not None

    def elements(self):
        if self.size is None:
            raise TooLarge(None)
        return (self._reduce(t) for t in itertools.product(*[range(d) for d in self.moduli]))

    def mod(self, N: int) -> "FiniteRing":
        """The quotient ring R/NR (finite for N >= 1)."""
        moduli = tuple(math.gcd(d, N) if d else N for d in self.moduli)
        return FiniteRing(moduli, self.table, self.unit, validate=False)

    def __eq__(self, other):
        return (
            isinstance(other, FiniteRing)
            and self.moduli == other.moduli
            and self.table == other.table
            and self.unit == other.unit
        )

    def __hash__(self):
        return hash((self.moduli, self.table, self.unit))

    def __repr__(self):
        return f"FiniteRing(moduli={self.moduli})"


def cyclic_ring(n: int) -> FiniteRing:
    """Z/n (or Z when n = 0)."""
    return FiniteRing((n,), (((1,),),), (1,), validate=False)


def matrix_ring_mod(n: int, k: int) -> FiniteRing:
    """k x k matrices over Z/n, basis e_ij row-major."""
    r = k * k
    table = [[[0] * r for _ in range(r)] for _ in range(r)]
    for i in range(k):
        for j in range(k):
            for s in range(k):
                for t in range(k):
                    if j == s:
                        table[i * k + j][s * k + t][i * k + t] = 1
    unit = [0] * r
    for i in range(k):
        unit[i * k + i] = 1
    return FiniteRing((n,) * r, table, unit, validate=False)


def order_to_ring(order) -> FiniteRing:
    """Present an order (free Z-ring) in the cyclic-factor encoding."""
    return FiniteRing((0,) * order.rank, order.table, order.unit, validate=False)


@dataclass
class RingSurjection:
    """Ring homomorphism given by generator images (rows of ``matrix``)."""

    source: FiniteRing
    target: FiniteRing
    matrix: IntMatrix  # source.rank x target.rank

    def __post_init__(self):
        if (self.matrix.rows, self.matrix.cols) != (self.source.rank, self.target.rank):
            raise ValueError("matrix shape does not match the rings")
        self._validate_hom()

    def apply(self, x) -> tuple[int, ...]:
        out = [0] * self.target.rank
        for i, xi in enumerate(x):
            if xi:
                for k in range(self.target.rank):
                    out[k] += xi * self.matrix.data[i][k]
        return self.target._reduce(out)

    def _validate_hom(self):
        src, tgt = self.source, self.target
        r = src.rank
        basis = [tuple(1 if t == i else 0 for t in range(r)) for i in range(r)]
        # well-defined on the relations
        for i in range(r):
            if src.moduli[i]:
                img = [src.moduli[i] * x for x in self.matrix.data[i]]
                if any((x % d if d else x) for x, d in zip(img, tgt.moduli)):
                    raise ValueError("map not well-defined on the relations")
        if self.apply(src.unit) != tgt.unit:
            raise ValueError("map does not preserve the unit")
        for i in range(r):
            for j in range(r):
                if self.apply(src.table[i][j]) != tgt.multiply(
                    self.apply(basis[i]), self.apply(basis[j])
                ):
                    raise ValueError("map is not multiplicative")

    def is_surjective(self) -> bool:
        rows = [list(r) for r in self.matrix.data] + [list(r) for r in self.target.relations_rows()]
        if not rows:
            return self.target.rank == 0
        H, _ = hnf(IntMatrix(rows, cols=self.target.rank))
        from .linalg import invariant_factors

        facs = invariant_factors(H)
        return len(facs) == self.target.rank and all(f == 1 for f in facs)

    def preimage(self, u) -> Optional[tuple[int, ...]]:
        """Some x with f(x) = u, or None."""
        r, s = self.source.rank, self.target.rank
        rel = self.target.relations_rows()
        rows = []
        for k in range(s):
            rows.append([self.matrix.data[j][k] for j in range(r)] + [rl[k] for rl in rel])
        A = IntMatrix(rows, cols=r + len(rel))
        sol = solve_integer(A, list(u))
        if sol is None:
            return None
        return self.source._reduce(sol[:r])


# ---------------------------------------------------------------------------
# subgroup lattices inside Z^rank, always containing the relations lattice
# ---------------------------------------------------------------------------

def _congruence_lattice(cond_rows: np.ndarray, p: int, rank: int) -> list[tuple[int, ...]]:
    """Basis of {x in Z^rank : cond_rows . x == 0 mod p}."""
    rows = cond_rows.shape[0]
    if rows == 0:
        return [tuple(1 if t == i else 0 for t in range(rank)) for i in range(rank)]
    aug = IntMatrix(
        [list(cond_rows[i]) + [p if t == i else 0 for t in range(rows)] for i in range(rows)],
        cols=rank + rows,
    )
    out = []
    for v in kernel_basis(aug):
        out.append(tuple(v[:rank]))
    H, _ = hnf(IntMatrix(out, cols=rank))
    return [r for r in H.data if any(r)]


def jacobson_radical_lattice(R: FiniteRing) -> list[tuple[int, ...]]:
    """Rows spanning (as a lattice in Z^rank, containing the relations) the
    preimage of the Jacobson radical of the finite ring R."""
    if R.size is None:
        raise ValueError("radical lattice needs a finite ring")
    rank = R.rank
    basis_rows = [tuple(1 if t == i else 0 for t in range(rank)) for i in range(rank)]
    current = basis_rows
    for p in sorted(factorint(R.size)) if R.size > 1 else []:
        idx = [i for i, d in enumerate(R.moduli) if d % p == 0]
        if not idx:
            continue
        # F_p algebra on the surviving generators
        k = len(idx)
        consts = np.zeros((k, k, k), dtype=np.int64)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                consts[a, b] = [R.table[i][j][t] % p for t in idx]
        unit = np.array([R.unit[t] % p for t in idx], dtype=np.int64)
        alg = FpAlgebra(p, consts, unit, validate=False)
        rad_rows = alg.radical_coords()
        rad_rows = rad_rows.reshape(-1, k) if rad_rows.size else np.zeros((0, k), dtype=np.int64)
        # membership check rows for span(rad_rows) inside F_p^k
        if rad_rows.shape[0]:
            ann = fp_nullspace(FpMatrix(p, rad_rows))
            check_small = np.stack(ann) if ann else np.zeros((0, k), dtype=np.int64)
        else:
            check_small = np.eye(k, dtype=np.int64)
        # lift the check to all of Z^rank through the projection onto idx coords
        check = np.zeros((check_small.shape[0], rank), dtype=np.int64)
        for a, i in enumerate(idx):
            check[:, i] = check_small[:, a]
        # restrict the current lattice by the new congruences
        B = np.array(current, dtype=object)
        cond = np.zeros((check.shape[0], len(current)), dtype=np.int64)
        for ci in range(check.shape[0]):
            for bi, row in enumerate(current):
                cond[ci, bi] = sum(int(check[ci, t]) * row[t] for t in range(rank)) % p
        ys = _congruence_lattice(cond, p, len(current))
        current = [
            tuple(sum(y[bi] * current[bi][t] for bi in range(len(current))) for t in range(rank))
            for y in ys
        ]
    rows = current + [list(r) for r in R.relations_rows()]
    H, _ = hnf(IntMatrix(rows, cols=rank))
    return [tuple(r) for r in H.data if any(r)]


def _in_lattice(rows: Sequence[Sequence[int]], vec, rank) -> bool:
    return member_of_lattice(rows, tuple(vec), rank) is not None


def _kernel_lattice(f: RingSurjection) -> list[tuple[int, ...]]:
    """Basis of {x in Z^r : f(x) == 0 in the target}."""
    r, s = f.source.rank, f.target.rank
    rel = f.target.relations_rows()
    big = IntMatrix(
        [
            [f.matrix.data[i][k] for k in range(s)]
            for i in range(r)
        ]
        + [list(rl) for rl in rel],
        cols=s,
    )
    ker = kernel_basis(big.transpose())
    out = [tuple(v[:r]) for v in ker]
    out += [tuple(rl) for rl in f.source.relations_rows()]
    H, _ = hnf(IntMatrix(out, cols=r))
    return [tuple(rw) for rw in H.data if any(rw)]


def _preimage_lattice(f: RingSurjection, target_rows: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Basis of {x : f(x) in the subgroup spanned by target_rows}."""
    r, s = f.source.rank, f.target.rank
    rows = target_rows + [tuple(rl) for rl in f.target.relations_rows()]
    big = IntMatrix(
        [[f.matrix.data[i][k] for k in range(s)] for i in range(r)]
        + [[-x for x in row] for row in rows],
        cols=s,
    )
    ker = kernel_basis(big.transpose())
    out = [tuple(v[:r]) for v in ker]
    out += [tuple(rl) for rl in f.source.relations_rows()]
    H, _ = hnf(IntMatrix(out, cols=r))
    return [tuple(rw) for rw in H.data if any(rw)]


def _lift_unit_finite(f: RingSurjection, u) -> tuple[int, ...]:
    """Artinian-engine lift: radical-level correction of a semisimple lift."""
    R, S = f.source, f.target
    rank = R.rank
    u = S._reduce(u)
    w = f.preimage(u)
    assert w is not None
    if R.inverse(w) is not None:
        return w
    J_R = jacobson_radical_lattice(R)
    J_S = jacobson_radical_lattice(S)
    K = _preimage_lattice(f, [tuple(r) for r in J_S])
    kb = [list(r) for r in K]
    nk = len(kb)
    nj = len(J_R)
    # solve for e in K with e*k - k in J_R and k*e - k in J_R for all basis k
    # unknowns: y (nk), and per-k radical coefficients z_t, w_t (nj each)
    eq_rows = []
    rhs = []
    ncols = nk + 2 * nj * nk
    for t, k_row in enumerate(kb):
        Lk = R.right_mult_rows(k_row)  # e*k = e R_k  (e as row vector)
        Rk = R.left_mult_rows(k_row)   # k*e = e L_k
        for c in range(rank):
            row = [0] * ncols
            for yi in range(nk):
                row[yi] = sum(kb[yi][j] * Lk.data[j][c] for j in range(rank))
            for zt in range(nj):
                row[nk + t * nj + zt] = -J_R[zt][c]
            eq_rows.append(row)
            rhs.append(k_row[c])
        for c in range(rank):
            row = [0] * ncols
            for yi in range(nk):
                row[yi] = sum(kb[yi][j] * Rk.data[j][c] for j in range(rank))
            for zt in range(nj):
                row[nk + nk * nj + t * nj + zt] = -J_R[zt][c]
            eq_rows.append(row)
            rhs.append(k_row[c])
    sol = solve_integer(IntMatrix(eq_rows, cols=ncols), rhs)
    assert sol is not None, "kernel ideal has no identity mod radical"
    e = R._reduce([sum(sol[yi] * kb[yi][t] for yi in range(nk)) for t in range(rank)])
    y0 = R.add(R.add(w, R.neg(R.multiply(w, e))), e)
    # radical correction: z in J_R with f(z) = u - f(y0)
    target = S.add(u, S.neg(f.apply(y0)))
    relS = S.relations_rows()
    rows = []
    for c in range(S.rank):
        rows.append(
            [sum(J_R[a][j] * f.matrix.data[j][c] for j in range(rank)) for a in range(nj)]
            + [rl[c] for rl in relS]
        )
    sol2 = solve_integer(IntMatrix(rows, cols=nj + len(relS)), list(target))
    assert sol2 is not None, "radical does not surject onto the target radical"
    z = R._reduce([sum(sol2[a] * J_R[a][t] for a in range(nj)) for t in range(rank)])
    x = R.add(y0, z)
    assert f.apply(x) == u
    assert R.inverse(x) is not None
    return x


def lift_unit(f: RingSurjection, u) -> tuple[int, ...]:
    """A unit of the source mapping to the unit ``u`` of the target.

    Finite sources run the artinian engine directly.  Sources with free
    summands reduce to the finite case modulo N = |kernel| when the kernel is
    finite and the surjection splits additively (checked); otherwise
    KernelInfinite / NotSplit is raised.
    """
    R, S = f.source, f.target
    if not f.is_surjective():
        raise NotSurjective("map is not surjective")
    u = S._reduce(u)
    u_inv = S.inverse(u)
    if u_inv is None:
        raise NotUnit(f"{u} is not a unit of the target")
    if R.size is not None:
        return _lift_unit_finite(f, u)
    # mixed/free mode: kernel must be finite
    K0 = _kernel_lattice(f)
    rel = [tuple(r) for r in R.relations_rows()]
    if len(K0) != len(rel):
        raise KernelInfinite("kernel of the surjection is infinite")
    if not K0:
        x = f.preimage(u)
        assert x is not None and f.apply(x) == u
        if R.inverse(x) is None:
            raise NotUnit("preimage of the unit is not a unit (map is bijective)")
        return x
    # N = index [K0 : relations]
    coords = [member_of_lattice(K0, r, R.rank) for r in rel]
    assert all(c is not None for c in coords)
    Q = IntMatrix(coords, cols=len(K0))
    N = abs(Q.det())
    if N == 0:
        raise KernelInfinite("kernel of the surjection is infinite")
    if N == 1:
        x = f.preimage(u)
        assert x is not None
        if R.inverse(x) is None:
            raise NotUnit("unique preimage is not a unit")
        return x
    _check_split(f)
    RN = R.mod(N)
    SN = S.mod(N)
    fN = RingSurjection(RN, SN, f.matrix)
    v = _lift_unit_finite(fN, SN._reduce(u))
    # fiber product solve: x = v mod (N Z^r + relations), f(x) = u
    r, s = R.rank, S.rank
    relS = S.relations_rows()
    # x = v + N a + (relations combo); unknowns a (r), b (len relS)
    rows = []
    for c in range(s):
        rows.append(
            [N * f.matrix.data[j][c] for j in range(r)] + [rl[c] for rl in relS]
        )
    target = S.add(u, S.neg(f.apply(v)))
    sol = solve_integer(IntMatrix(rows, cols=r + len(relS)), list(target))
    assert sol is not None
    x = R._reduce([v[t] + N * sol[t] for t in range(r)])
    assert f.apply(x) == u
    if R.inverse(x) is None:
        raise AssertionError("fiber-product lift failed to be a unit")
    return x


def _check_split(f: RingSurjection) -> None:
    """Require an additive section of f (NotSplit otherwise)."""
    r, s = f.source.rank, f.target.rank
    relS = f.target.relations_rows()
    relR = f.source.relations_rows()
    # unknown section rows sigma_j (j < s): sigma_j . F == e_j mod relS and
    # e_j' * sigma_j == 0 mod relR for the target relations e_j' = moduli
    rows = []
    rhs = []
    ncols = s * r + s * len(relS) + s * len(relR)

    def col_sigma(j, t):
        return j * r + t

    for j in range(s):
        for c in range(s):
            row = [0] * ncols
            for t in range(r):
                row[col_sigma(j, t)] = f.matrix.data[t][c]
            for a, rl in enumerate(relS):
                row[s * r + j * len(relS) + a] = rl[c]
            rows.append(row)
            rhs.append(1 if c == j else 0)
        dj = f.target.moduli[j]
        if dj:
            for c in range(r):
                row = [0] * ncols
                row[col_sigma(j, c)] = dj
                for a, rl in enumerate(relR):
                    row[s * r + s * len(relS) + j * len(relR) + a] = rl[c]
                rows.append(row)
                rhs.append(0)
    if solve_integer(IntMatrix(rows, cols=ncols), rhs) is None:
        raise NotSplit("surjection admits no additive section")


# ---------------------------------------------------------------------------
# exhaustive idempotent machinery (engine for the conjugacy-class op)
# ---------------------------------------------------------------------------

def all_idempotents(R: FiniteRing, cutoff: int = 10 ** 6) -> list[tuple[int, ...]]:
    size = R.size
    if size is None or size > cutoff:
        raise TooLarge(cutoff)
    return [x for x in R.elements() if R.multiply(x, x) == x]


def all_units(R: FiniteRing, cutoff: int = 10 ** 6) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (unit, inverse) pairs."""
    size = R.size
    if size is None or size > cutoff:
        raise TooLarge(cutoff)
    out = []
    for x in R.elements():
        inv = R.inverse(x)
        if inv is not None:
            out.append((x, inv))
    return out


def idempotent_conjugacy_classes(R: FiniteRing, cutoff: int = 10 ** 6) -> list[list[tuple[int, ...]]]:
    """Orbits of idempotents under unit conjugation, each sorted, ordered by
    their minimal element."""
    idems = all_idempotents(R, cutoff)
    units = all_units(R, cutoff)
    remaining = set(idems)
    classes = []
    while remaining:
        e = min(remaining)
        orbit = {e}
        frontier = [e]
        while frontier:
            cur = frontier.pop()
            for u, uinv in units:
                conj = R.multiply(R.multiply(u, cur), uinv)
                if conj not in orbit:
                    orbit.add(conj)
                    frontier.append(conj)
        classes.append(sorted(orbit))
        remaining -= orbit
    classes.sort(key=lambda orb: orb[0])
    return classes
