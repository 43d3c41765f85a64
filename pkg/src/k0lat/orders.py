"""Orders (rings free and finitely generated over the integers, given by
structure constants) and lattices over them.

An order of rank n is stored as the table c[i][j][k] with
b_i * b_j = sum_k c[i][j][k] b_k together with the coordinates of the unit.
A lattice over the order is a free integer module with one action matrix per
order basis element.  Hom groups are computed as integer intertwiner kernels.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .linalg import IntMatrix, is_prime, kernel_basis, member_of_lattice


class OrderValidationError(ValueError):
    """Structure-constant table fails the ring axioms; carries a witness."""


class NotAssociative(OrderValidationError):
    def __init__(self, triple):
        self.triple = triple
        super().__init__(f"associativity fails at basis triple {triple}")


class BadUnit(OrderValidationError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"unit law fails at basis element {index}")


class Order:
    """Unital ring with free finitely generated additive group."""

    __slots__ = ("rank", "table", "unit", "_mult_mats")

    def __init__(self, table, unit, validate: bool = True):
        self.table = tuple(
            tuple(tuple(int(x) for x in row) for row in plane) for plane in table
        )
        self.rank = len(self.table)
        self.unit = tuple(int(x) for x in unit)
        if len(self.unit) != self.rank:
            raise OrderValidationError("unit vector has wrong length")
        for plane in self.table:
            if len(plane) != self.rank or any(len(row) != self.rank for row in plane):
                raise OrderValidationError("table has wrong shape")
        self._mult_mats = None
        if validate:
            self._validate()

    # -- ring arithmetic on coordinate vectors ------------------------------

    def multiply(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        n = self.rank
        out = [0] * n
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                cij = self.table[i][j]
                f = ai * bj
                for k in range(n):
                    if cij[k]:
                        out[k] += f * cij[k]
        return tuple(out)

    def left_mult_matrix(self, a: Sequence[int]) -> IntMatrix:
        """Matrix of x -> a*x on the coordinate lattice."""
        n = self.rank
        cols = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            cols.append(self.multiply(a, e))
        return IntMatrix(tuple(zip(*cols)), cols=n)

    def _validate(self) -> None:
        n = self.rank
        basis = [tuple(1 if t == i else 0 for t in range(n)) for i in range(n)]
        for i in range(n):
            if self.multiply(self.unit, basis[i]) != basis[i]:
                raise BadUnit(i)
            if self.multiply(basis[i], self.unit) != basis[i]:
                raise BadUnit(i)
        for i in range(n):
            for j in range(n):
                ij = self.table[i][j]
                for k in range(n):
                    left = self.multiply(ij, basis[k])
                    right = self.multiply(basis[i], self.table[j][k])
                    if left != right:
                        raise NotAssociative((i, j, k))

    def __eq__(self, other):
        return (
            isinstance(other, Order)
            and self.table == other.table
            and self.unit == other.unit
        )

    def __hash__(self):
        return hash((self.table, self.unit))

    def __repr__(self):
        return f"Order(rank={self.rank})"

    def regular_module(self) -> "LatticeModule":
        """The order acting on itself by left multiplication."""
        n = self.rank
        mats = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            mats.append(self.left_mult_matrix(e))
        return LatticeModule(self, mats, validate=False)


def validate_order(table, unit) -> Order:
    """Build an Order, raising NotAssociative/BadUnit with a witness."""
    return Order(table, unit, validate=True)


# convenience constructors used throughout the tests and CLI docs

def integer_order() -> Order:
    return Order((((1,),),), (1,), validate=False)


def quadratic_order(t: int, n: int) -> Order:
    """Order Z[w] with w^2 = t*w + n (basis 1, w)."""
    table = (
        ((1, 0), (0, 1)),
        ((0, 1), (n, t)),
    )
    return Order(table, (1, 0))


class LatticeModule:
    """Free integer lattice with a compatible order action."""

    __slots__ = ("order", "rank", "actions")

    def __init__(self, order: Order, actions: Sequence[IntMatrix], validate: bool = True):
        self.order = order
        self.actions = tuple(actions)
        if len(self.actions) != order.rank:
            raise ValueError("need one action matrix per order basis element")
        self.rank = self.actions[0].rows if self.actions else 0
        for m in self.actions:
            if m.rows != m.cols or m.rows != self.rank:
                raise ValueError("action matrices must be square of equal size")
        if validate:
            self._validate()

    def _validate(self) -> None:
        n = self.order.rank
        unit_action = IntMatrix.zeros(self.rank, self.rank)
        for i, u in enumerate(self.order.unit):
            if u:
                unit_action = unit_action + self.actions[i].scale(u)
        if not unit_action.is_identity():
            raise ValueError("unit does not act as the identity")
        for i in range(n):
            for j in range(n):
                lhs = self.actions[i] * self.actions[j]
                rhs = IntMatrix.zeros(self.rank, self.rank)
                for k, c in enumerate(self.order.table[i][j]):
                    if c:
                        rhs = rhs + self.actions[k].scale(c)
                if lhs != rhs:
                    raise ValueError(f"action violates the table at ({i}, {j})")

    def act(self, a: Sequence[int]) -> IntMatrix:
        out = IntMatrix.zeros(self.rank, self.rank)
        for i, c in enumerate(a):
            if c:
                out = out + self.actions[i].scale(c)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LatticeModule)
            and self.order == other.order
            and self.actions == other.actions
        )

    def __hash__(self):
        return hash((self.order, self.actions))

    def __repr__(self):
        return f"LatticeModule(rank={self.rank}, order_rank={self.order.rank})"

    def conjugate(self, T: IntMatrix) -> "LatticeModule":
        """Base change by a unimodular T (isomorphic copy)."""
        Ti = T.inverse_unimodular()
        return LatticeModule(self.order, [T * m * Ti for m in self.actions], validate=False)


class HomLattice:
    """Saturated lattice of intertwiners between two modules."""

    __slots__ = ("source", "target", "basis")

    def __init__(self, source, target, basis: Sequence[IntMatrix]):
        self.source = source
        self.target = target
        self.basis = tuple(basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def element(self, coeffs: Sequence[int]) -> IntMatrix:
        rows = self.basis[0].rows if self.basis else getattr(self.target, "rank", 0)
        cols = self.basis[0].cols if self.basis else getattr(self.source, "rank", 0)
        out = IntMatrix.zeros(rows, cols)
        for c, b in zip(coeffs, self.basis):
            if c:
                out = out + b.scale(c)
        return out

    def coordinates(self, mat: IntMatrix) -> Optional[tuple[int, ...]]:
        """Coordinates of ``mat`` in the integer span of the basis, or None."""
        vecs = [[x for row in b.data for x in row] for b in self.basis]
        flat = [x for row in mat.data for x in row]
        return member_of_lattice(vecs, flat, len(flat))


def intertwiner_lattice(
    ops_source: Sequence[IntMatrix],
    ops_target: Sequence[IntMatrix],
    rank_source: int,
    rank_target: int,
) -> list[IntMatrix]:
    """HNF-canonical basis of integer matrices f with f*A_i = B_i*f for all
    op pairs (A_i source-side, B_i target-side)."""
    if len(ops_source) != len(ops_target):
        raise ValueError("operator lists must pair up")
    if rank_source == 0 or rank_target == 0:
        return []
    blocks = []
    I_s = IntMatrix.identity(rank_source)
    I_t = IntMatrix.identity(rank_target)
    for A, B in zip(ops_source, ops_target):
        # vec (column-major) of f*A - B*f = (A^T kron I - I kron B) vec f
        blocks.append(A.transpose().kronecker(I_t) - I_s.kronecker(B))
    if not blocks:
        return [
            unvec_col(v, rank_target, rank_source)
            for v in _std_basis(rank_source * rank_target)
        ]
    system = blocks[0]
    for b in blocks[1:]:
        system = system.stack(b)
    return [unvec_col(v, rank_target, rank_source) for v in kernel_basis(system)]


def _std_basis(n: int):
    for i in range(n):
        v = [0] * n
        v[i] = 1
        yield tuple(v)


def unvec_col(v: Sequence[int], rows: int, cols: int) -> IntMatrix:
    """Inverse of column-major vec."""
    return IntMatrix(
        tuple(tuple(v[j * rows + i] for j in range(cols)) for i in range(rows)),
        cols=cols,
    )


def vec_col(m: IntMatrix) -> tuple[int, ...]:
    return tuple(m.data[i][j] for j in range(m.cols) for i in range(m.rows))


def hom_group(X: LatticeModule, Y: LatticeModule) -> HomLattice:
    """All integer matrices commuting with the order action, as a saturated
    HNF-canonical lattice basis."""
    if X.order != Y.order:
        raise ValueError("modules live over different orders")
    basis = intertwiner_lattice(X.actions, Y.actions, X.rank, Y.rank)
    return HomLattice(X, Y, basis)


def end_ring(X: LatticeModule) -> tuple[Order, HomLattice]:
    """The endomorphism ring of X as an Order over the hom-lattice basis."""
    H = hom_group(X, X)
    r = len(H.basis)
    if r == 0:
        return Order(((),) * 0, (), validate=False), H
    table = []
    for a in range(r):
        plane = []
        for b in range(r):
            prod = H.basis[a] * H.basis[b]
            coords = H.coordinates(prod)
            if coords is None:
                raise RuntimeError("endomorphism composition escaped the lattice")
            plane.append(coords)
        table.append(tuple(plane))
    unit = H.coordinates(IntMatrix.identity(X.rank))
    if unit is None:
        raise RuntimeError("identity not in the endomorphism lattice")
    return Order(tuple(table), unit, validate=False), H


def is_end_trivial(X: LatticeModule) -> bool:
    """True iff End(X) has rank 1 with saturated generator +-identity."""
    H = hom_group(X, X)
    if H.rank != 1:
        return False
    g = H.basis[0]
    return g.is_identity() or (-g).is_identity()


def direct_sum(X: LatticeModule, Y: LatticeModule) -> LatticeModule:
    if X.order != Y.order:
        raise ValueError("modules live over different orders")
    mats = []
    for a, b in zip(X.actions, Y.actions):
        rows = []
        for r in a.data:
            rows.append(tuple(r) + (0,) * Y.rank)
        for r in b.data:
            rows.append((0,) * X.rank + tuple(r))
        mats.append(IntMatrix(rows, cols=X.rank + Y.rank))
    return LatticeModule(X.order, mats, validate=False)


def power(X: LatticeModule, n: int) -> LatticeModule:
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = zero_module(X.order)
    for _ in range(n):
        out = direct_sum(out, X)
    return out


def zero_module(order: Order) -> LatticeModule:
    return LatticeModule(order, [IntMatrix.zeros(0, 0)] * order.rank, validate=False)


def tensor_fp(X: LatticeModule, p: int):
    """Reduction of the module mod p, as an FpModule over the reduced algebra."""
    from .modp import FpAlgebra, FpModule

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = X.order.rank
    # reduce in Python-int arithmetic first so huge entries cannot overflow
    consts = np.array(
        [[[c % p for c in row] for row in plane] for plane in X.order.table],
        dtype=np.int64,
    ).reshape(n, n, n)
    unit = np.array([u % p for u in X.order.unit], dtype=np.int64)
    alg = FpAlgebra(p, consts, unit)
    if X.rank:
        acts = np.array(
            [[[x % p for x in row] for row in m.data] for m in X.actions],
            dtype=np.int64,
        )
    else:
        acts = np.zeros((n, 0, 0), dtype=np.int64)
    return FpModule(alg, acts)
