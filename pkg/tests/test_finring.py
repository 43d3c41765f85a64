import pytest

from k0lat.finring import (
    FiniteRing,
    KernelInfinite,
    NotUnit,
    RingSurjection,
    TooLarge,
    all_idempotents,
    cyclic_ring,
    idempotent_conjugacy_classes,
    jacobson_radical_lattice,
    lift_unit,
    matrix_ring_mod,
    order_to_ring,
)
from k0lat.linalg import IntMatrix
from k0lat.orders import quadratic_order


def reduction_map(n: int, m: int) -> RingSurjection:
    assert n % m == 0
    return RingSurjection(cyclic_ring(n), cyclic_ring(m), IntMatrix([[1]]))


def matrix_reduction(n: int, m: int, k: int) -> RingSurjection:
    src = matrix_ring_mod(n, k)
    tgt = matrix_ring_mod(m, k)
    r = k * k
    eye = IntMatrix.identity(r)
    return RingSurjection(src, tgt, eye)


class TestFiniteRing:
    def test_cyclic_arithmetic(self):
        R = cyclic_ring(6)
        assert R.multiply((2,), (5,)) == (4,)
        assert R.size == 6

    def test_matrix_ring(self):
        R = matrix_ring_mod(2, 2)
        assert R.size == 16
        # e01 * e10 = e00
        e01 = (0, 1, 0, 0)
        e10 = (0, 0, 1, 0)
        assert R.multiply(e01, e10) == (1, 0, 0, 0)

    def test_inverse(self):
        R = cyclic_ring(9)
        assert R.inverse((2,)) == (5,)
        assert R.inverse((3,)) is None
        M = matrix_ring_mod(4, 2)
        inv = M.inverse((1, 1, 0, 1))
        assert inv is not None
        assert M.multiply((1, 1, 0, 1), inv) == M.unit

    def test_validation_catches_bad_table(self):
        # Z/4 with "multiplication" g*g = 2g is not unital w.r.t. unit g
        with pytest.raises(ValueError):
            FiniteRing((4,), (((2,),),), (1,))

    def test_infinite_ring(self):
        Z = cyclic_ring(0)
        assert Z.size is None
        assert Z.inverse((1,)) == (1,)
        assert Z.inverse((2,)) is None


class TestRadicalLattice:
    def test_z4(self):
        R = cyclic_ring(4)
        J = jacobson_radical_lattice(R)
        # J = 2Z inside Z (mod 4): basis (2,)
        assert J == [(2,)]

    def test_z6_semisimple(self):
        R = cyclic_ring(6)
        J = jacobson_radical_lattice(R)
        assert J == [(6,)]  # only the relations: radical of Z/6 is 0

    def test_z12(self):
        R = cyclic_ring(12)
        J = jacobson_radical_lattice(R)
        assert J == [(6,)]  # radical of Z/12 is (6)

    def test_matrix_ring_mod4(self):
        R = matrix_ring_mod(4, 2)
        J = jacobson_radical_lattice(R)
        # radical = 2 M_2(Z/4): lattice 2 Z^4
        assert J == [tuple(2 if i == j else 0 for j in range(4)) for i in range(4)]


class TestLiftUnit:
    def test_z4_to_z2(self):
        f = reduction_map(4, 2)
        x = lift_unit(f, (1,))
        assert x in ((1,), (3,))

    def test_identity_map(self):
        f = reduction_map(9, 9)
        assert lift_unit(f, (2,)) == (2,)

    def test_not_unit(self):
        f = reduction_map(8, 4)
        with pytest.raises(NotUnit):
            lift_unit(f, (2,))

    def test_not_surjective(self):
        # multiplication-by-2 map Z/4 -> Z/4 is not even unital; use a zero map
        with pytest.raises(ValueError):
            RingSurjection(cyclic_ring(4), cyclic_ring(4), IntMatrix([[2]]))

    def test_matrix_mod9_to_mod3(self):
        f = matrix_reduction(9, 3, 2)
        u = (1, 1, 0, 1)
        x = lift_unit(f, u)
        assert f.apply(x) == u
        assert f.source.inverse(x) is not None

    @pytest.mark.parametrize("n,m", [(4, 2), (8, 2), (8, 4), (9, 3), (27, 3), (27, 9), (12, 6)])
    def test_exhaustive_cyclic(self, n, m):
        f = reduction_map(n, m)
        R, S = f.source, f.target
        for u in S.elements():
            if S.inverse(u) is None:
                continue
            x = lift_unit(f, u)
            assert f.apply(x) == u
            assert R.inverse(x) is not None

    def test_exhaustive_matrix_mod4_to_mod2(self):
        f = matrix_reduction(4, 2, 2)
        R, S = f.source, f.target
        count = 0
        for u in S.elements():
            if S.inverse(u) is None:
                continue
            count += 1
            x = lift_unit(f, u)
            assert f.apply(x) == u
            assert R.inverse(x) is not None
        assert count == 6  # |GL_2(F_2)|

    def test_order_mode_bijective(self):
        # the identity surjection of a free ring: kernel 0, direct preimage
        O = order_to_ring(quadratic_order(0, -1))
        f = RingSurjection(O, O, IntMatrix.identity(2))
        assert lift_unit(f, (0, 1)) == (0, 1)

    def test_order_mode_infinite_kernel(self):
        # Z[i] -> Z/2[i-bar]: kernel has rank 2, infinite
        O = order_to_ring(quadratic_order(0, -1))
        tgt = FiniteRing((2, 2), O.table, O.unit)
        f = RingSurjection(O, tgt, IntMatrix.identity(2))
        with pytest.raises(KernelInfinite):
            lift_unit(f, (1, 0))

    def test_mixed_ring_finite_kernel(self):
        # R = Z x Z/2 -> Z, kernel Z/2 finite, split
        R = FiniteRing(
            (0, 2),
            (((1, 0), (0, 1)), ((0, 1), (0, 1))),
            (1, 0),
        )
        S = cyclic_ring(0)
        f = RingSurjection(R, S, IntMatrix([[1], [0]]))
        x = lift_unit(f, (1,))
        assert f.apply(x) == (1,)
        assert R.inverse(x) is not None
        # the unit -1 lifts too
        y = lift_unit(f, (-1,))
        assert f.apply(y) == S._reduce((-1,))


class TestIdempotents:
    def test_z6(self):
        classes = idempotent_conjugacy_classes(cyclic_ring(6))
        reps = [orb[0] for orb in classes]
        assert reps == [(0,), (1,), (3,), (4,)]

    def test_field(self):
        classes = idempotent_conjugacy_classes(cyclic_ring(5))
        assert [orb[0] for orb in classes] == [(0,), (1,)]

    def test_m2f2(self):
        classes = idempotent_conjugacy_classes(matrix_ring_mod(2, 2))
        assert len(classes) == 3
        sizes = sorted(len(orb) for orb in classes)
        assert sizes == [1, 1, 6]  # 0, identity, six rank-1 idempotents

    def test_cutoff(self):
        with pytest.raises(TooLarge):
            all_idempotents(cyclic_ring(100), cutoff=10)
