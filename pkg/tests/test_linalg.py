import itertools
import random

import numpy as np
import pytest

from k0lat.linalg import (
    FpMatrix,
    IntMatrix,
    factorint,
    fp_nullspace,
    fp_solve,
    hnf,
    invariant_factors,
    is_prime,
    kernel_basis,
    primes_up_to,
    snf,
    solve_integer,
)


def check_hermite(M: IntMatrix, H: IntMatrix, U: IntMatrix) -> None:
    """Independent oracle for the row Hermite form contract."""
    assert U.rows == U.cols == M.rows
    assert abs(U.det()) == 1
    assert U * M == H
    pivots = []
    for i in range(H.rows):
        row = H.data[i]
        nz = [j for j, a in enumerate(row) if a != 0]
        if not nz:
            # all later rows must be zero too
            for k in range(i, H.rows):
                assert all(a == 0 for a in H.data[k])
            break
        j = nz[0]
        assert H.data[i][j] > 0
        if pivots:
            assert j > pivots[-1][1]
        for above in range(i):
            assert 0 <= H.data[above][j] < H.data[i][j]
        pivots.append((i, j))


def check_smith(M: IntMatrix, S: IntMatrix, U: IntMatrix, V: IntMatrix) -> None:
    assert abs(U.det()) == 1
    assert abs(V.det()) == 1
    assert U * M * V == S
    diag = [S.data[i][i] for i in range(min(S.rows, S.cols))]
    for i in range(S.rows):
        for j in range(S.cols):
            if i != j:
                assert S.data[i][j] == 0
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        if a == 0:
            assert b == 0
        else:
            assert b % a == 0


def rand_matrix(rng, rows, cols, lo=-10, hi=10):
    return IntMatrix([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


class TestHnf:
    def test_identity(self):
        I3 = IntMatrix.identity(3)
        H, U = hnf(I3)
        assert H == I3
        assert U == I3

    def test_zero(self):
        Z = IntMatrix.zeros(2, 2)
        H, U = hnf(Z)
        assert H == Z
        assert U == IntMatrix.identity(2)

    def test_worked_example(self):
        M = IntMatrix([[2, 4], [6, 8]])
        H, U = hnf(M)
        check_hermite(M, H, U)
        assert H == IntMatrix([[2, 0], [0, 4]])

    def test_random(self):
        rng = random.Random(7)
        for _ in range(150):
            M = rand_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
            H, U = hnf(M)
            check_hermite(M, H, U)


class TestSnf:
    def test_diag_2_3(self):
        M = IntMatrix([[2, 0], [0, 3]])
        S, U, V = snf(M)
        check_smith(M, S, U, V)
        assert [S.data[i][i] for i in range(2)] == [1, 6]

    def test_identity(self):
        M = IntMatrix.identity(4)
        S, U, V = snf(M)
        check_smith(M, S, U, V)
        assert S == M

    def test_zero(self):
        M = IntMatrix.zeros(3, 2)
        S, U, V = snf(M)
        check_smith(M, S, U, V)
        assert S.is_zero()

    def test_det_preserved(self):
        rng = random.Random(11)
        for _ in range(80):
            n = rng.randint(1, 5)
            M = rand_matrix(rng, n, n)
            S, U, V = snf(M)
            check_smith(M, S, U, V)
            prod = 1
            for i in range(n):
                prod *= S.data[i][i]
            assert prod == abs(M.det())

    def test_random_rect(self):
        rng = random.Random(13)
        for _ in range(80):
            M = rand_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
            S, U, V = snf(M)
            check_smith(M, S, U, V)


class TestSolveInteger:
    def test_identity(self):
        A = IntMatrix.identity(3)
        assert solve_integer(A, (5, -2, 7)) == (5, -2, 7)

    def test_parity_obstruction(self):
        assert solve_integer(IntMatrix([[2]]), (3,)) is None

    def test_bezout(self):
        A = IntMatrix([[2, 3]])
        x = solve_integer(A, (1,))
        assert x is not None
        assert 2 * x[0] + 3 * x[1] == 1

    def brute_force(self, A: IntMatrix, b, box=20):
        for x in itertools.product(range(-box, box + 1), repeat=A.cols):
            if A.apply(x) == tuple(b):
                return x
        return None

    def test_against_exhaustive(self):
        rng = random.Random(3)
        for _ in range(40):
            rows = rng.randint(1, 3)
            cols = rng.randint(1, 3)
            A = rand_matrix(rng, rows, cols, -4, 4)
            # half the time force solvability by picking b in the image
            if rng.random() < 0.5:
                x0 = tuple(rng.randint(-3, 3) for _ in range(cols))
                b = A.apply(x0)
            else:
                b = tuple(rng.randint(-6, 6) for _ in range(rows))
            got = solve_integer(A, b)
            want = self.brute_force(A, b)
            if want is None:
                # solutions outside the box would have |x| huge for these sizes;
                # cross-check by substitution instead of asserting None
                if got is not None:
                    assert A.apply(got) == tuple(b)
            else:
                assert got is not None
                assert A.apply(got) == tuple(b)


class TestKernel:
    def test_line(self):
        ker = kernel_basis(IntMatrix([[1, 1]]))
        assert len(ker) == 1
        assert tuple(ker[0]) in ((1, -1), (-1, 1))

    def test_identity(self):
        assert kernel_basis(IntMatrix.identity(3)) == []

    def test_zero(self):
        ker = kernel_basis(IntMatrix.zeros(1, 3))
        assert len(ker) == 3

    def test_saturated(self):
        rng = random.Random(5)
        for _ in range(60):
            A = rand_matrix(rng, rng.randint(1, 4), rng.randint(1, 5), -6, 6)
            ker = kernel_basis(A)
            for v in ker:
                assert all(a == 0 for a in A.apply(v))
            if ker:
                K = IntMatrix(ker, cols=A.cols)
                assert invariant_factors(K) == [1] * len(ker)
            # rank-nullity over Q
            S, _, _ = snf(A)
            rank = sum(1 for i in range(min(A.rows, A.cols)) if S.data[i][i] != 0)
            assert len(ker) == A.cols - rank


class TestFp:
    def test_nullspace_example(self):
        A = FpMatrix(2, [[1, 1]])
        ns = fp_nullspace(A)
        assert len(ns) == 1
        assert list(ns[0]) == [1, 1]

    def test_nullspace_identity_and_zero(self):
        assert fp_nullspace(FpMatrix(5, np.eye(3, dtype=np.int64))) == []
        ns = fp_nullspace(FpMatrix(3, np.zeros((2, 4), dtype=np.int64)))
        assert len(ns) == 4

    def test_rank_nullity_random(self):
        rng = np.random.default_rng(17)
        for p in (2, 3, 5, 7):
            for _ in range(30):
                a = rng.integers(0, p, size=(rng.integers(1, 6), rng.integers(1, 6)))
                A = FpMatrix(p, a)
                ns = fp_nullspace(A)
                assert A.rank() + len(ns) == A.cols
                for v in ns:
                    assert not ((A.a @ v) % p).any()

    def test_inverse(self):
        A = FpMatrix(7, [[1, 2], [3, 4]])
        B = A.inverse()
        assert (A * B).a.tolist() == np.eye(2, dtype=np.int64).tolist()

    def test_solve(self):
        A = FpMatrix(5, [[1, 2], [3, 4]])
        b = np.array([1, 0])
        x = fp_solve(A, b)
        assert x is not None
        assert ((A.a @ x) % 5).tolist() == [1, 0]
        # inconsistent system
        B = FpMatrix(2, [[1, 1], [1, 1]])
        assert fp_solve(B, np.array([0, 1])) is None

    def test_charpoly_matches_eigen_structure(self):
        # companion matrix of x^2 - 2 over F_5
        A = FpMatrix(5, [[0, 2], [1, 0]])
        assert A.charpoly() == [3, 0, 1]  # x^2 - 2 = x^2 + 3 mod 5

    def test_charpoly_random_cayley_hamilton(self):
        rng = np.random.default_rng(23)
        for p in (2, 3, 5):
            for _ in range(20):
                n = int(rng.integers(1, 6))
                A = FpMatrix(p, rng.integers(0, p, size=(n, n)))
                cp = A.charpoly()
                acc = FpMatrix.zeros(p, n, n)
                power = FpMatrix.identity(p, n)
                for c in cp:
                    acc = acc + power.scale(int(c))
                    power = power * A
                assert not acc.a.any()


def test_primes_and_factorint():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(97) and not is_prime(91)
    assert factorint(360) == {2: 3, 3: 2, 5: 1}


def test_det_bareiss():
    rng = random.Random(29)
    for _ in range(50):
        n = rng.randint(1, 5)
        M = rand_matrix(rng, n, n, -8, 8)
        # expansion-by-minors oracle
        def minor_det(rows):
            if len(rows) == 1:
                return rows[0][0]
            total = 0
            for j in range(len(rows)):
                sub = [r[:j] + r[j + 1 :] for r in rows[1:]]
                total += (-1) ** j * rows[0][j] * minor_det(sub)
            return total

        assert M.det() == minor_det([list(r) for r in M.data])


def test_unimodular_inverse():
    U = IntMatrix([[1, 2, 0], [0, 1, 3], [0, 0, 1]])
    V = U.inverse_unimodular()
    assert (U * V).is_identity()
    assert (V * U).is_identity()
    with pytest.raises(ValueError):
        IntMatrix([[2, 0], [0, 1]]).inverse_unimodular()
