from fractions import Fraction
from math import isqrt

import pytest

from k0lat.quadratic import (
    IdealLattice,
    RealQuadraticField,
    SearchBoundExceeded,
    element_ord,
    factor_rational_prime,
    is_principal,
    md_orbit_count,
)


def brute_force_unit_is_minimal(F: RealQuadraticField, u, y_bound=1000) -> bool:
    """Oracle: among units written x + y sqrt(d) (or half-integral pairs),
    powers of the fundamental unit have strictly increasing y > 0, so u is
    fundamental iff no unit exists with 0 < y' < y(u)."""
    ux, uy = F.to_sqrt_pair(u)
    if F.half_basis:
        b_u = int(2 * uy)
        for b in range(1, min(b_u, 2 * y_bound)):
            for sign in (4, -4):
                a2 = F.d * b * b + sign
                if a2 <= 0:
                    continue
                a = isqrt(a2)
                if a * a == a2 and (a - b) % 2 == 0:
                    return False
        return True
    y_u = int(uy)
    for y in range(1, min(y_u, y_bound)):
        for sign in (1, -1):
            x2 = F.d * y * y + sign
            if x2 <= 0:
                continue
            x = isqrt(x2)
            if x * x == x2:
                return False
    return True


class TestField:
    def test_bad_d(self):
        with pytest.raises(ValueError):
            RealQuadraticField(12)  # not squarefree
        with pytest.raises(ValueError):
            RealQuadraticField(1)

    def test_arithmetic_sqrt2(self):
        F = RealQuadraticField(2)
        # (1 + sqrt2)^2 = 3 + 2 sqrt2
        assert F.mult((1, 1), (1, 1)) == (3, 2)
        assert F.norm((1, 1)) == -1

    def test_arithmetic_half_basis(self):
        F = RealQuadraticField(5)
        # w = (1+sqrt5)/2, w^2 = w + 1
        assert F.mult((0, 1), (0, 1)) == (1, 1)
        assert F.norm((0, 1)) == -1
        x, y = F.to_sqrt_pair((0, 1))
        assert (x, y) == (Fraction(1, 2), Fraction(1, 2))


class TestFundamentalUnit:
    def test_sqrt2(self):
        F = RealQuadraticField(2)
        u = F.fundamental_unit()
        assert u == (1, 1)  # 1 + sqrt 2
        assert F.norm(u) == -1

    def test_sqrt5(self):
        F = RealQuadraticField(5)
        u = F.fundamental_unit()
        assert u == (0, 1)  # (1 + sqrt 5)/2
        assert F.norm(u) == -1

    def test_sqrt3(self):
        F = RealQuadraticField(3)
        u = F.fundamental_unit()
        assert u == (2, 1)  # 2 + sqrt 3
        assert F.norm(u) == 1

    @pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 19, 21, 22, 23, 26, 29, 31, 33])
    def test_minimality_against_brute_force(self, d):
        F = RealQuadraticField(d)
        u = F.fundamental_unit()
        assert abs(F.norm(u)) == 1
        x, y = F.to_sqrt_pair(u)
        assert x > 0 and y > 0
        assert brute_force_unit_is_minimal(F, u)


class TestPrimeSplitting:
    def test_ramified_sqrt2(self):
        F = RealQuadraticField(2)
        factors = factor_rational_prime(F, 2)
        assert len(factors) == 1 and factors[0].splitting == "ramified"
        rho = factors[0]
        # rho^2 = (2), checked by norms
        assert rho.lattice.norm() == 2
        assert rho.lattice.multiply(rho.lattice) == IdealLattice.principal(F, (2, 0))

    def test_split_7_in_sqrt2(self):
        F = RealQuadraticField(2)
        factors = factor_rational_prime(F, 7)
        assert len(factors) == 2
        assert all(f.splitting == "split" and f.lattice.norm() == 7 for f in factors)

    def test_inert_3_in_sqrt2(self):
        F = RealQuadraticField(2)
        factors = factor_rational_prime(F, 3)
        assert len(factors) == 1 and factors[0].splitting == "inert"
        assert factors[0].lattice.norm() == 9

    def test_not_prime(self):
        with pytest.raises(ValueError):
            factor_rational_prime(RealQuadraticField(2), 6)

    @pytest.mark.parametrize("d", [2, 3, 5, 10, 15])
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
    def test_norm_bookkeeping(self, d, p):
        F = RealQuadraticField(d)
        factors = factor_rational_prime(F, p)
        disc = F.discriminant
        if disc % p == 0:
            assert [f.splitting for f in factors] == ["ramified"]
        prod = factors[0].lattice
        for f in factors[1:]:
            prod = prod.multiply(f.lattice)
        if factors[0].splitting == "ramified":
            prod = prod.multiply(factors[0].lattice)
        if factors[0].splitting == "inert":
            assert prod.norm() == p * p
        else:
            assert prod == IdealLattice.principal(F, (p, 0))


class TestValuations:
    def test_ord_of_rational_prime_power(self):
        F = RealQuadraticField(2)
        rho = factor_rational_prime(F, 2)[0]
        assert element_ord(F, (2, 0), rho) == 2  # (2) = rho^2
        assert element_ord(F, (4, 0), rho) == 4
        assert element_ord(F, (3, 0), rho) == 0
        assert element_ord(F, (0, 1), rho) == 1  # sqrt 2

    def test_split_valuations(self):
        F = RealQuadraticField(2)
        r1, r2 = factor_rational_prime(F, 7)
        # 3 + sqrt2 has norm 7: valuation 1 at exactly one of the primes
        v1 = element_ord(F, (3, 1), r1)
        v2 = element_ord(F, (3, 1), r2)
        assert sorted((v1, v2)) == [0, 1]


class TestPrincipality:
    def test_unit_ideal(self):
        F = RealQuadraticField(2)
        res = is_principal(F, [], [])
        assert res is not None
        g, den = res
        assert den == 1 and abs(F.norm(g)) == 1

    def test_ramified_square_is_two(self):
        F = RealQuadraticField(2)
        rho = factor_rational_prime(F, 2)[0]
        res = is_principal(F, [rho], [2])
        assert res is not None
        g, den = res
        assert den == 1
        assert abs(F.norm(g)) == 2 * 2
        assert IdealLattice.principal(F, g) == rho.lattice.multiply(rho.lattice)

    def test_nonprincipal_in_sqrt10(self):
        F = RealQuadraticField(10)
        rho2 = factor_rational_prime(F, 2)[0]
        assert rho2.splitting == "ramified"
        res = is_principal(F, [rho2], [1])
        assert res is None  # class number 2; decisive within the bound
        # norm-form obstruction oracle: x^2 - 10 y^2 = +-2 is insoluble mod 5
        for x in range(5):
            for y in range(5):
                assert (x * x - 10 * y * y) % 5 not in (2, 3)

    def test_negative_exponents(self):
        F = RealQuadraticField(2)
        rho = factor_rational_prime(F, 2)[0]
        res = is_principal(F, [rho], [-2])
        assert res is not None
        g, den = res
        # the fractional ideal rho^{-2} = (g)/den: valuation must be -2
        assert element_ord(F, g, rho) - element_ord(F, (den, 0), rho) == -2

    def test_search_bound_exceeded(self):
        F = RealQuadraticField(10)
        rho2 = factor_rational_prime(F, 2)[0]
        with pytest.raises(SearchBoundExceeded):
            is_principal(F, [rho2], [1], search_factor=1)


class TestMDCount:
    def test_trivial_D(self):
        F = RealQuadraticField(2)
        report = md_orbit_count(F, 1)
        assert report.count == 1 and report.bound == 1

    def test_sqrt2_D2(self):
        F = RealQuadraticField(2)
        report = md_orbit_count(F, 2)
        assert report.bound == 5
        assert report.count == 5
        assert report.primes == [(2, "ramified", 2)]

    def test_sqrt10_D2(self):
        F = RealQuadraticField(10)
        report = md_orbit_count(F, 2)
        assert report.bound == 5
        assert report.count == 3  # only even exponents principal

    def test_sqrt2_D6(self):
        F = RealQuadraticField(2)
        report = md_orbit_count(F, 6)
        assert report.bound == 15
        assert report.count == 15

    def test_symmetry_of_verdicts(self):
        F = RealQuadraticField(10)
        report = md_orbit_count(F, 6)
        verdicts = {v.exponents: v.principal for v in report.verdicts}
        for exps, principal in verdicts.items():
            assert verdicts[tuple(-e for e in exps)] == principal
        assert report.count % 2 == 1

    def test_element_enumeration_oracle_sqrt2_D2(self):
        # independent oracle: orbits of a = c/2 (c = x + y sqrt2, |x|,|y|<=50)
        # with D a and D a^{-1} integral, deduped by the principal-ideal
        # lattice of c (a determines (c) = (2a) up to units)
        F = RealQuadraticField(2)
        D = 2

        def integral(fx, fy):
            return F.from_sqrt_pair(fx, fy) is not None

        keys = set()
        for x in range(-50, 51):
            for y in range(-50, 51):
                if (x, y) == (0, 0):
                    continue
                c = (x, y)  # a = c/2, so D a = c is integral automatically
                n = F.norm(c)
                # D a^{-1} = D * (D/c) = D^2 conj(c) / N(c)
                cx, cy = F.to_sqrt_pair(F.conj(c))
                if not integral(Fraction(D * D) * cx / n, Fraction(D * D) * cy / n):
                    continue
                keys.add(IdealLattice.principal(F, c).basis)
        report = md_orbit_count(F, D)
        assert len(keys) == report.count == 5
