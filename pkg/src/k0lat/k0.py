"""Split-K0 machinery over the integral category: composition ideals,
retract certificates, isomorphism from stable isomorphism when End = Z,
the per-prime stable-isomorphism probe, idempotent conjugacy classes, and
generator counts.

Everything here returns certificates (explicit maps, verified before they
are handed back) or honest verdicts; NecessaryConditionsPass is explicitly
not a proof of equal classes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .finring import FiniteRing, TooLarge, idempotent_conjugacy_classes
from .linalg import IntMatrix, factorint, hnf, invariant_factors, member_of_lattice, primes_up_to, snf, solve_integer
from .modp import k0_class_fp, modules_isomorphic
from .orders import (
    HomLattice,
    LatticeModule,
    Order,
    end_ring,
    hom_group,
    is_end_trivial,
    power,
    tensor_fp,
)


def _hom(X, Y) -> HomLattice:
    """Hom lattice for either LatticeModule or HodgeObject operands."""
    if isinstance(X, LatticeModule) and isinstance(Y, LatticeModule):
        return hom_group(X, Y)
    from .hodge import HodgeObject, hs_hom

    if isinstance(X, HodgeObject) and isinstance(Y, HodgeObject):
        return hs_hom(X, Y)
    raise TypeError("operands must both be lattice modules or both Hodge objects")


def _rank_of(X) -> int:
    return X.rank


def _is_end_trivial(X) -> tuple[bool, int]:
    H = _hom(X, X)
    if H.rank != 1:
        return False, H.rank
    g = H.basis[0]
    return (g.is_identity() or (-g).is_identity()), 1


@dataclass
class CompositionIdeal:
    """Two-sided ideal of End(X) spanned by the compositions X -> Y -> X,
    in HNF-reduced coordinates on the end-ring basis."""

    end_order: Order
    end_hom: HomLattice
    basis: list[tuple[int, ...]]            # rows: coordinates w.r.t. end_hom.basis
    product_matrices: list[IntMatrix]       # the raw compositions g_j f_i
    product_pairs: list[tuple[int, int]]    # (i into hom(X,Y), j into hom(Y,X))
    transform: IntMatrix                    # basis rows = transform * product-coordinate rows

    def contains(self, coords: Sequence[int]) -> Optional[tuple[int, ...]]:
        return member_of_lattice(self.basis, tuple(coords), len(self.end_hom.basis))


def composition_ideal(X, Y) -> CompositionIdeal:
    """Span of all compositions X -> Y -> X (basis products suffice by
    bilinearity)."""
    if isinstance(X, LatticeModule) and isinstance(Y, LatticeModule) and X.order != Y.order:
        raise ValueError("modules live over different orders")
    EX, H_end = (None, None)
    if isinstance(X, LatticeModule):
        EX, H_end = end_ring(X)
    else:
        H_end = _hom(X, X)
    HXY = _hom(X, Y)
    HYX = _hom(Y, X)
    prods = []
    pairs = []
    for i, f in enumerate(HXY.basis):
        for j, g in enumerate(HYX.basis):
            prods.append(g * f)
            pairs.append((i, j))
    rows = []
    for m in prods:
        coords = H_end.coordinates(m)
        if coords is None:
            raise RuntimeError("composition escaped the endomorphism lattice")
        rows.append(coords)
    r = len(H_end.basis)
    if rows:
        H, U = hnf(IntMatrix(rows, cols=r))
        basis = [tuple(rw) for rw in H.data if any(rw)]
        transform = U
    else:
        basis = []
        transform = IntMatrix.identity(0)
    if EX is None:
        EX = Order((((1,),),), (1,), validate=False)  # placeholder for Hodge operands
    return CompositionIdeal(EX, H_end, basis, prods, pairs, transform)


@dataclass
class RetractCertificate:
    """Maps f: X -> Y^n and g: Y^n -> X with g o f = 1_X, exactly."""

    n: int
    f: IntMatrix
    g: IntMatrix

    def verify(self, rank_X: int) -> bool:
        return (self.g * self.f).is_identity() and self.f.cols == rank_X


def retract_certificate(X, Y) -> Optional[RetractCertificate]:
    """Certificate that X is a retract of some power of Y, or None exactly
    when the identity is outside the composition ideal."""
    ideal = composition_ideal(X, Y)
    H_end = ideal.end_hom
    rank_X = _rank_of(X)
    id_coords = H_end.coordinates(IntMatrix.identity(rank_X))
    if id_coords is None:
        return None
    combo = ideal.contains(id_coords)
    if combo is None:
        return None
    # 1_X = sum_t combo_t * basis_t = sum_s a_s * (g_{j(s)} f_{i(s)})
    nprod = len(ideal.product_matrices)
    a = [0] * nprod
    for t, c in enumerate(combo):
        if c:
            for s in range(nprod):
                a[s] += c * ideal.transform.data[t][s]
    HXY = _hom(X, Y)
    HYX = _hom(Y, X)
    rank_Y = _rank_of(Y)
    f_blocks = []
    g_blocks = []
    for s, coeff in enumerate(a):
        if coeff == 0:
            continue
        i, j = ideal.product_pairs[s]
        f_blocks.append(HXY.basis[i].scale(coeff))
        g_blocks.append(HYX.basis[j])
    n = len(f_blocks)
    if n == 0:
        # identity decomposed with zero products: only possible for rank 0
        cert = RetractCertificate(0, IntMatrix.zeros(0, rank_X), IntMatrix.zeros(rank_X, 0))
        return cert if rank_X == 0 else None
    f_mat = f_blocks[0]
    for blk in f_blocks[1:]:
        f_mat = f_mat.stack(blk)
    g_mat = g_blocks[0]
    for blk in g_blocks[1:]:
        g_mat = g_mat.hstack(blk)
    cert = RetractCertificate(n, f_mat, g_mat)
    assert cert.verify(rank_X), "certificate arithmetic failed"
    return cert


# ---------------------------------------------------------------------------
# isomorphism from stable isomorphism (End = Z case)
# ---------------------------------------------------------------------------

@dataclass
class IsoConstructed:
    matrix: IntMatrix


@dataclass
class NotApplicable:
    reason: str
    end_rank: Optional[int] = None


@dataclass
class NoIso:
    reason: str
    hom_rank: int
    generator_det: Optional[int] = None


def iso_from_stable(X, Y) -> Union[IsoConstructed, NotApplicable, NoIso]:
    """Turn the rank/determinant analysis of Hom(X, Y) into an explicit
    isomorphism or a proof of non-isomorphism; only for End(X) = Z."""
    trivial, end_rank = _is_end_trivial(X)
    if not trivial:
        return NotApplicable("endomorphism ring is larger than the integers", end_rank=end_rank)
    H = _hom(X, Y)
    if _rank_of(X) != _rank_of(Y):
        return NoIso("ranks differ", hom_rank=H.rank)
    if H.rank != 1:
        # X iso Y would force Hom(X,Y) = End(X) = Z of rank 1
        return NoIso("hom lattice rank is not 1", hom_rank=H.rank)
    h = H.basis[0]
    d = h.det()
    if d in (1, -1):
        h.inverse_unimodular()  # integrality sanity check on the inverse
        # mutual retract certificates exist through h and h^{-1}
        cert_xy = retract_certificate(X, Y)
        cert_yx = retract_certificate(Y, X)
        if cert_xy is None or cert_yx is None:
            return NotApplicable("retract certificate missing despite unimodular generator")
        return IsoConstructed(h)
    return NoIso("saturated generator is not unimodular", hom_rank=1, generator_det=d)


def exhaustive_unimodular_search(X, Y, coeff_bound: int = 10) -> Optional[IntMatrix]:
    """Brute-force hunt for a unimodular intertwiner with coefficients
    bounded in the hom-lattice basis; independent cross-check for NoIso."""
    H = _hom(X, Y)
    if H.rank == 0 or _rank_of(X) != _rank_of(Y):
        return None
    rng = range(-coeff_bound, coeff_bound + 1)
    for coeffs in itertools.product(rng, repeat=H.rank):
        if all(c == 0 for c in coeffs):
            continue
        cand = H.element(coeffs)
        if cand.det() in (1, -1):
            return cand
    return None


# ---------------------------------------------------------------------------
# stable isomorphism probe
# ---------------------------------------------------------------------------

@dataclass
class PrimeVerdict:
    p: int
    isomorphic: bool


@dataclass
class StableIsoReport:
    verdict: str                       # IsoConstructed | ObstructionFound | NecessaryConditionsPass
    prime_verdicts: list[PrimeVerdict]
    obstruction_prime: Optional[int] = None
    obstruction_witness: Optional[tuple] = None
    retract_x_of_y: Optional[int] = None   # n of the certificate, None if absent
    retract_y_of_x: Optional[int] = None
    min_generators_end: Optional[int] = None
    min_generators_hom: Optional[int] = None
    iso_matrix: Optional[IntMatrix] = None

    @property
    def is_proof_of_equal_classes(self) -> bool:
        return self.verdict == "IsoConstructed"


def _trace_gram(basis: Sequence[IntMatrix], other: Sequence[IntMatrix]) -> IntMatrix:
    rows = []
    for f in basis:
        row = []
        for g in other:
            prod = g * f if g.cols == f.rows else f * g
            row.append(sum(prod.data[i][i] for i in range(min(prod.rows, prod.cols))))
        rows.append(row)
    return IntMatrix(rows, cols=len(other))


def probe_primes(X: LatticeModule, Y: LatticeModule, prime_bound: int) -> list[int]:
    """Primes up to the bound plus primes dividing invariant factors of the
    trace-pairing Gram matrices of End(X), End(Y), Hom(X,Y), Hom(Y,X)."""
    ps = set(primes_up_to(prime_bound))
    H_XX = hom_group(X, X)
    H_YY = hom_group(Y, Y)
    H_XY = hom_group(X, Y)
    H_YX = hom_group(Y, X)
    grams = [
        _trace_gram(H_XX.basis, H_XX.basis),
        _trace_gram(H_YY.basis, H_YY.basis),
    ]
    if H_XY.rank and H_YX.rank:
        grams.append(_trace_gram(H_XY.basis, H_YX.basis))
        grams.append(_trace_gram(H_YX.basis, H_XY.basis))
    for G in grams:
        if G.rows == 0:
            continue
        for d in invariant_factors(G):
            if d > 1:
                ps.update(factorint(d))
    return sorted(ps)


def stable_iso_probe(X: LatticeModule, Y: LatticeModule, prime_bound: int = 100, seed: int = 0) -> StableIsoReport:
    """Per-prime class comparison plus the integral necessary conditions
    (mutual retracts, equal minimal generator counts).

    IsoConstructed carries an explicit integral isomorphism;
    ObstructionFound carries a prime with distinct split-K0 classes;
    NecessaryConditionsPass asserts nothing beyond what the report shows."""
    if X.order != Y.order:
        raise ValueError("modules live over different orders")
    # rank mismatch: dimension differs at every prime
    if X.rank != Y.rank:
        p0 = 2
        return StableIsoReport(
            verdict="ObstructionFound",
            prime_verdicts=[PrimeVerdict(p0, False)],
            obstruction_prime=p0,
            obstruction_witness=("dimension", X.rank, Y.rank),
        )
    primes = probe_primes(X, Y, prime_bound)
    verdicts = []
    obstruction = None
    witness = None
    for p in primes:
        Mp = tensor_fp(X, p)
        Np = tensor_fp(Y, p)
        iso = modules_isomorphic(Mp, Np, seed=seed)
        verdicts.append(PrimeVerdict(p, iso is not None))
        if iso is None and obstruction is None:
            obstruction = p
            witness = (k0_class_fp(Mp, seed), k0_class_fp(Np, seed))
    cert_xy = retract_certificate(X, Y)
    cert_yx = retract_certificate(Y, X)
    HXY = hom_group(X, Y)
    HXX = hom_group(X, X)
    # hom lattices are free, so the minimal generator count is the rank
    mg_end = min_generators_of_group([], HXX.rank)
    mg_hom = min_generators_of_group([], HXY.rank)
    report = StableIsoReport(
        verdict="NecessaryConditionsPass",
        prime_verdicts=verdicts,
        retract_x_of_y=cert_xy.n if cert_xy else None,
        retract_y_of_x=cert_yx.n if cert_yx else None,
        min_generators_end=mg_end,
        min_generators_hom=mg_hom,
    )
    if obstruction is not None:
        report.verdict = "ObstructionFound"
        report.obstruction_prime = obstruction
        report.obstruction_witness = witness
        return report
    # attempt to upgrade to an explicit integral isomorphism
    if X == Y:
        report.verdict = "IsoConstructed"
        report.iso_matrix = IntMatrix.identity(X.rank)
        return report
    res = iso_from_stable(X, Y)
    if isinstance(res, IsoConstructed):
        report.verdict = "IsoConstructed"
        report.iso_matrix = res.matrix
        return report
    if HXY.rank and HXY.rank <= 4:
        found = exhaustive_unimodular_search(X, Y, coeff_bound=2)
        if found is not None:
            report.verdict = "IsoConstructed"
            report.iso_matrix = found
            return report
    # a missing retract certificate or a generator-count mismatch is itself a
    # negative finding even when every mod-p test passes; it stays visible in
    # the report fields while the verdict keeps the fixed vocabulary
    return report


# ---------------------------------------------------------------------------
# minimal generator counts
# ---------------------------------------------------------------------------

def min_generators(presentation: IntMatrix) -> int:
    """Smallest generator count of coker(presentation) = Z^rows / col-span:
    the number of invariant factors different from 1 plus the free rank;
    equals max_p dim(M tensor F_p)."""
    rows = presentation.rows
    if rows == 0:
        return 0
    if presentation.cols == 0:
        return rows
    S, _, _ = snf(presentation)
    facs = [S.data[i][i] for i in range(min(S.rows, S.cols)) if S.data[i][i] != 0]
    rank = len(facs)
    nontrivial_torsion = sum(1 for d in facs if d != 1)
    count = nontrivial_torsion + (rows - rank)
    # cross-check against the mod-p dimension formula
    relevant = {p for d in facs if d > 1 for p in factorint(d)}
    if relevant:
        best = 0
        for p in relevant:
            from .linalg import FpMatrix

            colrank = FpMatrix(p, np.array([[x % p for x in row] for row in presentation.data], dtype=np.int64)).rank() if presentation.cols else 0
            best = max(best, rows - colrank)
        assert best == count
    return count


def min_generators_of_group(invariants: Sequence[int], free_rank: int) -> int:
    """Direct form: invariant factors (d_i > 0) plus free rank."""
    return sum(1 for d in invariants if d != 1) + free_rank


# ---------------------------------------------------------------------------
# idempotent conjugacy classes (finite rings)
# ---------------------------------------------------------------------------

def enumerate_idempotents_conj(A: FiniteRing, cutoff: int = 10 ** 6) -> list[tuple[int, ...]]:
    """One representative per unit-conjugacy class of idempotents."""
    classes = idempotent_conjugacy_classes(A, cutoff)
    return [orb[0] for orb in classes]


# ---------------------------------------------------------------------------
# retracts of powers
# ---------------------------------------------------------------------------

@dataclass
class RetractClassesReport:
    representatives: list[LatticeModule]
    complete: bool
    lift_failures: int
    modulus: int


def _lift_idempotent(E: Order, e0: Sequence[int], N: int, max_iter: int = 16, entry_cap: int = 10 ** 6) -> Optional[tuple[int, ...]]:
    """Hensel lift e <- 3e^2 - 2e^3 from an idempotent mod N, with balanced
    reduction at the doubling modulus; returns an exact small idempotent of
    the order or None.  Lifts whose entries blow past the cap are treated as
    failures (the N-adic limit need not be integral)."""
    e = tuple(int(x) for x in e0)
    mod = N * N
    for _ in range(max_iter):
        sq = E.multiply(e, e)
        if sq == e:
            return e if max(abs(x) for x in e) <= entry_cap else None
        cube = E.multiply(sq, e)
        e = tuple(3 * s - 2 * c for s, c in zip(sq, cube))
        half = mod // 2
        e = tuple(((x + half) % mod) - half for x in e)
        if mod < 10 ** 30:
            mod *= mod
    sq = E.multiply(e, e)
    if sq == e and max(abs(x) for x in e) <= entry_cap:
        return e
    return None


def _single_pair_retract(V: LatticeModule, W: LatticeModule, coeff_bound: int = 2, grid_cap: int = 10 ** 6) -> Optional[IntMatrix]:
    """Search bounded hom-lattice coefficients for a pair psi phi = 1_V; on
    success return the idempotent phi psi in End(W) whose image is a copy of
    V inside W.  Skipped (None) when the coefficient grid would exceed the
    cap."""
    if V.rank == 0 or V.rank > W.rank:
        return None
    HVW = hom_group(V, W)
    HWV = hom_group(W, V)
    HVV = hom_group(V, V)
    if HVW.rank == 0 or HWV.rank == 0:
        return None
    side = 2 * coeff_bound + 1
    if side ** HVW.rank > grid_cap or side ** HWV.rank > grid_cap // 100:
        return None
    target = HVV.coordinates(IntMatrix.identity(V.rank))
    if target is None:
        return None
    # composition coordinates are bilinear: precompute on basis pairs
    tensor = np.zeros((HWV.rank, HVW.rank, HVV.rank), dtype=np.int64)
    for b, psi in enumerate(HWV.basis):
        for a, phi in enumerate(HVW.basis):
            coords = HVV.coordinates(psi * phi)
            if coords is None:
                return None
            tensor[b, a] = coords
    rng = range(-coeff_bound, coeff_bound + 1)
    a_grid = np.array(list(itertools.product(rng, repeat=HVW.rank)), dtype=np.int64)
    b_grid = np.array(list(itertools.product(rng, repeat=HWV.rank)), dtype=np.int64)
    want = np.array(target, dtype=np.int64)
    # comp[i, j] = coords of (b_grid[i] . psi) (a_grid[j] . phi)
    partial = np.einsum("bak,ja->jbk", tensor, a_grid)
    for j in range(a_grid.shape[0]):
        hits = np.nonzero((b_grid @ partial[j] == want).all(axis=1))[0]
        if hits.size:
            bvec = b_grid[hits[0]]
            phi = HVW.element([int(x) for x in a_grid[j]])
            psi = HWV.element([int(x) for x in bvec])
            assert HVV.coordinates(psi * phi) == target
            e = phi * psi
            assert e * e == e
            return e
    return None


def retract_classes_of_power(
    Y: LatticeModule,
    n: int,
    prime_bound: int = 100,
    seed: int = 0,
    modulus: int = 2,
    rank_cap: int = 24,
    end_rank_cap: int = 12,
    cutoff: int = 10 ** 6,
) -> RetractClassesReport:
    """Representatives of isomorphism classes of retracts of Y^n found by
    enumerating idempotents of End(Y^n) mod ``modulus`` up to conjugacy and
    lifting them; de-duplicated by the stable-isomorphism probe plus bounded
    unimodular search.  Completeness is NOT guaranteed (lift failures are
    counted)."""
    if n * Y.rank > rank_cap:
        raise TooLarge(rank_cap)
    W = power(Y, n)
    if n == 0 or Y.rank == 0:
        return RetractClassesReport([W], True, 0, modulus)
    E, H_end = end_ring(W)
    if E.rank > end_rank_cap:
        raise TooLarge(end_rank_cap)
    EN = FiniteRing((modulus,) * E.rank, E.table, E.unit, validate=False)
    classes_mod = idempotent_conjugacy_classes(EN, cutoff)
    idem_mats: list[IntMatrix] = []
    failures = 0
    for orbit in classes_mod:
        lifted = None
        for e0 in orbit:
            lifted = _lift_idempotent(E, e0, modulus)
            if lifted is not None:
                break
        if lifted is None:
            failures += 1
            continue
        mat = IntMatrix.zeros(W.rank, W.rank)
        for c, b in zip(lifted, H_end.basis):
            if c:
                mat = mat + b.scale(c)
        assert mat * mat == mat
        idem_mats.append(mat)
    # supplementary sweep: free modules O^k hiding as summands (their
    # idempotents can have large coordinates invisible to the Hensel lift)
    free_gen = Y.order.regular_module()
    k = 1
    while k * free_gen.rank <= W.rank:
        e = _single_pair_retract(power(free_gen, k), W)
        if e is not None:
            idem_mats.append(e)
        k += 1
    found: list[LatticeModule] = []
    for mat in idem_mats:
        sub = _image_submodule(W, mat)
        if not any(_same_class(sub, old, prime_bound, seed) for old in found):
            found.append(sub)
    found.sort(key=lambda m: m.rank)
    return RetractClassesReport(found, False, failures, modulus)


def _image_submodule(W: LatticeModule, idem: IntMatrix) -> LatticeModule:
    """The retract im(e) = ker(1 - e) with its induced action."""
    from .linalg import kernel_basis

    one_minus = IntMatrix.identity(W.rank) - idem
    rows = kernel_basis(one_minus)
    if not rows:
        from .orders import zero_module

        return zero_module(W.order)
    B = IntMatrix(rows, cols=W.rank)  # rows: basis of the sublattice
    Bt = B.transpose()
    acts = []
    for rho in W.actions:
        img = rho * Bt  # columns: images of basis vectors
        cols = []
        for j in range(B.rows):
            col = tuple(img.data[i][j] for i in range(W.rank))
            coords = solve_integer(Bt, col)
            assert coords is not None, "retract basis is not action-invariant"
            cols.append(coords)
        acts.append(IntMatrix(tuple(zip(*cols)), cols=B.rows))
    return LatticeModule(W.order, acts, validate=False)


def _same_class(A: LatticeModule, B: LatticeModule, prime_bound: int, seed: int) -> bool:
    if A.rank != B.rank:
        return False
    if A.rank == 0:
        return True
    if exhaustive_unimodular_search(A, B, coeff_bound=2) is not None:
        return True
    report = stable_iso_probe(A, B, prime_bound=min(prime_bound, 13), seed=seed)
    if report.verdict == "ObstructionFound":
        return False
    if report.verdict == "IsoConstructed":
        return True
    # necessary conditions pass: decide by a wider unimodular search
    return exhaustive_unimodular_search(A, B, coeff_bound=4) is not None
