"""Dense univariate polynomial arithmetic over prime fields, plus Berlekamp
factorization.  Coefficients are Python ints in [0, p), stored low degree
first; the zero polynomial is the empty list."""

from __future__ import annotations


def trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def add(f, g, p):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)])


def sub(f, g, p):
    n = max(len(f), len(g))
    return trim([((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)])


def mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return trim(out)


def scale(f, c, p):
    c %= p
    return trim([a * c % p for a in f])


def monic(f, p):
    if not f:
        return []
    inv = pow(f[-1], p - 2, p)
    return scale(f, inv, p)


def divmod_poly(f, g, p):
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    f = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    inv = pow(g[-1], p - 2, p)
    while len(f) >= len(g) and any(f):
        trim(f)
        if len(f) < len(g):
            break
        c = f[-1] * inv % p
        d = len(f) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            f[d + i] = (f[d + i] - c * b) % p
        trim(f)
    return trim(q), trim(f)


def gcd(f, g, p):
    f, g = list(f), list(g)
    while g:
        f, g = g, divmod_poly(f, g, p)[1]
    return monic(f, p)


def pow_mod(f, e, mod, p):
    result = [1]
    base = divmod_poly(f, mod, p)[1]
    while e > 0:
        if e & 1:
            result = divmod_poly(mul(result, base, p), mod, p)[1]
        base = divmod_poly(mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def derivative(f, p):
    return trim([i * f[i] % p for i in range(1, len(f))])


def pth_root(f, p):
    """For f with zero derivative (f = g(x^p)), return g (prime field)."""
    return trim([f[i] for i in range(0, len(f), p)])


def _berlekamp_splitting(f, p):
    """One nontrivial monic factor of squarefree monic f, or None if
    irreducible.  Deterministic (Berlekamp nullspace + constant sweep)."""
    n = len(f) - 1
    if n <= 1:
        return None
    # Q matrix: row i = x^(p*i) mod f
    rows = []
    xp = pow_mod([0, 1], p, f, p)
    cur = [1]
    for _ in range(n):
        rows.append([cur[j] if j < len(cur) else 0 for j in range(n)])
        cur = divmod_poly(mul(cur, xp, p), f, p)[1]
    # nullspace of (Q - I)^T: vectors v with v(x)^p = v(x) mod f
    m = [[(rows[i][j] - (1 if i == j else 0)) % p for i in range(n)] for j in range(n)]
    basis = _nullspace_small(m, p)
    if len(basis) <= 1:
        return None
    for v in basis:
        poly = trim(list(v))
        if len(poly) <= 1:
            continue
        for c in range(p):
            g = gcd(f, sub(poly, [c], p), p)
            if 0 < len(g) - 1 < n:
                return g
    return None


def _nullspace_small(m, p):
    rows = len(m)
    cols = len(m[0]) if rows else 0
    a = [row[:] for row in m]
    piv_cols = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(cols) if c not in piv_cols]
    out = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for i, c in enumerate(piv_cols):
            v[c] = (-a[i][fc]) % p
        out.append(v)
    return out


def factor(f, p) -> dict[tuple[int, ...], int]:
    """Full irreducible factorization of nonzero f; returns
    {monic irreducible (as tuple): multiplicity}."""
    f = monic(list(f), p)
    if len(f) <= 1:
        return {}
    irreducibles: set[tuple[int, ...]] = set()

    def distinct_factors(g):
        g = monic(list(g), p)
        if len(g) <= 1:
            return
        d = derivative(g, p)
        if not d:
            distinct_factors(pth_root(g, p))
            return
        h = divmod_poly(g, gcd(g, d, p), p)[0]  # squarefree, same support minus p-power part
        _split_squarefree(monic(h, p))
        distinct_factors(gcd(g, d, p))

    def _split_squarefree(h):
        if len(h) <= 1:
            return
        split = _berlekamp_splitting(h, p)
        if split is None:
            irreducibles.add(tuple(h))
            return
        _split_squarefree(split)
        _split_squarefree(monic(divmod_poly(h, split, p)[0], p))

    distinct_factors(f)
    out = {}
    for q in irreducibles:
        e = 0
        rest = f
        while True:
            quo, rem = divmod_poly(rest, list(q), p)
            if rem:
                break
            e += 1
            rest = quo
        out[q] = e
    return out
