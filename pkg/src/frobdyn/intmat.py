"""Exact linear algebra over the integers and the rationals.

Vectors are tuples/lists, matrices are lists of rows. Integer routines use
row-style Hermite normal form with a tracked unimodular transform; rational
routines use fraction-exact Gaussian elimination. Everything here is
deterministic and allocation-light; sizes stay desk-scale.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def identity_int(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul_int(a, b):
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [
        [sum(ra[k] * b[k][j] for k in range(len(ra))) for j in range(cols)]
        for ra in a
    ]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def hnf_with_transform(rows, ncols=None):
    """Row Hermite normal form.

    Returns (H, U, rank) with U unimodular, U*A = H, pivots positive,
    entries above each pivot reduced into [0, pivot), zero rows last.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    u = identity_int(m)
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            if i0 != r:
                a[r], a[i0] = a[i0], a[r]
                u[r], u[i0] = u[i0], u[r]
            reduced = True
            for i in range(r + 1, m):
                if a[i][c] != 0:
                    q = a[i][c] // a[r][c]
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                        u[i] = [x - q * y for x, y in zip(u[i], u[r])]
                    if a[i][c] != 0:
                        reduced = False
            if reduced:
                break
        if r < m and a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
            r += 1
    return a, u, r


def left_kernel(rows, ncols=None):
    """Basis (list of integer vectors) of {v : v * A = 0}. Saturated."""
    if not rows:
        return []
    h, u, rank = hnf_with_transform(rows, ncols)
    return [u[i] for i in range(rank, len(rows))]


def right_kernel(rows, ncols=None):
    """Basis of {x : A * x = 0} as integer row vectors."""
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if n == 0:
        return []
    if not rows:
        return identity_int(n)
    return left_kernel(transpose(rows), len(rows))


def solve_left(rows, b):
    """Integer x with x * A = b, or None.

    Decides membership of b in the row lattice of A.
    """
    n = len(b)
    h, u, rank = hnf_with_transform(rows, n)
    target = list(map(int, b))
    coeffs = [0] * len(rows)
    for i in range(rank):
        c = next(j for j in range(n) if h[i][j] != 0)
        if target[c] % h[i][c] != 0:
            return None
        q = target[c] // h[i][c]
        coeffs[i] = q
        if q:
            target = [x - q * y for x, y in zip(target, h[i])]
    if any(target):
        return None
    x = [0] * len(rows)
    for i, q in enumerate(coeffs):
        if q:
            x = [xx + q * uu for xx, uu in zip(x, u[i])]
    return x


def saturation(rows, ncols=None):
    """Basis of the saturation of the row lattice (QQ-span intersected ZZ^n)."""
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    k = right_kernel(rows, n)
    if not k:
        return identity_int(n)
    return left_kernel(transpose(k), len(k))


def snf_diagonal(rows):
    """Nonzero diagonal of the Smith normal form (d1 | d2 | ...)."""
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    diag = []
    top = 0
    while top < min(m, n):
        if all(a[i][j] == 0 for i in range(top, m) for j in range(top, n)):
            break
        while True:
            i0, j0 = min(
                ((i, j) for i in range(top, m) for j in range(top, n) if a[i][j]),
                key=lambda ij: abs(a[ij[0]][ij[1]]),
            )
            a[top], a[i0] = a[i0], a[top]
            for row in a:
                row[top], row[j0] = row[j0], row[top]
            p = a[top][top]
            dirty = False
            for i in range(top + 1, m):
                q = a[i][top] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                if a[i][top]:
                    dirty = True
            for j in range(top + 1, n):
                q = a[top][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[top]
                if a[top][j]:
                    dirty = True
            if not dirty:
                # p must divide the rest of the block for true SNF
                bad = next(
                    (
                        (i, j)
                        for i in range(top + 1, m)
                        for j in range(top + 1, n)
                        if a[i][j] % p != 0
                    ),
                    None,
                )
                if bad is None:
                    break
                a[top] = [x + y for x, y in zip(a[top], a[bad[0]])]
        diag.append(abs(a[top][top]))
        top += 1
    return diag


def quotient_exponent(sub_rows, sup_rows):
    """Smallest e >= 1 with e * (lattice of sup_rows) inside lattice of sub_rows.

    Requires the two lattices to have the same QQ-span; raises otherwise.
    """
    if not sup_rows:
        return 1
    coords = []
    for v in sup_rows:
        # e*v in sub-lattice for some e: solve over QQ, exponent = lcm of denominators
        sol = solve_rational_left(sub_rows, v)
        if sol is None:
            raise ValueError("lattices do not share a QQ-span")
        coords.append(sol)
    e = 1
    for row in coords:
        for x in row:
            e = e * x.denominator // gcd(e, x.denominator)
    return e


# -- rational routines ------------------------------------------------------


def frac_rows(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows, ncols=None):
    """Reduced row echelon form over QQ. Returns (R, pivots, transform)."""
    a = frac_rows(rows)
    m = len(a)
    n = ncols if ncols is not None else (len(a[0]) if a else 0)
    t = [[Fraction(1 if i == j else 0) for j in range(m)] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        t[r], t[piv] = t[piv], t[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        t[r] = [x * inv for x in t[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                t[i] = [x - f * y for x, y in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
    return a, pivots, t


def solve_rational(rows, b):
    """x (Fractions) with A * x = b (column convention), or None."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [bb] for r, bb in zip(rows, b)]
    red, pivots, _ = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = red[i][n]
    return x


def solve_rational_left(rows, b):
    """x with x * A = b over QQ, or None."""
    sol = solve_rational(transpose(rows), b)
    return sol


def rational_kernel(rows, ncols=None):
    """Basis of the right kernel {x : A x = 0} over QQ."""
    n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if not rows:
        return [[Fraction(i == j) for j in range(n)] for i in range(n)]
    red, pivots, _ = rref(rows, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][f]
        basis.append(v)
    return basis


def invert_rational(rows):
    """Inverse of a square matrix over QQ, or None if singular."""
    n = len(rows)
    red, pivots, t = rref(rows, n)
    if len(pivots) != n:
        return None
    return t


def det_rational(rows):
    a = frac_rows(rows)
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def lcm(a, b):
    return a * b // gcd(a, b) if a and b else max(abs(a), abs(b), 1)


def lcm_list(xs):
    out = 1
    for x in xs:
        out = lcm(out, x)
    return out
