"""Exact linear algebra over an endomorphism ring viewed inside its division
algebra.

Column-vector convention throughout: matrices act on the left of coordinate
columns, so all elimination uses left row operations only, and kernels are
right subspaces (closed under right scalar multiplication). Transposing does
not commute with products over a noncommutative ring, so no code here ever
transposes a matrix to reuse a routine.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError, InternalError, PreconditionViolated
from .intmat import lcm_list
from .rings import (
    EndoRing,
    RingElem,
    min_poly_over_center,
    min_poly_over_rationals,
)
from . import unipoly as up


class EndoMatrix:
    """Matrix over an EndoRing with exact rational coordinates."""

    __slots__ = ("ring", "rows", "n", "m")

    def __init__(self, ring: EndoRing, rows):
        self.ring = ring
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)
        self.m = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.m:
                raise DomainError("ragged matrix")
            for x in r:
                if not isinstance(x, RingElem) or x.ring != ring:
                    raise DomainError("entry is not an element of the ring")

    @classmethod
    def from_scalars(cls, ring: EndoRing, rows):
        """Build from integer/Fraction entries (scalar multiples of 1)."""
        return cls(
            ring, [[ring.from_fraction(Fraction(x)) for x in row] for row in rows]
        )

    @classmethod
    def identity(cls, ring: EndoRing, n: int):
        one, zero = ring.one(), ring.zero()
        return cls(ring, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, ring: EndoRing, n: int, m: int | None = None):
        m = n if m is None else m
        z = ring.zero()
        return cls(ring, [[z for _ in range(m)] for _ in range(n)])

    def is_square(self):
        return self.n == self.m

    def __eq__(self, other):
        return (
            isinstance(other, EndoMatrix)
            and self.ring == other.ring
            and self.n == other.n
            and self.m == other.m
            and all(
                self.rows[i][j] == other.rows[i][j]
                for i in range(self.n)
                for j in range(self.m)
            )
        )

    def __add__(self, other):
        return EndoMatrix(
            self.ring,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other):
        return EndoMatrix(
            self.ring,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
        )

    def __mul__(self, other):
        if isinstance(other, EndoMatrix):
            if self.m != other.n:
                raise DomainError("matrix shape mismatch")
            zero = self.ring.zero()
            out = []
            for i in range(self.n):
                row = []
                for j in range(other.m):
                    acc = zero
                    for k in range(self.m):
                        a = self.rows[i][k]
                        if not a.is_zero():
                            acc = acc + a * other.rows[k][j]
                    row.append(acc)
                out.append(row)
            return EndoMatrix(self.ring, out)
        return self.scale(other)

    def scale(self, c):
        if isinstance(c, RingElem):
            return EndoMatrix(self.ring, [[c * x for x in row] for row in self.rows])
        c = Fraction(c)
        return EndoMatrix(self.ring, [[x.scale(c) for x in row] for row in self.rows])

    def __pow__(self, k: int):
        if not self.is_square():
            raise DomainError("power of a non-square matrix")
        if k < 0:
            inv = self.inverse()
            if inv is None:
                raise DomainError("negative power of a singular matrix")
            return inv ** (-k)
        out = EndoMatrix.identity(self.ring, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def apply_column(self, col):
        zero = self.ring.zero()
        out = []
        for i in range(self.n):
            acc = zero
            for k in range(self.m):
                a = self.rows[i][k]
                if not a.is_zero():
                    acc = acc + a * col[k]
            out.append(acc)
        return out

    def column(self, j):
        return [self.rows[i][j] for i in range(self.n)]

    def block(self, r0, r1, c0, c1):
        return EndoMatrix(self.ring, [row[c0:c1] for row in self.rows[r0:r1]])

    def denominator(self) -> int:
        return lcm_list(
            [x.denominator() for row in self.rows for x in row] or [1]
        )

    def eval_center_poly(self, coeffs):
        """Evaluate a polynomial with center-field coefficients at the matrix."""
        out = EndoMatrix.zero(self.ring, self.n)
        for c in reversed(coeffs):
            out = out * self
            scalar = self.ring.center_to_elem(c)
            for i in range(self.n):
                out.rows[i][i] = out.rows[i][i] + scalar
        return out

    def min_poly_center(self):
        if self.n == 0:
            return [self.ring.center.one]
        return min_poly_over_center(self)

    def min_poly_rational(self):
        if self.n == 0:
            return [Fraction(1)]
        return min_poly_over_rationals(self)

    def as_fraction_rows(self):
        """Entries as plain Fractions (rank-1 rings only)."""
        if self.ring.dim != 1:
            raise DomainError("matrix entries are not rational scalars")
        return [[x.coords[0] for x in row] for row in self.rows]

    def inverse(self):
        if not self.is_square():
            raise DomainError("inverse of a non-square matrix")
        aug = EndoMatrix(
            self.ring,
            [
                list(row) + list(EndoMatrix.identity(self.ring, self.n).rows[i])
                for i, row in enumerate(self.rows)
            ],
        )
        red, pivots = _row_reduce(aug, self.n)
        if len(pivots) != self.n:
            return None
        return red.block(0, self.n, self.n, 2 * self.n)

    def is_dominant(self) -> bool:
        """Invertible over the division algebra."""
        return self.n == 0 or self.inverse() is not None

    def __repr__(self):
        return f"EndoMatrix({self.n}x{self.m} over {self.ring})"


def _row_reduce(mat: EndoMatrix, pivot_cols: int):
    """Left-row-operation RREF on the first pivot_cols columns.

    Returns (reduced matrix, pivot column list).
    """
    rows = [list(r) for r in mat.rows]
    n = len(rows)
    pivots = []
    r = 0
    for c in range(pivot_cols):
        if r >= n:
            break
        piv = None
        for i in range(r, n):
            if not rows[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inv()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return EndoMatrix(mat.ring, rows), pivots


def solve_right(a: EndoMatrix, b) -> list | None:
    """x with A x = b over the division algebra, or None when inconsistent.

    Free variables are set to zero. Row operations multiply on the left only.
    """
    if len(b) != a.n:
        raise DomainError("right-hand side length mismatch")
    aug = EndoMatrix(a.ring, [list(row) + [bb] for row, bb in zip(a.rows, b)])
    if a.n == 0:
        return [a.ring.zero()] * a.m
    red, pivots = _row_reduce(aug, a.m)
    for i in range(len(pivots), a.n):
        if not red.rows[i][a.m].is_zero():
            return None
    x = [a.ring.zero()] * a.m
    for i, c in enumerate(pivots):
        x[c] = red.rows[i][a.m]
    return x


def kernel_right(a: EndoMatrix) -> list[list[RingElem]]:
    """Basis of the right kernel {x : A x = 0} (columns as lists)."""
    red, pivots = _row_reduce(a, a.m)
    free = [c for c in range(a.m) if c not in pivots]
    basis = []
    one, zero = a.ring.one(), a.ring.zero()
    for f in free:
        v = [zero] * a.m
        v[f] = one
        for i, c in enumerate(pivots):
            v[c] = -red.rows[i][f]
        basis.append(v)
    return basis


def in_right_span(vectors, w, ring) -> bool:
    """Whether w lies in the right span of the given column vectors."""
    if not vectors:
        return all(x.is_zero() for x in w)
    mat = EndoMatrix(ring, [[v[i] for v in vectors] for i in range(len(w))])
    return solve_right(mat, w) is not None


class JordanSpec:
    """Jordan data: blocks [(eigenvalue RingElem, size)], conjugator P and its
    inverse with P^-1 A P equal to the direct sum of J_{alpha,s} blocks."""

    def __init__(self, blocks, p: EndoMatrix, p_inv: EndoMatrix):
        self.blocks = list(blocks)
        self.p = p
        self.p_inv = p_inv

    @property
    def block_sizes(self):
        return [s for _, s in self.blocks]

    def jordan_matrix(self) -> EndoMatrix:
        ring = self.p.ring
        n = sum(s for _, s in self.blocks)
        out = EndoMatrix.zero(ring, n)
        pos = 0
        one = ring.one()
        for alpha, s in self.blocks:
            for t in range(s):
                out.rows[pos + t][pos + t] = alpha
                if t + 1 < s:
                    out.rows[pos + t][pos + t + 1] = one
            pos += s
        return out

    def denominator(self) -> int:
        return lcm_list([self.p.denominator(), self.p_inv.denominator()])


def _is_power_of_linear(g, field):
    """alpha with g = (x - alpha)^deg(g), or None."""
    r = up.deg(g)
    if r < 1:
        return None
    # alpha = -coeff_{r-1} / r
    alpha = field.mul(field.neg(g[r - 1]), field.inv(field.from_int(r)))
    lin = [field.neg(alpha), field.one]
    power = [field.one]
    for _ in range(r):
        power = up.p_mul(power, lin, field)
    return alpha if up.p_eq(power, g, field) else None


def jordan_form_central(a: EndoMatrix) -> JordanSpec:
    """Jordan normal form for a matrix whose minimal polynomial over the
    center is (x - alpha)^r with alpha central.

    Generalized-eigenvector chains built from the kernels of (A - alpha I)^k;
    the result is verified entrywise before returning. Block sizes come out
    sorted descending.
    """
    if not a.is_square():
        raise PreconditionViolated("Jordan form needs a square matrix")
    ring = a.ring
    field = ring.center
    if a.n == 0:
        return JordanSpec([], EndoMatrix.identity(ring, 0), EndoMatrix.identity(ring, 0))
    g = a.min_poly_center()
    alpha_cf = _is_power_of_linear(g, field)
    if alpha_cf is None:
        raise PreconditionViolated(
            "minimal polynomial over the center is not a power of (x - alpha)"
        )
    alpha = ring.center_to_elem(alpha_cf)
    r = up.deg(g)
    n = a.n
    nil = a - EndoMatrix.identity(ring, n).scale(alpha)
    powers = [EndoMatrix.identity(ring, n)]
    for _ in range(r):
        powers.append(powers[-1] * nil)
    kernels = [[]] + [kernel_right(powers[k]) for k in range(1, r + 1)]
    chains = []
    collected = []
    for s in range(r, 0, -1):
        context = kernels[s - 1]
        for w in kernels[s]:
            if in_right_span(collected + context, w, ring):
                continue
            chain = [w]
            for _ in range(s - 1):
                chain.append(nil.apply_column(chain[-1]))
            chains.append((s, chain))
            collected.extend(chain)
    if sum(s for s, _ in chains) != n:
        raise InternalError("Jordan chain construction did not span the space")
    chains.sort(key=lambda c: -c[0])
    columns = []
    for s, chain in chains:
        columns.extend(reversed(chain))  # N^{s-1} w, ..., N w, w
    p = EndoMatrix(ring, [[columns[j][i] for j in range(n)] for i in range(n)])
    p_inv = p.inverse()
    if p_inv is None:
        raise InternalError("Jordan conjugator is singular")
    spec = JordanSpec([(alpha, s) for s, _ in chains], p, p_inv)
    if p_inv * a * p != spec.jordan_matrix():
        raise InternalError("Jordan form verification failed")
    return spec


def coprime_split(a: EndoMatrix, p1, p2):
    """Invertible P with P^-1 A P = A1 (+) A2 where min poly of Ai is pi.

    p1 * p2 must equal the minimal polynomial over the center and be coprime.
    Splitting subspaces are the kernels of p1(A) and p2(A); the central Bezout
    identity guarantees they are complementary.
    """
    ring = a.ring
    field = ring.center
    p1 = up.p_monic([c if isinstance(c, tuple) else field.from_fraction(c) for c in p1], field)
    p2 = up.p_monic([c if isinstance(c, tuple) else field.from_fraction(c) for c in p2], field)
    g = a.min_poly_center()
    if not up.p_eq(up.p_mul(p1, p2, field), g, field):
        raise PreconditionViolated("p1 * p2 is not the minimal polynomial")
    d, _, _ = up.p_xgcd(p1, p2, field)
    if up.deg(d) != 0:
        raise PreconditionViolated("factors are not coprime")
    n1 = 0
    v1 = kernel_right(a.eval_center_poly(p1)) if up.deg(p1) > 0 else []
    v2 = kernel_right(a.eval_center_poly(p2)) if up.deg(p2) > 0 else []
    n1, n2 = len(v1), len(v2)
    if n1 + n2 != a.n:
        raise InternalError("coprime splitting subspaces do not fill the space")
    columns = v1 + v2
    p = EndoMatrix(ring, [[columns[j][i] for j in range(a.n)] for i in range(a.n)])
    p_inv = p.inverse()
    if p_inv is None:
        raise InternalError("coprime splitting conjugator is singular")
    b = p_inv * a * p
    a1 = b.block(0, n1, 0, n1)
    a2 = b.block(n1, a.n, n1, a.n)
    for i in range(a.n):
        for j in range(a.n):
            inside = (i < n1) == (j < n1)
            if not inside and not b.rows[i][j].is_zero():
                raise InternalError("coprime splitting left off-diagonal residue")
    if up.deg(p1) > 0 and not up.p_eq(a1.min_poly_center(), p1, field):
        raise InternalError("first summand has wrong minimal polynomial")
    if up.deg(p2) > 0 and not up.p_eq(a2.min_poly_center(), p2, field):
        raise InternalError("second summand has wrong minimal polynomial")
    return p, a1, a2
