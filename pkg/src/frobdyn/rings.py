"""Endomorphism rings with a designated central Frobenius element.

Three concrete kinds: the integers (torus factors, Frobenius = q), quadratic
orders Z[F] with F^2 = trace*F - q, and quaternion orders inside (a,b/Q).
Ring elements are coordinate vectors over the declared order basis with exact
rational coordinates. The center field Q(F_C) is modelled exactly (rationals
or a quadratic extension); minimal polynomials of matrices over it are
computed by Krylov iteration on the regular representation.
"""

from __future__ import annotations

from fractions import Fraction
import math

import mpmath

from .errors import DomainError, InternalError, PreconditionViolated, Unsupported
from .intmat import invert_rational
from . import unipoly as up


class CenterField:
    """Q(F_C): the rationals, or the quadratic field with F^2 = a F - q.

    Elements are coordinate tuples of Fractions of length `deg`.
    """

    def __init__(self, trace=None, norm=None):
        if trace is None:
            self.deg = 1
            self.trace = None
            self.norm_f = None
        else:
            self.deg = 2
            self.trace = Fraction(trace)
            self.norm_f = Fraction(norm)
        self.zero = (Fraction(0),) * self.deg
        self.one = (Fraction(1),) + (Fraction(0),) * (self.deg - 1)

    def __eq__(self, other):
        return isinstance(other, CenterField) and (
            self.deg,
            self.trace,
            self.norm_f,
        ) == (other.deg, other.trace, other.norm_f)

    def __hash__(self):
        return hash((self.deg, self.trace, self.norm_f))

    def from_int(self, n):
        return (Fraction(n),) + (Fraction(0),) * (self.deg - 1)

    def from_fraction(self, x):
        return (Fraction(x),) + (Fraction(0),) * (self.deg - 1)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        if self.deg == 1:
            return (a[0] * b[0],)
        # (a0 + a1 F)(b0 + b1 F) with F^2 = t F - n
        c0 = a[0] * b[0] - a[1] * b[1] * self.norm_f
        c1 = a[0] * b[1] + a[1] * b[0] + a[1] * b[1] * self.trace
        return (c0, c1)

    def conj(self, a):
        if self.deg == 1:
            return a
        return (a[0] + a[1] * self.trace, -a[1])

    def norm(self, a) -> Fraction:
        if self.deg == 1:
            return a[0]
        return a[0] * a[0] + a[0] * a[1] * self.trace + a[1] * a[1] * self.norm_f

    def inv(self, a):
        if self.eq(a, self.zero):
            raise DomainError("division by zero in the center field")
        if self.deg == 1:
            return (1 / a[0],)
        n = self.norm(a)
        c = self.conj(a)
        return tuple(x / n for x in c)

    def eq(self, a, b):
        return a == b

    def is_zero(self, a):
        return a == self.zero

    def is_rational(self, a):
        return self.deg == 1 or a[1] == 0

    def as_fraction(self, a) -> Fraction:
        if not self.is_rational(a):
            raise DomainError("center-field element is not rational")
        return a[0]

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        out = self.one
        base = a
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def numeric(self, a):
        """Principal embedding into C (F maps to (t + sqrt(t^2-4n))/2)."""
        if self.deg == 1:
            return mpmath.mpf(a[0].numerator) / a[0].denominator
        t = mpmath.mpf(self.trace.numerator) / self.trace.denominator
        n = mpmath.mpf(self.norm_f.numerator) / self.norm_f.denominator
        f = (t + mpmath.sqrt(mpmath.mpc(t * t - 4 * n))) / 2
        a0 = mpmath.mpf(a[0].numerator) / a[0].denominator
        a1 = mpmath.mpf(a[1].numerator) / a[1].denominator
        return a0 + a1 * f

    def __repr__(self):
        if self.deg == 1:
            return "QQ"
        return f"QQ(F | F^2 = {self.trace}*F - {self.norm_f})"


def _quaternion_table(a: Fraction, b: Fraction):
    """Structure constants over the basis (1, i, j, k) of (a,b/Q)."""
    e = [Fraction(0)] * 4

    def v(*coords):
        return tuple(Fraction(c) for c in coords)

    one, i, j, k = v(1, 0, 0, 0), v(0, 1, 0, 0), v(0, 0, 1, 0), v(0, 0, 0, 1)
    table = [[None] * 4 for _ in range(4)]
    table[0] = [one, i, j, k]
    table[1] = [i, v(a, 0, 0, 0), k, v(0, 0, a, 0)]
    table[2] = [j, v(0, 0, 0, -1), v(b, 0, 0, 0), v(0, -b, 0, 0)]
    table[3] = [k, v(0, 0, -a, 0), v(0, b, 0, 0), v(-a * b, 0, 0, 0)]
    return table


class EndoRing:
    """An order in a (possibly skew) algebra with a central Frobenius."""

    def __init__(
        self,
        kind: str,
        q: int,
        trace=None,
        quat_a=None,
        quat_b=None,
        order_basis=None,
        frobenius=None,
    ):
        if q < 2:
            raise DomainError("Frobenius size q must be at least 2")
        self.kind = kind
        self.q = q
        if kind == "integer":
            self.dim = 1
            self._alg_table = [[(Fraction(1),)]]
            self.order_matrix = [[Fraction(1)]]
        elif kind == "quadratic":
            if trace is None:
                raise DomainError("quadratic order needs the Frobenius trace")
            self.trace = Fraction(trace)
            self.dim = 2
            cf = CenterField(self.trace, q)
            self._alg_table = [
                [cf.one, (Fraction(0), Fraction(1))],
                [
                    (Fraction(0), Fraction(1)),
                    cf.mul((Fraction(0), Fraction(1)), (Fraction(0), Fraction(1))),
                ],
            ]
            self.order_matrix = [
                [Fraction(1), Fraction(0)],
                [Fraction(0), Fraction(1)],
            ]
        elif kind == "quaternion":
            if quat_a is None or quat_b is None:
                raise DomainError("quaternion order needs algebra parameters a, b")
            self.quat_a = Fraction(quat_a)
            self.quat_b = Fraction(quat_b)
            self.dim = 4
            self._alg_table = _quaternion_table(self.quat_a, self.quat_b)
            if order_basis is None:
                self.order_matrix = [
                    [Fraction(i == j) for j in range(4)] for i in range(4)
                ]
            else:
                self.order_matrix = [[Fraction(x) for x in row] for row in order_basis]
                if len(self.order_matrix) != 4 or any(
                    len(r) != 4 for r in self.order_matrix
                ):
                    raise DomainError("quaternion order basis must be 4x4")
        else:
            raise DomainError(f"unknown ring kind {kind!r}")
        self._order_inv = invert_rational(self.order_matrix)
        if self._order_inv is None:
            raise DomainError("order basis is singular")
        # structure constants over the order basis
        self._table = [
            [
                self._to_order(
                    self._alg_mul(self.order_matrix[i], self.order_matrix[j])
                )
                for j in range(self.dim)
            ]
            for i in range(self.dim)
        ]
        if frobenius is None:
            if kind == "integer":
                frobenius = [q]
            elif kind == "quadratic":
                frobenius = [0, 1]
            else:
                frobenius = [q, 0, 0, 0]
        self.frobenius = RingElem(self, frobenius)
        self._validate_frobenius()
        if kind == "quadratic":
            self.center = CenterField(self.trace, q)
        else:
            self.center = CenterField()
        self.center_rank = 1 if kind in ("integer", "quadratic") else 4

    # -- basis conversions ----------------------------------------------------

    def _alg_mul(self, x, y):
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0:
                    continue
                prod = self._alg_table[i][j]
                c = xi * yj
                for t, pt in enumerate(prod):
                    out[t] += c * pt
        return out

    def _to_alg(self, coords):
        return [
            sum(coords[i] * self.order_matrix[i][j] for i in range(self.dim))
            for j in range(self.dim)
        ]

    def _to_order(self, alg):
        return tuple(
            sum(alg[i] * self._order_inv[i][j] for i in range(self.dim))
            for j in range(self.dim)
        )

    def _validate_frobenius(self):
        f = self.frobenius
        for i in range(self.dim):
            b = RingElem(self, [Fraction(t == i) for t in range(self.dim)])
            if f * b != b * f:
                raise DomainError("declared Frobenius element is not central")
        if self.kind == "integer":
            if f.coords != (Fraction(self.q),):
                raise DomainError("torus Frobenius must equal q")
        elif self.kind == "quadratic":
            rel = f * f - f.scale(self.trace) + self.one().scale(self.q)
            if not rel.is_zero():
                raise DomainError("Frobenius does not satisfy F^2 = trace*F - q")
        else:
            alg = self._to_alg(list(f.coords))
            if any(c != 0 for c in alg[1:]):
                raise InternalError("central quaternion element must be scalar")
            if alg[0] == 0:
                raise DomainError("Frobenius element must be nonzero")

    # -- element constructors --------------------------------------------------

    def elem(self, coords) -> "RingElem":
        return RingElem(self, coords)

    def zero(self) -> "RingElem":
        return RingElem(self, [0] * self.dim)

    def one(self) -> "RingElem":
        one_alg = [Fraction(1)] + [Fraction(0)] * (self.dim - 1)
        return RingElem(self, self._to_order(one_alg))

    def from_fraction(self, x) -> "RingElem":
        return self.one().scale(Fraction(x))

    def frobenius_cf(self):
        """The Frobenius as a center-field element."""
        if self.kind == "quadratic":
            return (Fraction(0), Fraction(1))
        alg = self._to_alg(list(self.frobenius.coords))
        return self.center.from_fraction(alg[0])

    def center_to_elem(self, c) -> "RingElem":
        """Embed a center-field element into the ring (as a Q-combination of
        1 and the Frobenius for quadratic orders, a rational scalar else)."""
        if self.kind == "quadratic":
            return self.one().scale(c[0]) + self.frobenius.scale(c[1])
        return self.from_fraction(self.center.as_fraction(c))

    def decompose_center(self, x: "RingElem"):
        """Coordinates of x in a basis of the algebra over the center field."""
        if self.kind == "quadratic":
            alg = self._to_alg(list(x.coords))
            return [(alg[0], alg[1])]
        alg = self._to_alg(list(x.coords))
        return [self.center.from_fraction(c) for c in alg]

    def compose_center(self, cf_coords) -> "RingElem":
        if self.kind == "quadratic":
            (c,) = cf_coords
            return self.center_to_elem(c)
        alg = [self.center.as_fraction(c) for c in cf_coords]
        return RingElem(self, self._to_order(alg))

    def __eq__(self, other):
        if not isinstance(other, EndoRing):
            return False
        return (
            self.kind == other.kind
            and self.q == other.q
            and self.order_matrix == other.order_matrix
            and self.frobenius.coords == other.frobenius.coords
            and getattr(self, "trace", None) == getattr(other, "trace", None)
            and getattr(self, "quat_a", None) == getattr(other, "quat_a", None)
            and getattr(self, "quat_b", None) == getattr(other, "quat_b", None)
        )

    def __hash__(self):
        return hash((self.kind, self.q, getattr(self, "trace", None)))

    def __repr__(self):
        if self.kind == "integer":
            return f"ZZ(q={self.q})"
        if self.kind == "quadratic":
            return f"ZZ[F|F^2={self.trace}F-{self.q}]"
        return f"QuatOrder(({self.quat_a},{self.quat_b})/QQ, q={self.q})"


class RingElem:
    """Element of an EndoRing: exact coordinates over the order basis."""

    __slots__ = ("ring", "coords")

    def __init__(self, ring: EndoRing, coords):
        self.ring = ring
        coords = tuple(Fraction(c) for c in coords)
        if len(coords) != ring.dim:
            raise DomainError("coordinate length does not match ring rank")
        self.coords = coords

    def __eq__(self, other):
        return (
            isinstance(other, RingElem)
            and self.ring == other.ring
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __add__(self, other):
        return RingElem(self.ring, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return RingElem(self.ring, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return RingElem(self.ring, [-a for a in self.coords])

    def scale(self, c) -> "RingElem":
        c = Fraction(c)
        return RingElem(self.ring, [c * a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        r = self.ring
        out = [Fraction(0)] * r.dim
        for i, xi in enumerate(self.coords):
            if xi == 0:
                continue
            for j, yj in enumerate(other.coords):
                if yj == 0:
                    continue
                c = xi * yj
                t = r._table[i][j]
                for s, ts in enumerate(t):
                    out[s] += c * ts
        return RingElem(r, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inv(self) -> "RingElem":
        r = self.ring
        if self.is_zero():
            raise DomainError("inverse of zero")
        alg = r._to_alg(list(self.coords))
        if r.kind == "integer":
            inv_alg = [1 / alg[0]]
        elif r.kind == "quadratic":
            cf = CenterField(r.trace, r.q)
            inv = cf.inv((alg[0], alg[1]))
            inv_alg = list(inv)
        else:
            a, b = r.quat_a, r.quat_b
            x0, x1, x2, x3 = alg
            nrd = x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3
            if nrd == 0:
                raise DomainError(
                    "element has zero reduced norm; the algebra is not division "
                    "at this point"
                )
            inv_alg = [x0 / nrd, -x1 / nrd, -x2 / nrd, -x3 / nrd]
        return RingElem(r, r._to_order(inv_alg))

    def is_central(self) -> bool:
        for i in range(self.ring.dim):
            b = RingElem(self.ring, [Fraction(t == i) for t in range(self.ring.dim)])
            if self * b != b * self:
                return False
        return True

    def denominator(self) -> int:
        from .intmat import lcm_list

        return lcm_list([c.denominator for c in self.coords])

    def __repr__(self):
        return f"RingElem{self.coords}"


def regular_representation(x: RingElem):
    """Left-multiplication matrix of x on the order's Q-basis.

    Column j holds the coordinates of x * b_j, so the map is a ring
    homomorphism into rational matrices acting on coordinate columns.
    """
    r = x.ring
    cols = []
    for j in range(r.dim):
        b = RingElem(r, [Fraction(t == j) for t in range(r.dim)])
        cols.append((x * b).coords)
    return [[cols[j][i] for j in range(r.dim)] for i in range(r.dim)]


# -- minimal polynomials via Krylov iteration ---------------------------------


class _Rref:
    """Incremental reduced row echelon form over a field-protocol object."""

    def __init__(self, field):
        self.field = field
        self.rows = []  # (pivot index, reduced vector, combo over inputs)

    def reduce(self, vec, combo):
        f = self.field
        vec = list(vec)
        combo = list(combo)
        for piv, rvec, rcombo in self.rows:
            c = vec[piv]
            if not f.eq(c, f.zero):
                for i in range(len(vec)):
                    vec[i] = f.sub(vec[i], f.mul(c, rvec[i]))
                for i in range(len(rcombo)):
                    combo[i] = f.sub(combo[i], f.mul(c, rcombo[i]))
        return vec, combo

    def insert(self, vec, combo) -> bool:
        """Reduce and insert; returns False when vec was dependent (combo then
        expresses the dependence)."""
        f = self.field
        vec, combo = self.reduce(vec, combo)
        piv = next(
            (i for i, x in enumerate(vec) if not f.eq(x, f.zero)),
            None,
        )
        if piv is None:
            self.last_combo = combo
            return False
        inv = f.inv(vec[piv])
        vec = [f.mul(inv, x) for x in vec]
        combo = [f.mul(inv, x) for x in combo]
        self.rows.append((piv, vec, combo))
        return True


def _mat_rows_mul(rows_a, rows_b, ring):
    n = len(rows_a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ring.zero()
            for k in range(n):
                acc = acc + rows_a[i][k] * rows_b[k][j]
            row.append(acc)
        out.append(row)
    return out


def _idrows(ring, n):
    one, zero = ring.one(), ring.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _min_poly(rows, ring, field, vectorize):
    n = len(rows)
    rref = _Rref(field)
    power = _idrows(ring, n)
    k = 0
    max_steps = n * n * ring.dim + 2
    while k <= max_steps:
        vec = vectorize(power)
        combo = [field.one if i == k else field.zero for i in range(k + 1)]
        if not rref.insert(vec, combo):
            coeffs = rref.last_combo
            lead = coeffs[-1]
            inv = field.inv(lead)
            return [field.mul(inv, c) for c in coeffs]
        power = _mat_rows_mul(power, rows, ring)
        k += 1
    raise InternalError("Krylov iteration failed to terminate")


def min_poly_over_center(a):
    """Monic least-degree polynomial over Q(F_C) annihilating the matrix.

    Accepts an EndoMatrix (or anything exposing .rows and .ring); returns a
    low-endian list of center-field elements.
    """
    rows, ring = a.rows, a.ring
    field = ring.center

    def vectorize(power):
        out = []
        for row in power:
            for entry in row:
                out.extend(ring.decompose_center(entry))
        return out

    return _min_poly(rows, ring, field, vectorize)


def min_poly_over_rationals(a):
    """Monic minimal polynomial over Q (coefficients are Fractions)."""
    rows, ring = a.rows, a.ring

    def vectorize(power):
        out = []
        for row in power:
            for entry in row:
                out.extend(entry.coords)
        return out

    return _min_poly(rows, ring, up.QQ, vectorize)


# -- eigenvalue classes and Frobenius-power detection --------------------------


def _exact_log(value: Fraction, base: Fraction):
    """Integer k with base^k == value, or None. Requires |base| > 1."""
    value, base = Fraction(value), Fraction(base)
    if value == 0 or abs(base) <= 1:
        return None
    if value == 1:
        return 0
    cur = Fraction(1)
    k = 0
    if abs(value) > 1:
        while abs(cur) < abs(value):
            cur *= base
            k += 1
    else:
        inv = 1 / base
        while abs(cur) > abs(value):
            cur *= inv
            k -= 1
    return k if cur == value else None


class AlgebraicEigenvalue:
    """A root of a squarefree polynomial over the center field, identified by
    index against the certified interval approximations of all conjugates."""

    def __init__(self, ring: EndoRing, minpoly, root_index: int = 0):
        self.ring = ring
        self.field = ring.center
        if not minpoly:
            raise DomainError("zero polynomial")
        self.minpoly = up.p_monic(list(minpoly), self.field)
        if up.deg(self.minpoly) < 1:
            raise DomainError("eigenvalue polynomial must be non-constant")
        sqf = up.p_squarefree_part(self.minpoly, self.field)
        if not up.p_eq(sqf, self.minpoly, self.field):
            self.minpoly = sqf
        if not (0 <= root_index < up.deg(self.minpoly)):
            raise DomainError("root index out of range")
        self.root_index = root_index
        self._intervals = None

    @classmethod
    def from_rational_coeffs(cls, ring, coeffs, root_index: int = 0):
        field = ring.center
        poly = [field.from_fraction(Fraction(c)) for c in coeffs]
        return cls(ring, poly, root_index)

    def intervals(self, dps: int = 60):
        """(center, radius) approximations for all conjugates, refined until
        radii are below a quarter of the minimal root separation."""
        if self._intervals is not None:
            return self._intervals
        coeffs_high_to_low = [self.field.numeric(c) for c in reversed(self.minpoly)]
        while True:
            with mpmath.workdps(dps):
                roots, err = mpmath.polyroots(
                    coeffs_high_to_low, maxsteps=200, error=True
                )
                roots = sorted(
                    roots, key=lambda z: (mpmath.re(z), mpmath.im(z))
                )
                sep = None
                for i in range(len(roots)):
                    for j in range(i + 1, len(roots)):
                        d = abs(roots[i] - roots[j])
                        sep = d if sep is None else min(sep, d)
                radius = err if err > 0 else mpmath.mpf(2) ** (-dps)
                if sep is None or radius < sep / 4:
                    self._intervals = [(complex(z), float(radius)) for z in roots]
                    return self._intervals
            dps *= 2
            if dps > 2000:
                raise InternalError("interval refinement did not converge")

    def approx(self) -> complex:
        return self.intervals()[self.root_index][0]

    def __repr__(self):
        return f"AlgebraicEigenvalue(poly={self.minpoly}, idx={self.root_index})"


def is_frobenius_power(lam: AlgebraicEigenvalue, q: int, m_bound: int = 24):
    """Minimal (m, k), m >= 1, with lam^m = F_C^k exactly, else None.

    Detection is exact: reduce x^m modulo the eigenvalue polynomial; when a
    candidate gcd splits the polynomial, the chosen root is attributed via
    the certified intervals. For a torus ring F_C = q, so the test reads
    lam^m = q^k.
    """
    field = lam.field
    ring = lam.ring
    if field.eq(lam.minpoly[0], field.zero):
        raise DomainError("eigenvalue 0 is not allowed")
    fc = ring.frobenius_cf()
    nf = field.norm(fc)
    if abs(nf) <= 1:
        raise Unsupported("Frobenius norm must exceed 1 for dependence search")
    poly = list(lam.minpoly)
    x = up.p_x(field)
    for m in range(1, m_bound + 1):
        xm = up.p_pow_mod(x, m, poly, field)
        if up.deg(xm) <= 0:
            c = xm[0] if xm else field.zero
            nc = field.norm(c)
            k = _exact_log(nc, nf)
            if k is not None and field.eq(c, field.pow(fc, k)):
                return (m, k)
            continue
        # the polynomial may mix dependent and independent conjugates
        for k in _k_window(lam, m, fc):
            target = [field.neg(field.pow(fc, k))] + [field.zero] * (m - 1) + [
                field.one
            ]
            d = up.p_gcd(poly, target, field)
            if up.deg(d) >= 1 and up.deg(d) < up.deg(poly):
                if _root_belongs(lam, d):
                    return (m, k)
    return None


def _k_window(lam, m, fc):
    """Candidate k values for lambda^m = F_C^k, steered by the certified root
    magnitudes (a true dependence forces k = m log|lambda| / log|F_C| up to
    the interval error, so one unit of slack on each side is enough).

    Falls back to an exhaustive window when |F_C| is too close to 1 for the
    logarithm to steer."""
    field = lam.field
    base = abs(complex(field.numeric(fc)))
    deg = up.deg(lam.minpoly)
    if base <= 1.01:
        bound = m * (deg + 4)
        return range(-bound, bound + 1)
    mags = [abs(z) for z, _ in lam.intervals()]
    out = set()
    for mag in mags:
        mag = max(mag, 1e-12)
        center = m * math.log(mag) / math.log(base)
        for delta in (-1, 0, 1):
            out.add(round(center) + delta)
    return sorted(out)


def _root_belongs(lam: AlgebraicEigenvalue, factor) -> bool:
    """Whether the indexed root of lam.minpoly is a root of the given factor,
    decided by matching numeric roots against the certified intervals."""
    field = lam.field
    ivals = lam.intervals()
    center, radius = ivals[lam.root_index]
    with mpmath.workdps(80):
        coeffs = [field.numeric(c) for c in reversed(factor)]
        froots = mpmath.polyroots(coeffs, maxsteps=200)
    seps = [abs(complex(z) - center) for z in froots]
    return bool(seps) and min(seps) < 100 * max(radius, 1e-40)


def as_center_poly(coeffs, field: CenterField):
    """Coerce a coefficient list (ints, Fractions or CF tuples) into CF form."""
    out = []
    for c in coeffs:
        if isinstance(c, tuple):
            out.append(c)
        else:
            out.append(field.from_fraction(Fraction(c)))
    return up.trim(out, field)


def eigenvalue_classes(poly, ring: EndoRing, m_bound: int = 24):
    """Split the squarefree part of a center-field polynomial into factors
    whose roots share a minimal Frobenius dependence (m, k), plus one
    residual factor of multiplicatively independent roots (tagged None).

    Returns a list of (factor, dependence) pairs; factors are monic and
    pairwise coprime. Roots of unity appear as dependences with k = 0.
    """
    field = ring.center
    fc = ring.frobenius_cf()
    nf = field.norm(fc)
    if abs(nf) <= 1:
        raise Unsupported("Frobenius norm must exceed 1 for dependence search")
    h = up.p_squarefree_part(as_center_poly(poly, field), field)
    if field.eq(h[0], field.zero):
        raise PreconditionViolated("polynomial has root 0 (map not dominant)")
    probe = AlgebraicEigenvalue(ring, h) if up.deg(h) >= 1 else None
    classes = []
    for m in range(1, m_bound + 1):
        if up.deg(h) < 1:
            break
        for k in _k_window(probe, m, fc):
            if up.deg(h) < 1:
                break
            target = [field.neg(field.pow(fc, k))] + [field.zero] * (m - 1) + [
                field.one
            ]
            d = up.p_gcd(h, target, field)
            if up.deg(d) >= 1:
                classes.append((d, (m, k)))
                h = up.p_divmod(h, d, field)[0]
                if up.deg(h) >= 1:
                    probe = AlgebraicEigenvalue(ring, h)
    if up.deg(h) >= 1:
        classes.append((up.p_monic(h, field), None))
    return classes


def is_nfp_poly(poly, ring: EndoRing, m_bound: int = 24) -> bool:
    """No root of the polynomial is multiplicatively dependent with F_C."""
    classes = eigenvalue_classes(poly, ring, m_bound)
    return all(dep is None for _, dep in classes)
