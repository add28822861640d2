"""Exponent-lattice representation of multiplicative-group points.

A point of G_m^N whose coordinates live in the divisible hull of a finitely
generated group is stored per coordinate as a rational exponent vector over a
pairwise-coprime polynomial basis plus a torsion coordinate in Q/Z (reduced
to [0,1), denominator prime to p). The torsion coordinate tau encodes the
root of unity gen^(tau * (q^e' - 1)) in a suitable extension; arithmetic never
needs to materialize it.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import DomainError, InternalError, NotInSpan, Unsupported
from .fields import Fq, Poly, RationalFunction
from .intmat import left_kernel, lcm_list


class CoprimeBasis:
    """Pairwise-coprime non-unit polynomials plus the constant-group modulus."""

    def __init__(self, fq: Fq, nvars: int, polys):
        self.fq = fq
        self.nvars = nvars
        self.polys = tuple(polys)
        self.torsion_modulus = fq.q - 1
        for f in self.polys:
            if f.total_degree() < 1:
                raise DomainError("coprime basis entries must be non-units")

    def __len__(self):
        return len(self.polys)

    def __eq__(self, other):
        return (
            isinstance(other, CoprimeBasis)
            and self.fq == other.fq
            and self.polys == other.polys
        )

    def __hash__(self):
        return hash((self.fq, self.polys))

    def __repr__(self):
        return "CoprimeBasis[" + ", ".join(str(f) for f in self.polys) + "]"


def coprime_basis(elems) -> CoprimeBasis:
    """Gcd-refine the numerators and denominators of the inputs into a
    pairwise-coprime basis generating all of them (up to constants).

    Full irreducible factorization is never computed.
    """
    from .fields import poly_gcd

    if not elems:
        raise DomainError("empty input to coprime_basis")
    fq = elems[0].fq
    nvars = elems[0].nvars
    pool = []
    for x in elems:
        if x.is_zero():
            raise DomainError("zero element has no exponent representation")
        for poly in (x.num, x.den):
            f = poly.normalized()
            if f.total_degree() >= 1:
                pool.append(f)
    # refinement loop: replace any non-coprime pair {a, b} by {g, a/g, b/g}
    changed = True
    while changed:
        changed = False
        out = []
        while pool:
            a = pool.pop()
            absorbed = False
            for i, b in enumerate(out):
                g = poly_gcd(a, b)
                if g.total_degree() >= 1:
                    out.pop(i)
                    for piece in (g, a.exact_div(g), b.exact_div(g)):
                        if piece.total_degree() >= 1:
                            pool.append(piece.normalized())
                    absorbed = True
                    changed = True
                    break
            if not absorbed:
                if a not in out:
                    out.append(a)
        pool = out
    pool.sort(key=lambda f: (f.total_degree(), str(f)))
    return CoprimeBasis(fq, nvars, pool)


def to_exponents(x: RationalFunction, basis: CoprimeBasis):
    """Integer exponents of x over the basis plus the constant part's
    discrete log (w.r.t. the canonical generator of F_q^*).

    Raises NotInSpan (carrying the residual) if x is not generated by the
    basis together with the constants.
    """
    if x.is_zero():
        raise DomainError("zero element has no exponent representation")
    exps = []
    num, den = x.num, x.den
    for f in basis.polys:
        e = 0
        while True:
            q, r = num.divmod(f)
            if r.is_zero():
                num, e = q, e + 1
            else:
                break
        while True:
            q, r = den.divmod(f)
            if r.is_zero():
                den, e = q, e - 1
            else:
                break
        exps.append(e)
    if not num.is_constant() or not den.is_constant():
        residual = RationalFunction(num, den)
        raise NotInSpan(f"element {x} not generated by {basis}", residual=residual)
    c = basis.fq.mul(num.constant_value(), basis.fq.inv(den.constant_value()))
    return exps, basis.fq.dlog(c)


def reconstruct(exps, dlog: int, basis: CoprimeBasis) -> RationalFunction:
    """Inverse of to_exponents on integer exponent vectors."""
    fq = basis.fq
    out = RationalFunction(Poly.const(fq, basis.nvars, fq.pow(fq.generator(), dlog)))
    for f, e in zip(basis.polys, exps):
        if e:
            out = out * RationalFunction(f) ** e
    return out


def mult_dependence(elems):
    """A nonzero integer vector v with prod elems_i^{v_i} = 1 exactly
    (torsion included), or None if the elements are multiplicatively
    independent.

    Kernel of the exponent matrix over Z, then torsion resolution by
    discrete logs in the cyclic constant group.
    """
    basis = coprime_basis(elems)
    rows = []
    dlogs = []
    for x in elems:
        e, d = to_exponents(x, basis)
        rows.append(e)
        dlogs.append(d)
    kernel = left_kernel(rows, len(basis))
    if not kernel:
        return None
    modulus = basis.torsion_modulus
    # resolve torsion inside the kernel lattice: find w with w . (K d) = 0 mod M
    vals = [sum(k[i] * dlogs[i] for i in range(len(elems))) % modulus for k in kernel]
    aug = [[v] for v in vals] + [[modulus]]
    combos = left_kernel(aug, 1)
    candidates = []
    for combo in combos:
        w = combo[: len(kernel)]
        v = [sum(w[j] * kernel[j][i] for j in range(len(kernel))) for i in range(len(elems))]
        if any(v):
            candidates.append(v)
    if not candidates:
        raise InternalError("torsion resolution produced no nonzero relation")
    v = min(candidates, key=lambda vv: (max(map(abs, vv)), sum(map(abs, vv)), vv))
    if any(x < 0 for x in v) and all(x <= 0 for x in v):
        v = [-x for x in v]
    check = RationalFunction.one(basis.fq, basis.nvars)
    for x, e in zip(elems, v):
        check = check * x**e
    if not check.is_one():
        raise InternalError("dependence candidate failed exact verification")
    return v


def span_intersection_trivial(group_a, group_b) -> bool:
    """Whether the multiplicative spans of two element families meet only in
    torsion. Decided on exponent lattices over a common refined basis."""
    basis = coprime_basis(list(group_a) + list(group_b))
    rows_a = [to_exponents(x, basis)[0] for x in group_a]
    rows_b = [to_exponents(x, basis)[0] for x in group_b]
    stacked = rows_a + [[-x for x in row] for row in rows_b]
    for vec in left_kernel(stacked, len(basis)):
        a = vec[: len(rows_a)]
        common = [
            sum(a[i] * rows_a[i][j] for i in range(len(rows_a)))
            for j in range(len(basis))
        ]
        if any(common):
            return False
    return True


def _check_torsion(tau: Fraction, p: int) -> Fraction:
    tau = tau % 1
    if tau.denominator % p == 0:
        raise Unsupported(
            f"torsion denominator {tau.denominator} divisible by p={p} "
            "(inseparable directions are out of scope)"
        )
    return tau


def _scale_torsion(tau: Fraction, c: Fraction, p: int) -> Fraction:
    """tau * c on the prime-to-p part of Q/Z: the prime-to-p denominator part
    divides the [0,1) lift exactly; p-power parts act through the inverse of
    p modulo the torsion denominator."""
    den = c.denominator
    v = 0
    while den % p == 0:
        den //= p
        v += 1
    out = (tau * Fraction(c.numerator, den)) % 1
    if v and out:
        r = out.denominator
        inv = pow(p % r, -v, r) if r > 1 else 0
        out = Fraction((out.numerator * inv) % r, r)
    return out


class ExpPoint:
    """Point of G_m^N over a CoprimeBasis: per coordinate a rational exponent
    vector plus a torsion coordinate in Q/Z with denominator prime to p."""

    __slots__ = ("basis", "exps", "torsion")

    def __init__(self, basis: CoprimeBasis, exps, torsion):
        self.basis = basis
        self.exps = tuple(tuple(Fraction(x) for x in row) for row in exps)
        p = basis.fq.p
        self.torsion = tuple(_check_torsion(Fraction(t), p) for t in torsion)
        for row in self.exps:
            if len(row) != len(basis):
                raise DomainError("exponent vector length does not match basis")

    @property
    def ncoords(self):
        return len(self.exps)

    @classmethod
    def identity(cls, basis: CoprimeBasis, ncoords: int):
        zero = [Fraction(0)] * len(basis)
        return cls(basis, [list(zero) for _ in range(ncoords)], [Fraction(0)] * ncoords)

    @classmethod
    def from_rational_functions(cls, funcs, basis: CoprimeBasis):
        exps = []
        torsion = []
        modulus = basis.torsion_modulus
        for f in funcs:
            e, d = to_exponents(f, basis)
            exps.append([Fraction(x) for x in e])
            torsion.append(Fraction(d, modulus) if modulus else Fraction(0))
        return cls(basis, exps, torsion)

    def __eq__(self, other):
        return (
            isinstance(other, ExpPoint)
            and self.basis == other.basis
            and self.exps == other.exps
            and self.torsion == other.torsion
        )

    def __hash__(self):
        return hash((self.basis, self.exps, self.torsion))

    def is_identity(self):
        return all(all(x == 0 for x in row) for row in self.exps) and all(
            t == 0 for t in self.torsion
        )

    def mul(self, other: "ExpPoint") -> "ExpPoint":
        if self.basis != other.basis:
            raise DomainError("basis mismatch in point multiplication")
        exps = [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.exps, other.exps)
        ]
        torsion = [(a + b) % 1 for a, b in zip(self.torsion, other.torsion)]
        return ExpPoint(self.basis, exps, torsion)

    def inverse(self) -> "ExpPoint":
        return ExpPoint(
            self.basis,
            [[-x for x in row] for row in self.exps],
            [(-t) % 1 for t in self.torsion],
        )

    def coordinate_pow(self, powers) -> "ExpPoint":
        """Raise coordinate i to the (rational) power powers[i]."""
        exps = [[x * Fraction(c) for x in row] for row, c in zip(self.exps, powers)]
        torsion = [(t * Fraction(c)) % 1 for t, c in zip(self.torsion, powers)]
        return ExpPoint(self.basis, exps, torsion)

    def apply_matrix(self, rows) -> "ExpPoint":
        """Image under the monomial action: coordinate i of the result is
        prod_j x_j^{rows[i][j]}.

        Entries may be Fractions. On the torsion coordinates, division by the
        prime-to-p part of a denominator picks the representative given by
        exact division of the [0,1) lift, while division by p-powers is
        canonical: multiplication by p is an automorphism of the prime-to-p
        part of Q/Z, so its inverse acts as multiplication by p^-1 modulo the
        torsion denominator."""
        n = self.ncoords
        p = self.basis.fq.p
        out_exps = []
        out_tors = []
        for row in rows:
            if len(row) != n:
                raise DomainError("matrix width does not match point coordinates")
            acc = [Fraction(0)] * len(self.basis)
            tac = Fraction(0)
            for c, erow, t in zip(row, self.exps, self.torsion):
                c = Fraction(c)
                if c:
                    acc = [a + c * x for a, x in zip(acc, erow)]
                    if t:
                        tac += _scale_torsion(t, c, p)
            out_exps.append(acc)
            out_tors.append(tac % 1)
        return ExpPoint(self.basis, out_exps, out_tors)

    def frobenius(self, q: int) -> "ExpPoint":
        """The q-power Frobenius: every exponent and torsion coordinate
        multiplied by q."""
        return ExpPoint(
            self.basis,
            [[q * x for x in row] for row in self.exps],
            [(q * t) % 1 for t in self.torsion],
        )

    def slice(self, start: int, stop: int) -> "ExpPoint":
        return ExpPoint(
            self.basis, self.exps[start:stop], self.torsion[start:stop]
        )

    def concat(self, other: "ExpPoint") -> "ExpPoint":
        if self.basis != other.basis:
            raise DomainError("basis mismatch in concat")
        return ExpPoint(
            self.basis, self.exps + other.exps, self.torsion + other.torsion
        )

    def coordinate_value(self, i: int) -> RationalFunction:
        """Reconstruct coordinate i as a rational function (integer exponents
        and resolvable torsion only)."""
        row = self.exps[i]
        if any(x.denominator != 1 for x in row):
            raise Unsupported("coordinate has non-integral exponents")
        t = self.torsion[i]
        modulus = self.basis.torsion_modulus
        d = t * modulus
        if d.denominator != 1:
            raise Unsupported("torsion coordinate lies outside F_q^*")
        return reconstruct([int(x) for x in row], int(d) % modulus if modulus else 0, self.basis)

    def character_value(self, v) -> tuple:
        """Exponent-level value of the character x -> prod x_i^{v_i}:
        (exponent vector, torsion)."""
        acc = [Fraction(0)] * len(self.basis)
        tac = Fraction(0)
        for c, row, t in zip(v, self.exps, self.torsion):
            if c:
                acc = [a + c * x for a, x in zip(acc, row)]
                tac += c * t
        return tuple(acc), tac % 1

    def denominator(self) -> int:
        dens = [x.denominator for row in self.exps for x in row]
        dens += [t.denominator for t in self.torsion]
        return lcm_list(dens)

    def __repr__(self):
        return f"ExpPoint({self.exps}, torsion={self.torsion})"


def frobenius_apply(x: ExpPoint, q: int) -> ExpPoint:
    return x.frobenius(q)


def rebase(x: ExpPoint, big: CoprimeBasis) -> ExpPoint:
    """Re-express a point over a refined coprime basis (every old basis
    element must be generated by the new one)."""
    if x.basis == big:
        return x
    rows = []
    for old in x.basis.polys:
        e, dl = to_exponents(RationalFunction(old), big)
        rows.append((e, dl))
    modulus = big.torsion_modulus
    exps = []
    tors = []
    for row, tau in zip(x.exps, x.torsion):
        acc = [Fraction(0)] * len(big)
        tacc = Fraction(tau)
        for c, (e, dl) in zip(row, rows):
            if c:
                acc = [a + c * ee for a, ee in zip(acc, e)]
                if modulus:
                    tacc += c * Fraction(dl, modulus)
        exps.append(acc)
        tors.append(tacc % 1)
    return ExpPoint(big, exps, tors)


def merge_bases(*bases: CoprimeBasis) -> CoprimeBasis:
    """Common refinement of several coprime bases over the same field."""
    polys = [RationalFunction(f) for b in bases for f in b.polys]
    if not polys:
        return bases[0]
    return coprime_basis(polys)


def solve_torsion(m_rows, tau, p: int):
    """Solve M z = tau in (Q/Z)^n restricted to prime-to-p denominators.

    M is a square invertible rational matrix whose entry denominators are
    prime to p. Clearing M to an integer matrix M0 with det p^v * u and
    setting z = adj(M0) * w reduces the system to the diagonal congruence
    (det/m') w = tau, which is solved componentwise; the p-power is
    inverted modulo the torsion denominator, which multiplication by p
    permits on the prime-to-p part of Q/Z.
    """
    from .intmat import det_rational, frac_rows, invert_rational

    n = len(m_rows)
    m = frac_rows(m_rows)
    m_den = lcm_list([x.denominator for row in m for x in row])
    if m_den % p == 0:
        raise Unsupported("matrix denominator divisible by p")
    m0 = [[int(x * m_den) for x in row] for row in m]
    det0 = int(det_rational(m0))
    if det0 == 0:
        raise DomainError("singular system in torsion solve")
    v = 0
    u = det0
    while u % p == 0:
        u //= p
        v += 1
    sgn = 1 if u > 0 else -1
    taus = [Fraction(t) % 1 for t in tau]
    r = lcm_list([t.denominator for t in taus])
    if r % p == 0:
        raise Unsupported("target torsion has p-divisible denominator")
    inv = invert_rational(m0)
    adj = [[int(x * det0) for x in row] for row in inv]
    pinv = pow(p % r, -1, r) if (v and r > 1) else 1
    w = []
    for t in taus:
        c = int(t * r)
        b = (sgn * c * pow(pinv, v, r)) % r if r > 1 else 0
        w.append(Fraction(m_den * b, r * abs(u)))
    z = []
    for i in range(n):
        acc = Fraction(0)
        for j in range(n):
            acc += adj[i][j] * w[j]
        z.append(acc % 1)
    for i in range(n):
        acc = Fraction(0)
        for j in range(n):
            acc += m[i][j] * z[j]
        if (acc - taus[i]) % 1 != 0:
            raise InternalError("torsion solve verification failed")
        if z[i].denominator % p == 0:
            raise InternalError("torsion solve produced p-divisible denominator")
    return z
