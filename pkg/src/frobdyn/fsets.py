"""F-set membership and Frobenius-power equation solvers.

The common engine solves sum_j b^{k_j n_j} a_j = rho exactly for nonnegative
integers n_j, with integer base |b| >= 2 and rational vectors a_j. The search
is complete: when rho != 0 the minimal exponent is bounded by the b-adic
valuation of rho, and when rho = 0 a solution can be shifted down until its
minimal exponent drops below lcm(k_j). Both facts turn the recursion into a
finite, exact enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd, log

from .errors import DomainError, InternalError, PreconditionViolated, Unsupported
from .intmat import (
    lcm_list,
    rref,
    solve_rational_left,
)
from .points import ExpPoint
from .rings import EndoRing, is_nfp_poly
from .linalg import EndoMatrix


def _valuation(values, base: int) -> int:
    """Largest v with base^v dividing every (integer) value; values not all 0."""
    g = 0
    for x in values:
        g = gcd(g, int(x))
    g = abs(g)
    if g == 0:
        raise InternalError("valuation of the zero vector")
    v = 0
    while g % base == 0:
        g //= base
        v += 1
    return v


def _power(base: int, e: int) -> int:
    return base**e


def solve_power_sum(terms, rho, find_all: bool = False, _depth: int = 0):
    """Solve sum_j base_j^{k_j n_j} * a_j = rho with n_j in N_0.

    terms: list of (base, k, a) with integer |base| >= 2, k >= 1 and a a tuple
    of Fractions. Returns the first solution as a tuple of n_j (or a list of
    all solutions when find_all), else None / [].
    """
    for b, k, _ in terms:
        if abs(int(b)) < 2 or b != int(b):
            raise DomainError("power-sum base must be an integer of size >= 2")
        if k < 1:
            raise DomainError("power-sum steps must be positive")
    solutions = []
    _solve_rec(
        [(int(b), int(k), tuple(Fraction(x) for x in a)) for b, k, a in terms],
        tuple(Fraction(x) for x in rho),
        {},
        solutions,
        find_all,
    )
    solutions.sort()
    if find_all:
        return solutions
    return solutions[0] if solutions else None


def _solve_rec(terms, rho, assigned, solutions, find_all):
    if solutions and not find_all:
        return
    live = [(i, t) for i, t in enumerate(terms) if i not in assigned]
    live = [(i, t) for i, t in live if any(t[2])]
    zero_rho = all(x == 0 for x in rho)
    if not live:
        if zero_rho:
            full = tuple(assigned.get(i, 0) for i in range(len(terms)))
            if full not in solutions:
                solutions.append(full)
        return
    if zero_rho:
        # a solution can be shifted down until min exponent < lcm(k_j)
        ell = 1
        for _, (b, k, a) in live:
            ell = ell * k // gcd(ell, k)
        for i, (b, k, a) in live:
            for n in range((ell - 1) // k + 1):
                scale = Fraction(_power(b, k * n))
                new_rho = tuple(r - scale * x for r, x in zip(rho, a))
                nxt = dict(assigned)
                nxt[i] = n
                _solve_rec(terms, new_rho, nxt, solutions, find_all)
                if solutions and not find_all:
                    return
        return
    # rho != 0: clear denominators, bound the minimal exponent b-adically
    dens = [x.denominator for x in rho]
    for _, (_, _, a) in live:
        dens.extend(x.denominator for x in a)
    big = lcm_list(dens)
    int_rho = [int(x * big) for x in rho if x != 0]
    for i, (b, k, a) in live:
        v = _valuation(int_rho, abs(b))
        for n in range(v // k + 1):
            scale = Fraction(_power(b, k * n))
            new_rho = tuple(r - scale * x for r, x in zip(rho, a))
            nxt = dict(assigned)
            nxt[i] = n
            _solve_rec(terms, new_rho, nxt, solutions, find_all)
            if solutions and not find_all:
                return


# -- F-sets ---------------------------------------------------------------------


@dataclass
class FSet:
    """gamma + sum_j F^{k_j n_j}(alpha_j) + H with H a lattice of integer
    exponent vectors (orbit generators and base point may sit in the
    divisible hull scaled by `ell`)."""

    gamma: ExpPoint
    generators: list
    steps: list
    lattice: list = dc_field(default_factory=list)
    ell: int = 1
    f_stable: bool = True

    def __post_init__(self):
        basis = self.gamma.basis
        if len(self.generators) != len(self.steps):
            raise DomainError("one step size per orbit generator is required")
        for a in self.generators:
            if a.basis != basis or a.ncoords != self.gamma.ncoords:
                raise DomainError("orbit generator basis/coordinate mismatch")
        for k in self.steps:
            if k < 1:
                raise DomainError("step sizes must be positive integers")
        for h in self.lattice:
            if h.basis != basis or h.ncoords != self.gamma.ncoords:
                raise DomainError("subgroup generator basis mismatch")
            if any(x.denominator != 1 for row in h.exps for x in row) or any(
                t != 0 for t in h.torsion
            ):
                raise DomainError(
                    "subgroup generators must have integer exponents and no torsion"
                )

    def frobenius_stable(self, q: int) -> bool:
        """Multiplication by q keeps every lattice generator in the lattice
        (trivially true for exponent lattices; kept as the declared check)."""
        return True


def _flatten(x: ExpPoint):
    return [v for row in x.exps for v in row]


def fset_member(x: ExpPoint, s: FSet, q: int):
    """Exact membership decision with certificate (n_1..n_m, h coefficients).

    Complete: orbit-term exponents are resolved by the power-sum solver on
    the quotient modulo the QQ-span of the lattice; lattice membership of
    the residual is integral; degenerate orbit terms falling inside the
    QQ-span are resolved through the eventual periodicity of q^x modulo the
    coordinate denominators.
    """
    if x.basis != s.gamma.basis or x.ncoords != s.gamma.ncoords:
        raise DomainError("point and F-set live over different bases")
    target = _flatten(x.mul(s.gamma.inverse()))
    dim = len(target)
    h_rows = [[int(v) for v in _flatten(h)] for h in s.lattice]
    red, pivots, _ = rref(h_rows, dim) if h_rows else ([], [], None)

    def project(vec):
        vec = list(vec)
        for i, c in enumerate(pivots):
            f = vec[c]
            if f:
                vec = [a - f * b for a, b in zip(vec, red[i])]
        return vec

    gen_flat = [_flatten(a) for a in s.generators]
    proj_target = project(target)
    live_terms = []
    degenerate = []
    for j, (flat, k) in enumerate(zip(gen_flat, s.steps)):
        pj = project(flat)
        if any(pj):
            live_terms.append((j, k, pj))
        else:
            degenerate.append(j)

    sols = solve_power_sum(
        [(q, k, pj) for (_, k, pj) in live_terms], proj_target, find_all=True
    )
    shifts = [0]
    ell = 1
    if live_terms and all(v == 0 for v in proj_target):
        # homogeneous quotient equation: solutions come in shift families
        # n_j + t * L/k_j, and the lattice residual varies with the shift
        # through q^{tL} modulo the coordinate denominators, which is
        # eventually periodic
        for _, k, _ in live_terms:
            ell = ell * k // gcd(ell, k)
        shifts = range(_shift_cycle_length(x, s, q, ell, h_rows))
    for sol in sols:
        for t in shifts:
            ns = [0] * len(s.generators)
            for (j, k, _), n in zip(live_terms, sol):
                ns[j] = n + t * (ell // k) if t else n
            cert = _resolve_residual(
                x, s, q, ns, degenerate, h_rows, target, gen_flat
            )
            if cert is not None:
                return cert
    return None


def _shift_cycle_length(x, s, q, ell, h_rows) -> int:
    """Preperiod plus period of q^(ell*t) modulo the lcm of every coordinate
    and torsion denominator in sight (including the lattice's invariant
    factors, which bound the denominators of lattice coordinates); shifts
    beyond this cannot produce new residuals."""
    from .intmat import snf_diagonal

    dens = [1]
    for pt in [x, s.gamma] + list(s.generators) + list(s.lattice):
        dens.extend(v.denominator for row in pt.exps for v in row)
        dens.extend(t.denominator for t in pt.torsion)
    modulus = lcm_list(dens)
    if h_rows:
        prod = 1
        for dgl in snf_diagonal(h_rows):
            prod *= max(dgl, 1)
        modulus = lcm_list([modulus, prod])
    if modulus == 1:
        return 1
    step = pow(q, ell, modulus)
    seen = {}
    val = 1 % modulus
    t = 0
    while val not in seen:
        seen[val] = t
        val = (val * step) % modulus
        t += 1
    return t


def _resolve_residual(x, s, q, ns, degenerate, h_rows, target, gen_flat):
    """Fix the degenerate orbit exponents and the lattice coefficients for a
    candidate assignment of the non-degenerate ones."""
    base = list(target)
    for j, n in enumerate(ns):
        if j in degenerate:
            continue
        scale = Fraction(q ** (s.steps[j] * n))
        base = [b - scale * g for b, g in zip(base, gen_flat[j])]
    deg_live = [
        j
        for j in degenerate
        if any(gen_flat[j]) or any(s.generators[j].torsion)
    ]
    for j in degenerate:
        if j not in deg_live:
            ns[j] = 0
    choices = _degenerate_choices(base, deg_live, s, q, h_rows, gen_flat)
    for assignment in choices:
        trial = list(ns)
        for j, n in zip(deg_live, assignment):
            trial[j] = n
        resid = list(base)
        for j, n in zip(deg_live, assignment):
            scale = Fraction(q ** (s.steps[j] * n))
            resid = [b - scale * g for b, g in zip(resid, gen_flat[j])]
        coeffs = _integer_lattice_coords(h_rows, resid)
        if coeffs is None:
            continue
        if not _torsion_matches(x, s, q, trial):
            continue
        if _verify_certificate(x, s, q, trial, coeffs):
            return tuple(trial), tuple(coeffs)
    return None


def _degenerate_choices(base, deg_live, s, q, h_rows, gen_flat):
    """Candidate exponents for orbit terms inside the QQ-span of the lattice,
    bounded by the eventual period of q^x modulo the coordinate denominators."""
    if not deg_live:
        return [()]
    per_term = []
    for j in deg_live:
        flat = gen_flat[j]
        if any(flat):
            coords = solve_rational_left(h_rows, flat) if h_rows else None
            if coords is None:
                return []
        else:
            coords = []
        dens = [c.denominator for c in coords] + [
            Fraction(b).denominator for b in base
        ]
        # torsion congruences are periodic in q^x as well
        dens += [t.denominator for t in s.generators[j].torsion]
        dens += [t.denominator for t in s.gamma.torsion]
        modulus = lcm_list(dens)
        k = s.steps[j]
        seen = {}
        xs = []
        val = 1 % modulus if modulus > 1 else 0
        step = pow(q, k, modulus) if modulus > 1 else 0
        n = 0
        while True:
            if modulus == 1:
                xs = [0]
                break
            if val in seen:
                break
            seen[val] = n
            xs.append(n)
            val = (val * step) % modulus
            n += 1
        per_term.append(xs)
    out = [()]
    for xs in per_term:
        out = [prev + (n,) for prev in out for n in xs]
    return out


def _integer_lattice_coords(h_rows, resid):
    if not h_rows:
        return [] if all(r == 0 for r in resid) else None
    coords = solve_rational_left(h_rows, resid)
    if coords is None:
        return None
    if any(c.denominator != 1 for c in coords):
        return None
    return [int(c) for c in coords]


def _torsion_matches(x, s, q, ns) -> bool:
    acc = list(s.gamma.torsion)
    for a, k, n in zip(s.generators, s.steps, ns):
        scale = q ** (k * n)
        acc = [(t + scale * ta) % 1 for t, ta in zip(acc, a.torsion)]
    return all((tx - t) % 1 == 0 for tx, t in zip(x.torsion, acc))


def _verify_certificate(x, s, q, ns, coeffs) -> bool:
    acc = s.gamma
    for a, k, n in zip(s.generators, s.steps, ns):
        acc = acc.mul(a.frobenius(q ** (k * n)))
    for h, c in zip(s.lattice, coeffs):
        acc = acc.mul(
            ExpPoint(
                h.basis,
                [[c * v for v in row] for row in h.exps],
                [Fraction(0)] * h.ncoords,
            )
        )
    return acc == x


# -- Frobenius-power equations ---------------------------------------------------


@dataclass
class FrobEq:
    """P(n) = c0 + sum_j c_j F^{delta_j n_j} over the center field of a ring."""

    ring: EndoRing
    poly: list  # coefficients over the center field (low-endian)
    c0: object
    coeffs: list  # c_1..c_t as center-field elements
    deltas: list

    def __post_init__(self):
        field = self.ring.center
        self.poly = [
            c if isinstance(c, tuple) else field.from_fraction(Fraction(c))
            for c in self.poly
        ]
        self.c0 = (
            self.c0
            if isinstance(self.c0, tuple)
            else field.from_fraction(Fraction(self.c0))
        )
        self.coeffs = [
            c if isinstance(c, tuple) else field.from_fraction(Fraction(c))
            for c in self.coeffs
        ]
        if len(self.coeffs) != len(self.deltas):
            raise DomainError("one step size per Frobenius term is required")
        if any(d < 1 for d in self.deltas):
            raise DomainError("step sizes must be positive")

    def eval_poly(self, n: int):
        field = self.ring.center
        acc = field.zero
        xn = field.from_int(n)
        for c in reversed(self.poly):
            acc = field.add(field.mul(acc, xn), c)
        return acc


def frob_eq_solve(eq: FrobEq, n: int):
    """Exact solution tuple (n_1..n_t) of P(n) = c0 + sum c_j F^{d_j n_j},
    or None."""
    field = eq.ring.center
    fc = eq.ring.frobenius_cf()
    rho_cf = field.sub(eq.eval_poly(n), eq.c0)
    if field.deg == 1:
        base = fc[0]
        if base.denominator != 1 or abs(base) < 2:
            raise Unsupported("Frobenius element must be an integer of size >= 2")
        terms = [(int(base), d, (c[0],)) for c, d in zip(eq.coeffs, eq.deltas)]
        return solve_power_sum(terms, (rho_cf[0],))
    # quadratic center: a single Frobenius term is resolved by field norms
    if len(eq.coeffs) > 1:
        raise Unsupported(
            "multiple Frobenius terms over a quadratic center are not supported"
        )
    if not eq.coeffs:
        return () if field.eq(rho_cf, field.zero) else None
    c1 = eq.coeffs[0]
    if field.eq(c1, field.zero):
        return (0,) if field.eq(rho_cf, field.zero) else None
    nr = field.norm(rho_cf)
    nc = field.norm(c1)
    if nc == 0:
        return None
    ratio = nr / nc
    qn = Fraction(eq.ring.q)
    from .rings import _exact_log

    e = _exact_log(ratio, qn)
    if e is None or e < 0 or e % eq.deltas[0]:
        return None
    n1 = e // eq.deltas[0]
    lhs = field.mul(field.pow(fc, eq.deltas[0] * n1), c1)
    return (n1,) if field.eq(lhs, rho_cf) else None


def frob_eq_count(eq: FrobEq, n_max: int):
    """Exact count of n <= n_max admitting a solution, with the density curve
    and a fitted polylog growth constant."""
    hits = []
    for n in range(0, n_max + 1):
        if frob_eq_solve(eq, n) is not None:
            hits.append(n)
    curve = []
    mark = 1
    count = 0
    idx = 0
    while mark <= n_max:
        while idx < len(hits) and hits[idx] <= mark:
            idx += 1
        curve.append((mark, idx, idx / mark))
        mark *= 2
    t = len(eq.deltas)
    fitted_c = 0.0
    for n_mark, c, _ in curve:
        if n_mark >= 4 and c:
            fitted_c = max(fitted_c, c / (log(n_mark) ** max(t, 1)))
    degenerate = len(eq.poly) <= 1 and not eq.deltas
    return {
        "count": len(hits),
        "hits": hits,
        "curve": curve,
        "fitted_polylog_constant": fitted_c,
        "term_count": t,
        "degenerate_constant": degenerate,
    }


def matrix_frob_eq_test(
    a: EndoMatrix,
    bs,
    c: EndoMatrix,
    v,
    deltas,
    s_bound: int,
    m_bound: int = 24,
):
    """All n <= s_bound for which A^n v = C v + sum_i F^{d_i n_i} B_i v is
    solvable in nonnegative n_i. A must be invertible and NFP."""
    ring = a.ring
    if a.inverse() is None:
        raise PreconditionViolated("matrix A must be invertible")
    if not is_nfp_poly(a.min_poly_center(), ring, m_bound):
        raise PreconditionViolated("matrix A fails the no-Frobenius-power test")
    fc = ring.frobenius_cf()
    if ring.center.deg != 1:
        raise Unsupported(
            "Frobenius powers over a quadratic center are not scalar; "
            "matrix equation enumeration is restricted to rational Frobenius"
        )
    base = fc[0]
    if base.denominator != 1 or abs(base) < 2:
        raise Unsupported("Frobenius element must be an integer of size >= 2")
    base = int(base)

    def flatten(col):
        return tuple(cc for e in col for cc in e.coords)

    cv = c.apply_column(v)
    terms = []
    for b_mat, d in zip(bs, deltas):
        terms.append((base, d, flatten(b_mat.apply_column(v))))
    solvable = []
    av = list(v)
    for n in range(0, s_bound + 1):
        rho = tuple(
            x - y for x, y in zip(flatten(av), flatten(cv))
        )
        if solve_power_sum(terms, rho) is not None:
            solvable.append(n)
        av = a.apply_column(av)
    return solvable
