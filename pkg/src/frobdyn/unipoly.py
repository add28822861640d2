"""Univariate polynomial arithmetic over an exact field given by a small
protocol object (zero/one/add/sub/mul/inv/eq). Polynomials are low-endian
coefficient lists with no trailing zeros; [] is the zero polynomial.

Used over Q and over the quadratic center fields; also provides integer
cyclotomic polynomials for the root-of-unity sweeps.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import DomainError


class QQ:
    """The rationals as a field-protocol object (elements are Fractions)."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        if a == 0:
            raise DomainError("division by zero")
        return 1 / a

    @staticmethod
    def eq(a, b):
        return a == b

    @staticmethod
    def from_int(n):
        return Fraction(n)


def trim(f, field):
    while f and field.eq(f[-1], field.zero):
        f.pop()
    return f


def p_zero():
    return []


def p_const(c, field):
    return [] if field.eq(c, field.zero) else [c]


def p_x(field):
    return [field.zero, field.one]


def deg(f):
    return len(f) - 1


def p_eq(f, g, field):
    if len(f) != len(g):
        return False
    return all(field.eq(a, b) for a, b in zip(f, g))


def p_add(f, g, field):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero
        b = g[i] if i < len(g) else field.zero
        out.append(field.add(a, b))
    return trim(out, field)


def p_sub(f, g, field):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero
        b = g[i] if i < len(g) else field.zero
        out.append(field.sub(a, b))
    return trim(out, field)


def p_neg(f, field):
    return [field.neg(c) for c in f]


def p_mul(f, g, field):
    if not f or not g:
        return []
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if field.eq(a, field.zero):
            continue
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return trim(out, field)


def p_scale(f, c, field):
    if field.eq(c, field.zero):
        return []
    return trim([field.mul(c, a) for a in f], field)


def p_divmod(f, g, field):
    if not g:
        raise DomainError("polynomial division by zero")
    f = list(f)
    q = [field.zero] * max(0, len(f) - len(g) + 1)
    inv_lead = field.inv(g[-1])
    while len(f) >= len(g) and f:
        c = field.mul(f[-1], inv_lead)
        d = len(f) - len(g)
        q[d] = c
        for i in range(len(g)):
            f[d + i] = field.sub(f[d + i], field.mul(c, g[i]))
        f.pop()
        trim(f, field)
    return trim(q, field), f


def p_mod(f, g, field):
    return p_divmod(f, g, field)[1]


def p_monic(f, field):
    if not f:
        return f
    return p_scale(f, field.inv(f[-1]), field)


def p_gcd(f, g, field):
    a, b = list(f), list(g)
    while b:
        a, b = b, p_mod(a, b, field)
    return p_monic(a, field)


def p_xgcd(f, g, field):
    """(d, u, v) with u f + v g = d, d monic."""
    r0, r1 = list(f), list(g)
    s0, s1 = [field.one], []
    t0, t1 = [], [field.one]
    while r1:
        q, r = p_divmod(r0, r1, field)
        r0, r1 = r1, r
        s0, s1 = s1, p_sub(s0, p_mul(q, s1, field), field)
        t0, t1 = t1, p_sub(t0, p_mul(q, t1, field), field)
    if not r0:
        return [], s0, t0
    c = field.inv(r0[-1])
    return (
        p_scale(r0, c, field),
        p_scale(s0, c, field),
        p_scale(t0, c, field),
    )


def p_pow_mod(f, n: int, mod, field):
    result = [field.one]
    base = p_mod(f, mod, field)
    while n:
        if n & 1:
            result = p_mod(p_mul(result, base, field), mod, field)
        base = p_mod(p_mul(base, base, field), mod, field)
        n >>= 1
    return result


def p_derivative(f, field):
    out = []
    for i in range(1, len(f)):
        c = f[i]
        acc = field.zero
        for _ in range(i):
            acc = field.add(acc, c)
        out.append(acc)
    return trim(out, field)


def p_squarefree_part(f, field):
    if deg(f) <= 1:
        return p_monic(f, field)
    d = p_gcd(f, p_derivative(f, field), field)
    if deg(d) == 0:
        return p_monic(f, field)
    return p_monic(p_divmod(f, d, field)[0], field)


def p_evaluate(f, x, field):
    acc = field.zero
    for c in reversed(f):
        acc = field.add(field.mul(acc, x), c)
    return acc


def p_from_int_list(coeffs, field):
    return trim([field.from_int(c) for c in coeffs], field)


def root_multiplicity(f, alpha, field):
    """Multiplicity of x = alpha as a root of f."""
    m = 0
    lin = [field.neg(alpha), field.one]
    while f and deg(f) >= 1:
        q, r = p_divmod(f, lin, field)
        if r:
            break
        f = q
        m += 1
    return m


# -- integer cyclotomics -------------------------------------------------------


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    out = n
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            out -= out // d
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out -= out // m
    return out


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficient tuple of the n-th cyclotomic polynomial."""
    f = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            g = [Fraction(c) for c in cyclotomic(d)]
            f, r = p_divmod(f, g, QQ)
            assert not r
    assert all(c.denominator == 1 for c in f)
    return tuple(int(c) for c in f)
