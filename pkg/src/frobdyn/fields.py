"""Exact arithmetic for F_q = F_{p^e}, multivariate polynomials over F_q,
and rational functions in t1..td.

Field elements are coordinate tuples over F_p with respect to a fixed monic
irreducible defining polynomial; `g` denotes the residue class of the
generator variable. Polynomials are exponent-tuple -> coefficient maps in
canonical form (no zero coefficients); the monomial order is graded
lexicographic with t1 > t2 > ... > td. Rational functions are kept reduced
with a monic denominator, so equality is structural.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

from .errors import DomainError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# -- univariate helpers over F_p used to build the defining polynomial -------


def _up_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _up_mulmod(a, b, mod, p):
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                res[i + j] = (res[i + j] + x * y) % p
    # reduce by monic mod
    dm = len(mod) - 1
    while len(res) > dm:
        lead = res[-1]
        if lead:
            off = len(res) - 1 - dm
            for k in range(dm + 1):
                res[off + k] = (res[off + k] - lead * mod[k]) % p
        res.pop()
    return _up_trim(res)


def _up_powmod(a, n, mod, p):
    result = [1]
    base = list(a)
    while n:
        if n & 1:
            result = _up_mulmod(result, base, mod, p)
        base = _up_mulmod(base, base, mod, p)
        n >>= 1
    return result


def _up_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic on the fly
        inv = pow(b[-1], p - 2, p)
        bm = [(c * inv) % p for c in b]
        r = list(a)
        while len(r) >= len(bm) and r:
            lead = r[-1]
            if lead:
                off = len(r) - len(bm)
                for k in range(len(bm)):
                    r[off + k] = (r[off + k] - lead * bm[k]) % p
            r.pop()
            _up_trim(r)
        a, b = b, _up_trim(r)
    return a


def _is_irreducible(poly, p):
    """Rabin test: x^{p^e} == x mod f, and x^{p^{e/r}} - x coprime to f."""
    e = len(poly) - 1
    x = [0, 1]
    xe = _up_powmod(x, p**e, poly, p)
    if _up_trim([(a - b) % p for a, b in zip_pad(xe, x, p)]):
        return False
    for r in factorize(e):
        xr = _up_powmod(x, p ** (e // r), poly, p)
        diff = _up_trim([(a - b) % p for a, b in zip_pad(xr, x, p)])
        if not diff:
            return False
        if len(_up_gcd(poly, diff, p)) > 1:
            return False
    return True


def zip_pad(a, b, p):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]


@lru_cache(maxsize=None)
def default_modulus(p: int, e: int) -> tuple[int, ...]:
    """First monic irreducible of degree e over F_p in lexicographic order."""
    if e == 1:
        return (0, 1)
    # iterate over the low coefficients, low-endian
    for code in range(p**e):
        coeffs = []
        c = code
        for _ in range(e):
            coeffs.append(c % p)
            c //= p
        poly = coeffs + [1]
        if poly[0] == 0:
            continue
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise DomainError(f"no irreducible polynomial of degree {e} over F_{p}")


class Fq:
    """The finite field F_{p^e} with a fixed defining polynomial.

    Elements are coordinate tuples of length e over F_p.
    """

    def __init__(self, p: int, e: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise DomainError(f"p must be prime, got {p}")
        if e < 1:
            raise DomainError("extension degree must be >= 1")
        self.p = p
        self.e = e
        self.q = p**e
        if modulus is None:
            modulus = default_modulus(p, e)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise DomainError("defining polynomial must be monic of degree e")
        if e > 1 and not _is_irreducible(list(modulus), p):
            raise DomainError("defining polynomial is not irreducible")
        self.modulus = modulus
        self.zero = (0,) * e
        self.one = (1,) + (0,) * (e - 1)
        self._gen_cache = None
        self._dlog_table = None

    def __eq__(self, other):
        return (
            isinstance(other, Fq)
            and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        return f"Fq({self.p}^{self.e})"

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.e - 1)

    def g(self):
        """The residue class of the generator variable (only for e > 1)."""
        if self.e == 1:
            raise DomainError("g is only defined for proper extensions (e > 1)")
        return (0, 1) + (0,) * (self.e - 2)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        res = [0] * (2 * self.e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    res[i + j] = (res[i + j] + x * y) % self.p
        for k in range(2 * self.e - 2, self.e - 1, -1):
            lead = res[k]
            if lead:
                off = k - self.e
                for t in range(self.e):
                    res[off + t] = (res[off + t] - lead * self.modulus[t]) % self.p
            res[k] = 0
        return tuple(res[: self.e])

    def inv(self, a):
        if a == self.zero:
            raise DomainError("division by zero in F_q")
        return self.pow(a, self.q - 2)

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = self.one
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def elements(self):
        for code in range(self.q):
            coords = []
            c = code
            for _ in range(self.e):
                coords.append(c % self.p)
                c //= self.p
            yield tuple(coords)

    def order(self, a) -> int:
        """Multiplicative order of a nonzero element."""
        if a == self.zero:
            raise DomainError("zero has no multiplicative order")
        n = self.q - 1
        for prime in factorize(n):
            while n % prime == 0 and self.pow(a, n // prime) == self.one:
                n //= prime
        return n

    def generator(self):
        """Canonical primitive element: first element (in enumeration order)
        of maximal multiplicative order."""
        if self._gen_cache is None:
            for a in self.elements():
                if a != self.zero and self.order(a) == self.q - 1:
                    self._gen_cache = a
                    break
        return self._gen_cache

    def dlog(self, a) -> int:
        """Discrete log of a nonzero element w.r.t. the canonical generator.

        Baby-step giant-step; the table is cached for the field instance.
        """
        if a == self.zero:
            raise DomainError("dlog of zero")
        n = self.q - 1
        m = isqrt(n) + 1
        if self._dlog_table is None:
            gen = self.generator()
            table = {}
            cur = self.one
            for j in range(m):
                table.setdefault(cur, j)
                cur = self.mul(cur, gen)
            self._dlog_table = (table, self.inv(cur) if n else self.one)
        table, giant = self._dlog_table
        cur = a
        for i in range(m + 1):
            if cur in table:
                return (i * m + table[cur]) % n
            cur = self.mul(cur, giant)
        raise DomainError("dlog failed (element outside the group?)")

    def coeff_str(self, a) -> str:
        if all(x == 0 for x in a[1:]):
            return str(a[0])
        parts = []
        for i, x in enumerate(a):
            if x == 0:
                continue
            if i == 0:
                parts.append(str(x))
            else:
                head = "" if x == 1 else f"{x}*"
                parts.append(f"{head}g" + (f"^{i}" if i > 1 else ""))
        return "(" + " + ".join(parts) + ")"


# -- multivariate polynomials -------------------------------------------------


def _grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Multivariate polynomial over a fixed F_q, canonical sparse form."""

    __slots__ = ("fq", "nvars", "terms")

    def __init__(self, fq: Fq, nvars: int, terms=None):
        self.fq = fq
        self.nvars = nvars
        self.terms = {}
        if terms:
            for exps, c in terms.items():
                if c != fq.zero:
                    self.terms[tuple(exps)] = c

    @classmethod
    def const(cls, fq, nvars, c):
        return cls(fq, nvars, {(0,) * nvars: c})

    @classmethod
    def from_int(cls, fq, nvars, n):
        return cls.const(fq, nvars, fq.from_int(n))

    @classmethod
    def var(cls, fq, nvars, i):
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(fq, nvars, {exps: fq.one})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, self.fq.zero)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def variables(self):
        used = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(i)
        return used

    def leading(self):
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.fq == other.fq
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.fq, frozenset(self.terms.items())))

    def __add__(self, other):
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = self.fq.add(out.get(exps, self.fq.zero), c)
            if s == self.fq.zero:
                out.pop(exps, None)
            else:
                out[exps] = s
        return Poly(self.fq, self.nvars, out)

    def __neg__(self):
        return Poly(
            self.fq, self.nvars, {e: self.fq.neg(c) for e, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = self.fq.mul(c1, c2)
                s = self.fq.add(out.get(e, self.fq.zero), prod)
                if s == self.fq.zero:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Poly(self.fq, self.nvars, out)

    def scale(self, c):
        return Poly(
            self.fq, self.nvars, {e: self.fq.mul(c, x) for e, x in self.terms.items()}
        )

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative power of a polynomial")
        result = Poly.const(self.fq, self.nvars, self.fq.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other):
        """Division with remainder by a single divisor under grlex."""
        if other.is_zero():
            raise DomainError("polynomial division by zero")
        fq = self.fq
        q = Poly(fq, self.nvars)
        r = Poly(fq, self.nvars)
        cur = self
        le, lc = other.leading()
        lc_inv = fq.inv(lc)
        while not cur.is_zero():
            ce, cc = cur.leading()
            if all(a >= b for a, b in zip(ce, le)):
                me = tuple(a - b for a, b in zip(ce, le))
                mc = fq.mul(cc, lc_inv)
                mono = Poly(fq, self.nvars, {me: mc})
                q = q + mono
                cur = cur - mono * other
            else:
                mono = Poly(fq, self.nvars, {ce: cc})
                r = r + mono
                cur = cur - mono
        return q, r

    def divides(self, other) -> bool:
        _, r = other.divmod(self)
        return r.is_zero()

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise DomainError("inexact polynomial division")
        return q

    # -- gcd via primitive pseudo-remainder sequences -------------------------

    def _coeffs_in(self, v):
        """View as univariate in variable v: {deg: coefficient Poly}."""
        out: dict[int, Poly] = {}
        for exps, c in self.terms.items():
            d = exps[v]
            rest = exps[:v] + (0,) + exps[v + 1 :]
            coef = out.setdefault(d, Poly(self.fq, self.nvars))
            out[d] = coef + Poly(self.fq, self.nvars, {rest: c})
        return {d: c for d, c in out.items() if not c.is_zero()}

    @staticmethod
    def _from_coeffs(fq, nvars, v, coeffs):
        out = Poly(fq, nvars)
        for d, c in coeffs.items():
            mono = Poly(
                fq, nvars, {tuple(d if i == v else 0 for i in range(nvars)): fq.one}
            )
            out = out + mono * c
        return out

    def content_in(self, v):
        coeffs = self._coeffs_in(v)
        cont = Poly(self.fq, self.nvars)
        for c in coeffs.values():
            cont = poly_gcd(cont, c)
        return cont

    def normalized(self):
        """Scaled so the grlex leading coefficient is 1."""
        if self.is_zero():
            return self
        _, lc = self.leading()
        return self.scale(self.fq.inv(lc))

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for exps in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exps]
            factors = []
            cs = self.fq.coeff_str(c)
            for i, e in enumerate(exps):
                if e:
                    factors.append(f"t{i+1}" + (f"^{e}" if e > 1 else ""))
            if not factors:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        return " + ".join(parts)

    __repr__ = __str__


def _prem(a: Poly, b: Poly, v: int):
    """Pseudo-remainder of a by b in the variable v (coefficients stay polynomial)."""
    fq = a.fq
    nvars = a.nvars
    ca = a._coeffs_in(v)
    cb = b._coeffs_in(v)
    db = max(cb)
    lb = cb[db]
    cur = dict(ca)
    while cur and max(cur) >= db:
        da = max(cur)
        la = cur[da]
        # cur = lb*cur - la * x^(da-db) * b
        new: dict[int, Poly] = {}
        for d, c in cur.items():
            new[d] = c * lb
        for d, c in cb.items():
            t = new.get(d + da - db, Poly(fq, nvars)) - la * c
            new[d + da - db] = t
        cur = {d: c for d, c in new.items() if not c.is_zero()}
    return Poly._from_coeffs(fq, nvars, v, cur)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """GCD over F_q[t1..td], normalized to leading coefficient 1."""
    if f.is_zero():
        return g.normalized()
    if g.is_zero():
        return f.normalized()
    used = f.variables() | g.variables()
    if not used:
        return Poly.const(f.fq, f.nvars, f.fq.one)
    v = min(used)
    cf = f.content_in(v)
    cg = g.content_in(v)
    c = poly_gcd(cf, cg)
    pf = f.exact_div(cf)
    pg = g.exact_div(cg)
    a, b = pf, pg
    while not b.is_zero():
        r = _prem(a, b, v)
        if r.is_zero():
            a, b = b, r
        else:
            cont = r.content_in(v)
            a, b = b, r.exact_div(cont)
    return (c * a).normalized()


class RationalFunction:
    """Quotient of multivariate polynomials, reduced, denominator monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.const(num.fq, num.nvars, num.fq.one)
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        if num.is_zero():
            den = Poly.const(num.fq, num.nvars, num.fq.one)
        else:
            g = poly_gcd(num, den)
            if g.total_degree() > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            _, lc = den.leading()
            inv = num.fq.inv(lc)
            num = num.scale(inv)
            den = den.scale(inv)
        self.num = num
        self.den = den

    @property
    def fq(self):
        return self.num.fq

    @property
    def nvars(self):
        return self.num.nvars

    @classmethod
    def one(cls, fq, nvars):
        return cls(Poly.from_int(fq, nvars, 1))

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self):
        if not self.is_constant():
            raise DomainError("not a constant")
        return self.fq.mul(
            self.num.constant_value(), self.fq.inv(self.den.constant_value())
        )

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction)
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def __mul__(self, other):
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.is_zero():
            raise DomainError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __add__(self, other):
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other):
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __pow__(self, n: int):
        if n >= 0:
            return RationalFunction(self.num**n, self.den**n)
        if self.is_zero():
            raise DomainError("negative power of zero")
        return RationalFunction(self.den ** (-n), self.num ** (-n))

    def __str__(self):
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


# -- literal parser -----------------------------------------------------------

_TOKEN_OPS = set("+-*/^()")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.idx = 0

    def _scan(self):
        i, text = 0, self.text
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in _TOKEN_OPS:
                self.tokens.append(("op", ch, i))
                i += 1
            elif ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], i))
                i = j
            elif ch == "g":
                self.tokens.append(("gen", "g", i))
                i += 1
            elif ch == "t":
                j = i + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                if j == i + 1:
                    raise DomainError(f"column {i+1}: variable needs an index, like t1")
                self.tokens.append(("var", text[i:j], i))
                i = j
            else:
                raise DomainError(f"column {i+1}: unexpected character {ch!r}")

    def peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise DomainError("unexpected end of expression")
        self.idx += 1
        return tok


def parse_rational_function(text: str, fq: Fq, nvars: int) -> RationalFunction:
    """Parse a literal like `(t1^2 + g*t1 + 2)/(t1 - 1)` over F_q.

    Operators + - * / ^ with usual precedence; `g` is the extension
    generator; variables are t1..td. Raises DomainError with a column
    diagnostic on malformed input.
    """
    toks = _Tokens(text)

    def parse_expr():
        node = parse_term()
        while True:
            tok = toks.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                toks.take()
                rhs = parse_term()
                node = node + rhs if tok[1] == "+" else node - rhs
            else:
                return node

    def parse_term():
        node = parse_factor()
        while True:
            tok = toks.peek()
            if tok and tok[0] == "op" and tok[1] in "*/":
                toks.take()
                rhs = parse_factor()
                if tok[1] == "*":
                    node = node * rhs
                else:
                    if rhs.is_zero():
                        raise DomainError(f"column {tok[2]+1}: division by zero")
                    node = node / rhs
            else:
                return node

    def parse_factor():
        tok = toks.peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            toks.take()
            return -parse_factor()
        node = parse_base()
        tok = toks.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            toks.take()
            sign = 1
            etok = toks.take()
            if etok[0] == "op" and etok[1] == "-":
                sign = -1
                etok = toks.take()
            if etok[0] != "int":
                raise DomainError(f"column {etok[2]+1}: exponent must be an integer")
            node = node ** (sign * int(etok[1]))
        return node

    def parse_base():
        tok = toks.take()
        kind, val, pos = tok
        if kind == "op" and val == "(":
            node = parse_expr()
            close = toks.take()
            if close[:2] != ("op", ")"):
                raise DomainError(f"column {close[2]+1}: expected ')'")
            return node
        if kind == "int":
            return RationalFunction(Poly.from_int(fq, nvars, int(val)))
        if kind == "gen":
            return RationalFunction(Poly.const(fq, nvars, fq.g()))
        if kind == "var":
            i = int(val[1:]) - 1
            if not (0 <= i < nvars):
                raise DomainError(f"column {pos+1}: variable {val} out of range (d={nvars})")
            return RationalFunction(Poly.var(fq, nvars, i))
        raise DomainError(f"column {pos+1}: unexpected token {val!r}")

    node = parse_expr()
    if toks.peek() is not None:
        tok = toks.peek()
        raise DomainError(f"column {tok[2]+1}: trailing input {tok[1]!r}")
    return node
