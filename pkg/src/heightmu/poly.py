"""Homogeneous polynomials over Z and rational self-maps of P^n.

Monomials are exponent tuples ``(e_0, ..., e_n)``.  Terms are kept in graded
lexicographic order with X0 > X1 > ... > Xn; for a homogeneous polynomial
this is plain descending lex order on the exponent tuples.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
import math
import re

import gmpy2

from .errors import (
    DegreeMismatch,
    DimensionMismatch,
    InhomogeneousError,
    MapSyntaxError,
)
from .rational import HeightValue, int_content, log_int, normalize_point


def monomials(n, d):
    """All exponent tuples of total degree d in n+1 variables, grlex-descending."""
    out = []
    for combo in combinations_with_replacement(range(n + 1), d):
        e = [0] * (n + 1)
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def monomial_count(n, d):
    return math.comb(n + d, n)


@dataclass(frozen=True)
class HomogPoly:
    """Homogeneous polynomial of degree ``d`` in X0..Xn with integer coefficients.

    ``terms`` is a tuple of ``(exponents, coefficient)`` pairs, grlex-descending,
    with no zero coefficients.  The zero polynomial has ``terms == ()`` but
    still carries a nominal degree.
    """

    n: int
    d: int
    terms: tuple = ()

    def __post_init__(self):
        for e, c in self.terms:
            if len(e) != self.n + 1:
                raise DimensionMismatch(f"monomial {e} has wrong number of variables for n={self.n}")
            if sum(e) != self.d:
                raise InhomogeneousError(f"monomial {e} has degree {sum(e)}, expected {self.d}")
            if c == 0:
                raise ValueError("zero coefficients are not stored")

    @classmethod
    def from_dict(cls, n, d, coeffs):
        terms = sorted(((tuple(e), int(c)) for e, c in coeffs.items() if c), reverse=True)
        return cls(n, d, tuple(terms))

    @classmethod
    def constant(cls, n, c):
        return cls.from_dict(n, 0, {(0,) * (n + 1): c})

    @classmethod
    def variable(cls, n, i):
        e = [0] * (n + 1)
        e[i] = 1
        return cls(n, 1, ((tuple(e), 1),))

    @cached_property
    def coeffs(self):
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if other.n != self.n:
            raise DimensionMismatch(f"n={self.n} vs n={other.n}")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        if self.terms and other.terms and other.d != self.d:
            raise DegreeMismatch(f"cannot add degree {self.d} and degree {other.d}")
        d = self.d if self.terms else other.d
        acc = dict(self.coeffs)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return HomogPoly.from_dict(self.n, d, acc)

    __radd__ = __add__

    def __neg__(self):
        return HomogPoly(self.n, self.d, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return HomogPoly(self.n, self.d)
            return HomogPoly(self.n, self.d, tuple((e, c * other) for e, c in self.terms))
        self._check(other)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return HomogPoly.from_dict(self.n, self.d + other.d, acc)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = HomogPoly.constant(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, j):
        acc = {}
        for e, c in self.terms:
            if e[j]:
                f = list(e)
                f[j] -= 1
                acc[tuple(f)] = c * e[j]
        return HomogPoly.from_dict(self.n, max(self.d - 1, 0), acc)

    def content(self):
        return int_content(c for _, c in self.terms)

    def max_coeff(self):
        return max((abs(c) for _, c in self.terms), default=0)

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point, mod=None):
        """Value at an integer vector; reduced mod ``mod`` when given."""
        if len(point) != self.n + 1:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.n + 1}")
        if mod is None:
            xs = [gmpy2.mpz(v) for v in point]
            pows = [_powers(x, self.d) for x in xs]
            total = gmpy2.mpz(0)
            for e, c in self.terms:
                t = gmpy2.mpz(c)
                for j, k in enumerate(e):
                    if k:
                        t *= pows[j][k]
                total += t
            return int(total)
        xs = [v % mod for v in point]
        pows = [_powers_mod(x, self.d, mod) for x in xs]
        total = 0
        for e, c in self.terms:
            t = c % mod
            for j, k in enumerate(e):
                if k:
                    t = t * pows[j][k] % mod
            total += t
        return total % mod

    def substitute(self, polys):
        """Replace Xj by ``polys[j]`` (all of one common degree)."""
        if len(polys) != self.n + 1:
            raise DimensionMismatch("need one polynomial per variable")
        m = polys[0].n
        dsub = polys[0].d
        pows = [[HomogPoly.constant(m, 1)] for _ in polys]
        for j, q in enumerate(polys):
            for _ in range(self.d):
                pows[j].append(pows[j][-1] * q)
        acc = {}
        for e, c in self.terms:
            t = HomogPoly.constant(m, c)
            for j, k in enumerate(e):
                if k:
                    t = t * pows[j][k]
            for f, v in t.terms:
                acc[f] = acc.get(f, 0) + v
        return HomogPoly.from_dict(m, self.d * dsub, acc)

    def reduce_mod(self, p):
        return HomogPoly.from_dict(self.n, self.d, {e: c % p for e, c in self.terms})

    def __str__(self):
        return render_poly(self)


def _powers(x, d):
    out = [gmpy2.mpz(1)]
    for _ in range(d):
        out.append(out[-1] * x)
    return out


def _powers_mod(x, d, p):
    out = [1]
    for _ in range(d):
        out.append(out[-1] * x % p)
    return out


@dataclass(frozen=True)
class RationalMap:
    """A degree-d rational self-map [phi_0, ..., phi_n] of P^n.

    The representative is canonical: the coefficients of all coordinates
    together have content 1 and the first nonzero one (coordinate order,
    then grlex) is positive.  Construction normalizes automatically.
    """

    coords: tuple

    def __post_init__(self):
        polys = tuple(self.coords)
        if not polys:
            raise ValueError("a map needs at least one coordinate")
        n = len(polys) - 1
        if n < 1:
            raise DimensionMismatch("maps of P^0 are not supported")
        nonzero = [q for q in polys if q.terms]
        if not nonzero:
            raise ValueError("all coordinate polynomials vanish identically")
        d = nonzero[0].d
        for q in polys:
            if q.n != n:
                raise DimensionMismatch(f"coordinate in n={q.n} variables for a map of P^{n}")
            if q.terms and q.d != d:
                raise DegreeMismatch(f"coordinate degrees {q.d} and {d} differ")
        g = int_content(c for q in polys for _, c in q.terms)
        lead = next(q.terms[0][1] for q in polys if q.terms)
        if lead < 0:
            g = -g
        polys = tuple(
            HomogPoly(n, d, tuple((e, c // g) for e, c in q.terms)) for q in polys
        )
        object.__setattr__(self, "coords", polys)

    @property
    def n(self):
        return len(self.coords) - 1

    @property
    def d(self):
        return next(q.d for q in self.coords if q.terms)

    @property
    def N(self):
        """Number of degree-d monomials in n+1 variables."""
        return monomial_count(self.n, self.d)

    def coefficient_point(self):
        """The coefficient vector A_phi in P^((n+1)N - 1), grlex per coordinate."""
        mons = monomials(self.n, self.d)
        return tuple(q.coeffs.get(m, 0) for q in self.coords for m in mons)

    def __call__(self, P):
        return evaluate_map(self, P)

    def __str__(self):
        return render_map(self)


def evaluate_map(phi, P):
    """phi(P) as a normalized point, or None when P lies in the indeterminacy locus."""
    if len(P) != phi.n + 1:
        raise DimensionMismatch(f"point in P^{len(P) - 1} for a map of P^{phi.n}")
    vals = [q.evaluate(P.coords) if q.terms else 0 for q in phi.coords]
    if not any(vals):
        return None
    return normalize_point(vals)


def map_height(phi):
    H = max(q.max_coeff() for q in phi.coords)
    return HeightValue(log_int(H), H)


def triangle_bound_holds(phi, P):
    """Exact check of H(phi P) <= N * H(phi) * H(P)^d; None if P is indeterminate."""
    img = evaluate_map(phi, P)
    if img is None:
        return None
    return max(abs(v) for v in img.coords) <= phi.N * map_height(phi).H * max(abs(v) for v in P.coords) ** phi.d


def compose_maps(phi, psi):
    """phi o psi by substitution; common factors are not removed."""
    if phi.n != psi.n:
        raise DimensionMismatch(f"P^{phi.n} vs P^{psi.n}")
    inner = list(psi.coords)
    d_inner = psi.d
    inner = [q if q.terms else HomogPoly(psi.n, d_inner) for q in inner]
    return RationalMap(tuple(q.substitute(inner) if q.terms else HomogPoly(phi.n, phi.d * d_inner)
                             for q in phi.coords))


def identity_map(n):
    return RationalMap(tuple(HomogPoly.variable(n, i) for i in range(n + 1)))


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>[Xx]\d+)|(?P<op>[+\-*^;]))")


def _tokenize(text):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise MapSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, value=None):
        t = self.take()
        if t[0] != kind or (value is not None and t[1] != value):
            want = value or kind
            raise MapSyntaxError(f"expected {want!r}, found {t[1] or 'end of input'!r}", self.text, t[2])
        return t

    def poly(self):
        """Sum of terms up to ';' or end.  Returns list of (coeff, {var: exp}), start pos."""
        start = self.peek()[2]
        terms = []
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        terms.append(self.term(sign))
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                terms.append(self.term(-1 if t[1] == "-" else 1))
            else:
                break
        return terms, start

    def term(self, sign):
        t = self.peek()
        coeff = 1
        exps = {}
        if t[0] == "int":
            self.take()
            coeff = int(t[1])
            if not (self.peek()[0] == "op" and self.peek()[1] == "*"):
                return sign * coeff, exps, t[2]
            self.take()
        elif t[0] != "var":
            raise MapSyntaxError(f"expected a term, found {t[1] or 'end of input'!r}", self.text, t[2])
        pos = self.peek()[2]
        self.factor(exps)
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            self.factor(exps)
        return sign * coeff, exps, pos

    def factor(self, exps):
        t = self.expect("var")
        idx = int(t[1][1:])
        e = 1
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            e = int(self.expect("int")[1])
        exps[idx] = exps.get(idx, 0) + e


def _build(terms, n, text, start):
    acc = {}
    degree = None
    for coeff, exps, pos in terms:
        if exps and max(exps) > n:
            raise DimensionMismatch(f"variable X{max(exps)} used in a map of P^{n}")
        e = tuple(exps.get(i, 0) for i in range(n + 1))
        deg = sum(e)
        if degree is None:
            degree = deg
        elif deg != degree:
            raise InhomogeneousError(
                f"term of degree {deg} in a polynomial of degree {degree} (position {pos}): {text!r}"
            )
        acc[e] = acc.get(e, 0) + coeff
    return HomogPoly.from_dict(n, degree or 0, acc)


def _max_var(terms):
    return max((max(exps) for _, exps, _ in terms if exps), default=0)


def parse_poly(text, n=None):
    """Parse one homogeneous polynomial.  ``n`` defaults to the highest variable index."""
    p = _Parser(text)
    terms, start = p.poly()
    t = p.peek()
    if t[0] != "end":
        raise MapSyntaxError(f"unexpected {t[1]!r}", text, t[2])
    if n is None:
        n = max(_max_var(terms), 1)
    return _build(terms, n, text, start)


def parse_polys(text, n):
    """';'-separated list of polynomials in X0..Xn (exclusion sets use this)."""
    if not text.strip():
        return []
    p = _Parser(text)
    raw = [p.poly()]
    while p.peek()[0] == "op" and p.peek()[1] == ";":
        p.take()
        raw.append(p.poly())
    t = p.peek()
    if t[0] != "end":
        raise MapSyntaxError(f"unexpected {t[1]!r}", text, t[2])
    return [_build(terms, n, text, start) for terms, start in raw]


def parse_map(text):
    """Parse ``"phi_0; phi_1; ...; phi_n"``.

    The dimension is the number of coordinates minus one; every variable
    index must be at most n and all coordinates must share one degree.
    """
    p = _Parser(text)
    raw = [p.poly()]
    while p.peek()[0] == "op" and p.peek()[1] == ";":
        p.take()
        raw.append(p.poly())
    t = p.peek()
    if t[0] != "end":
        raise MapSyntaxError(f"unexpected {t[1]!r}", text, t[2])
    n = len(raw) - 1
    if n < 1:
        raise DimensionMismatch("a map of P^n needs at least two coordinates")
    polys = [_build(terms, n, text, start) for terms, start in raw]
    degs = {q.d for q in polys if q.terms}
    if len(degs) > 1:
        raise DegreeMismatch(f"coordinate degrees differ: {[q.d for q in polys]}")
    return RationalMap(tuple(polys))


def _render_monomial(e):
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"X{i}")
        elif k > 1:
            parts.append(f"X{i}^{k}")
    return "*".join(parts)


def render_poly(q):
    if not q.terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(q.terms):
        mono = _render_monomial(e)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if idx == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def render_map(phi):
    return "; ".join(render_poly(q) for q in phi.coords)
