"""Exact rational arithmetic, normalized projective points and Weil heights.

Heights use the natural logarithm.  The multiplicative height ``H`` is kept
as an exact integer so that comparisons never depend on float rounding;
``h = log(H)`` is derived from it.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import gmpy2

from .errors import AllZero, NotARoot

LN2 = math.log(2.0)

# gmpy2 wins over builtin ints well before this size; below it the
# conversion overhead dominates.
_BIG = 2048


def log_int(n):
    """Natural log of a positive integer of any size.

    Uses the bit length plus the leading 64 bits, so the relative error
    stays below 1e-12 regardless of magnitude.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("log_int needs a positive integer")
    b = n.bit_length()
    if b <= 64:
        return math.log(n)
    shift = b - 64
    return math.log(n >> shift) + shift * LN2


def int_content(values):
    """gcd of the absolute values (0 for an all-zero list)."""
    g = 0
    for v in values:
        if v:
            if abs(v).bit_length() > _BIG or (g and g.bit_length() > _BIG):
                g = int(gmpy2.gcd(g, v))
            else:
                g = math.gcd(g, int(v))
            if g == 1:
                return 1
    return g


def divexact(a, g):
    if g == 1:
        return int(a)
    if abs(a).bit_length() > _BIG:
        return int(gmpy2.divexact(gmpy2.mpz(a), g))
    return int(a) // g


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, type(gmpy2.mpz(0)))):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, type(gmpy2.mpq(0))):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^n with coprime integer coordinates, first nonzero > 0.

    Build with :func:`normalize_point` (or :meth:`of`) from arbitrary
    rational coordinates; direct construction validates the invariants.
    """

    coords: tuple

    def __post_init__(self):
        c = tuple(int(v) for v in self.coords)
        object.__setattr__(self, "coords", c)
        if len(c) < 2:
            raise ValueError("a projective point needs at least two coordinates")
        lead = next((v for v in c if v), 0)
        if lead <= 0:
            raise ValueError(f"not normalized (sign or all-zero): {c}")
        if int_content(c) != 1:
            raise ValueError(f"not normalized (content > 1): {c}")

    @classmethod
    def _trusted(cls, coords):
        obj = object.__new__(cls)
        object.__setattr__(obj, "coords", tuple(coords))
        return obj

    @classmethod
    def of(cls, *coords):
        return normalize_point(coords)

    @property
    def n(self):
        return len(self.coords) - 1

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def max_bits(self):
        return max(abs(v).bit_length() for v in self.coords)

    def __str__(self):
        return "[" + ", ".join(str(v) for v in self.coords) + "]"


@dataclass(frozen=True)
class HeightValue:
    h: float
    H: int

    def __float__(self):
        return self.h


def normalize_point(raw):
    """Canonical integer representative of the projective class of ``raw``.

    ``raw`` may hold ints, Fractions, gmpy2 numbers or decimal strings.
    """
    raw = list(raw)
    if len(raw) < 2:
        raise ValueError("need n+1 >= 2 coordinates")
    if all(isinstance(v, int) or type(v).__name__ == "mpz" for v in raw):
        ints = raw
    else:
        fr = [_as_fraction(v) for v in raw]
        den = 1
        for q in fr:
            den = den * q.denominator // math.gcd(den, q.denominator)
        ints = [q.numerator * (den // q.denominator) for q in fr]
    g = int_content(ints)
    if g == 0:
        raise AllZero("every coordinate is zero")
    lead = next(v for v in ints if v)
    if lead < 0:
        g = -g
    return ProjPoint._trusted(divexact(v, g) if g != 1 else int(v) for v in ints)


def point_height(P):
    H = max(abs(v) for v in P.coords)
    return HeightValue(log_int(H), H)


def rat_height(q):
    """h(p/q) = log max(|p|, q) for a reduced fraction."""
    q = _as_fraction(q)
    H = max(abs(q.numerator), q.denominator)
    return HeightValue(log_int(H), H)


def _monic_value(coeffs, x):
    v = Fraction(1)
    for a in coeffs:
        v = v * x + a
    return v


def _check_root(coeffs, root):
    coeffs = [_as_fraction(a) for a in coeffs]
    root = _as_fraction(root)
    if _monic_value(coeffs, root) != 0:
        raise NotARoot(f"{root} is not a root of the monic polynomial with coefficients {coeffs}")
    return coeffs, root


def root_coeff_gap(coeffs, root):
    """Slack in the root/coefficient height bound for a monic polynomial.

    For ``X^d + A_1 X^(d-1) + ... + A_d`` with rational root ``root``, returns
    ``h([1, A_1, ..., A_d]) + d*log 2 - h(root)``, which is never negative.
    """
    coeffs, root = _check_root(coeffs, root)
    d = len(coeffs)
    hc = point_height(normalize_point([Fraction(1)] + coeffs)).h
    return hc + d * LN2 - rat_height(root).h


def root_coeff_bound_holds(coeffs, root):
    """Exact form of the same bound: H(root) <= 2^d * H([1, A_1, ..., A_d])."""
    coeffs, root = _check_root(coeffs, root)
    Hc = point_height(normalize_point([Fraction(1)] + coeffs)).H
    return rat_height(root).H <= (Hc << len(coeffs))
