"""Wehler K3 surfaces in P^2 x P^2 and the dynamics of their involutions.

A surface is cut out by a (1,1)-form L and a (2,2)-form Q.  Each projection
to P^2 is a double cover, so fixing x leaves two points y on the line
L(x, .) = 0 meeting the conic Q(x, .) = 0; iota_1 swaps them (iota_2 does
the same with the roles of x and y exchanged).  All point arithmetic is
exact; heights are floats derived from the exact coordinates.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
import re

import gmpy2

from .dynamics import OrbitRecord, OrbitStep, Termination
from .errors import (
    DegenerateFiber,
    DegenerateForm,
    HeightOverflow,
    LinearFormVanishes,
    NotARoot,
    NotOnSurface,
    PeriodicOrbit,
    SearchExhausted,
)
from .rational import int_content, normalize_point, point_height
from .rng import derive_rng

ALPHA = 2.0 + math.sqrt(3.0)
ALPHA_SQ = 7.0 + 4.0 * math.sqrt(3.0)

# Degree-2 monomials of P^2 in the fixed order used to index Q.
MONO2 = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
MONO2_LABELS = ("x0x0", "x0x1", "x0x2", "x1x1", "x1x2", "x2x2")

DEFAULT_MAX_BITS = 4_000_000


def _mono2(z):
    return [z[i] * z[j] for i, j in MONO2]


def _as_matrix(rows, shape):
    m = tuple(tuple(int(v) for v in r) for r in rows)
    if len(m) != shape[0] or any(len(r) != shape[1] for r in m):
        raise ValueError(f"expected a {shape[0]}x{shape[1]} integer array")
    return m


@dataclass(frozen=True)
class WehlerSurface:
    """{L = Q = 0} in P^2 x P^2.

    ``L[i][j]`` is the coefficient of x_i y_j; ``Q[a][b]`` the coefficient of
    the a-th degree-2 monomial in x times the b-th in y (order ``MONO2``).
    Each form is stored with content 1 and first nonzero entry positive.
    """

    L: tuple
    Q: tuple

    def __post_init__(self):
        object.__setattr__(self, "L", _canonical_form(_as_matrix(self.L, (3, 3)), "L"))
        object.__setattr__(self, "Q", _canonical_form(_as_matrix(self.Q, (6, 6)), "Q"))

    def eval_L(self, x, y):
        return sum(self.L[i][j] * x[i] * y[j] for i in range(3) for j in range(3))

    def eval_Q(self, x, y):
        xm, ym = _mono2(x), _mono2(y)
        return sum(self.Q[a][b] * xm[a] * ym[b] for a in range(6) for b in range(6))

    def contains(self, x, y):
        x = [gmpy2.mpz(v) for v in x]
        y = [gmpy2.mpz(v) for v in y]
        return self.eval_L(x, y) == 0 and self.eval_Q(x, y) == 0

    def fiber_forms(self, z, index):
        """Linear and quadratic forms cut on the fiber through ``z``.

        index 1: z is x and the forms are in y; index 2: z is y, forms in x.
        """
        z = [gmpy2.mpz(v) for v in z]
        zm = _mono2(z)
        if index == 1:
            lin = [sum(self.L[i][j] * z[i] for i in range(3)) for j in range(3)]
            quad = [sum(self.Q[a][b] * zm[a] for a in range(6)) for b in range(6)]
        else:
            lin = [sum(self.L[i][j] * z[j] for j in range(3)) for i in range(3)]
            quad = [sum(self.Q[a][b] * zm[b] for b in range(6)) for a in range(6)]
        return lin, quad


def _canonical_form(m, name):
    flat = [v for r in m for v in r]
    g = int_content(flat)
    if g == 0:
        raise ValueError(f"form {name} is identically zero")
    if next(v for v in flat if v) < 0:
        g = -g
    return tuple(tuple(v // g for v in r) for r in m)


@dataclass(frozen=True)
class SurfacePoint:
    x: object
    y: object

    def __str__(self):
        return f"({self.x}, {self.y})"

    def max_bits(self):
        return max(self.x.max_bits(), self.y.max_bits())


def make_point(V, x, y):
    x, y = normalize_point(x), normalize_point(y)
    if len(x) != 3 or len(y) != 3:
        raise ValueError("surface points live in P^2 x P^2")
    if not V.contains(x, y):
        raise NotOnSurface(f"({x}, {y}) is not on the surface")
    return SurfacePoint(x, y)


@dataclass(frozen=True)
class K3HeightVector:
    """Heights attached to D1 = H x P^2, D2 = P^2 x H and E+/- = eigendivisors."""

    hD1: float
    hD2: float

    @property
    def hEplus(self):
        return -self.hD1 + ALPHA * self.hD2

    @property
    def hEminus(self):
        return ALPHA * self.hD1 - self.hD2

    def hD(self, a, b):
        return a * self.hEplus + b * self.hEminus

    def as_dict(self):
        return {"hD1": self.hD1, "hD2": self.hD2, "hEplus": self.hEplus, "hEminus": self.hEminus}


def heights(P):
    return K3HeightVector(point_height(P.x).h, point_height(P.y).h)


# ---------------------------------------------------------------------------
# the sheet swap

def _normalize_pair(s, t):
    g = int_content((s, t))
    if g == 0:
        raise ValueError("(0:0) is not a point of P^1")
    if s < 0 or (s == 0 and t < 0):
        g = -g
    return (int(s // g), int(t // g))


def _clear_denominators(vals):
    fr = [v if isinstance(v, Fraction) else Fraction(int(v)) for v in vals]
    den = 1
    for q in fr:
        den = den * q.denominator // math.gcd(den, q.denominator)
    return [q.numerator * (den // q.denominator) for q in fr]


def other_root_binary_quadratic(A, B, C, root):
    """Second root of A s^2 + B s t + C t^2 given one root ``(s0, t0)``.

    Returns a normalized pair.  A double root is returned as itself, and
    applying the function to its own output recovers the input root.
    """
    if isinstance(A, int) and isinstance(B, int) and isinstance(C, int):
        A, B, C = gmpy2.mpz(A), gmpy2.mpz(B), gmpy2.mpz(C)
    elif not all(type(v).__name__ == "mpz" for v in (A, B, C)):
        A, B, C = (gmpy2.mpz(v) for v in _clear_denominators((A, B, C)))
    s0, t0 = (gmpy2.mpz(v) for v in _clear_denominators(root))
    if A == 0 and B == 0 and C == 0:
        raise DegenerateForm("the binary quadratic vanishes identically")
    if A * s0 * s0 + B * s0 * t0 + C * t0 * t0 != 0:
        raise NotARoot(f"({s0}:{t0}) is not a root of ({A}, {B}, {C})")
    if t0 == 0:
        # A = 0 here; the form is t (B s + C t).
        if B == 0:
            return (1, 0)
        return _normalize_pair(-C, B)
    if A == 0:
        return (1, 0)
    # root sum: s1/t1 = -B/A - s0/t0
    return _normalize_pair(-B * t0 - A * s0, A * t0)


def _kernel_basis(c):
    """Integer basis (u, v) of {w : c . w = 0}; pivot is the first nonzero c_j."""
    j = next(i for i in range(3) if c[i])
    k, l = [i for i in range(3) if i != j]
    u = [gmpy2.mpz(0)] * 3
    v = [gmpy2.mpz(0)] * 3
    u[k], u[j] = c[j], -c[k]
    v[l], v[j] = c[j], -c[l]
    return u, v, k, l


def _quad_at(q, w):
    wm = _mono2(w)
    return sum(qb * m for qb, m in zip(q, wm))


def swap_in_fiber(lin, quad, z):
    """Other intersection of the line lin.w = 0 with the conic quad(w) = 0."""
    if not any(lin):
        raise LinearFormVanishes("the fiber line is not determined")
    u, v, k, l = _kernel_basis(lin)
    A = _quad_at(quad, u)
    C = _quad_at(quad, v)
    B = _quad_at(quad, [a + b for a, b in zip(u, v)]) - A - C
    if A == 0 and B == 0 and C == 0:
        raise DegenerateFiber("the conic contains the fiber line")
    s1, t1 = other_root_binary_quadratic(A, B, C, (z[k], z[l]))
    return normalize_point([s1 * a + t1 * b for a, b in zip(u, v)])


def involution(V, P, index, check=True):
    """iota_1 (index 1: keep x, swap y) or iota_2 (index 2: keep y, swap x)."""
    if index == 1:
        lin, quad = V.fiber_forms(P.x.coords, 1)
        out = SurfacePoint(P.x, swap_in_fiber(lin, quad, P.y.coords))
    elif index == 2:
        lin, quad = V.fiber_forms(P.y.coords, 2)
        out = SurfacePoint(swap_in_fiber(lin, quad, P.x.coords), P.y)
    else:
        raise ValueError("index is 1 or 2")
    if check and not V.contains(out.x, out.y):
        raise NotOnSurface(f"involution produced an off-surface point {out}")
    return out


def phi(V, P, check=True):
    """The automorphism iota_1 o iota_2."""
    return involution(V, involution(V, P, 2, check), 1, check)


def phi_inverse(V, P, check=True):
    return involution(V, involution(V, P, 1, check), 2, check)


def commute_at(V, P):
    """Whether iota_1 iota_2 P == iota_2 iota_1 P."""
    return phi(V, P) == phi_inverse(V, P)


def wehler_iterate(V, P, m, max_bits=DEFAULT_MAX_BITS, check=True):
    """Orbit P, phi P, ..., phi^m P (phi^-1 when m < 0), with height vectors."""
    step = phi if m >= 0 else phi_inverse
    rec = OrbitRecord([OrbitStep(0, P, heights(P))])
    Q = P
    for k in range(1, abs(m) + 1):
        try:
            Q = step(V, Q, check)
        except (DegenerateFiber, LinearFormVanishes):
            rec.terminated = Termination.HIT_INDETERMINACY
            return rec
        rec.steps.append(OrbitStep(k, Q, heights(Q)))
        if Q.max_bits() > max_bits:
            rec.terminated = Termination.HEIGHT_OVERFLOW
            return rec
    return rec


@dataclass(frozen=True)
class K3CanonicalHeight:
    value: float
    k: int
    converged: bool
    periodic: bool = False
    estimates: tuple = ()


def k3_canonical_height(V, P, direction="plus", kmax=4, tol=1e-6, max_bits=DEFAULT_MAX_BITS):
    """lim hE+(phi^k P)/alpha^(2k) ("plus") or lim hE-(phi^-k P)/alpha^(2k) ("minus").

    A periodic orbit has canonical height 0 and is reported as such.
    """
    if direction not in ("plus", "minus"):
        raise ValueError("direction is 'plus' or 'minus'")
    step = phi if direction == "plus" else phi_inverse
    Q = P
    seen = {P}
    estimates = []
    for k in range(1, kmax + 1):
        Q = step(V, Q)
        if Q in seen:
            return K3CanonicalHeight(0.0, k, True, True, tuple(estimates))
        seen.add(Q)
        hv = heights(Q)
        h = hv.hEplus if direction == "plus" else hv.hEminus
        estimates.append(h / ALPHA_SQ**k)
        if k >= 2 and abs(estimates[-1] - estimates[-2]) < tol:
            return K3CanonicalHeight(estimates[-1], k, True, False, tuple(estimates))
        if Q.max_bits() > max_bits:
            raise HeightOverflow(f"iterate {k} exceeds {max_bits} bits")
    return K3CanonicalHeight(estimates[-1], kmax, False, False, tuple(estimates))


def k3_mu_experiment(V, P, power=1, kmax=4, a=None, b=None, max_bits=DEFAULT_MAX_BITS):
    """Ratios h_D(phi^power Q_k) / h_D(Q_k) along Q_k = phi^-k P.

    D = a E+ + b E-; the default a = b = 1/(alpha - 1) gives D = D1 + D2.
    The ratios approach alpha^(-2 power).  Returns a list of
    ``(k, ratio, hD(Q_k))``; ratio is nan when h_D(Q_k) = 0.
    """
    if a is None:
        a = 1.0 / (ALPHA - 1.0)
    if b is None:
        b = 1.0 / (ALPHA - 1.0)
    if a <= 0 or b <= 0:
        raise ValueError("D is ample only for a > 0 and b > 0")
    back = [P]
    for k in range(1, kmax + 1):
        Q = phi_inverse(V, back[-1])
        if Q in back:
            raise PeriodicOrbit(f"backward orbit of {P} is periodic")
        if Q.max_bits() > max_bits:
            raise HeightOverflow(f"Q_{k} exceeds {max_bits} bits")
        back.append(Q)
    rows = []
    for k, Q in enumerate(back):
        img = Q
        for _ in range(power):
            img = phi(V, img)
        if k >= power and img != back[k - power]:
            raise NotOnSurface(f"phi^{power}(Q_{k}) differs from Q_{k - power}")
        denom = heights(Q).hD(a, b)
        num = heights(img).hD(a, b)
        rows.append((k, num / denom if denom else math.nan, denom))
    return rows


# ---------------------------------------------------------------------------
# construction

def _correct_form(coeffs, values, pivot):
    """Adjust coeffs so that sum(coeffs * values) = 0 by changing the pivot entry."""
    rest = sum(c * v for idx, (c, v) in enumerate(zip(coeffs, values)) if idx != pivot)
    m = values[pivot]
    out = [c * m for c in coeffs]
    out[pivot] = -rest
    return out


def random_surface_through_point(base, coeff_bound=3, seed=0, max_tries=200, probe_steps=3):
    """Random integer surface through ``base = (x, y)`` and the verified point on it.

    Draws L, Q with entries in [-coeff_bound, coeff_bound], then rewrites
    the coefficient of the base point's leading monomial so both forms
    vanish there.  Surfaces whose first ``probe_steps`` forward or backward
    steps hit a degenerate fiber are rejected.
    """
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be >= 1")
    x, y = normalize_point(base[0]), normalize_point(base[1])
    i0 = next(i for i in range(3) if x[i])
    j0 = next(j for j in range(3) if y[j])
    xy_vals = [x[i] * y[j] for i in range(3) for j in range(3)]
    xm, ym = _mono2(x.coords), _mono2(y.coords)
    q_vals = [xm[a] * ym[b] for a in range(6) for b in range(6)]
    l_piv = 3 * i0 + j0
    q_piv = 6 * MONO2.index((i0, i0)) + MONO2.index((j0, j0))
    for attempt in range(max_tries):
        rng = derive_rng(seed, "wehler", attempt)
        lc = [rng.randint(-coeff_bound, coeff_bound) for _ in range(9)]
        qc = [rng.randint(-coeff_bound, coeff_bound) for _ in range(36)]
        lc = _correct_form(lc, xy_vals, l_piv)
        qc = _correct_form(qc, q_vals, q_piv)
        if not any(lc) or not any(qc):
            continue
        V = WehlerSurface([lc[3 * i:3 * i + 3] for i in range(3)],
                          [qc[6 * a:6 * a + 6] for a in range(6)])
        P = make_point(V, x, y)
        try:
            Q = P
            for _ in range(probe_steps):
                Q = phi(V, Q)
            Q = P
            for _ in range(probe_steps):
                Q = phi_inverse(V, Q)
        except (DegenerateFiber, LinearFormVanishes):
            continue
        return V, P
    raise SearchExhausted(f"no usable surface after {max_tries} draws")


# ---------------------------------------------------------------------------
# surface files

def dump_surface(V, P=None):
    lines = ["# Wehler surface {L = Q = 0} in P^2 x P^2",
             "# L[i][j]: coefficient of x_i*y_j; Q[xa][yb]: coefficient of x-monomial a times y-monomial b"]
    for i in range(3):
        for j in range(3):
            lines.append(f"L[{i}][{j}] = {V.L[i][j]}")
    for a in range(6):
        for b in range(6):
            lines.append(f"Q[{MONO2_LABELS[a]}][{MONO2_LABELS[b].replace('x', 'y')}] = {V.Q[a][b]}")
    if P is not None:
        lines.append("x = " + " ".join(str(v) for v in P.x.coords))
        lines.append("y = " + " ".join(str(v) for v in P.y.coords))
    return "\n".join(lines) + "\n"


_L_KEY = re.compile(r"^L\[(\d)\]\[(\d)\]$")
_Q_KEY = re.compile(r"^Q\[(x\dx\d)\]\[(y\dy\d)\]$")


def load_surface(text):
    """Parse the key = value surface format; returns (surface, point or None).

    Missing coefficients default to 0.
    """
    L = [[0] * 3 for _ in range(3)]
    Q = [[0] * 6 for _ in range(6)]
    coords = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        if m := _L_KEY.match(key):
            i, j = int(m[1]), int(m[2])
            if i > 2 or j > 2:
                raise ValueError(f"line {lineno}: index out of range in {key}")
            L[i][j] = int(val)
        elif m := _Q_KEY.match(key):
            xa, yb = m[1], m[2].replace("y", "x")
            if xa not in MONO2_LABELS or yb not in MONO2_LABELS:
                raise ValueError(f"line {lineno}: unknown monomial label in {key}")
            Q[MONO2_LABELS.index(xa)][MONO2_LABELS.index(yb)] = int(val)
        elif key in ("x", "y"):
            parts = val.replace(",", " ").split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: {key} needs three coordinates")
            coords[key] = [int(v) for v in parts]
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    V = WehlerSurface(L, Q)
    if coords.keys() == {"x", "y"}:
        return V, make_point(V, coords["x"], coords["y"])
    if coords:
        raise ValueError("a point needs both x and y")
    return V, None
