"""Rat / Dom / Mor membership tests for rational self-maps of P^n.

Certified answers carry a witness that :func:`recheck` verifies from
scratch.  Probabilistic answers are one-sided: work modulo random 62-bit
primes can prove that an integer quantity is nonzero, never that it is zero.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from .errors import DimensionTooLarge, UnluckyPrimeExhaustion
from .poly import HomogPoly, monomials
from .rng import derive_rng, is_prime, random_prime

EXACT_JACOBIAN_MAX_N = 4
MACAULAY_MAX_SIZE = 256


class Status(str, Enum):
    CERTIFIED_YES = "CertifiedYes"
    CERTIFIED_NO = "CertifiedNo"
    PROBABLY_YES = "ProbablyYes"
    PROBABLY_NO = "ProbablyNo"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Outcome of a membership test.

    ``prop`` names what was tested: ``"dominant"``, ``"no-common-factor"``
    or ``"morphism"``.  Yes/No refer to that property.
    """

    prop: str
    status: Status
    confidence: float = 1.0
    witness: dict = field(default=None, compare=False)

    @property
    def certified(self):
        return self.status in (Status.CERTIFIED_YES, Status.CERTIFIED_NO)

    def as_dict(self):
        out = {"property": self.prop, "status": self.status.value, "confidence": self.confidence}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


# ---------------------------------------------------------------------------
# modular linear algebra

def det_mod(rows, p):
    """Determinant of a square integer matrix modulo a prime."""
    m = [[v % p for v in r] for r in rows]
    size = len(m)
    det = 1
    for col in range(size):
        piv = next((r for r in range(col, size) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det = det * pv % p
        inv = pow(pv, -1, p)
        for r in range(col + 1, size):
            f = m[r][col]
            if f:
                f = f * inv % p
                row_r, row_c = m[r], m[col]
                for c in range(col, size):
                    row_r[c] = (row_r[c] - f * row_c[c]) % p
    return det % p


# ---------------------------------------------------------------------------
# Jacobian and dominance

def jacobian_matrix(phi):
    return [[q.derivative(j) for j in range(phi.n + 1)] for q in phi.coords]


def jacobian_det(phi):
    """Exact Jacobian determinant det(d phi_i / d X_j) by cofactor expansion."""
    if phi.n > EXACT_JACOBIAN_MAX_N:
        raise DimensionTooLarge(f"exact Jacobian limited to n <= {EXACT_JACOBIAN_MAX_N}")
    jac = jacobian_matrix(phi)
    size = phi.n + 1
    zero = HomogPoly(phi.n, size * (phi.d - 1))

    @lru_cache(maxsize=None)
    def minor(row, cols):
        if row == size:
            return HomogPoly.constant(phi.n, 1)
        total = None
        sign = 1
        for c in cols:
            entry = jac[row][c]
            if entry.terms:
                sub = minor(row + 1, tuple(x for x in cols if x != c))
                if sub.terms:
                    t = entry * sub * sign
                    total = t if total is None else total + t
            sign = -sign
        if total is None:
            return HomogPoly(phi.n, (size - row) * (phi.d - 1))
        return total

    det = minor(0, tuple(range(size)))
    return det if det.terms else zero


def jacobian_det_mod(phi, point, p):
    jac = [[entry.evaluate(point, mod=p) for entry in row] for row in jacobian_matrix(phi)]
    return det_mod(jac, p)


def dominance_test(phi, trials=8, seed=0, mode="auto"):
    """Is phi dominant, i.e. is its Jacobian determinant nonzero?

    ``mode="random"`` only evaluates the Jacobian at random points modulo
    random primes; ``"exact"`` decides J == 0 symbolically (n <= 4);
    ``"auto"`` runs the random trials and falls back to the exact check
    when they all vanish and n allows it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if mode not in ("auto", "random", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact":
        return _dominance_exact(phi, seed)
    D = (phi.n + 1) * (phi.d - 1)
    p_min = None
    for trial in range(trials):
        rng = derive_rng(seed, "dominance", trial)
        p = random_prime(rng)
        point = [rng.randrange(p) for _ in range(phi.n + 1)]
        v = jacobian_det_mod(phi, point, p)
        if v:
            return Verdict("dominant", Status.CERTIFIED_YES,
                           witness={"prime": p, "point": point, "value": v})
        p_min = p if p_min is None else min(p_min, p)
    if mode == "auto" and phi.n <= EXACT_JACOBIAN_MAX_N:
        return _dominance_exact(phi, seed)
    conf = 1.0 - (D / p_min) ** trials
    return Verdict("dominant", Status.PROBABLY_NO, confidence=conf)


def _dominance_exact(phi, seed):
    J = jacobian_det(phi)
    if not J.terms:
        return Verdict("dominant", Status.CERTIFIED_NO, witness={"jacobian": "0"})
    for trial in range(64):
        rng = derive_rng(seed, "dominance-exact", trial)
        p = random_prime(rng)
        point = [rng.randrange(p) for _ in range(phi.n + 1)]
        v = J.evaluate(point, mod=p)
        if v:
            return Verdict("dominant", Status.CERTIFIED_YES,
                           witness={"prime": p, "point": point, "value": jacobian_det_mod(phi, point, p)})
    raise UnluckyPrimeExhaustion("nonzero Jacobian vanished at 64 random points")


# ---------------------------------------------------------------------------
# common factor via restriction to lines

def _upoly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _upoly_mul(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return out


def _upoly_mod(f, g, p):
    f = list(f)
    inv = pow(g[-1], -1, p)
    while len(f) >= len(g) and f:
        q = f[-1] * inv % p
        shift = len(f) - len(g)
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - q * b) % p
        _upoly_trim(f)
    return f


def upoly_gcd(f, g, p):
    """Monic gcd of two coefficient lists (low degree first) over F_p."""
    f = _upoly_trim([a % p for a in f])
    g = _upoly_trim([a % p for a in g])
    while g:
        f, g = g, _upoly_mod(f, g, p)
    if not f:
        return []
    inv = pow(f[-1], -1, p)
    return [a * inv % p for a in f]


def restrict_to_line(q, P, Q, p):
    """q(P + t Q) mod p as a coefficient list in t (low degree first)."""
    lin = [[a % p, b % p] for a, b in zip(P, Q)]
    pows = []
    for ell in lin:
        row = [[1]]
        for _ in range(q.d):
            row.append(_upoly_mul(row[-1], ell, p))
        pows.append(row)
    out = [0] * (q.d + 1)
    for e, c in q.terms:
        t = [c % p]
        for j, k in enumerate(e):
            if k:
                t = _upoly_mul(t, pows[j][k], p)
        for i, a in enumerate(t):
            out[i] = (out[i] + a) % p
    return out


def _line_gcd(phi, P, Q, p):
    """Returns (full_degree, gcd) for the restrictions of phi to P + tQ."""
    g = None
    full = True
    for q in phi.coords:
        if not q.terms:
            continue
        f = restrict_to_line(q, P, Q, p)
        if len(f) <= q.d or f[q.d] == 0:
            full = False
        g = f if g is None else upoly_gcd(g, f, p)
    g = upoly_gcd(g, [], p)
    return full, g


def common_factor_test(phi, trials=8, seed=0):
    """Do the coordinates of phi share a non-constant factor?

    CertifiedYes means *no* common factor (phi is a genuine degree-d map).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nontrivial = 0
    attempt = 0
    while nontrivial < trials and attempt < 4 * trials:
        rng = derive_rng(seed, "common-factor", attempt)
        attempt += 1
        p = random_prime(rng)
        P = [rng.randrange(p) for _ in range(phi.n + 1)]
        Q = [rng.randrange(p) for _ in range(phi.n + 1)]
        full, g = _line_gcd(phi, P, Q, p)
        if not full:
            continue
        if len(g) == 1:
            return Verdict("no-common-factor", Status.CERTIFIED_YES,
                           witness={"prime": p, "P": P, "Q": Q})
        nontrivial += 1
    return Verdict("no-common-factor", Status.PROBABLY_NO,
                   confidence=1.0 - 2.0 ** (-max(nontrivial, 1)))


# ---------------------------------------------------------------------------
# Macaulay resultant

def macaulay_degree(n, d):
    return (n + 1) * (d - 1) + 1


def macaulay_matrix(forms, d):
    """Classical Macaulay matrix at degree (n+1)(d-1)+1 and its extraneous minor.

    Returns ``(rows, minor_rows)``; the resultant equals
    ``det(rows) / det(minor_rows)`` up to sign.
    """
    n = forms[0].n
    nu = macaulay_degree(n, d)
    mons = monomials(n, nu)
    col = {m: i for i, m in enumerate(mons)}
    rows = []
    nonreduced = []
    for m in mons:
        big = [i for i in range(n + 1) if m[i] >= d]
        i = big[0]
        if len(big) > 1:
            nonreduced.append(len(rows))
        shift = list(m)
        shift[i] -= d
        row = [0] * len(mons)
        for e, c in forms[i].terms:
            row[col[tuple(a + b for a, b in zip(e, shift))]] = c
        rows.append(row)
    minor = [[rows[r][c] for c in nonreduced] for r in nonreduced]
    return rows, minor


def _random_linear_change(n, rng, p):
    while True:
        g = [[rng.randrange(p) for _ in range(n + 1)] for _ in range(n + 1)]
        if det_mod(g, p):
            return g


def _transform_forms(forms, g, p):
    n = forms[0].n
    lin = [HomogPoly.from_dict(n, 1, {tuple(int(k == j) for k in range(n + 1)): g[i][j]
                                      for j in range(n + 1)}) for i in range(n + 1)]
    return [f.substitute(lin).reduce_mod(p) for f in forms]


def _macaulay_mod(phi, p, g):
    forms = list(phi.coords)
    if g is not None:
        forms = _transform_forms(forms, g, p)
    rows, minor = macaulay_matrix(forms, phi.d)
    return det_mod(rows, p), (det_mod(minor, p) if minor else 1)


def rank_mod(rows, p):
    m = [[v % p for v in r] for r in rows]
    if not m:
        return 0
    rank = 0
    ncols = len(m[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        for r in range(rank + 1, len(m)):
            f = m[r][col]
            if f:
                f = f * inv % p
                for c in range(col, ncols):
                    m[r][c] = (m[r][c] - f * m[rank][c]) % p
        rank += 1
    return rank


def full_macaulay_rank_deficit(phi, p):
    """Number of degree-nu monomials missing from (phi_0..phi_n) mod p.

    Zero exactly when the forms have no common zero over the algebraic
    closure of F_p, i.e. when the resultant is nonzero mod p.
    """
    n, d = phi.n, phi.d
    nu = macaulay_degree(n, d)
    mons = monomials(n, nu)
    col = {m: i for i, m in enumerate(mons)}
    rows = []
    for q in phi.coords:
        for shift in monomials(n, nu - d):
            row = [0] * len(mons)
            for e, c in q.terms:
                row[col[tuple(a + b for a, b in zip(e, shift))]] = c
            rows.append(row)
    return len(mons) - rank_mod(rows, p)


def morphism_test(phi, prime_count=6, seed=0):
    """Is phi a morphism (no common zero of phi_0..phi_n)?

    Evaluates the Macaulay resultant det(M)/det(minor) modulo random primes.
    When both determinants vanish mod p the prime is retried under a random
    linear change of variables (which preserves whether the resultant is
    zero); if the minor still vanishes, the prime is decided by the rank of
    the full degree-nu Macaulay matrix instead.
    """
    n, d = phi.n, phi.d
    size = len(monomials(n, macaulay_degree(n, d)))
    if size > MACAULAY_MAX_SIZE:
        raise DimensionTooLarge(f"Macaulay matrix of size {size} exceeds {MACAULAY_MAX_SIZE}")
    if prime_count < 1:
        raise ValueError("prime_count must be >= 1")
    for k in range(prime_count):
        rng = derive_rng(seed, "morphism", k)
        p = random_prime(rng)
        for g in (None, _random_linear_change(n, rng, p)):
            num, den = _macaulay_mod(phi, p, g)
            if num:
                return Verdict("morphism", Status.CERTIFIED_YES,
                               witness={"prime": p, "transform": g,
                                        "resultant_mod_p": num * pow(den, -1, p) % p})
            if den:
                break
        else:
            if full_macaulay_rank_deficit(phi, p) == 0:
                return Verdict("morphism", Status.CERTIFIED_YES,
                               witness={"prime": p, "transform": "rank"})
    return Verdict("morphism", Status.PROBABLY_NO, confidence=1.0 - 2.0 ** (-prime_count))


# ---------------------------------------------------------------------------

def recheck(phi, verdict):
    """Independently re-verify a certified verdict's witness.

    Probabilistic verdicts carry nothing to check and return True.
    """
    if not verdict.certified:
        return True
    w = verdict.witness or {}
    if verdict.prop == "dominant":
        if verdict.status is Status.CERTIFIED_NO:
            return not jacobian_det(phi).terms
        p = w["prime"]
        return is_prime(p) and jacobian_det_mod(phi, w["point"], p) != 0
    if verdict.prop == "no-common-factor":
        p = w["prime"]
        if not is_prime(p):
            return False
        full, g = _line_gcd(phi, w["P"], w["Q"], p)
        return full and len(g) == 1
    if verdict.prop == "morphism":
        p = w["prime"]
        g = w.get("transform")
        if not is_prime(p):
            return False
        if g == "rank":
            return full_macaulay_rank_deficit(phi, p) == 0
        if g is not None and not det_mod(g, p):
            return False
        num, den = _macaulay_mod(phi, p, g)
        return num != 0 and den != 0
    raise ValueError(f"unknown property {verdict.prop!r}")
