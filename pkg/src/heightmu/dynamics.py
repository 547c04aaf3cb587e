"""Orbits, empirical height expansion coefficients and canonical heights.

All heights are exact in ``H`` and natural-log in ``h``.  Sampling loops
derive a private generator per sample from ``(seed, tier, index)``.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import (
    BoundedOrbit,
    DimensionMismatch,
    EmptyRegion,
    InverseCheckFailed,
    OrbitLeftChart,
)
from .poly import evaluate_map
from .rational import normalize_point, point_height
from .rng import derive_rng

DEFAULT_TIERS = (10**2, 10**3, 10**4, 10**5, 10**6)
DEFAULT_SAMPLES = 500
DEFAULT_MAX_BITS = 4_000_000


@dataclass(frozen=True)
class ExclusionSet:
    """Polynomials whose common complement is the open set U.

    A point lies in U when *none* of the polynomials vanishes at it.
    """

    polys: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        for q in self.polys:
            if not q.terms:
                raise ValueError("exclusion polynomials must be nonzero")

    def excludes(self, P):
        return any(q.evaluate(P.coords) == 0 for q in self.polys)

    def __contains__(self, P):
        return not self.excludes(P)


class Termination(str, Enum):
    COMPLETED = "Completed"
    HIT_INDETERMINACY = "HitIndeterminacy"
    HEIGHT_OVERFLOW = "HeightOverflow"


@dataclass(frozen=True)
class OrbitStep:
    k: int
    point: object
    h: float


@dataclass
class OrbitRecord:
    steps: list = field(default_factory=list)
    terminated: Termination = Termination.COMPLETED

    @property
    def last(self):
        return self.steps[-1]

    def points(self):
        return [s.point for s in self.steps]

    def heights(self):
        return [s.h for s in self.steps]


def forward_orbit(phi, P, kmax, max_bits=DEFAULT_MAX_BITS):
    """Iterate phi from P, recording exact points and their heights."""
    rec = OrbitRecord([OrbitStep(0, P, point_height(P).h)])
    Q = P
    for k in range(1, kmax + 1):
        Q = evaluate_map(phi, Q)
        if Q is None:
            rec.terminated = Termination.HIT_INDETERMINACY
            return rec
        rec.steps.append(OrbitStep(k, Q, point_height(Q).h))
        if Q.max_bits() > max_bits:
            rec.terminated = Termination.HEIGHT_OVERFLOW
            return rec
    return rec


# ---------------------------------------------------------------------------
# mu estimation

@dataclass(frozen=True)
class TierStat:
    T: int
    samples: int
    rejected: int
    min_ratio: float
    mean_ratio: float
    argmin_h: float
    argmin_image_h: float
    argmin_point: tuple


@dataclass(frozen=True)
class MuEstimate:
    """Per-tier ratio statistics for h(phi P)/h(P) over sampled P in U.

    ``liminf_estimate`` is the minimum ratio of the largest tier.  The
    lower envelope h(phi P) >= fitted_c1 * h(P) - fitted_c2 is a least
    squares line through the per-tier minimizers.
    """

    tiers: tuple
    liminf_estimate: float
    fitted_c1: float
    fitted_c2: float

    def as_dict(self):
        return {
            "tiers": [
                {"T": t.T, "samples": t.samples, "rejected": t.rejected,
                 "min_ratio": t.min_ratio, "mean_ratio": t.mean_ratio}
                for t in self.tiers
            ],
            "liminf_estimate": self.liminf_estimate,
            "fitted_c1": self.fitted_c1,
            "fitted_c2": self.fitted_c2,
        }


def height_ratio(phi, P):
    """h(phi P) / h(P), or None when undefined (P indeterminate or h(P) = 0)."""
    hP = point_height(P).h
    if hP == 0:
        return None
    img = evaluate_map(phi, P)
    if img is None:
        return None
    return point_height(img).h / hP


def _uniform_point(rng, n, T):
    while True:
        raw = [rng.randint(-T, T) for _ in range(n + 1)]
        if any(raw):
            return normalize_point(raw)


def estimate_mu(phi, U=None, tier_bounds=DEFAULT_TIERS, samples_per_tier=DEFAULT_SAMPLES, seed=0):
    """Empirical liminf of h(phi P)/h(P) over P in U, tier by tier.

    Each tier draws points with integer coordinates uniform in [-T, T],
    rejecting points outside U, in the indeterminacy locus, or of height 0.
    """
    U = U or ExclusionSet()
    tier_bounds = list(tier_bounds)
    if any(b <= a for a, b in zip(tier_bounds, tier_bounds[1:])):
        raise ValueError("tier bounds must increase")
    if samples_per_tier < 1:
        raise ValueError("samples_per_tier must be >= 1")
    max_attempts = 1000 * samples_per_tier
    tiers = []
    for T in tier_bounds:
        ratios = []
        best = None
        attempt = 0
        while len(ratios) < samples_per_tier:
            if attempt >= max_attempts:
                raise EmptyRegion(f"rejection rate above 99.9% at T={T}")
            rng = derive_rng(seed, "mu", T, attempt)
            attempt += 1
            P = _uniform_point(rng, phi.n, T)
            if U.excludes(P):
                continue
            hP = point_height(P).h
            if hP == 0:
                continue
            img = evaluate_map(phi, P)
            if img is None:
                continue
            hI = point_height(img).h
            r = hI / hP
            ratios.append(r)
            if best is None or r < best[0]:
                best = (r, hP, hI, P.coords)
        tiers.append(TierStat(T, len(ratios), attempt - len(ratios), best[0],
                              sum(ratios) / len(ratios), best[1], best[2], best[3]))
    xs = np.array([t.argmin_h for t in tiers])
    ys = np.array([t.argmin_image_h for t in tiers])
    if len(tiers) >= 2 and np.ptp(xs) > 0:
        slope, intercept = np.polyfit(xs, ys, 1)
        c1, c2 = float(slope), float(-intercept)
    else:
        c1, c2 = float(ys[-1] / xs[-1]), 0.0
    return MuEstimate(tuple(tiers), tiers[-1].min_ratio, c1, c2)


@dataclass(frozen=True)
class AdversarialResult:
    T: int
    eps: float
    bound: float
    ratios: tuple

    @property
    def max_ratio(self):
        return max(self.ratios)

    @property
    def min_ratio(self):
        return min(self.ratios)


def _pairwise_coprime_vector(rng, count, lo, hi):
    out = []
    while len(out) < count:
        a = rng.randint(lo, hi)
        if all(math.gcd(a, b) == 1 for b in out):
            out.append(a)
    return out


def adversarial_inversion_ratios(phi, T, eps=0.1, samples=100, seed=0):
    """Ratios at points P = phi(a) built to make h(phi P)/h(P) small.

    Intended for the coordinate-inversion map, which is its own inverse:
    with pairwise coprime a_i in (T^(1-eps), T), phi(P) = a has height at
    most T while P has height at least T^((1-eps) n).
    """
    n = phi.n
    lo = math.floor(T ** (1 - eps)) + 1
    hi = T - 1
    if lo > hi:
        raise ValueError("T too small for the requested eps")
    ratios = []
    for i in range(samples):
        rng = derive_rng(seed, "adversarial", T, i)
        a = normalize_point(_pairwise_coprime_vector(rng, n + 1, lo, hi))
        P = evaluate_map(phi, a)
        ratios.append(height_ratio(phi, P))
    return AdversarialResult(T, eps, 1.0 / ((1 - eps) * n), tuple(ratios))


# ---------------------------------------------------------------------------
# regular affine automorphisms

def affine_point(*coords):
    """The point [1, coords...] of the chart X0 = 1."""
    return normalize_point((1,) + tuple(coords))


def _require_affine(P):
    if P.coords[0] == 0:
        raise OrbitLeftChart(f"{P} lies on the hyperplane X0 = 0")
    return P


@dataclass(frozen=True)
class AffineAutomorphism:
    """A forward map and its inverse restricting to automorphisms of X0 = 1.

    ``dim_z_fwd`` / ``dim_z_inv`` are the declared dimensions of the two
    indeterminacy loci; they are only cross-checked, never computed.
    """

    fwd: object
    inv: object
    dim_z_fwd: int = None
    dim_z_inv: int = None

    @property
    def n(self):
        return self.fwd.n

    @property
    def d1(self):
        return self.fwd.d

    @property
    def d2(self):
        return self.inv.d

    def ell(self):
        if self.dim_z_fwd is None or self.dim_z_inv is None:
            return None
        return 1 + self.dim_z_fwd, 1 + self.dim_z_inv

    def dimension_relations_hold(self):
        """l1 + l2 = n and d2^l1 = d1^l2, checked exactly."""
        ells = self.ell()
        if ells is None:
            return None
        l1, l2 = ells
        return l1 + l2 == self.n and self.d2 ** l1 == self.d1 ** l2

    def verify(self, samples=32, seed=0, bound=50):
        """Check inv(fwd P) = P = fwd(inv P) and chart preservation on random affine P."""
        if self.fwd.n != self.inv.n:
            raise DimensionMismatch("forward and inverse maps act on different P^n")
        for i in range(samples):
            rng = derive_rng(seed, "inverse-check", i)
            P = affine_point(*(rng.randint(-bound, bound) for _ in range(self.n)))
            for first, second in ((self.fwd, self.inv), (self.inv, self.fwd)):
                Q = evaluate_map(first, P)
                if Q is None or Q.coords[0] == 0:
                    raise InverseCheckFailed(f"image of {P} leaves the affine chart")
                R = evaluate_map(second, Q)
                if R != P:
                    raise InverseCheckFailed(f"maps are not mutually inverse at {P}: got {R}")
        rel = self.dimension_relations_hold()
        if rel is False:
            raise InverseCheckFailed(f"declared dimensions {self.ell()} violate l1+l2=n, d2^l1=d1^l2")
        return True

    def step(self, P, direction="plus"):
        phi = self.fwd if direction == "plus" else self.inv
        Q = evaluate_map(phi, _require_affine(P))
        if Q is None:
            raise OrbitLeftChart(f"{P} is indeterminate")
        return _require_affine(Q)


@dataclass(frozen=True)
class CanonicalHeight:
    value: float
    k: int
    converged: bool
    estimates: tuple = ()


def canonical_height(A, P, direction="plus", kmax=20, tol=1e-6, max_bits=DEFAULT_MAX_BITS):
    """lim h(phi^k P)/d1^k ("plus") or lim h(phi^-k P)/d2^k ("minus")."""
    if direction not in ("plus", "minus"):
        raise ValueError("direction is 'plus' or 'minus'")
    if kmax < 2:
        raise ValueError("kmax must be >= 2")
    deg = A.d1 if direction == "plus" else A.d2
    Q = _require_affine(P)
    estimates = []
    for k in range(1, kmax + 1):
        Q = A.step(Q, direction)
        estimates.append(point_height(Q).h / deg**k)
        if k >= 2 and abs(estimates[-1] - estimates[-2]) < tol:
            return CanonicalHeight(estimates[-1], k, True, tuple(estimates))
        if Q.max_bits() > max_bits:
            break
    return CanonicalHeight(estimates[-1], len(estimates), False, tuple(estimates))


def kawaguchi_slack(A, P):
    """h(phi P)/d1 + h(phi^-1 P)/d2 - (1 + 1/(d1 d2)) h(P)."""
    hP = point_height(_require_affine(P)).h
    hf = point_height(A.step(P, "plus")).h
    hb = point_height(A.step(P, "minus")).h
    return hf / A.d1 + hb / A.d2 - (1 + 1 / (A.d1 * A.d2)) * hP


@dataclass(frozen=True)
class SlackSurvey:
    box: int
    samples: int
    min_slack: float
    argmin: tuple

    @property
    def fitted_constant(self):
        """Smallest C >= 0 with slack + C >= 0 on every sample."""
        return max(0.0, -self.min_slack)


def kawaguchi_survey(A, box, samples=1000, seed=0):
    """Empirical infimum of the slack over affine points with |coords| <= box."""
    best = None
    for i in range(samples):
        rng = derive_rng(seed, "kawaguchi", i)
        P = affine_point(*(rng.randint(-box, box) for _ in range(A.n)))
        s = kawaguchi_slack(A, P)
        if best is None or s < best[0]:
            best = (s, P.coords)
    return SlackSurvey(box, samples, best[0], best[1])


def backward_mu_sequence(A, P, kmax=12):
    """Ratios h(phi Q_k)/h(Q_k) along Q_k = phi^-k P; they tend to 1/d2."""
    if kmax < 0:
        raise ValueError("kmax must be >= 0")
    Q = [_require_affine(P)]
    for _ in range(max(kmax, 5)):
        Q.append(A.step(Q[-1], "minus"))
    hs = [point_height(q).h for q in Q]
    if max(hs[1:6]) <= hs[0]:
        raise BoundedOrbit(f"backward orbit of {P} does not grow within 5 steps")
    out = []
    for k in range(kmax + 1):
        img = A.step(Q[k], "plus")
        if k and img != Q[k - 1]:
            raise InverseCheckFailed(f"phi(Q_{k}) != Q_{k - 1}")
        out.append((k, point_height(img).h / hs[k] if hs[k] else math.nan))
    return out
