import math

import pytest

from heightmu import builtins
from heightmu.dynamics import (
    ExclusionSet,
    Termination,
    adversarial_inversion_ratios,
    affine_point,
    backward_mu_sequence,
    canonical_height,
    estimate_mu,
    forward_orbit,
    height_ratio,
    kawaguchi_slack,
)
from heightmu.errors import BoundedOrbit, EmptyRegion
from heightmu.poly import parse_map, parse_polys
from heightmu.rational import ProjPoint, point_height

INTRO = parse_map("X0^2; X1^2; X0*X2")


def test_orbit_fixed_point():
    rec = forward_orbit(INTRO, ProjPoint.of(1, 1, 2), 5)
    assert rec.terminated is Termination.COMPLETED
    assert all(p == ProjPoint.of(1, 1, 2) for p in rec.points())
    assert all(h == pytest.approx(math.log(2)) for h in rec.heights())


def test_orbit_collapses_onto_fixed_point():
    rec = forward_orbit(INTRO, ProjPoint.of(0, 2, 5), 3)
    assert rec.points()[1:] == [ProjPoint.of(0, 1, 0)] * 3


def test_orbit_kmax_zero_and_indeterminacy():
    rec = forward_orbit(INTRO, ProjPoint.of(2, 3, 5), 0)
    assert len(rec.steps) == 1 and rec.terminated is Termination.COMPLETED
    rec = forward_orbit(parse_map("X0*X1; X1^2; X0*X2"), ProjPoint.of(0, 0, 1), 2)
    assert rec.terminated is Termination.HIT_INDETERMINACY


def test_orbit_overflow():
    rec = forward_orbit(parse_map("X0^2; X1^2"), ProjPoint.of(1, 3), 40, max_bits=1000)
    assert rec.terminated is Termination.HEIGHT_OVERFLOW
    assert rec.last.point.max_bits() > 1000


def test_morphism_mu():
    phi, U, ref = builtins.get("power-d2")
    est = estimate_mu(phi, U, (10**2, 10**4, 10**6), 100)
    assert est.liminf_estimate == pytest.approx(ref, abs=0.05)
    assert est.fitted_c1 > 0


def test_intro_mu_respects_remark():
    phi, U, _ = builtins.get("intro-xyz")
    est = estimate_mu(phi, U, (10, 10**3), 200)
    assert all(t.min_ratio >= 1 - 1e-9 for t in est.tiers)


def test_empty_region():
    U = ExclusionSet(tuple(parse_polys("X0", 1)))
    # every point of height 1 on P^1 is a zero of X0 X1 (X0 - X1)(X0 + X1)
    everything = ExclusionSet(tuple(parse_polys("X0^3*X1 - X0*X1^3", 1)))
    with pytest.raises(EmptyRegion):
        estimate_mu(parse_map("X0; X1"), everything, (1,), 5)
    assert estimate_mu(parse_map("X0; X1"), U, (5,), 5).tiers[0].samples == 5


@pytest.mark.parametrize("n", [2, 3])
def test_adversarial_inversion(n):
    phi = builtins.inversion(n)
    res = adversarial_inversion_ratios(phi, 10**6, 0.1, 50, seed=3)
    assert 1 / n - 1e-12 <= res.min_ratio and res.max_ratio <= res.bound


def test_ratio_invariant_under_rescaling():
    P = ProjPoint.of(3, -7, 11)
    assert height_ratio(INTRO, P) == height_ratio(INTRO, ProjPoint.of(*P.coords))


def test_henon_basics():
    A = builtins.henon(1)
    assert A.verify()
    assert A.ell() == (1, 1) and A.dimension_relations_hold()
    fixed = affine_point(1, 1)
    assert A.step(fixed) == fixed
    assert canonical_height(A, fixed, "plus").value == 0
    assert canonical_height(A, fixed, "minus").value == 0
    assert kawaguchi_slack(A, fixed) == 0


def test_henon_canonical_scaling():
    A = builtins.henon(1)
    P = affine_point(2, 3)
    hp = canonical_height(A, P, "plus", 20, 1e-6)
    assert hp.value > 0
    assert abs(canonical_height(A, A.step(P), "plus", 20, 1e-6).value - 2 * hp.value) < 1e-5
    coarse = canonical_height(A, P, "plus", 2, 0.0)
    assert coarse.estimates[-1] == pytest.approx(point_height(A.step(A.step(P))).h / 4)


def test_henon_canonical_upper_bound():
    # h+ <= h + C and h <= h+ + h- + C with a small C on a grid of points
    A = builtins.henon(1)
    gaps_up, gaps_low = [], []
    for x in range(-6, 7, 3):
        for y in range(-6, 7, 3):
            P = affine_point(x, y)
            hp = canonical_height(A, P, "plus").value
            hm = canonical_height(A, P, "minus").value
            h = point_height(P).h
            gaps_up.append(hp - h)
            gaps_low.append(h - hp - hm)
    assert max(gaps_up) < 2 and max(gaps_low) < 2


def test_backward_sequence():
    A = builtins.henon(1)
    seq = backward_mu_sequence(A, affine_point(2, 3), 12)
    assert seq[0][1] == pytest.approx(point_height(A.step(affine_point(2, 3))).h / math.log(3))
    assert abs(seq[-1][1] - 0.5) <= 0.01
    with pytest.raises(BoundedOrbit):
        backward_mu_sequence(A, affine_point(1, 1), 4)
