import math

from hypothesis import assume, given, reject, settings, strategies as st

from heightmu.classify import (
    common_factor_test,
    dominance_test,
    jacobian_det,
    jacobian_det_mod,
    recheck,
)
from heightmu.dynamics import height_ratio
from heightmu.errors import SearchExhausted
from heightmu.poly import (
    HomogPoly,
    RationalMap,
    compose_maps,
    evaluate_map,
    map_height,
    monomials,
    parse_map,
    render_map,
    triangle_bound_holds,
)
from heightmu.rational import normalize_point, point_height, rat_height, root_coeff_bound_holds, root_coeff_gap
from heightmu.suite import planted_root_polynomial
from heightmu.rng import derive_rng
from heightmu.wehler import involution, phi as k3_phi, phi_inverse, random_surface_through_point

ints = st.integers(-10**6, 10**6)
small = st.integers(-20, 20)
nonzero_frac = st.fractions(max_denominator=10**4).filter(lambda q: q != 0)


def vectors(n_min=2, n_max=4, elems=ints):
    return st.lists(elems, min_size=n_min, max_size=n_max).filter(any)


@st.composite
def maps(draw, n_max=3, d_max=3, coeff=small, n_min=1):
    n = draw(st.integers(n_min, n_max))
    d = draw(st.integers(1, d_max))
    mons = monomials(n, d)
    coords = []
    for _ in range(n + 1):
        cs = draw(st.lists(coeff, min_size=len(mons), max_size=len(mons)))
        coords.append(HomogPoly.from_dict(n, d, dict(zip(mons, cs))))
    assume(any(q.terms for q in coords))
    return RationalMap(tuple(coords))


@st.composite
def map_and_point(draw, **kw):
    phi = draw(maps(**kw))
    P = draw(vectors(phi.n + 1, phi.n + 1))
    return phi, normalize_point(P)


@given(vectors(elems=st.fractions(max_denominator=1000)), nonzero_frac)
def test_normalize_scale_invariant_and_idempotent(v, lam):
    P = normalize_point(v)
    assert normalize_point(P.coords) == P
    assert normalize_point([lam * x for x in v]) == P


@given(vectors(), st.randoms(use_true_random=False))
def test_height_permutation_invariant(v, rnd):
    P = normalize_point(v)
    w = list(v)
    rnd.shuffle(w)
    hv = point_height(P)
    assert point_height(normalize_point(w)) == hv
    assert hv.h >= 0 and hv.H >= 1


@given(st.fractions(max_denominator=10**9))
def test_rat_height_matches_point_height(q):
    assert rat_height(q) == point_height(normalize_point((q, 1)))


@given(st.integers(0, 2**32))
def test_root_gap_nonnegative(seed):
    rng = derive_rng(seed, "prop")
    coeffs, root = planted_root_polynomial(rng, rng.randint(1, 6), rng.choice((1, 10, 1000)))
    assert root_coeff_gap(coeffs, root) >= -1e-9
    assert root_coeff_bound_holds(coeffs, root)


@given(map_and_point(coeff=st.integers(-10**4, 10**4)))
def test_triangle_inequality(mp):
    phi, P = mp
    held = triangle_bound_holds(phi, P)
    assume(held is not None)
    assert held
    img = evaluate_map(phi, P)
    bound = phi.d * point_height(P).h + map_height(phi).h + math.log(phi.N)
    assert point_height(img).h <= bound + 1e-9


@settings(max_examples=50)
@given(maps(n_max=3, d_max=3), st.lists(st.integers(0, 10**6), min_size=4, max_size=4))
def test_jacobian_agrees_mod_p(phi, pt):
    p = 1_000_003
    pt = pt[: phi.n + 1]
    J = jacobian_det(phi)
    assert J.evaluate(pt, mod=p) % p == jacobian_det_mod(phi, pt, p)


@settings(max_examples=50)
@given(maps(n_max=2, d_max=3), st.integers(0, 1000))
def test_certified_witnesses_recheck(phi, seed):
    for v in (dominance_test(phi, 4, seed), common_factor_test(phi, 4, seed)):
        if v.certified:
            assert v.witness is not None and recheck(phi, v)


@given(maps())
def test_render_parse_round_trip(phi):
    assert parse_map(render_map(phi)) == phi


@settings(max_examples=60)
@given(maps(n_min=2, n_max=2, d_max=2), maps(n_min=2, n_max=2, d_max=2), vectors(3, 3, small))
def test_compose_matches_evaluation(phi, psi, v):
    P = normalize_point(v)
    inner = evaluate_map(psi, P)
    assume(inner is not None)
    outer = evaluate_map(phi, inner)
    comp = evaluate_map(compose_maps(phi, psi), P)
    assume(outer is not None and comp is not None)
    assert comp == outer


@given(map_and_point(), st.integers(-50, 50).filter(bool))
def test_ratio_rescaling_invariant(mp, lam):
    phi, P = mp
    assert height_ratio(phi, P) == height_ratio(phi, normalize_point([lam * x for x in P.coords]))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), vectors(3, 3, st.integers(-5, 5)), vectors(3, 3, st.integers(-5, 5)))
def test_involutions_exact(seed, x, y):
    try:
        V, P = random_surface_through_point((x, y), 3, seed)
    except SearchExhausted:
        reject()
    Q = P
    for _ in range(2):
        for idx in (1, 2):
            R = involution(V, Q, idx)
            assert V.contains(R.x, R.y)
            assert involution(V, R, idx) == Q
        assert phi_inverse(V, k3_phi(V, Q)) == Q
        Q = k3_phi(V, Q)
