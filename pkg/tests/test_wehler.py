import math

import pytest

from heightmu.errors import NotARoot, NotOnSurface, PeriodicOrbit
from heightmu.suite import default_surface
from heightmu.wehler import (
    ALPHA,
    ALPHA_SQ,
    MONO2,
    WehlerSurface,
    commute_at,
    dump_surface,
    heights,
    involution,
    k3_canonical_height,
    k3_mu_experiment,
    load_surface,
    make_point,
    other_root_binary_quadratic,
    phi,
    random_surface_through_point,
    wehler_iterate,
)


@pytest.mark.parametrize("abc, root, other", [
    ((1, -3, 2), (1, 1), (2, 1)),
    ((0, 1, -1), (1, 1), (1, 0)),
    ((1, -2, 1), (1, 1), (1, 1)),
])
def test_other_root(abc, root, other):
    assert tuple(other_root_binary_quadratic(*abc, root)) == other
    assert tuple(other_root_binary_quadratic(*abc, other)) == root


def test_other_root_rejects_non_root():
    with pytest.raises(NotARoot):
        other_root_binary_quadratic(1, -3, 2, (3, 1))


def test_correction_at_coordinate_point():
    V, P = random_surface_through_point(((1, 0, 0), (1, 0, 0)), 3, 0)
    assert V.L[0][0] == 0
    assert V.Q[MONO2.index((0, 0))][MONO2.index((0, 0))] == 0
    assert V.contains(P.x, P.y)


def test_construction_reproducible():
    a = random_surface_through_point(((1, 2, -1), (2, -1, 1)), 3, 5)
    b = random_surface_through_point(((1, 2, -1), (2, -1, 1)), 3, 5)
    assert a == b


def test_involutions():
    V, P = default_surface()
    Q = P
    for _ in range(3):
        for idx in (1, 2):
            R = involution(V, Q, idx)
            assert V.contains(R.x, R.y)
            assert involution(V, R, idx) == Q
        Q = phi(V, Q)
    assert not commute_at(V, P)


def test_iterate_round_trip():
    V, P = default_surface()
    fwd = wehler_iterate(V, P, 3)
    back = wehler_iterate(V, fwd.last.point, -3)
    assert back.last.point == P
    assert len(wehler_iterate(V, P, 0).steps) == 1


def test_height_identity():
    V, P = default_surface()
    for step in wehler_iterate(V, P, 3).steps:
        hv = step.h
        assert hv.hEplus + hv.hEminus == pytest.approx((ALPHA - 1) * (hv.hD1 + hv.hD2), abs=1e-9)


def test_eplus_growth():
    V, P = default_surface()
    hs = [s.h.hEplus for s in wehler_iterate(V, P, 4).steps]
    assert hs[-1] / hs[-2] == pytest.approx(ALPHA_SQ, rel=0.01)


def test_canonical_scaling():
    V, P = default_surface()
    a = k3_canonical_height(V, P, "plus", 4)
    b = k3_canonical_height(V, phi(V, P), "plus", 4)
    assert b.value / a.value == pytest.approx(ALPHA_SQ, rel=0.01)
    assert a.value >= 0 and k3_canonical_height(V, P, "minus", 4).value >= 0


def test_mu_experiment_targets():
    V, P = default_surface()
    rows = k3_mu_experiment(V, P, 1, 4)
    assert rows[0][0] == 0
    assert rows[-1][1] == pytest.approx(7 - 4 * math.sqrt(3), rel=0.05)
    assert k3_mu_experiment(V, P, 2, 4)[-1][1] == pytest.approx(ALPHA ** -4, rel=0.10)


def _fixed_point_surface():
    # L = x0 y2 + x2 y0, Q = x0^2 y1^2 + x1^2 y0^2 + x2^2 y2^2: both fiber
    # lines through ([1,0,0],[1,0,0]) are tangent to their conics there.
    L = [[0, 0, 1], [0, 0, 0], [1, 0, 0]]
    Q = [[0] * 6 for _ in range(6)]
    Q[MONO2.index((0, 0))][MONO2.index((1, 1))] = 1
    Q[MONO2.index((1, 1))][MONO2.index((0, 0))] = 1
    Q[MONO2.index((2, 2))][MONO2.index((2, 2))] = 1
    return WehlerSurface(L, Q)


def test_double_root_fixed_point():
    V = _fixed_point_surface()
    P = make_point(V, (1, 0, 0), (1, 0, 0))
    assert involution(V, P, 1) == P and involution(V, P, 2) == P
    assert k3_canonical_height(V, P, "plus").value == 0
    with pytest.raises(PeriodicOrbit):
        k3_mu_experiment(V, P, 1, 2)


def test_surface_file_round_trip():
    V, P = default_surface()
    assert load_surface(dump_surface(V, P)) == (V, P)
    with pytest.raises(NotOnSurface):
        load_surface(dump_surface(V) + "x = 1 0 0\ny = 0 0 1\n")
    with pytest.raises(ValueError):
        load_surface("L[0][0] = 1\nbogus = 3\n")


def test_heights_vector():
    V, P = default_surface()
    hv = heights(P)
    assert hv.hD(1 / (ALPHA - 1), 1 / (ALPHA - 1)) == pytest.approx(hv.hD1 + hv.hD2)
