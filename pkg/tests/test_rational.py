import math
from fractions import Fraction

import pytest

from heightmu.errors import AllZero, NotARoot
from heightmu.rational import (
    ProjPoint,
    log_int,
    normalize_point,
    point_height,
    rat_height,
    root_coeff_bound_holds,
    root_coeff_gap,
)


@pytest.mark.parametrize("raw, expected", [
    ((Fraction(2, 3), Fraction(-1, 3), 0), (2, -1, 0)),
    ((0, -5, 10), (0, 1, -2)),
    ((7, 7, 7), (1, 1, 1)),
    (("1/2", "-3/4", 5), (2, -3, 20)),
])
def test_normalize_examples(raw, expected):
    assert normalize_point(raw).coords == expected


def test_normalize_rejects_zero():
    with pytest.raises(AllZero):
        normalize_point((0, 0, 0))


def test_projpoint_rejects_non_canonical():
    with pytest.raises(ValueError):
        ProjPoint((2, 4))
    with pytest.raises(ValueError):
        ProjPoint((-1, 2))


def test_heights():
    assert point_height(ProjPoint.of(0, 1, 0)).h == 0
    hv = point_height(ProjPoint.of(3, 4, 12))
    assert hv.H == 12 and hv.h == pytest.approx(math.log(12), abs=1e-15)
    assert point_height(ProjPoint.of(15, 10, 6)).H == 15


def test_rat_height():
    assert rat_height(Fraction(-7, 3)).H == 7
    assert rat_height(0).h == 0


def test_log_int_huge():
    n = 3 ** 200_000
    assert log_int(n) == pytest.approx(200_000 * math.log(3), rel=1e-14)


def test_root_gap_examples():
    assert root_coeff_gap((-3, 2), 2) == pytest.approx(math.log(6))
    for d in range(1, 6):
        assert root_coeff_gap((0,) * d, 0) == pytest.approx(d * math.log(2))
    assert root_coeff_bound_holds((-3, 2), 2)


def test_root_gap_not_a_root():
    with pytest.raises(NotARoot):
        root_coeff_gap((-3, 2), 3)
