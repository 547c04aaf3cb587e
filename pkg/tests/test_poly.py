import math

import pytest

from heightmu.errors import DegreeMismatch, InhomogeneousError, MapSyntaxError
from heightmu.builtins import inversion
from heightmu.classify import jacobian_det
from heightmu.poly import (
    HomogPoly,
    compose_maps,
    evaluate_map,
    identity_map,
    map_height,
    monomials,
    parse_map,
    parse_poly,
    render_map,
)
from heightmu.rational import ProjPoint

INTRO = "X0^2; X1^2; X0*X2"


def test_parse_intro():
    phi = parse_map(INTRO)
    assert (phi.n, phi.d, phi.N) == (2, 2, 6)
    assert render_map(phi) == INTRO


def test_parse_removes_content():
    phi = parse_map("2*X0^2; 4*X1^2; 6*X0*X2")
    assert [c for q in phi.coords for _, c in q.terms] == [1, 2, 3]


def test_parse_errors():
    with pytest.raises(DegreeMismatch):
        parse_map("X0^2; X1")
    with pytest.raises(InhomogeneousError):
        parse_map("X0^2 + X1; X1^2")
    with pytest.raises(MapSyntaxError) as e:
        parse_map("X0^2; X1^^2")
    assert e.value.pos == 9


def test_parse_whitespace_and_signs():
    assert parse_poly(" - 3 * X0 ^ 2 + X1*X0 ", 1) == parse_poly("-3*X0^2+X0*X1", 1)


def test_monomial_order():
    assert monomials(2, 2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_evaluate_examples():
    phi = parse_map(INTRO)
    assert evaluate_map(phi, ProjPoint.of(0, 2, 5)) == ProjPoint.of(0, 1, 0)
    assert evaluate_map(phi, ProjPoint.of(1, 1, 2)) == ProjPoint.of(1, 1, 2)
    assert evaluate_map(phi, ProjPoint.of(0, 0, 1)) is None


def test_map_height_examples():
    assert map_height(parse_map(INTRO)).h == 0
    assert map_height(parse_map("2*X0^2; X1^2; X0*X2")).h == pytest.approx(math.log(2))
    assert map_height(parse_map("X0^2; X0^2; X1^2")).h == 0


def test_jacobian_examples():
    assert jacobian_det(parse_map(INTRO)) == parse_poly("4*X0^2*X1", 2)
    assert not jacobian_det(parse_map("X0^2; X0^2; X1^2")).terms
    assert jacobian_det(identity_map(2)) == HomogPoly.constant(2, 1)


def test_compose_examples():
    phi = parse_map(INTRO)
    assert compose_maps(identity_map(2), phi) == phi
    assert compose_maps(phi, identity_map(2)) == phi
    inv = inversion(2)
    twice = compose_maps(inv, inv)
    expected = [parse_poly("X0*X1*X2", 2) * HomogPoly.variable(2, i) for i in range(3)]
    assert list(twice.coords) == expected


def test_render_round_trip_negative_and_large():
    phi = parse_map("-5*X0^3 + 12345678901234567890*X1*X2^2; X1^3 - X0*X1*X2; X2^3")
    assert parse_map(render_map(phi)) == phi
