import pytest

from heightmu.classify import (
    Status,
    common_factor_test,
    dominance_test,
    morphism_test,
    recheck,
)
from heightmu.errors import DimensionTooLarge
from heightmu.poly import identity_map, parse_map

INTRO = parse_map("X0^2; X1^2; X0*X2")


def test_dominance():
    v = dominance_test(INTRO)
    assert v.status is Status.CERTIFIED_YES and recheck(INTRO, v)
    flat = parse_map("X0^2; X0^2; X1^2")
    v = dominance_test(flat, mode="exact")
    assert v.status is Status.CERTIFIED_NO and recheck(flat, v)
    assert dominance_test(flat, mode="random").status is Status.PROBABLY_NO
    assert dominance_test(identity_map(2)).status is Status.CERTIFIED_YES


def test_common_factor():
    v = common_factor_test(INTRO)
    assert v.status is Status.CERTIFIED_YES and recheck(INTRO, v)
    assert common_factor_test(parse_map("X0^2; X0*X1; X0*X2")).status is Status.PROBABLY_NO
    assert common_factor_test(identity_map(2)).status is Status.CERTIFIED_YES


@pytest.mark.parametrize("d", [1, 2, 3])
def test_powers_are_morphisms(d):
    phi = parse_map(f"X0^{d}; X1^{d}; X2^{d}")
    v = morphism_test(phi)
    assert v.status is Status.CERTIFIED_YES and recheck(phi, v)


def test_intro_not_morphism():
    assert morphism_test(INTRO).status is Status.PROBABLY_NO


def test_degenerate_minor_still_decided():
    # the extraneous Macaulay minor vanishes here for structural reasons
    phi = parse_map("X0^2; X0^2; X1^2")
    assert morphism_test(phi).status is Status.PROBABLY_NO
    phi = parse_map("X0^2 + X1^2; X1^2 + X2^2; X0^2 + X2^2")
    v = morphism_test(phi)
    assert v.status is Status.CERTIFIED_YES and recheck(phi, v)


def test_morphism_size_limit():
    with pytest.raises(DimensionTooLarge):
        morphism_test(parse_map("X0^4; X1^4; X2^4; X3^4"))


def test_recheck_rejects_forged_witness():
    v = dominance_test(INTRO)
    forged = type(v)(v.prop, v.status, v.confidence, {**v.witness, "point": [0, 0, 0]})
    assert not recheck(INTRO, forged)
