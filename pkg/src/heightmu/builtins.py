"""Named example maps with the open sets their height behaviour is stated on."""

from .dynamics import AffineAutomorphism, ExclusionSet
from .poly import parse_map, parse_polys


def henon(c=1):
    """(x, y) -> (y, y^2 + c - x) on the chart X0 = 1, with its inverse."""
    fwd = parse_map(f"X0^2; X2*X0; X2^2 + {c}*X0^2 - X1*X0")
    inv = parse_map(f"X0^2; X1^2 + {c}*X0^2 - X2*X0; X1*X0")
    # Z(fwd) = [0:1:0], Z(inv) = [0:0:1]: both zero-dimensional.
    return AffineAutomorphism(fwd, inv, dim_z_fwd=0, dim_z_inv=0)


def inversion(n):
    """[X0^-1, ..., Xn^-1], cleared of denominators (degree n)."""
    coords = []
    for i in range(n + 1):
        coords.append("*".join(f"X{j}" for j in range(n + 1) if j != i))
    return parse_map("; ".join(coords))


def _all_coords(n):
    return "*".join(f"X{j}" for j in range(n + 1))


# name -> (map, exclusion text, reference mu or None)
def get(name):
    if name == "intro-xyz":
        phi = parse_map("X0^2; X1^2; X0*X2")
        return phi, ExclusionSet(tuple(parse_polys("X0", 2))), 1.0
    if name in ("inversion-n2", "inversion-n3"):
        n = int(name[-1])
        phi = inversion(n)
        return phi, ExclusionSet(tuple(parse_polys(_all_coords(n), n))), 1.0 / n
    if name in ("henon-c1", "henon-c3"):
        A = henon(int(name[-1]))
        return A.fwd, ExclusionSet(tuple(parse_polys("X0", 2))), 1.0 / A.d2
    if name == "power-d2":
        return parse_map("X0^2; X1^2; X2^2"), ExclusionSet(), 2.0
    raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(NAMES)}")


def automorphism(name):
    if name in ("henon-c1", "henon-c3"):
        return henon(int(name[-1]))
    raise KeyError(f"{name!r} is not a built-in affine automorphism")


NAMES = ("intro-xyz", "inversion-n2", "inversion-n3", "henon-c1", "henon-c3", "power-d2")
