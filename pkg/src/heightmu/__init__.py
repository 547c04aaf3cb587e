"""Heights of points and maps over Q, height expansion of rational maps, and K3 dynamics."""

from .errors import HeightMuError
from .rational import HeightValue, ProjPoint, normalize_point, point_height, rat_height, root_coeff_gap
from .poly import HomogPoly, RationalMap, evaluate_map, map_height, parse_map, render_map
from .classify import Status, Verdict, common_factor_test, dominance_test, morphism_test
from .dynamics import (
    AffineAutomorphism,
    ExclusionSet,
    backward_mu_sequence,
    canonical_height,
    estimate_mu,
    forward_orbit,
    kawaguchi_survey,
)

__version__ = "0.1.0"
