"""VC-dimension bounds and verified shattering witnesses for 1NN(d, m).

1NN(d, m) is the family of nearest-neighbour classifiers on R^d with a
reference set of m labelled prototypes. This package evaluates the known
lower and upper bounds on its VC dimension, builds the explicit planar
point arrangements that realise the lower bounds, verifies the shattering
exhaustively over all labelings, and complements the constructions with a
randomized search certifier.
"""

from .bounds import (
    BoundsReport,
    compute_bounds,
    lambert_wm1,
    lower_bound,
    sample_size_estimate,
    shatter_coefficient_bound,
    shatter_q,
    upper_bound_loose,
    upper_bound_tight,
)
from .classifier import (
    DEFAULT_MU,
    LabeledPrototypeSet,
    Labeling,
    classify,
    evaluate_margins,
    realizes,
)
from .constructions import (
    Arrangement,
    gunn_arrangement,
    gunn_shatter,
    polytope_to_prototypes,
    takacs_arrangement,
    takacs_shatter,
)
from .geometry import (
    BOUNDARY,
    DEFAULT_TOL,
    INSIDE,
    OUTSIDE,
    ConvexPolytope,
    Halfspace,
    contains,
    reflect,
    regular_polygon_vertices,
)
from .verification import (
    SearchConfig,
    ShatterCertificate,
    search_lower_bound,
    shatter_coefficient_exhaustive,
    verify_shattering,
)

__version__ = "0.1.0"

__all__ = [
    "Arrangement",
    "BoundsReport",
    "BOUNDARY",
    "ConvexPolytope",
    "DEFAULT_MU",
    "DEFAULT_TOL",
    "Halfspace",
    "INSIDE",
    "LabeledPrototypeSet",
    "Labeling",
    "OUTSIDE",
    "SearchConfig",
    "ShatterCertificate",
    "classify",
    "compute_bounds",
    "contains",
    "evaluate_margins",
    "gunn_arrangement",
    "gunn_shatter",
    "lambert_wm1",
    "lower_bound",
    "polytope_to_prototypes",
    "realizes",
    "reflect",
    "regular_polygon_vertices",
    "sample_size_estimate",
    "search_lower_bound",
    "shatter_coefficient_bound",
    "shatter_coefficient_exhaustive",
    "shatter_q",
    "takacs_arrangement",
    "takacs_shatter",
    "upper_bound_loose",
    "upper_bound_tight",
    "verify_shattering",
]
