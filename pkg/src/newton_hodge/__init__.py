"""L-functions of exponential sums of one-variable rational functions over
finite fields: Newton polygons, the Hodge lower bound, Artin-Schreier curve
zeta functions and a p-adic Fredholm-determinant cross-check."""

from .finite_fields import build_field
from .lseries import l_polynomial, newton_polygon, theorem_verdict
from .polygons import Polygon, hodge_polygon, lies_over
from .rational_functions import RationalFunction, normalize, shift, validate

__all__ = [
    "Polygon", "RationalFunction", "build_field", "hodge_polygon", "l_polynomial",
    "lies_over", "newton_polygon", "normalize", "shift", "theorem_verdict", "validate",
]
