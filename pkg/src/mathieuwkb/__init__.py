"""Radial Mathieu functions via Bessel-product series and uniform WKB,
with Helmholtz Green functions for slit and strip scattering.

The package evaluates angular and radial Mathieu functions around
theta = (k a / 4)^2 ~ 1, the regime where the wavelength is comparable to
the obstacle, dispatching per mode between the exact Bessel-product
series and barrier/turning-point WKB formulas, and sums the resulting
mode series into scattering Green functions and far-field patterns.
"""

from .angular_basis import (CoefficientTable, SymmetryClass, angular_eval,
                            build_tables)
from .errors import (CancellationWarning, ConfigurationError, DomainError,
                     FallbackWarning, MathieuError, PrecisionError,
                     SingularityError, TruncationError, TruncationWarning)
from .evaluator import (Branch, EvalResult, EvaluatorConfig, DEFAULT_CONFIG,
                        classify, evaluate, first_kind_ratio, radius_map,
                        residual)
from .radial_series import (Prefactors, RadialKindValue, bessel_product_sum,
                            me1_series, ne1_series, prefactors)
from .scattering import (BoundaryCondition, EllipticPoint, FieldGrid,
                         Geometry, GreenProblem, far_field, fraunhofer,
                         green, green_grid, green_slit, green_strip,
                         half_plane_identity, to_cartesian, to_elliptic)
from .special_functions import (AiryValue, KernelAccuracy, airy, bessel_j,
                                bessel_j_batch, bessel_y_batch, hankel1,
                                hankel1_batch)
from .wkb import (ActionContext, ActionValue, DemoRegime, Regime,
                  WkbDemoProblem, action, demo_cosh_well, demo_regime,
                  make_action_context, wkb_inside, wkb_turning)

__version__ = "0.1.0"

__all__ = [
    "ActionContext", "ActionValue", "AiryValue", "BoundaryCondition",
    "Branch", "CancellationWarning", "CoefficientTable", "ConfigurationError",
    "DEFAULT_CONFIG", "DemoRegime", "DomainError", "EllipticPoint",
    "EvalResult", "EvaluatorConfig", "FallbackWarning", "FieldGrid",
    "Geometry", "GreenProblem", "KernelAccuracy", "MathieuError",
    "Prefactors", "PrecisionError", "RadialKindValue", "Regime",
    "SingularityError", "SymmetryClass", "TruncationError",
    "TruncationWarning", "WkbDemoProblem", "action", "airy", "angular_eval",
    "bessel_j", "bessel_j_batch", "bessel_product_sum", "bessel_y_batch",
    "build_tables", "classify", "demo_cosh_well", "demo_regime", "evaluate",
    "far_field", "first_kind_ratio", "fraunhofer", "green", "green_grid",
    "green_slit", "green_strip", "half_plane_identity", "hankel1",
    "hankel1_batch", "make_action_context", "me1_series", "ne1_series",
    "prefactors", "radius_map", "residual", "to_cartesian", "to_elliptic",
    "wkb_inside", "wkb_turning",
]
