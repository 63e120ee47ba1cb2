"""Geometrically continuous interpolating curves built from local curves and blending functions."""
from .blending import (Blend, CustomBlend, PolynomialBlend, SmoothBlend, TrigBlend, make_polynomial_blend,
                       make_smooth_blend, make_trig_blend, parse_blend, validate_blend)
from .demo import gen_demo
from .errors import CurveError
from .geometry import PointCloud, VertexTag, classify_vertex, curvature, flattenable
from .gluing import GluedCurve, glue_custom, glue_linear, glue_sphere, linear_family, sphere_family
from .local import (BoundaryRule, LocalMode, build_locals, convexity_local_line, fit_circle_arc, fit_ellipse_arc,
                    fit_parabola, local_for)
from .pipeline import JobConfig, build, run
from .redistribution import QRCurve, Redistributor, certify_contracted, certify_positive_definite, make_qr
from .verification import ParametricCurve, SmoothnessReport, Thresholds, sample, verify

__version__ = "0.1.0"
