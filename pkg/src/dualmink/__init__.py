"""Numerical dual Minkowski problem for negative indices on polytopes."""
__version__ = "0.1.0"

from .errors import (DepthCapExceeded, DualMinkError, FormatError, InvalidBody, InvalidMeasure,
                     NonConvexData, NonFiniteIntegrand, NotApplicable, ShapeMismatch,
                     UnboundedWulff)
from .geometry import (DiscreteMeasure, Polytope, cube, hausdorff_distance, hemisphere_check,
                       hemisphere_witness, polar, radial_distance, radial_value, random_polytope,
                       regular_polygon, reverse_gauss_cell, scale_body, square, support_value,
                       vertices, wulff_shape)
from .kernels import BACKEND
from .measures import (DualCurvature, dual_curvature, dual_volume, normalized_dual_volume,
                       phi_functional, smooth_density, variational_check)
from .quadrature import QuadratureRule, build_rule, default_rule, integrate
from .solver import (SolverConfig, SolverReport, Status, bound_check, measure_from_body, residual,
                     round_trip, solve, uniqueness_probe)
from .oracle import comparison_check, mc_dual_curvature, mc_dual_volume
