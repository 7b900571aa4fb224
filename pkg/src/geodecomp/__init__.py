"""Split vector fields on R^n into gradient-like and rotational parts.

A field ``X`` splits uniquely as a gradient-like part with respect to a
nondegenerate bilinear form ``b`` plus a remainder ``u`` that is
``b``-orthogonal to the position vector.  Exact for polynomial fields,
by quadrature for black-box ones.
"""
from .conjugacy import ConjugacyConfig, HypothesisReport, PairReport, compare_pair, verify_hypotheses
from .decomp import PointDecomposition, decompose_at, eval_grad_H, eval_H, lie_derivative_identity_check
from .errors import *  # noqa: F401,F403
from .fields import NumericVectorField, fd_jacobian, linear_field, lotka_volterra, rikitake
from .flow import FlowTrace, IntegratorConfig, first_integral_drift, integrate, lie_derivative
from .geometry import (GeometricStructure, Kind, bracket_left, bracket_right, custom, euclidean,
                       eval_b, is_b_normal, is_left_bB_symmetric, is_right_bB_symmetric,
                       make_structure, minkowski, symplectic)
from .poincare import SolvabilityReport, check_gradient_like, reconstruct_potential
from .poly import Poly, PolyVectorField, parse_poly, ray_integral
from .polyfield import (ExactDecomposition, decompose_exact, hstar_minus_h, poly_gradient_like,
                        sigma_left, sigma_right)
from .quadrature import QuadratureConfig
from .specfile import SystemSpec

__version__ = "0.1.0"
