"""Rotationally symmetric translating solitons of concave fully nonlinear
curvature flows: speed functions and their derivative pinching, curvature
cones, profile ODEs with sub/super-solution barriers, a Picard fixed-point
construction, and numerical verification of the convexity estimate
lambda_1 >= H - alpha*gamma."""

from .cones import (ConeSpec, EmptyConeError, cone_separation, contains, cyl_ray,
                    gamma_alpha_delta, gamma_k, two_convex, uniform_two_convex)
from .errors import (ContractionFailureError, DegenerateEigenvalueError, DomainError,
                     ParameterError)
from .picard import (GridFunction, PicardResult, domain_radius, initial_iterate,
                     lipschitz_radius, operator_T, picard_solve)
from .profiles import (Barrier, ProfileSolution, barrier, closed_form_cyl,
                       closed_form_v, cyl_height, harmonic_rhs, integrate_profile,
                       sigma_rhs, solve_cyl_profile, startup_slope)
from .rotgeom import (CylJet, RadialJet, cylinder_curvatures, graph_curvatures,
                      soliton_residual, tilt)
from .speeds import (CurvatureVector, PropertyReport, SpeedDerivatives, SpeedSpec,
                     check_properties, eval_derivatives, eval_sigma_k, eval_speed,
                     harmonic_pairs, hessian_quadratic_form, in_support, product,
                     quotient, sample_interior, sigma_k_root)
from .verifier import (CheckEntry, PinchingEstimate, VerificationReport,
                       check_barriers, check_convexity_estimate,
                       check_sigma2_cylinder, check_soliton,
                       estimate_pinching_constants, fit_convexity_params)

__version__ = "0.1.0"
