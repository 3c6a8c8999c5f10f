"""Hilbert geometries: distances, faces, the extended metric on the closure, shadows and
proximal limit sets of projective groups."""
from .bodies import (ConvexBody, Ellipsoid, HPolytope, HullBody, boundary_ray, box, random_interior_points,
                     regular_polygon, segment, simplex, unit_ball)
from .config import TOL, Tolerances
from .dynamics import (GroupExample, LimitSetApprox, ProximalityReport, build_simplex_diagonal_group,
                       build_triangle_reflection_group, coverage_gap, enumerate_words, limit_set_approx,
                       proximality)
from .errors import *  # noqa: F401,F403
from .faces import (ClosurePoint, ExtendedDistance, FaceDescriptor, closure_ball_sample, closure_point,
                    extended_distance, face_of, homothety)
from .facts import ProbeReport, check_face_in_scaled_ball, check_scaled_ball_in_ball, semicontinuity_probe
from .metric import Chord, apply_transform, apply_transform_body, chord, cross_ratio, hilbert_distance
from .omegaf import (OmegaFBody, StepFunctionSpec, almost_continuity_points, build_omega_f,
                     grain_of_sand_probe, vertical_face_distance)
from .projective import AffineChart, ProjPoint, ProjTransform
from .shadows import ShadowQuery, shadow_contains, shadow_lemma_probe, shadow_sample, stereographic_consistency

__version__ = "0.1.0"
