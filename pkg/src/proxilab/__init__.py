"""Best proximity points of cyclic contractions in geodesic model spaces."""

from .errors import (ConvergenceError, InputError, MembershipError, ProxilabError,
                     UnsupportedError)
from .properties import nonuniform_diam_limit, uc_check, wuc_check, wwuc_check
from .regions import Ball, PointCloud, Polytope, Segment, region_from_json, translate
from .semimetric import (SemimetricContext, cat0_ball_identity_check, compatibility_profile,
                         d1_eval, flat_quadrilateral_check, lift_map, semimetric_picard,
                         verify_d1_contraction, verify_domination, verify_semimetric_axioms)
from .setgeom import (chebyshev_for_proximinal, detect_parallel_translation, diameter,
                      extract_proximinal_core, metric_projection, point_set_distance,
                      set_pair_distance)
from .solver import (AffinePiece, CyclicMap, IterationTrace, SolverConfig, orbit_bound,
                     rate_estimate, solve_best_proximity, uniqueness_probe,
                     verify_cyclic_contraction, verify_suzuki_condition)
from .spaces import (Euclidean, Hyperboloid, StarTree, convexity_modulus, distance,
                     geodesic_point, midpoint, pointwise_modulus_estimate, space_from_json)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
