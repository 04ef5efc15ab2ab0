"""Expanding circle maps from pairing combinatorics.

Build a piecewise-affine expanding circle map from permutation data, verify
its structural conditions with certified arithmetic, construct the germ
generators and their cutting-point relations, fold the leveled word tree
into the dynamical graph, act on it by the group, and run orbit-equivalence
and surface diagnostics.
"""

from .certified import (Cmp, CirclePoint, DegenerateInterval, FieldElement,
                        Location, NumberField, PolyRoot, Scalar,
                        circle_distance, cmp_certified, in_interval)
from .combinatorics import (Combinatorics, build_combinatorics,
                            canonical_rotation_combinatorics,
                            verify_permutation_identities)
from .circle_map import (AmbiguousBranch, AmbiguousGeometry, MapError,
                         NoSolutionFound, NotMarkov, OrbitDatum, PerronData,
                         PiecewiseAffineCircleMap, ValidationFailed,
                         itinerary, map_from_dict, map_from_json, markovize,
                         perron_data, solve_even_model, validate_conditions)

__version__ = "0.1.0"
