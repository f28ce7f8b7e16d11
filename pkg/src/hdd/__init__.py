"""Hyperplane distance depth (HDD) of points relative to a finite set.

The depth of ``q`` is the sum of its distances to every hyperplane spanned by
d points of the set; smaller values are more central.
"""

__version__ = "0.1.0"

from .approx2d import EliminationOutcome, Outcome, eliminate_halfplane, error_bound, median_approx
from .depth import (
    CellCoefficients,
    SignVector,
    cell_coefficients,
    depth_direct,
    depth_direct_many,
    depth_from_coefficients,
    directional_derivative,
    per_point_depth,
    sign_vector,
)
from .errors import (
    DegenerateError,
    HDDError,
    NoCandidatesError,
    NoIntersectionsError,
    OnBoundaryError,
    OnLineError,
    SingularError,
    UnboundedError,
)
from .geometry import (
    Flat1,
    Hyperplane,
    HyperplaneFamily,
    PointSet,
    bounding_square,
    distance,
    enumerate_family,
    family_line,
    hyperplane_from_points,
    intersect,
    line_from,
)
from .location2d import SlabIndex, build_index, locate, query_depth
from .median import LineMinResult, MedianResult, median_bruteforce, median_exact, min_on_line
