"""Approximate planar median by half-plane elimination and square bisection.

Each probe line ``l`` either certifies that the deepest point on it is a
global median, or proves that one open side of ``l`` holds no median. Probing
the two center lines of a square therefore keeps one quadrant, and ``m``
rounds shrink the bounding square of the input by ``2^m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .depth import depth_direct, directional_derivative
from .errors import HDDError, NoIntersectionsError, UnboundedError
from .geometry import Flat1, HyperplaneFamily, PointSet, _orient, bounding_square, enumerate_family, family_line
from .median import PARALLEL_EPS, min_on_line

DEPTH_EPS = 1e-12
SLOPE_EPS = 1e-9
ON_LINE_EPS = 1e-9


class ConsistencyError(HDDError):
    """Both neighbours of the line minimum are deeper, contradicting convexity."""


class Outcome(enum.Enum):
    HALF_PLANE_RETAINED = "HalfPlaneRetained"
    EXACT_MEDIAN_FOUND = "ExactMedianFound"


@dataclass(frozen=True, eq=False)
class HalfPlane:
    """Closed half-plane ``{x : normal . (x - point) >= 0}``."""

    point: np.ndarray
    normal: np.ndarray

    def contains(self, x, slack: float = 0.0) -> bool:
        return float(np.dot(self.normal, np.asarray(x) - self.point)) >= -slack


@dataclass(frozen=True, eq=False)
class Witness:
    i_min: np.ndarray
    i_min_depth: float
    h_min: int
    # neighbours along h_min on the +normal (u) and -normal (d) side of the probe
    i_u: Optional[np.ndarray]
    i_u_depth: Optional[float]
    i_d: Optional[np.ndarray]
    i_d_depth: Optional[float]
    reason: str = ""


@dataclass(frozen=True, eq=False)
class EliminationOutcome:
    kind: Outcome
    witness: Witness
    retained: Optional[HalfPlane] = None

    @property
    def median_point(self) -> Optional[np.ndarray]:
        return self.witness.i_min if self.kind is Outcome.EXACT_MEDIAN_FOUND else None

    @property
    def depth(self) -> Optional[float]:
        return self.witness.i_min_depth if self.kind is Outcome.EXACT_MEDIAN_FOUND else None


@dataclass(frozen=True)
class SearchSquare:
    center: tuple[float, float]
    half_side: float
    steps_done: int

    def contains(self, x, slack: float = 0.0) -> bool:
        return all(abs(float(x[k]) - self.center[k]) <= self.half_side + slack for k in range(2))


@dataclass(frozen=True, eq=False)
class ApproxResult:
    point: np.ndarray
    error_bound: float
    exact: bool
    steps: int
    depth: float
    trace: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.point, self.error_bound, self.exact))


def error_bound(a: float, m: int) -> float:
    """Half diagonal of the square left after ``m`` bisection rounds of side ``a``."""
    if a < 0 or m < 0:
        raise ValueError("side and step count must be non-negative")
    return a * math.sqrt(2.0) / 2.0 ** (m + 1)


def _neighbours(H: HyperplaneFamily, h_min: int, i_min: np.ndarray):
    """Closest family crossings on ``h_min`` before and after ``i_min``."""
    line = family_line(H, (h_min,))
    alpha = H.normals @ line.direction
    beta = H.normals @ line.base + H.offsets
    ok = np.abs(alpha) > PARALLEL_EPS
    s = -beta[ok] / alpha[ok]
    s0 = float(np.dot(i_min - line.base, line.direction))
    tol = ON_LINE_EPS * (1.0 + abs(s0))
    after = s[s > s0 + tol]
    before = s[s < s0 - tol]
    nxt = line.at(float(after.min())) if after.size else None
    prv = line.at(float(before.max())) if before.size else None
    return line.direction, nxt, prv


def _worst_direction(q, H: HyperplaneFamily, extra_dirs):
    """Most negative one-sided slope over the kink directions at ``q``.

    The slope map ``u -> D'(q; u)`` is linear between directions parallel to
    hyperplanes through ``q``, so those directions (and their normals, which
    matter when only one line passes through ``q``) cover every case.
    """
    tol = ON_LINE_EPS * (1.0 + float(np.linalg.norm(q)))
    r = H.normals @ q + H.offsets
    through = np.nonzero(np.abs(r) <= tol)[0]
    dirs = list(extra_dirs)
    for i in through:
        w = H.normals[i]
        dirs.extend((w, np.array([-w[1], w[0]])))
    worst, worst_u = math.inf, None
    for u in dirs:
        for sgn in (1.0, -1.0):
            g = directional_derivative(q, sgn * u, H, tol=tol)
            if g < worst:
                worst, worst_u = g, sgn * u
    return worst, worst_u


def eliminate_halfplane(l_a: Flat1, H: HyperplaneFamily) -> EliminationOutcome:
    """Decide which side of the probe line ``l_a`` can still hold a median."""
    if H.dim != 2:
        raise ValueError("half-plane elimination is planar only")
    direction = _orient(np.asarray(l_a.direction, dtype=float))
    probe = Flat1(np.asarray(l_a.base, dtype=float), direction, l_a.generators)
    try:
        res = min_on_line(probe, H)
    except UnboundedError:
        raise NoIntersectionsError("probe line is parallel to every family line") from None
    i_min, d_min, h_min = res.point, res.depth, res.breakpoint_hyperplane
    n_a = np.array([-direction[1], direction[0]])

    v, nxt, prv = _neighbours(H, h_min, i_min)
    if float(np.dot(v, n_a)) > 0:
        i_u, i_d = nxt, prv
    else:
        i_u, i_d = prv, nxt
    v_u = v if float(np.dot(v, n_a)) > 0 else -v
    d_u = depth_direct(i_u, H) if i_u is not None else None
    d_d = depth_direct(i_d, H) if i_d is not None else None

    dtol = DEPTH_EPS * (1.0 + abs(d_min))
    gtol = SLOPE_EPS * (1.0 + len(H))
    on_tol = ON_LINE_EPS * (1.0 + float(np.linalg.norm(i_min)))

    def descends(neighbour_depth, toward):
        if neighbour_depth is not None:
            return neighbour_depth < d_min - dtol
        return directional_derivative(i_min, toward, H, tol=on_tol) < -gtol

    up, down = descends(d_u, v_u), descends(d_d, -v_u)

    def witness(reason):
        return Witness(i_min, d_min, h_min, i_u, d_u, i_d, d_d, reason)

    if up and down:
        raise ConsistencyError("both neighbours of the line minimum are lower")
    if up or down:
        inward = n_a if up else -n_a
        return EliminationOutcome(
            Outcome.HALF_PLANE_RETAINED, witness("neighbour"), HalfPlane(i_min, inward)
        )

    worst, u = _worst_direction(i_min, H, (direction, n_a))
    if worst >= -gtol:
        return EliminationOutcome(Outcome.EXACT_MEDIAN_FOUND, witness("certified"))
    # i_min is a vertex where the neighbour test is inconclusive; follow the descent
    inward = n_a if float(np.dot(u, n_a)) > 0 else -n_a
    return EliminationOutcome(
        Outcome.HALF_PLANE_RETAINED, witness("descent"), HalfPlane(i_min, inward)
    )


def _probe(center, axis: int) -> Flat1:
    direction = np.array([0.0, 1.0]) if axis == 0 else np.array([1.0, 0.0])
    return Flat1(np.array(center, dtype=float), direction)


def median_approx(P: PointSet | HyperplaneFamily, m: int, square=None) -> ApproxResult:
    """Center of the square left after ``m`` bisection rounds.

    ``square`` (center, side) defaults to the bounding square of ``P``; it is
    required when a family is passed instead of a point set. Returns early
    with ``exact=True`` and a zero error bound when a probe line hits a
    certified median.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if isinstance(P, HyperplaneFamily):
        if square is None:
            raise ValueError("square is required with a hyperplane family")
        H = P
    else:
        H = enumerate_family(P)
        if square is None:
            square = bounding_square(P)
    if H.dim != 2:
        raise ValueError("median_approx is planar only")
    center, side = square
    center = np.array(center, dtype=float)
    half = side / 2.0
    trace = [SearchSquare((float(center[0]), float(center[1])), half, 0)]
    for step in range(m):
        shift = np.zeros(2)
        for axis in (0, 1):
            out = eliminate_halfplane(_probe(center, axis), H)
            if out.kind is Outcome.EXACT_MEDIAN_FOUND:
                return ApproxResult(out.median_point, 0.0, True, step, out.depth, trace)
            shift[axis] = half / 2.0 if out.retained.normal[axis] > 0 else -half / 2.0
        center = center + shift
        half /= 2.0
        trace.append(SearchSquare((float(center[0]), float(center[1])), half, step + 1))
    return ApproxResult(center, error_bound(side, m), False, m, depth_direct(center, H), trace)
