"""Exact depth medians.

Depth is convex and piecewise linear, and its minimum is attained at a point
where d family hyperplanes meet. Two searches are provided: an exhaustive one
over every d-subset of hyperplanes, and a faster one that minimizes the depth
along every line cut out by d-1 hyperplanes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .depth import depth_direct
from .errors import NoCandidatesError, SingularError, UnboundedError
from .geometry import Flat1, HyperplaneFamily, PointSet, enumerate_family, family_line, intersect

PARALLEL_EPS = 1e-12
# breakpoints closer than this (relative) are the same point on the line
BREAKPOINT_MERGE_EPS = 1e-12
# depths within this (relative) of the minimum are ties
TIE_EPS = 1e-9
POINT_MERGE_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class LineMinResult:
    t_star: float
    point: np.ndarray
    depth: float
    breakpoint_hyperplane: Optional[int]
    plateau: bool


@dataclass(frozen=True, eq=False)
class MedianResult:
    point: np.ndarray
    depth: float
    generators: tuple[int, ...]
    candidates_examined: int
    ties: list = field(default_factory=list)


def _as_family(P) -> HyperplaneFamily:
    return P if isinstance(P, HyperplaneFamily) else enumerate_family(P)


def restricted_depth(line: Flat1, H: HyperplaneFamily):
    """Slopes ``alpha`` and intercepts ``beta`` of ``t -> |alpha_i t + beta_i|``."""
    alpha = H.normals @ line.direction
    beta = H.normals @ line.base + H.offsets
    return alpha, beta


def min_on_line(line: Flat1, H: HyperplaneFamily) -> LineMinResult:
    """Leftmost minimizer of the depth restricted to ``line``.

    The restricted depth is ``sum |alpha_i| |t - t_i|`` plus a constant from
    members parallel to the line, i.e. a weighted 1-d median problem. The
    breakpoints are sorted and the slope to the right of each one is scanned
    until it stops being negative.
    """
    alpha, beta = restricted_depth(line, H)
    crossing = np.abs(alpha) > PARALLEL_EPS
    if not crossing.any():
        raise UnboundedError("line is parallel to every hyperplane")
    ids = np.nonzero(crossing)[0]
    t = -beta[ids] / alpha[ids]
    w = np.abs(alpha[ids])
    order = np.lexsort((ids, t))
    t, w, ids = t[order], w[order], ids[order]

    total = w.sum()
    tol = 1e-12 * total
    # group numerically equal breakpoints
    gaps = np.diff(t) > BREAKPOINT_MERGE_EPS * (1.0 + np.abs(t[1:]))
    starts = np.concatenate(([0], np.nonzero(gaps)[0] + 1))
    ends = np.concatenate((starts[1:], [t.size]))
    cum = np.cumsum(w)
    for s, e in zip(starts.tolist(), ends.tolist()):
        right_slope = 2.0 * cum[e - 1] - total
        if right_slope >= -tol:
            break
    group = slice(s, e)
    # the most transversal hyperplane through the minimizer
    best = s + int(np.argmax(w[group]))
    h = int(ids[best])
    t_star = float(t[best])
    point = line.at(t_star)
    plateau = abs(right_slope) <= tol and e < t.size
    return LineMinResult(t_star, point, depth_direct(point, H), h, bool(plateau))


def _lex_key(p) -> tuple:
    return tuple(float(c) for c in p)


def _reduce(candidates: Iterable[tuple[np.ndarray, float, tuple]], examined: int) -> MedianResult:
    """Minimum by depth, ties broken by the lexicographically smallest point.

    The result does not depend on the order of ``candidates``.
    """
    cands = list(candidates)
    if not cands:
        raise NoCandidatesError("no non-singular candidate point")
    best = min(c[1] for c in cands)
    tol = TIE_EPS * (1.0 + abs(best))
    tied = sorted((c for c in cands if c[1] <= best + tol), key=lambda c: _lex_key(c[0]))
    ties = []
    for p, _, _ in tied:
        scale = 1.0 + float(np.linalg.norm(p))
        if not any(np.linalg.norm(p - q) <= POINT_MERGE_EPS * scale for q in ties):
            ties.append(p)
    point, depth, gens = tied[0]
    return MedianResult(point, depth, gens, examined, ties)


def median_bruteforce(P: PointSet | HyperplaneFamily) -> MedianResult:
    """Evaluate the depth at every intersection of d family hyperplanes."""
    H = _as_family(P)
    cands = []
    examined = 0
    for sub in itertools.combinations(range(len(H)), H.dim):
        try:
            x = intersect([H[i] for i in sub])
        except SingularError:
            continue
        examined += 1
        cands.append((x, depth_direct(x, H), sub))
    return _reduce(cands, examined)


def _snap(H: HyperplaneFamily, line: Flat1, res: LineMinResult):
    """Recompute the line minimizer as an exact d-plane intersection."""
    gens = tuple(sorted((*line.generators, res.breakpoint_hyperplane)))
    if H.dim == 1:
        return res.point, res.depth, gens
    try:
        x = intersect([H[i] for i in gens])
    except SingularError:
        return res.point, res.depth, gens
    return x, depth_direct(x, H), gens


def median_exact(P: PointSet | HyperplaneFamily) -> MedianResult:
    """Minimize the depth along every line cut out by d-1 family hyperplanes.

    In one dimension there is a single such line, the real axis itself.
    """
    H = _as_family(P)
    if not len(H):
        raise NoCandidatesError("empty hyperplane family")
    cands = []
    examined = 0
    for sub in itertools.combinations(range(len(H)), H.dim - 1):
        try:
            line = family_line(H, sub)
            res = min_on_line(line, H)
        except (SingularError, UnboundedError):
            continue
        examined += 1
        cands.append(_snap(H, line, res))
    return _reduce(cands, examined)


def univariate_median(values) -> tuple[float, float]:
    """Closed interval of ordinary medians of a 1-d sample."""
    v = sorted(float(x) for x in values)
    n = len(v)
    if n % 2:
        return v[n // 2], v[n // 2]
    return v[n // 2 - 1], v[n // 2]


__all__ = [
    "LineMinResult",
    "MedianResult",
    "min_on_line",
    "median_bruteforce",
    "median_exact",
    "restricted_depth",
    "univariate_median",
]
