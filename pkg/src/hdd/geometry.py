"""Points, hyperplanes spanned by point tuples, and their intersections.

Hyperplanes are stored in a canonical form ``w . x + b = 0`` with ``|w| = 1``
and the first non-negligible component of ``w`` positive, so the distance to a
hyperplane is a single dot product and coincident hyperplanes compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateError, InvalidPointSet, SingularError

# components of a unit normal below this are treated as zero when fixing the sign
ORIENT_EPS = 1e-12
# relative size of the spanned volume below which a tuple is affinely dependent
DEGENERATE_EPS = 1e-12
# smallest singular value (of unit normals) below which a system is singular
SINGULAR_EPS = 1e-12
ON_FLAT_EPS = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointSet:
    """The input set: ``n`` points in ``R^dim`` stored as an ``(n, dim)`` array."""

    points: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            # bare list of scalars is a 1-d sample
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise InvalidPointSet("points must be a 2-d array of shape (n, d)")
        dim = self.dim or pts.shape[1]
        if dim < 1:
            raise InvalidPointSet("dimension must be at least 1")
        if pts.shape[1] != dim:
            raise InvalidPointSet(f"points have {pts.shape[1]} coordinates, expected {dim}")
        if not np.all(np.isfinite(pts)):
            raise InvalidPointSet("coordinates must be finite")
        if pts.shape[0] < dim:
            raise InvalidPointSet(f"need at least d={dim} points, got {pts.shape[0]}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", dim)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def __len__(self):
        return self.n


@dataclass(frozen=True, eq=False)
class Hyperplane:
    normal: np.ndarray
    offset: float
    generators: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def evaluate(self, q) -> float:
        """Signed distance ``w . q + b``."""
        return float(np.dot(self.normal, q) + self.offset)

    def key(self, digits: int = 12) -> tuple:
        """Rounded canonical coefficients, usable for grouping coincident planes."""
        return tuple(round(float(v), digits) + 0.0 for v in (*self.normal, self.offset))


@dataclass(frozen=True, eq=False)
class HyperplaneFamily:
    """All hyperplanes spanned by d-tuples of a point set, in tuple order."""

    members: tuple[Hyperplane, ...]
    dim: int
    skipped_degenerate: int = 0
    normals: np.ndarray = field(init=False, repr=False)
    offsets: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.members:
            normals = np.stack([h.normal for h in self.members])
            offsets = np.array([h.offset for h in self.members])
        else:
            normals = np.zeros((0, self.dim))
            offsets = np.zeros(0)
        object.__setattr__(self, "normals", _frozen(normals))
        object.__setattr__(self, "offsets", _frozen(offsets))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i) -> Hyperplane:
        return self.members[i]


@dataclass(frozen=True, eq=False)
class Flat1:
    """A line ``base + t * direction``; ``generators`` index family members."""

    base: np.ndarray
    direction: np.ndarray
    generators: tuple[int, ...] = ()

    def at(self, t: float) -> np.ndarray:
        return self.base + t * self.direction

    @property
    def dim(self) -> int:
        return self.base.shape[0]


def _orient(v: np.ndarray) -> np.ndarray:
    for c in v:
        if abs(c) > ORIENT_EPS:
            return -v if c < 0 else v
    return v


def _cofactor_normal(rows: np.ndarray) -> np.ndarray:
    """Vector orthogonal to the ``d-1`` rows of a ``(d-1, d)`` matrix.

    Its length is the (d-1)-volume spanned by the rows.
    """
    k, d = rows.shape
    if d == 1:
        return np.ones(1)
    if d == 2:
        return np.array([-rows[0, 1], rows[0, 0]])
    if d == 3:
        return np.cross(rows[0], rows[1])
    cols = np.arange(d)
    return np.array([(-1) ** j * np.linalg.det(rows[:, cols != j]) for j in range(d)])


def hyperplane_from_points(pts, generators: Sequence[int] = ()) -> Hyperplane:
    """Canonical hyperplane through ``d`` points of ``R^d``.

    Raises :class:`DegenerateError` when the points are affinely dependent.
    """
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1]:
        raise ValueError(f"need exactly d points in R^d, got shape {pts.shape}")
    d = pts.shape[1]
    # lexicographic order makes the result independent of input order
    pts = pts[np.lexsort(pts.T[::-1])]
    rows = pts[1:] - pts[0]
    raw = _cofactor_normal(rows)
    vol = float(np.linalg.norm(raw))
    bound = float(np.prod(np.linalg.norm(rows, axis=1))) if d > 1 else 1.0
    if bound == 0.0 or vol <= DEGENERATE_EPS * bound:
        raise DegenerateError("points are affinely dependent")
    w = _orient(raw / vol)
    b = -float(np.dot(pts[0], w))
    return Hyperplane(_frozen(w), b, tuple(sorted(generators)))


def enumerate_family(P: PointSet) -> HyperplaneFamily:
    """Every hyperplane spanned by a d-tuple of ``P``.

    Tuples are visited in lexicographic index order. Affinely dependent tuples
    are counted in ``skipped_degenerate``; coincident hyperplanes coming from
    different tuples are all kept.
    """
    members = []
    skipped = 0
    for idx in itertools.combinations(range(P.n), P.dim):
        try:
            members.append(hyperplane_from_points(P.points[list(idx)], idx))
        except DegenerateError:
            skipped += 1
    return HyperplaneFamily(tuple(members), P.dim, skipped)


def distance(q, h: Hyperplane) -> float:
    return abs(h.evaluate(q))


def _check_on(x, hs, what):
    for h in hs:
        if abs(h.evaluate(x)) > ON_FLAT_EPS * (1.0 + float(np.linalg.norm(x))):
            raise SingularError(f"{what} is numerically ill-conditioned")


def intersect(hs: Sequence[Hyperplane]) -> np.ndarray:
    """The single point common to ``d`` hyperplanes in ``R^d``."""
    if not hs:
        raise ValueError("need at least one hyperplane")
    d = hs[0].dim
    if len(hs) != d:
        raise ValueError(f"need exactly {d} hyperplanes, got {len(hs)}")
    A = np.stack([h.normal for h in hs])
    rhs = -np.array([h.offset for h in hs])
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= SINGULAR_EPS * max(1.0, s[0]):
        raise SingularError("normals are linearly dependent")
    x = np.linalg.solve(A, rhs)
    _check_on(x, hs, "intersection")
    return x


def line_from(hs: Sequence[Hyperplane], dim: int | None = None) -> Flat1:
    """Line common to ``d-1`` hyperplanes of ``R^d``.

    For ``d = 1`` pass an empty sequence and ``dim=1``; the result is the real line.
    """
    if dim is None:
        if not hs:
            raise ValueError("dim is required when no hyperplanes are given")
        dim = hs[0].dim
    if len(hs) != dim - 1:
        raise ValueError(f"need exactly {dim - 1} hyperplanes, got {len(hs)}")
    if dim == 1:
        return Flat1(_frozen([0.0]), _frozen([1.0]), ())
    A = np.stack([h.normal for h in hs])
    rhs = -np.array([h.offset for h in hs])
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= SINGULAR_EPS * max(1.0, s[0]):
        raise SingularError("normals are linearly dependent")
    u = _cofactor_normal(A)
    u = _orient(u / np.linalg.norm(u))
    # minimum-norm point on the line
    base = np.linalg.lstsq(A, rhs, rcond=None)[0]
    _check_on(base, hs, "line base")
    return Flat1(_frozen(base), _frozen(u), ())


def family_line(H: HyperplaneFamily, indices: Sequence[int]) -> Flat1:
    """``line_from`` on family members, recording their family indices."""
    line = line_from([H[i] for i in indices], dim=H.dim)
    return Flat1(line.base, line.direction, tuple(sorted(indices)))


def bounding_square(P: PointSet) -> tuple[np.ndarray, float]:
    """Axis-aligned square (center, side) covering the bounding box of a 2-d set."""
    if P.dim != 2:
        raise ValueError("bounding_square needs a 2-d point set")
    lo = P.points.min(axis=0)
    hi = P.points.max(axis=0)
    center = (lo + hi) / 2.0
    side = float(np.max(hi - lo))
    return center, side
