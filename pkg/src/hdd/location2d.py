"""Logarithmic-time depth queries in the plane.

The arrangement of the family lines is cut into vertical slabs at the
x-coordinates of all line crossings. Inside a slab the non-vertical lines
never cross, so they are totally ordered bottom to top and the depth on the
region between the ``r``-th and ``r+1``-th line is one affine function. Each
slab stores its line order plus the prefix-summed coefficients of that affine
function for every rank; a query is two binary searches and one dot product.

Vertical lines do not affect the order inside a slab and are kept in a side
array sorted by x.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from .depth import CellCoefficients, depth_direct
from .errors import OnLineError
from .geometry import HyperplaneFamily, PointSet, enumerate_family

ON_LINE_EPS = 1e-12
SLAB_MERGE_EPS = 1e-12
VERTEX_MERGE_EPS = 1e-9
PARALLEL_EPS = 1e-12
# lines with |w_y| at or below this are treated as vertical
VERTICAL_EPS = 1e-12
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class SlabIndex:
    family: HyperplaneFamily
    # distinct non-vertical lines as (A, B, C) with B > 0: q is above iff A x + B y + C > 0
    lines: np.ndarray
    weights: np.ndarray
    slab_bounds: np.ndarray
    order: np.ndarray  # (slabs, L) line ids bottom to top
    coef: np.ndarray  # (slabs, L + 1, 3) affine (a_x, a_y, b) per rank, non-vertical part
    vertical_x: np.ndarray
    vertical_weights: np.ndarray
    face_count: int
    # plain-Python mirrors for the scalar query path
    _bounds: list = field(repr=False, default_factory=list)
    _rows: list = field(repr=False, default_factory=list)
    _abc: tuple = field(repr=False, default=((), (), ()))
    _vx: list = field(repr=False, default_factory=list)
    _vcum: tuple = field(repr=False, default=((), ()))

    @property
    def n_slabs(self) -> int:
        return self.order.shape[0]

    @property
    def n_lines(self) -> int:
        """Distinct lines, vertical ones included."""
        return self.lines.shape[0] + self.vertical_x.shape[0]


def _merge_coincident(H: HyperplaneFamily):
    """Collapse coincident lines into (normal, offset, multiplicity) triples."""
    if not len(H):
        return np.zeros((0, 2)), np.zeros(0), np.zeros(0, dtype=int)
    W, B = H.normals, H.offsets
    order = np.lexsort((B, W[:, 1], W[:, 0]))
    normals, offsets, weights = [], [], []
    for i in order:
        w, b = W[i], B[i]
        if normals:
            w0, b0 = normals[-1], offsets[-1]
            if np.all(np.abs(w - w0) <= 1e-12) and abs(b - b0) <= 1e-12 * (1.0 + abs(b0)):
                weights[-1] += 1
                continue
        normals.append(w)
        offsets.append(b)
        weights.append(1)
    return np.array(normals), np.array(offsets), np.array(weights, dtype=int)


def _pairwise_crossings(W: np.ndarray, B: np.ndarray):
    """Intersection points of all non-parallel pairs of lines ``W x + B = 0``."""
    i, j = np.triu_indices(W.shape[0], k=1)
    det = W[i, 0] * W[j, 1] - W[i, 1] * W[j, 0]
    ok = np.abs(det) > PARALLEL_EPS
    i, j, det = i[ok], j[ok], det[ok]
    x = (B[j] * W[i, 1] - B[i] * W[j, 1]) / det
    y = (B[i] * W[j, 0] - B[j] * W[i, 0]) / det
    return i, j, x, y


def _chain_groups(values: np.ndarray, eps: float):
    """Split sorted values into runs whose consecutive gaps are within tolerance."""
    if values.size == 0:
        return []
    gaps = np.diff(values) > eps * (1.0 + np.abs(values[1:]))
    starts = np.concatenate(([0], np.nonzero(gaps)[0] + 1))
    ends = np.concatenate((starts[1:], [values.size]))
    return list(zip(starts.tolist(), ends.tolist()))


def _face_count(W: np.ndarray, B: np.ndarray) -> int:
    """Faces of the arrangement of distinct lines, by the Euler relation.

    ``F = 1 + m + sum_v (m_v - 1)`` where ``m_v`` is the number of lines
    through vertex ``v``.
    """
    m = W.shape[0]
    i, j, x, y = _pairwise_crossings(W, B)
    total = 0
    order = np.argsort(x, kind="stable")
    for s, e in _chain_groups(x[order], VERTEX_MERGE_EPS):
        sub = order[s:e]
        sub = sub[np.argsort(y[sub], kind="stable")]
        for s2, e2 in _chain_groups(y[sub], VERTEX_MERGE_EPS):
            members = sub[s2:e2]
            total += len(set(i[members].tolist()) | set(j[members].tolist())) - 1
    return 1 + m + total


def build_index(P: PointSet | HyperplaneFamily) -> SlabIndex:
    """Preprocess a planar point set (or its line family) for depth queries."""
    H = P if isinstance(P, HyperplaneFamily) else enumerate_family(P)
    if H.dim != 2:
        raise ValueError("build_index needs a 2-d point set")
    W, Boff, wt = _merge_coincident(H)
    face_count = _face_count(W, Boff)

    vertical = np.abs(W[:, 1]) <= VERTICAL_EPS if len(W) else np.zeros(0, dtype=bool)
    # vertical lines have canonical normal (1, 0): x = -b
    vx = -Boff[vertical] / W[vertical, 0]
    vw = wt[vertical]
    vorder = np.argsort(vx, kind="stable")
    vx, vw = vx[vorder], vw[vorder]

    Wn, Bn, wn = W[~vertical], Boff[~vertical], wt[~vertical]
    sigma = np.sign(Wn[:, 1])
    abc = np.column_stack((sigma * Wn[:, 0], sigma * Wn[:, 1], sigma * Bn))
    L = abc.shape[0]

    _, _, xs, _ = _pairwise_crossings(Wn, Bn)
    xs = np.sort(xs)
    bounds = np.array([xs[s] for s, _ in _chain_groups(xs, SLAB_MERGE_EPS)])
    if bounds.size == 0:
        reps = np.zeros(1)
    else:
        mids = (bounds[:-1] + bounds[1:]) / 2.0
        reps = np.concatenate(([bounds[0] - 1.0], mids, [bounds[-1] + 1.0]))
    K = reps.size

    weighted = abc * wn[:, None]
    total = weighted.sum(axis=0)
    order = np.empty((K, L), dtype=np.int32)
    coef = np.empty((K, L + 1, 3))
    for s in range(0, K, _CHUNK):
        xr = reps[s:s + _CHUNK, None]
        ys = -(abc[:, 0] * xr + abc[:, 2]) / abc[:, 1]
        o = np.argsort(ys, axis=1, kind="stable")
        order[s:s + _CHUNK] = o
        pre = np.zeros((o.shape[0], L + 1, 3))
        np.cumsum(weighted[o], axis=1, out=pre[:, 1:])
        # lines below q contribute +(A,B,C), lines above contribute -(A,B,C)
        coef[s:s + _CHUNK] = 2.0 * pre - total
    order.setflags(write=False)
    coef.setflags(write=False)

    return SlabIndex(
        family=H,
        lines=abc,
        weights=wn,
        slab_bounds=bounds,
        order=order,
        coef=coef,
        vertical_x=vx,
        vertical_weights=vw,
        face_count=face_count,
        _bounds=bounds.tolist(),
        _rows=order.tolist(),
        _abc=(abc[:, 0].tolist(), abc[:, 1].tolist(), abc[:, 2].tolist()),
        _vx=vx.tolist(),
        _vcum=(
            np.concatenate(([0.0], np.cumsum(vw))).tolist(),
            np.concatenate(([0.0], np.cumsum(vw * vx))).tolist(),
        ),
    )


def _locate(idx: SlabIndex, x: float, y: float):
    """Slab, rank and number of comparisons made; raises OnLineError."""
    bounds = idx._bounds
    k = bisect.bisect_right(bounds, x)
    comparisons = max(1, len(bounds).bit_length())
    row = idx._rows[k]
    A, B, C = idx._abc
    lo, hi = 0, len(row)
    while lo < hi:
        mid = (lo + hi) >> 1
        i = row[mid]
        comparisons += 1
        if A[i] * x + B[i] * y + C[i] > 0.0:
            lo = mid + 1
        else:
            hi = mid
    for r in (lo - 1, lo):
        if 0 <= r < len(row):
            i = row[r]
            if abs(A[i] * x + B[i] * y + C[i]) <= ON_LINE_EPS:
                raise OnLineError(f"query ({x}, {y}) lies on a line")
    vx = idx._vx
    if vx:
        c = bisect.bisect_left(vx, x)
        for r in (c - 1, c):
            if 0 <= r < len(vx) and abs(x - vx[r]) <= ON_LINE_EPS:
                raise OnLineError(f"query ({x}, {y}) lies on a vertical line")
    return k, lo, comparisons


def locate(idx: SlabIndex, q) -> tuple[int, int]:
    """(slab, rank): the slab containing ``q`` and the number of lines below it."""
    k, r, _ = _locate(idx, float(q[0]), float(q[1]))
    return k, r


def _vertical_part(idx: SlabIndex, x: float):
    vx = idx._vx
    if not vx:
        return 0.0, 0.0
    cw, cwx = idx._vcum
    c = bisect.bisect_left(vx, x)
    w_below, w_above = cw[c], cw[-1] - cw[c]
    s_below, s_above = cwx[c], cwx[-1] - cwx[c]
    return w_below - w_above, s_above - s_below


def coefficients_at(idx: SlabIndex, q) -> CellCoefficients:
    """Affine depth coefficients of the open cell containing ``q``."""
    x, y = float(q[0]), float(q[1])
    k, r, _ = _locate(idx, x, y)
    ax, ay, b = idx.coef[k, r].tolist()
    vax, vb = _vertical_part(idx, x)
    return CellCoefficients(np.array([ax + vax, ay]), b + vb)


def query_depth(idx: SlabIndex, q) -> float:
    """Depth of ``q``; falls back to direct summation on arrangement lines."""
    x, y = float(q[0]), float(q[1])
    try:
        k, r, _ = _locate(idx, x, y)
    except OnLineError:
        return depth_direct((x, y), idx.family)
    ax, ay, b = idx.coef[k, r].tolist()
    vax, vb = _vertical_part(idx, x)
    return (ax + vax) * x + ay * y + b + vb
