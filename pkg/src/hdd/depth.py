"""Hyperplane distance depth: direct sums, sign vectors and cell coefficients.

Depth here is "lower is deeper": the sum of distances from ``q`` to every
hyperplane of the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OnBoundaryError
from .geometry import HyperplaneFamily

ZERO_BAND = 1e-12


@dataclass(frozen=True)
class SignVector:
    signs: tuple[int, ...]

    def __len__(self):
        return len(self.signs)

    @property
    def on_boundary(self) -> bool:
        return 0 in self.signs


@dataclass(frozen=True, eq=False)
class CellCoefficients:
    """Affine form ``a . q + b`` of the depth on one open cell."""

    a: np.ndarray
    b: float


def _residuals(q, H: HyperplaneFamily) -> np.ndarray:
    return H.normals @ np.asarray(q, dtype=float) + H.offsets


def depth_direct(q, H: HyperplaneFamily) -> float:
    """Sum of distances from ``q`` to all members of ``H``.

    Uses correctly rounded summation, so the result does not depend on the
    member order.
    """
    if not len(H):
        return 0.0
    return math.fsum(np.abs(_residuals(q, H)).tolist())


def depth_direct_many(qs, H: HyperplaneFamily) -> np.ndarray:
    """Vectorized :func:`depth_direct` for an ``(k, d)`` array of queries."""
    qs = np.atleast_2d(np.asarray(qs, dtype=float))
    if not len(H):
        return np.zeros(qs.shape[0])
    return np.abs(qs @ H.normals.T + H.offsets).sum(axis=1)


def sign_vector(q, H: HyperplaneFamily, tol: float = ZERO_BAND) -> SignVector:
    r = _residuals(q, H)
    s = np.where(np.abs(r) <= tol, 0, np.sign(r)).astype(int)
    return SignVector(tuple(s.tolist()))


def cell_coefficients(s: SignVector, H: HyperplaneFamily) -> CellCoefficients:
    if len(s) != len(H):
        raise ValueError(f"sign vector has {len(s)} entries, family has {len(H)}")
    if s.on_boundary:
        raise OnBoundaryError("sign vector has a zero entry")
    g = np.array(s.signs, dtype=float)
    a = g @ H.normals if len(H) else np.zeros(H.dim)
    b = math.fsum((g * H.offsets).tolist())
    return CellCoefficients(a, b)


def depth_from_coefficients(q, c: CellCoefficients) -> float:
    return float(np.dot(c.a, q) + c.b)


def per_point_depth(q, p_index: int, H: HyperplaneFamily) -> float:
    """Depth of ``q`` counting only hyperplanes spanned through point ``p_index``."""
    mask = np.array([p_index in h.generators for h in H.members], dtype=bool)
    if not mask.any():
        return 0.0
    return math.fsum(np.abs(_residuals(q, H)[mask]).tolist())


def directional_derivative(q, u, H: HyperplaneFamily, tol: float = ZERO_BAND) -> float:
    """One-sided derivative of ``t -> D(q + t u)`` at ``t = 0+``.

    Hyperplanes through ``q`` (within ``tol``) contribute ``|w . u|``; the
    others contribute ``sign(w . q + b) * (w . u)``.
    """
    if not len(H):
        return 0.0
    r = _residuals(q, H)
    wu = H.normals @ np.asarray(u, dtype=float)
    on = np.abs(r) <= tol
    terms = np.where(on, np.abs(wu), np.sign(r) * wu)
    return math.fsum(terms.tolist())
