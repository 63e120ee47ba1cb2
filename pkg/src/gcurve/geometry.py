"""Points, curvature, flattenability and five-point vertex classification."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DegenerateChord, DimensionMismatch, DuplicateConsecutivePoints, ZeroSpeed

# below this speed the tangent direction is meaningless
ZERO_SPEED = 1e-100
ANTIPARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class PointCloud:
    """Ordered data points ``v_0..v_M-1``.

    For a closed cloud the seam point ``v_N = v_0`` is implied, so a closed
    cloud of M points has N = M spans while an open one has N = M - 1.
    """

    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionMismatch("points must be a 2-D array of coordinates")
        if pts.shape[1] < 2:
            raise DimensionMismatch("points need at least two coordinates")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        minimum = 3 if self.closed else 2
        if len(pts) < minimum:
            raise ValueError(f"need at least {minimum} points, got {len(pts)}")
        chords = np.diff(pts, axis=0)
        if self.closed:
            chords = np.vstack([chords, pts[:1] - pts[-1:]])
        bad = np.flatnonzero(~np.any(chords != 0.0, axis=1))
        if bad.size:
            raise DuplicateConsecutivePoints(f"zero-length chord after point {int(bad[0])}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_spans(self) -> int:
        return len(self.points) if self.closed else len(self.points) - 1

    def __len__(self):
        return len(self.points)

    def vertex(self, i: int) -> np.ndarray:
        """Data point ``v_i``; indices wrap for closed clouds."""
        if self.closed:
            return self.points[i % len(self.points)]
        return self.points[i]

    def knots(self) -> np.ndarray:
        """Data points at integer parameters 0..N (seam repeated when closed)."""
        if self.closed:
            return np.vstack([self.points, self.points[:1]])
        return self.points

    def chord_scale(self) -> float:
        return float(np.max(np.linalg.norm(np.diff(self.knots(), axis=0), axis=1)))


def _wedge_sq(d1, d2):
    # |d1|^2 |d2|^2 - (d1.d2)^2 written as a sum of squares (Lagrange identity)
    n = d1.shape[-1]
    total = np.zeros(np.broadcast_shapes(d1.shape, d2.shape)[:-1], dtype=np.result_type(d1, d2))
    for i in range(n):
        for j in range(i + 1, n):
            total = total + (d1[..., i] * d2[..., j] - d1[..., j] * d2[..., i]) ** 2
    return total


def curvature(d1, d2) -> float:
    """Curvature from first and second derivatives at one parameter value."""
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    speed = float(np.linalg.norm(d1))
    if speed <= ZERO_SPEED:
        raise ZeroSpeed("curvature undefined at a non-regular point")
    return float(np.sqrt(_wedge_sq(d1, d2)) / speed**3)


def curvatures(d1, d2) -> np.ndarray:
    """Vectorised curvature over the leading axes; NaN where the speed vanishes."""
    d1 = np.asarray(d1)
    d2 = np.asarray(d2)
    speed = np.linalg.norm(d1, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.sqrt(_wedge_sq(d1, d2)) / speed**3
    return np.where(speed > ZERO_SPEED, k, np.nan)


def signed_curvatures(d1, d2) -> np.ndarray:
    """Signed curvature of a planar curve (positive for counter-clockwise turning)."""
    d1 = np.asarray(d1)
    d2 = np.asarray(d2)
    speed = np.linalg.norm(d1, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / speed**3
    return np.where(speed > ZERO_SPEED, k, np.nan)


def flattenable(a, b, c):
    """Whether some line keeps the projections of a, b, c in order.

    Returns ``(True, u)`` with a witness unit direction ``u`` or ``(False, None)``.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    d1 = b - a
    d2 = c - b
    n1 = np.linalg.norm(d1)
    n2 = np.linalg.norm(d2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateChord("flattenability needs distinct consecutive points")
    u = d1 / n1 + d2 / n2
    nu = np.linalg.norm(u)
    if nu <= ANTIPARALLEL_TOL:
        return False, None
    return True, u / nu


def plane_frame(a, b, c):
    """Orthonormal in-plane axes (e1, e2) of three points, e1 along a - b.

    ``e2`` is None when the points are collinear to within rounding.
    """
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    da = a - b
    dc = c - b
    e1 = da / np.linalg.norm(da)
    w = dc - np.dot(dc, e1) * e1
    nw = np.linalg.norm(w)
    if nw <= 1e-12 * np.linalg.norm(dc):
        return e1, None
    return e1, w / nw


def best_fit_plane(points):
    """Centroid and the two dominant principal directions of a point set."""
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centroid)
    return centroid, vt[:2]


class VertexTag(str, Enum):
    LOCAL_CONVEX = "LocalConvex"
    DEGENERATE = "Degenerate"
    CORNER = "Corner"
    GENERAL = "General"


@dataclass(frozen=True)
class VertexClass:
    tag: VertexTag
    witness: Optional[np.ndarray] = field(default=None, compare=False)


def _det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _ray_intersection(o1, d1, o2, d2):
    denom = _det(d1, d2)
    scale = np.linalg.norm(d1) * np.linalg.norm(d2)
    if abs(denom) <= 1e-12 * scale:
        return None
    diff = o2 - o1
    a = _det(diff, d2) / denom
    b = _det(diff, d1) / denom
    if a < 0.0 or b < 0.0:
        return None
    return o1 + a * d1


def classify_vertex(v1, v2, v3, v4, v5, corner_eps: float = 0.1, det_tol: float = 1e-9) -> VertexClass:
    """Classify the middle point of five consecutive vertices.

    Points in more than two dimensions are first projected onto their
    best-fit plane; the corner witness is mapped back to the input space.
    """
    pts = np.array([v1, v2, v3, v4, v5], dtype=float)
    lift = None
    if pts.shape[1] > 2:
        centroid, axes = best_fit_plane(pts)
        pts = (pts - centroid) @ axes.T
        lift = (centroid, axes)
    p1, p2, p3, p4, p5 = pts
    chords = np.diff(pts, axis=0)
    scale = float(np.max(np.linalg.norm(chords, axis=1)))
    dets = [_det(chords[0], chords[1]), _det(chords[1], chords[2]), _det(chords[2], chords[3])]
    tol = det_tol * scale * scale
    if all(abs(d) > tol for d in dets):
        if all(d > 0 for d in dets) or all(d < 0 for d in dets):
            return VertexClass(VertexTag.LOCAL_CONVEX)
        return VertexClass(VertexTag.GENERAL)

    hit = _ray_intersection(p2, p2 - p1, p4, p4 - p5)
    if hit is not None:
        reach = min(np.linalg.norm(p3 - p2), np.linalg.norm(p4 - p3))
        if np.linalg.norm(p3 - hit) <= corner_eps * reach:
            if lift is not None:
                hit = lift[0] + hit @ lift[1]
            return VertexClass(VertexTag.CORNER, hit)
    return VertexClass(VertexTag.DEGENERATE)
