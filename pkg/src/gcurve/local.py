"""Local interpolating curves through three consecutive data points.

Every local curve carries knots ``(p, q, r)`` in its own parameter with
``f(q) = v_i``.  Boundary curves are one-sided, with ``p`` or ``r`` set to None.
Evaluation returns the position and derivatives stacked along a leading
axis, so ``curve.eval(s, 2)[1]`` is the first derivative.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BadParams, Collinear, DegenerateChord, NoSolution, NotConvex, NotFlattenable, UnsupportedDimension
from .geometry import PointCloud, VertexClass, VertexTag, classify_vertex, flattenable, plane_frame

log = logging.getLogger(__name__)

ELLIPSE_RESIDUAL_TOL = 1e-10
ELLIPSE_MAXITER = 200
PARALLEL_TOL = 1e-12


class LocalKind(str, Enum):
    PARABOLA = "Parabola"
    CIRCLE_ARC = "CircleArc"
    ELLIPSE_ARC = "EllipseArc"
    LINEAR = "Linear"
    CONVEX_CHORD = "ConvexChord"


class LocalMode(str, Enum):
    PARABOLA = "parabola"
    ARC = "arc"
    AUTO = "auto"
    LINEAR = "linear"
    CONVEX_CHORD = "convex-chord"


class BoundaryRule(str, Enum):
    LINEAR = "linear"
    NATURAL = "natural"
    CLOSED = "closed"


@dataclass(frozen=True, eq=False)
class LocalCurve:
    kind: LocalKind
    p: Optional[float]
    q: float
    r: Optional[float]

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def eval(self, s, order: int = 0, side: int = 1, origin=None) -> np.ndarray:
        """Position and derivatives up to ``order`` at parameter(s) ``s``.

        ``side`` picks the one-sided piece at breakpoints of piecewise curves.
        ``origin`` is subtracted from the position before any large offset is
        added, which keeps rounding proportional to the distance from it.
        """
        s_arr = np.asarray(s)
        scalar = s_arr.ndim == 0
        s_arr = np.atleast_1d(s_arr)
        if not np.issubdtype(s_arr.dtype, np.floating):
            s_arr = s_arr.astype(float)
        out = self._eval(s_arr, order, side, origin)
        return out[:, 0, :] if scalar else out

    def __call__(self, s):
        return self.eval(s, 0)[0]

    def _eval(self, s, order, side, origin):
        raise NotImplementedError

    def _anchored(self, anchor, origin, like):
        base = anchor if origin is None else anchor - np.asarray(origin)
        return np.broadcast_to(base, like.shape[:1] + (len(anchor),)).astype(like.dtype, copy=False)


@dataclass(frozen=True, eq=False)
class ParabolaCurve(LocalCurve):
    """``f(s) = v + s*x_axis + k*s**2*y_axis`` with its vertex at ``v`` (q = 0)."""

    vertex: np.ndarray = None
    x_axis: np.ndarray = None
    y_axis: np.ndarray = None
    k: float = 0.0

    @property
    def dim(self):
        return len(self.vertex)

    def _eval(self, s, order, side, origin):
        out = np.zeros((order + 1, len(s), self.dim), dtype=np.result_type(s, float))
        s = s[:, None]
        out[0] = self._anchored(self.vertex, origin, s) + s * self.x_axis + self.k * s * s * self.y_axis
        if order >= 1:
            out[1] = self.x_axis + 2.0 * self.k * s * self.y_axis
        if order >= 2:
            out[2] = 2.0 * self.k * self.y_axis
        return out


@dataclass(frozen=True, eq=False)
class ConicArc(LocalCurve):
    """Angle-parametrised arc ``c + a cos(t) u + b sin(t) w`` with ``f(0) = anchor``.

    Stored relative to the anchor so that ``f(0)`` is exact.
    """

    anchor: np.ndarray = None
    center: np.ndarray = None
    u: np.ndarray = None
    w: np.ndarray = None
    a: float = 1.0
    b: float = 1.0

    @property
    def dim(self):
        return len(self.anchor)

    @property
    def radius(self) -> float:
        return self.a

    def _eval(self, s, order, side, origin):
        out = np.zeros((order + 1, len(s), self.dim), dtype=np.result_type(s, float))
        t = s[:, None]
        c, sn = np.cos(t), np.sin(t)
        half = np.sin(0.5 * t)
        out[0] = self._anchored(self.anchor, origin, t) - 2.0 * self.a * half * half * self.u + self.b * sn * self.w
        cycle = ((c, sn), (-sn, c), (-c, -sn), (sn, -c))
        for m in range(1, order + 1):
            dc, ds = cycle[m % 4]
            out[m] = self.a * dc * self.u + self.b * ds * self.w
        return out


@dataclass(frozen=True, eq=False)
class PolylineCurve(LocalCurve):
    """Piecewise-linear map through ``vertices`` at increasing ``params``."""

    vertices: np.ndarray = None
    params: np.ndarray = None

    @property
    def dim(self):
        return self.vertices.shape[1]

    def _eval(self, s, order, side, origin):
        params = self.params
        how = "right" if side >= 0 else "left"
        idx = np.clip(np.searchsorted(params, s, side=how) - 1, 0, len(params) - 2)
        d = np.diff(self.vertices, axis=0) / np.diff(params)[:, None]
        start = self.vertices[idx]
        if origin is not None:
            start = start - np.asarray(origin)
        out = np.zeros((order + 1, len(s), self.dim), dtype=np.result_type(s, float))
        out[0] = start + (s - params[idx])[:, None] * d[idx]
        if order >= 1:
            out[1] = d[idx]
        return out


def _as_points(*pts):
    arrs = [np.asarray(p, dtype=float) for p in pts]
    n = len(arrs[0])
    if any(len(a) != n for a in arrs):
        raise ValueError("points must share a dimension")
    return arrs


def _check_triple(a, b, c):
    ok, _ = flattenable(a, b, c)
    if not ok:
        raise NotFlattenable("consecutive chords are antiparallel")
    e1, e2 = plane_frame(a, b, c)
    if e2 is None:
        raise Collinear("the three points are collinear")
    return e1, e2


def fit_parabola(a, b, c) -> ParabolaCurve:
    """Parabola through a, b, c with its vertex at b.

    The axis angle is the root of ``yA*xC**2 - yC*xA**2`` on the open bracket
    of angles whose projections keep the three points ordered.
    """
    a, b, c = _as_points(a, b, c)
    e1, e2 = _check_triple(a, b, c)
    A = np.array([np.dot(a - b, e1), np.dot(a - b, e2)])
    C = np.array([np.dot(c - b, e1), np.dot(c - b, e2)])

    def coords(theta, P):
        ct, st = math.cos(theta), math.sin(theta)
        return P[0] * ct + P[1] * st, -P[0] * st + P[1] * ct

    def residual(theta):
        xa, ya = coords(theta, A)
        xc, yc = coords(theta, C)
        return ya * xc * xc - yc * xa * xa

    # x_A < 0 on a half-circle of angles centred at angle(A) + pi, x_C > 0 on one centred at angle(C)
    ca = math.atan2(A[1], A[0]) + math.pi
    cc = math.atan2(C[1], C[0])
    cc += 2.0 * math.pi * round((ca - cc) / (2.0 * math.pi))
    lo = max(ca, cc) - 0.5 * math.pi
    hi = min(ca, cc) + 0.5 * math.pi
    if not hi > lo:
        raise NotFlattenable("no order-preserving projection direction")
    flo, fhi = residual(lo), residual(hi)
    if flo * fhi > 0:
        grid = np.linspace(lo, hi, 258)[1:-1]
        vals = np.array([residual(t) for t in grid])
        flips = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        if not flips.size:
            raise NoSolution("no parabola vertex angle found")
        lo, hi = grid[flips[0]], grid[flips[0] + 1]
    theta = brentq(residual, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)

    xa, ya = coords(theta, A)
    xc, yc = coords(theta, C)
    k = (ya * xa * xa + yc * xc * xc) / (xa**4 + xc**4)
    ct, st = math.cos(theta), math.sin(theta)
    x_axis = ct * e1 + st * e2
    y_axis = -st * e1 + ct * e2
    if k < 0:  # y axis towards the concave side
        k, y_axis = -k, -y_axis
    return ParabolaCurve(LocalKind.PARABOLA, p=xa, q=0.0, r=xc, vertex=b.copy(), x_axis=x_axis, y_axis=y_axis, k=k)


def _lift(e1, e2, v2):
    return v2[0] * e1 + v2[1] * e2


def _circumcenter_2d(A, C):
    # circle through A, origin and C
    m = np.array([A, C])
    rhs = 0.5 * np.array([A @ A, C @ C])
    return np.linalg.solve(m, rhs)


def fit_circle_arc(a, b, c) -> ConicArc:
    """Circular arc from a through b to c, parametrised by angle with b at t = 0."""
    a, b, c = _as_points(a, b, c)
    e1, e2 = _check_triple(a, b, c)
    A = np.array([np.dot(a - b, e1), np.dot(a - b, e2)])
    C = np.array([np.dot(c - b, e1), np.dot(c - b, e2)])
    O = _circumcenter_2d(A, C)
    R = float(np.hypot(*O))
    u = -O / R
    turn = np.sign(C[0] * A[1] - C[1] * A[0])  # turning direction of a -> b -> c
    w = turn * np.array([-u[1], u[0]])
    p = _angle_before(A - O, u, w, 1.0, 1.0)
    r = _angle_after(C - O, u, w, 1.0, 1.0)
    return ConicArc(
        LocalKind.CIRCLE_ARC, p=p, q=0.0, r=r,
        anchor=b.copy(), center=b + _lift(e1, e2, O), u=_lift(e1, e2, u), w=_lift(e1, e2, w), a=R, b=R,
    )


def _angle_of(d, u, w, a, b):
    return math.atan2(np.dot(d, w) / b, np.dot(d, u) / a)


def _angle_before(d, u, w, a, b):
    t = _angle_of(d, u, w, a, b)
    return t if t < 0 else t - 2.0 * math.pi


def _angle_after(d, u, w, a, b):
    t = _angle_of(d, u, w, a, b)
    return t if t > 0 else t + 2.0 * math.pi


def fit_ellipse_arc(a, b, c) -> ConicArc:
    """Elliptic arc with b on one axis and the farther neighbour on the other.

    The centre lies on the circle with diameter from b to the far point; its
    angle there is root-found so the ellipse also passes the near point.
    Among several roots the centre nearest the circumcentre is kept.
    """
    a, b, c = _as_points(a, b, c)
    e1, e2 = _check_triple(a, b, c)
    A = np.array([np.dot(a - b, e1), np.dot(a - b, e2)])
    C = np.array([np.dot(c - b, e1), np.dot(c - b, e2)])
    far_is_c = np.hypot(*C) >= np.hypot(*A)
    P, Rp = (C, A) if far_is_c else (A, C)
    mid = 0.5 * P
    rho = 0.5 * float(np.hypot(*P))

    def geometry(psi):
        O = mid + rho * np.array([math.cos(psi), math.sin(psi)])
        alpha = float(np.hypot(*O))
        beta = float(np.hypot(*(P - O)))
        return O, alpha, beta

    def residual(psi):
        O, alpha, beta = geometry(psi)
        if alpha <= 1e-12 * rho or beta <= 1e-12 * rho:
            return np.nan
        u = -O / alpha
        w = (P - O) / beta
        d = Rp - O
        if np.dot(d, w) >= 0.0:
            return np.nan
        return (np.dot(d, u) / alpha) ** 2 + (np.dot(d, w) / beta) ** 2 - 1.0

    grid = np.linspace(0.0, 2.0 * math.pi, 721)[:-1] + 1e-3
    vals = np.array([residual(t) for t in grid])
    roots = []
    for j in range(len(grid)):
        k = (j + 1) % len(grid)
        f0, f1 = vals[j], vals[k]
        if not (np.isfinite(f0) and np.isfinite(f1)) or f0 * f1 > 0:
            continue
        t0 = grid[j]
        t1 = grid[k] if k else grid[0] + 2.0 * math.pi
        try:
            root = brentq(residual, t0, t1, xtol=1e-15, maxiter=ELLIPSE_MAXITER)
        except (ValueError, RuntimeError):
            continue
        res = residual(root)
        if np.isfinite(res) and abs(res) <= ELLIPSE_RESIDUAL_TOL:
            roots.append(root)
    if not roots:
        raise NoSolution("no ellipse with the requested axis placement")

    target = _circumcenter_2d(A, C)
    best = min(roots, key=lambda t: np.hypot(*(geometry(t)[0] - target)))
    O, alpha, beta = geometry(best)
    u = -O / alpha
    w = (P - O) / beta
    if not far_is_c:
        w = -w
    p = _angle_before(A - O, u, w, alpha, beta)
    r = _angle_after(C - O, u, w, alpha, beta)
    return ConicArc(
        LocalKind.ELLIPSE_ARC, p=p, q=0.0, r=r,
        anchor=b.copy(), center=b + _lift(e1, e2, O), u=_lift(e1, e2, u), w=_lift(e1, e2, w), a=alpha, b=beta,
    )


def linear_local(a, b, end: str = "start") -> PolylineCurve:
    """Affine map ``t -> a + t (b - a)`` on [0, 1].

    ``end`` says which point is the interpolated vertex: ``"start"`` gives the
    one-sided knots (None, 0, 1) for a leading boundary, ``"end"`` gives
    (0, 1, None) for a trailing one.
    """
    a, b = _as_points(a, b)
    if not np.any(a != b):
        raise DegenerateChord("linear local curve needs distinct points")
    knots = (None, 0.0, 1.0) if end == "start" else (0.0, 1.0, None)
    return PolylineCurve(LocalKind.LINEAR, *knots, vertices=np.array([a, b]), params=np.array([0.0, 1.0]))


def polyline_local(a, b, c, kind: LocalKind = LocalKind.LINEAR) -> PolylineCurve:
    """Two chords a -> b -> c with chord-length knots and b at 0."""
    a, b, c = _as_points(a, b, c)
    la, lc = np.linalg.norm(b - a), np.linalg.norm(c - b)
    if la == 0.0 or lc == 0.0:
        raise DegenerateChord("polyline local curve needs distinct points")
    return PolylineCurve(kind, -la, 0.0, lc, vertices=np.array([a, b, c]), params=np.array([-la, 0.0, lc]))


def _bisector(d1, d2):
    v = d1 / np.linalg.norm(d1) + d2 / np.linalg.norm(d2)
    return v / np.linalg.norm(v)


def _line_hit(o, d, o2, d2, fallback):
    den = d[0] * d2[1] - d[1] * d2[0]
    if abs(den) <= PARALLEL_TOL:
        return float(np.dot(fallback - o, d))
    diff = o2 - o
    return float((diff[0] * d2[1] - diff[1] * d2[0]) / den)


def convexity_local_line(v1, v2, v3, v4, v5) -> PolylineCurve:
    """Segment P -> Q through v3 along the bisector of its adjacent chords.

    P and Q are where that line meets the analogous lines through v2 and v4.
    """
    v1, v2, v3, v4, v5 = _as_points(v1, v2, v3, v4, v5)
    if len(v3) != 2:
        raise UnsupportedDimension("convexity-preserving locals are planar")
    if classify_vertex(v1, v2, v3, v4, v5).tag is not VertexTag.LOCAL_CONVEX:
        raise NotConvex("v3 is not a locally convex vertex")
    d3 = _bisector(v3 - v2, v4 - v3)
    sp = _line_hit(v3, d3, v2, _bisector(v2 - v1, v3 - v2), 0.5 * (v2 + v3))
    sq = _line_hit(v3, d3, v4, _bisector(v4 - v3, v5 - v4), 0.5 * (v3 + v4))
    if not sp < 0.0 < sq:
        raise NotConvex("tangent-line intersections are out of order")
    verts = np.array([v3 + sp * d3, v3, v3 + sq * d3])
    return PolylineCurve(LocalKind.CONVEX_CHORD, sp, 0.0, sq, vertices=verts, params=np.array([sp, 0.0, sq]))


def _five(cloud: PointCloud, i: int):
    if cloud.closed:
        return [cloud.vertex(j) for j in range(i - 2, i + 3)]
    if 2 <= i <= cloud.n_spans - 2:
        return [cloud.points[j] for j in range(i - 2, i + 3)]
    return None


def vertex_class(cloud: PointCloud, i: int, corner_eps: float = 0.1, det_tol: float = 1e-9) -> Optional[VertexClass]:
    """Classification of vertex i, or None when it lacks two neighbours per side."""
    pts = _five(cloud, i)
    if pts is None:
        return None
    return classify_vertex(*pts, corner_eps=corner_eps, det_tol=det_tol)


def _interior(a, b, c, mode: LocalMode, five=None) -> LocalCurve:
    if mode is LocalMode.LINEAR:
        return polyline_local(a, b, c)
    if mode is LocalMode.CONVEX_CHORD:
        if five is not None and len(b) == 2:
            try:
                return convexity_local_line(*five)
            except NotConvex:
                pass
        log.warning("vertex is not locally convex; using a parabola local curve")
        mode = LocalMode.PARABOLA
    try:
        if mode is LocalMode.PARABOLA:
            return fit_parabola(a, b, c)
        arc = fit_circle_arc(a, b, c)
        if mode is LocalMode.AUTO and max(-arc.p, arc.r) > 0.5 * math.pi:
            try:
                return fit_ellipse_arc(a, b, c)
            except NoSolution:
                log.warning("ellipse fit failed; keeping the circular arc")
        return arc
    except Collinear:
        return polyline_local(a, b, c)


def local_for(
    i: int,
    cloud: PointCloud,
    mode: LocalMode = LocalMode.PARABOLA,
    boundary: BoundaryRule = BoundaryRule.LINEAR,
    corner_detect: bool = False,
    corner_eps: float = 0.1,
    det_tol: float = 1e-9,
) -> LocalCurve:
    """Local curve at data point ``v_i`` (i in 0..N)."""
    mode = LocalMode(mode)
    boundary = BoundaryRule(boundary)
    N = cloud.n_spans
    if not 0 <= i <= N:
        raise IndexError(f"vertex index {i} outside 0..{N}")
    if boundary is BoundaryRule.CLOSED and not cloud.closed:
        raise BadParams("closed boundary rule needs a closed point cloud")
    if cloud.closed:
        i %= N
    elif i in (0, N):
        return _boundary_local(i, cloud, mode, boundary, corner_detect, corner_eps, det_tol)

    a, b, c = cloud.vertex(i - 1), cloud.vertex(i), cloud.vertex(i + 1)
    five = _five(cloud, i)
    if corner_detect and five is not None:
        cls = classify_vertex(*five, corner_eps=corner_eps, det_tol=det_tol)
        if cls.tag is VertexTag.CORNER:
            return polyline_local(a, b, c)
    return _interior(a, b, c, mode, five)


def _boundary_local(i, cloud, mode, boundary, corner_detect, corner_eps, det_tol):
    N = cloud.n_spans
    start = i == 0
    pts = cloud.points
    if boundary is BoundaryRule.NATURAL and N >= 2:
        j = 1 if start else N - 1
        inner = local_for(j, cloud, mode, boundary, corner_detect, corner_eps, det_tol)
        end_param = inner.p if start else inner.r
        target = pts[0] if start else pts[N]
        tol = 1e-10 * max(1.0, cloud.chord_scale())
        if np.linalg.norm(inner(end_param) - target) <= tol:
            if start:
                return replace(inner, p=None, q=inner.p, r=inner.q)
            return replace(inner, p=inner.q, q=inner.r, r=None)
        log.warning("local curve at v_%d misses the endpoint; using a linear boundary", j)
    if start:
        return linear_local(pts[0], pts[1], end="start")
    return linear_local(pts[N - 1], pts[N], end="end")


def build_locals(cloud: PointCloud, mode=LocalMode.PARABOLA, boundary=BoundaryRule.LINEAR,
                 corner_detect=False, corner_eps=0.1, det_tol=1e-9):
    """Local curves for indices 0..N (the closed seam reuses the curve at 0)."""
    N = cloud.n_spans
    out = [local_for(i, cloud, mode, boundary, corner_detect, corner_eps, det_tol) for i in range(N if cloud.closed else N + 1)]
    if cloud.closed:
        out.append(out[0])
    return out
