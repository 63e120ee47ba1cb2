"""Gluing consecutive QR curves into one curve on [0, N]."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ._fd import CENTRAL5, fd_weights
from .blending import Blend, validate_blend
from .errors import AntipodalChord, EndpointMismatch, NoSolution, OffSphereData, OutOfDomain, SpanMismatch
from .redistribution import QRCurve

log = logging.getLogger(__name__)

# central-difference step per derivative order for non-linear gluing rules
_FD_STEP = {1: 1e-5, 2: 1e-3, 3: 5e-3, 4: 1e-2}
ENDPOINT_TOL = 1e-10
SPHERE_TOL = 1e-8

Family = Callable[[int, np.ndarray, np.ndarray], np.ndarray]


class GlueRule(str, Enum):
    LINEAR = "Linear"
    SPHERE = "Sphere"
    CUSTOM = "Custom"


@dataclass(frozen=True, eq=False)
class GluedCurve:
    """Curve on [0, N]; span j blends ``F_j`` (weight B1) into ``F_{j+1}`` (weight B2).

    ``family(j, s, u)`` is the gluing homotopy for Sphere and Custom rules,
    with ``family(j, s, 1) = F_j(s)`` and ``family(j, s, 0) = F_{j+1}(s)``.
    """

    qrcurves: tuple
    blend: Blend
    rule: GlueRule = GlueRule.LINEAR
    closed: bool = False
    family: Optional[Family] = None
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    ambiguous_spans: tuple = ()

    @property
    def n_spans(self) -> int:
        return len(self.qrcurves) - 1

    @property
    def domain(self):
        return 0.0, float(self.n_spans)

    @property
    def dim(self) -> int:
        return self.qrcurves[0].local.dim

    @property
    def analytic(self) -> bool:
        return self.rule is GlueRule.LINEAR and self.blend.analytic

    def span_of(self, t, side: int = 1):
        """Span index for each parameter; integer parameters go right unless side < 0."""
        N = self.n_spans
        t = np.atleast_1d(np.asarray(t))
        if not np.issubdtype(t.dtype, np.floating):
            t = t.astype(float)
        if self.closed:
            t = np.where((t < 0) | (t > N), np.mod(t, N), t)
            if side < 0:
                t = np.where(t == 0, N, t)
        elif np.any(t < 0) or np.any(t > N):
            raise OutOfDomain(f"parameter outside [0, {N}]")
        j = np.floor(t).astype(int)
        if side < 0:
            j = np.where(t == j, j - 1, j)
        return np.clip(j, 0, N - 1), t

    def eval(self, t, order: int = 0, side: int = 1, origin=None) -> np.ndarray:
        """Position and derivatives (shape (order+1, len(t), n)); scalar t drops the middle axis."""
        scalar = np.ndim(t) == 0
        spans, tt = self.span_of(t, side)
        out = np.empty((order + 1, len(tt), self.dim), dtype=np.result_type(tt, float))
        for j in np.unique(spans):
            mask = spans == j
            out[:, mask] = self.eval_span(int(j), tt[mask], order, origin)
        return out[:, 0] if scalar else out

    def __call__(self, t):
        return self.eval(t, 0)[0]

    def knots(self) -> np.ndarray:
        N = self.n_spans
        return self.eval(np.arange(N + 1, dtype=float), 0, side=-1)[0]

    def eval_span(self, j: int, t, order: int = 0, origin=None) -> np.ndarray:
        """Evaluate with span j's formula (extended smoothly a little beyond it)."""
        t = np.atleast_1d(np.asarray(t))
        if self.rule is GlueRule.LINEAR:
            return self._linear(j, t, order, origin)
        return self._homotopy(j, t, order, origin)

    def _linear(self, j, t, order, origin):
        f0 = self.qrcurves[j].eval(t, order, 1, origin)
        f1 = self.qrcurves[j + 1].eval(t, order, -1, origin)
        b1, b2 = self.blend.eval(t - j, order)
        b2[0] = 1.0 - b1[0]  # the same weights as the homotopy u F_j + (1 - u) F_j+1
        out = np.zeros_like(f0)
        for k in range(order + 1):
            for m in range(k + 1):
                c = math.comb(k, m)
                out[k] += c * (f0[m] * b1[k - m][:, None] + f1[m] * b2[k - m][:, None])
        return out

    def _position(self, j, t):
        u = self.blend.eval(t - j, 0)[0][0]
        return self.family(j, t, u)

    def _homotopy(self, j, t, order, origin):
        pos = self._position(j, t)
        out = np.empty((order + 1,) + pos.shape, dtype=pos.dtype)
        out[0] = pos if origin is None else pos - np.asarray(origin)
        for k in range(1, order + 1):
            h = _FD_STEP.get(k, 2e-2)
            w = fd_weights(CENTRAL5, k)
            out[k] = sum(wi * self._position(j, t + o * h) for wi, o in zip(w, CENTRAL5)) / h**k
        return out


def _check_sequence(qrcurves: Sequence[QRCurve]):
    if len(qrcurves) < 2:
        raise SpanMismatch("need at least two QR curves")
    for j, F in enumerate(qrcurves):
        if F.index != j:
            raise SpanMismatch(f"QR curve at position {j} has index {F.index}")
        if j < len(qrcurves) - 1 and not F.has_right:
            raise SpanMismatch(f"QR curve {j} has no right half")
        if j > 0 and not F.has_left:
            raise SpanMismatch(f"QR curve {j} has no left half")


def _check_blend(blend: Blend):
    report = validate_blend(blend, blend.order)
    if not report.passed:
        log.warning("blend failed validation at order %s: %s", blend.order, "; ".join(report.failures))
    return report


def glue_linear(qrcurves: Sequence[QRCurve], blend: Blend, closed: bool = False) -> GluedCurve:
    """Span j: ``F_j(t) B1(t - j) + F_{j+1}(t) B2(t - j)``."""
    _check_sequence(qrcurves)
    _check_blend(blend)
    return GluedCurve(tuple(qrcurves), blend, GlueRule.LINEAR, closed)


def linear_family(qrcurves: Sequence[QRCurve]) -> Family:
    """``u F_j + (1 - u) F_{j+1}``, the homotopy behind linear gluing."""

    def phi(j, s, u):
        u = np.asarray(u)[:, None]
        return u * qrcurves[j](s, 1) + (1.0 - u) * qrcurves[j + 1](s, -1)

    return phi


def _scale(qrcurves):
    pts = np.array([F(F.index, 1 if F.has_right else -1) for F in qrcurves])
    return max(1.0, float(np.max(np.abs(pts))))


def glue_custom(qrcurves: Sequence[QRCurve], blend: Blend, family: Family, closed: bool = False,
                rule: GlueRule = GlueRule.CUSTOM, nsamples: int = 9, **extra) -> GluedCurve:
    """Span j: ``family(j, t, B1(t - j))`` after checking its endpoint identities."""
    _check_sequence(qrcurves)
    _check_blend(blend)
    tol = ENDPOINT_TOL * _scale(qrcurves)
    for j in range(len(qrcurves) - 1):
        s = j + np.linspace(0.0, 1.0, nsamples)
        ones = np.ones_like(s)
        if np.max(np.abs(family(j, s, ones) - qrcurves[j](s, 1))) > tol:
            raise EndpointMismatch(f"family(., 1) differs from F_{j} on span {j}")
        if np.max(np.abs(family(j, s, 0 * ones) - qrcurves[j + 1](s, -1))) > tol:
            raise EndpointMismatch(f"family(., 0) differs from F_{j + 1} on span {j}")
    return GluedCurve(tuple(qrcurves), blend, rule, closed, family, **extra)


def _unit(v):
    return v / np.linalg.norm(v)


def sphere_family(qrcurves: Sequence[QRCurve], center, radius: float):
    """Homotopy of constant-speed arcs on the sphere through each span's endpoints.

    The cutting plane turns about the chord, so the arc centres move at
    constant speed along a circle inside the sphere.  Returns the family and
    the indices of spans whose two arcs bulge to opposite sides of the chord.
    """
    c = np.asarray(center, dtype=float)
    R = float(radius)
    spans = []
    ambiguous = []
    for j in range(len(qrcurves) - 1):
        A, B = qrcurves[j], qrcurves[j + 1]
        P, Q = A(float(j), 1), B(float(j + 1), -1)
        mids = [A(j + 0.5, 1), B(j + 0.5, -1)]
        for x in [P, Q] + mids:
            if abs(np.linalg.norm(x - c) - R) > SPHERE_TOL * R:
                raise OffSphereData(f"span {j} leaves the sphere")
        L = float(np.linalg.norm(Q - P))
        e = (Q - P) / L
        M = 0.5 * (P + Q)
        if np.linalg.norm(M - c) <= 1e-9 * R:
            raise AntipodalChord(f"span {j} joins antipodal points")
        bulges = []
        for x in mids:
            d = x - M
            bulges.append(_unit(d - np.dot(d, e) * e))
        w_end, w_start = bulges  # u = 1 is F_j, u = 0 is F_{j+1}
        cosang = float(np.clip(np.dot(w_start, w_end), -1.0, 1.0))
        omega = math.acos(cosang)
        pivot = None
        if omega > math.pi - 1e-6:
            ambiguous.append(j)
            pivot = _perpendicular(e, w_end, c - M)
            if pivot is None:
                raise NoSolution(f"span {j}: arcs on opposite sides of the chord in the plane")
        spans.append((M, e, L, w_start, w_end, omega, pivot))
    if ambiguous:
        log.warning("sphere gluing: arcs bulge to opposite sides on spans %s", ambiguous)

    def phi(j, s, u):
        M, e, L, w0, w1, omega, pivot = spans[j]
        u = np.asarray(u)[:, None]
        s = np.asarray(s)[:, None]
        if pivot is not None:
            ang = u * math.pi
            w = np.cos(ang) * w0 + np.sin(ang) * pivot
        elif omega < 1e-12:
            w = np.broadcast_to(w1, (len(u), len(w1)))
        else:
            w = (np.sin((1.0 - u) * omega) * w0 + np.sin(u * omega) * w1) / math.sin(omega)
        h = w @ (c - M)
        h = h[:, None]
        rho = np.sqrt(0.25 * L * L + h * h)
        gamma = np.arctan2(-h, 0.5 * L)
        beta = (math.pi - gamma) - (s - j) * (math.pi - 2.0 * gamma)
        return M + h * w + rho * (np.cos(beta) * e + np.sin(beta) * w)

    return phi, tuple(ambiguous)


def _perpendicular(e, w, hint):
    for cand in [hint] + list(np.eye(len(e))):
        v = cand - np.dot(cand, e) * e - np.dot(cand, w) * w
        n = np.linalg.norm(v)
        if n > 1e-6:
            return v / n
    return None


def glue_sphere(qrcurves: Sequence[QRCurve], blend: Blend, center, radius: float, closed: bool = False) -> GluedCurve:
    """Gluing that keeps every curve sample on the sphere (a circle in the plane)."""
    family, ambiguous = sphere_family(qrcurves, center, radius)
    return glue_custom(qrcurves, blend, family, closed, rule=GlueRule.SPHERE,
                       center=np.asarray(center, dtype=float), radius=float(radius), ambiguous_spans=ambiguous)
