"""Numerical certificates for glued curves, sampling, and report serialisation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ._fd import CENTRAL5, fd_weights, weights_as
from .errors import BadParams
from .geometry import PointCloud, curvatures

LD = np.longdouble
# binary step so that knot +- multiples of it are exact in floating point
KNOT_STEP = 2.0**-13
ACCURACY = 4  # order of accuracy of the one-sided knot stencils
GUARD_FLOOR = 1e-10
LADDER = 4  # rungs of the step ladder on each side of the base step


@dataclass(frozen=True)
class Thresholds:
    interpolation: float = 1e-10
    speed: float = 1e-8  # times the chord scale
    knot: float = 1e-6
    curvature: float = 1e-3
    guard_low: float = 1.5
    guard_high: float = 8.0
    per_span: int = 2048
    step: float = KNOT_STEP
    curvature_floor: float = 1e-9
    check_extra_order: bool = False


@dataclass
class KnotReport:
    index: int
    corner: bool
    mismatch: List[float]  # relative, orders 1..r
    extra_mismatch: Optional[float]  # order r + 1
    curvature_left: float
    curvature_right: float
    curvature_jump: float
    tangent_jump_deg: float
    guard_ratio: Optional[float]


@dataclass
class SmoothnessReport:
    order: int
    interpolation_err: float
    min_speed: float
    min_speed_at: float
    speed_threshold: float
    span_pd_margins: List[float]
    knots: List[KnotReport]
    thresholds: Thresholds = field(default_factory=Thresholds)

    @property
    def span_pd_margin(self) -> float:
        return min(self.span_pd_margins) if self.span_pd_margins else math.inf

    @property
    def knot_derivative_mismatch(self) -> Dict[int, List[float]]:
        return {k.index: list(k.mismatch) for k in self.knots}

    @property
    def curvature_jumps(self) -> Dict[int, float]:
        return {k.index: k.curvature_jump for k in self.knots}

    @property
    def corners(self) -> List[int]:
        return [k.index for k in self.knots if k.corner]

    def _gated(self):
        return [k for k in self.knots if not k.corner]

    @property
    def max_knot_mismatch(self) -> float:
        vals = [m for k in self._gated() for m in k.mismatch]
        return max(vals, default=0.0)

    @property
    def max_curvature_jump(self) -> float:
        return max((k.curvature_jump for k in self._gated()), default=0.0)

    @property
    def checks(self) -> Dict[str, bool]:
        th = self.thresholds
        gated = self._gated()
        ratios = [k.guard_ratio for k in gated if k.guard_ratio is not None]
        out = {
            "interpolation": self.interpolation_err <= th.interpolation,
            "regularity": self.min_speed > self.speed_threshold,
            "positive_definite": self.span_pd_margin > 0.0,
            "knot_continuity": self.max_knot_mismatch <= th.knot,
            "fd_guard": all(th.guard_low <= q <= th.guard_high for q in ratios),
            "curvature": self.order < 2 or self.max_curvature_jump <= th.curvature,
        }
        if th.check_extra_order:
            extra = [k.extra_mismatch for k in gated if k.extra_mismatch is not None]
            out["extra_order"] = max(extra, default=0.0) <= th.knot
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return clean_json({
            "order": self.order,
            "passed": self.passed,
            "checks": self.checks,
            "interpolation_err": self.interpolation_err,
            "min_speed": self.min_speed,
            "min_speed_at": self.min_speed_at,
            "speed_threshold": self.speed_threshold,
            "span_pd_margin": self.span_pd_margin,
            "span_pd_margins": self.span_pd_margins,
            "max_knot_mismatch": self.max_knot_mismatch,
            "max_curvature_jump": self.max_curvature_jump,
            "corner_knots": self.corners,
            "knots": [asdict(k) for k in self.knots],
            "thresholds": asdict(self.thresholds),
        })

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=kw.pop("indent", 2), **kw)

    def to_keyvalue(self) -> str:
        d = self.to_dict()
        lines = [f"passed={_fmt(d['passed'])}"]
        lines += [f"check.{k}={'pass' if v else 'fail'}" for k, v in d["checks"].items()]
        for key in ("order", "interpolation_err", "min_speed", "min_speed_at", "speed_threshold", "span_pd_margin",
                    "max_knot_mismatch", "max_curvature_jump"):
            lines.append(f"{key}={_fmt(d[key])}")
        lines.append("corner_knots=" + ",".join(str(c) for c in d["corner_knots"]))
        for k in d["knots"]:
            i = k["index"]
            for order, m in enumerate(k["mismatch"], start=1):
                lines.append(f"knot.{i}.mismatch.{order}={_fmt(m)}")
            for key in ("curvature_left", "curvature_right", "curvature_jump", "tangent_jump_deg", "guard_ratio", "corner"):
                lines.append(f"knot.{i}.{key}={_fmt(k[key])}")
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def clean_json(obj):
    if isinstance(obj, dict):
        return {k: clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_json(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class ParametricCurve:
    """A single-span curve given by a function of t on ``domain``.

    Used to feed arbitrary parametrisations through the verifier.  Without
    ``derivative(t, k)`` the derivatives come from central differences.
    """

    def __init__(self, func: Callable, domain=(0.0, 1.0), derivative: Optional[Callable] = None, step: float = 1e-5):
        self.func = func
        self.derivative = derivative
        self.a, self.b = float(domain[0]), float(domain[1])
        self.step = step * (self.b - self.a)
        self.closed = False

    @property
    def breaks(self) -> np.ndarray:
        return np.array([self.a, self.b])

    @property
    def n_spans(self) -> int:
        return 1

    def _pos(self, t):
        return np.asarray(self.func(np.asarray(t)), dtype=float).reshape(len(t), -1)

    def eval_span(self, j, t, order: int = 0, origin=None):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pos = self._pos(t)
        out = np.empty((order + 1,) + pos.shape)
        out[0] = pos if origin is None else pos - np.asarray(origin)
        for k in range(1, order + 1):
            if self.derivative is not None:
                out[k] = np.asarray(self.derivative(t, k), dtype=float).reshape(pos.shape)
            else:
                w = fd_weights(CENTRAL5, k)
                h = self.step * 10 ** (k - 1)
                out[k] = sum(wi * self._pos(t + o * h) for wi, o in zip(w, CENTRAL5)) / h**k
        return out

    def eval(self, t, order: int = 0, side: int = 1, origin=None):
        scalar = np.ndim(t) == 0
        out = self.eval_span(0, t, order, origin)
        return out[:, 0] if scalar else out

    def __call__(self, t):
        return self.eval(t)[0]


def _breaks(curve) -> np.ndarray:
    if hasattr(curve, "breaks"):
        return np.asarray(curve.breaks, dtype=float)
    return np.arange(curve.n_spans + 1, dtype=float)


def _span_grid(a, b, n):
    return a + (b - a) * np.linspace(0.0, 1.0, n + 1)


def _pullback_samples(curve, i, offsets, steps, origin):
    """Curve minus ``origin`` at knot i -/+ offsets*step (long double), per side.

    ``steps`` holds one (left, right) pair of parameter steps per resolution."""
    N = curve.n_spans
    off = np.asarray(offsets, dtype=LD)
    dl = np.concatenate([off * LD(a) for a, _ in steps])
    dr = np.concatenate([off * LD(b) for _, b in steps])
    left = curve.eval_span(i - 1, LD(i) - dl, 0, origin)[0]
    if i == N:  # closed seam: the right side is the start of span 0
        right = curve.eval_span(0, LD(0) + dr, 0, origin)[0]
    else:
        right = curve.eval_span(i, LD(i) + dr, 0, origin)[0]
    n = len(offsets)
    return [left[m * n:(m + 1) * n] for m in range(len(steps))], [right[m * n:(m + 1) * n] for m in range(len(steps))]


def _norm(v):
    return float(np.sqrt(np.sum(np.asarray(v, dtype=LD) ** 2)))


def knot_report(curve, i: int, r: int, origin, thresholds: Thresholds = Thresholds(), corner: bool = False,
                extra: bool = True) -> KnotReport:
    """Compare one-sided derivatives of the pullback through ``S_i`` at knot i."""
    F = curve.qrcurves[i]
    sl = LD(F.redistributor.slope(-1))
    sr = LD(F.redistributor.slope(1))
    ell = max(abs(float(sl)), abs(float(sr)))
    top = max(r + (1 if extra else 0), 2)
    h = thresholds.step
    offsets = np.arange(top + ACCURACY)
    # binary ladder of steps around h, longest first, kept inside the span
    ladder = [h * 2.0**j for j in range(LADDER, -LADDER - 2, -1) if h * 2.0**j * offsets[-1] <= 0.5 or j <= 0]
    lefts, rights = _pullback_samples(curve, i, offsets, [(x, x) for x in ladder], origin)

    def side(k, samples, w, slope):
        raw = [(w @ v) / (LD(x) * slope) ** k for x, v in zip(ladder, samples)]
        c = LD(2**ACCURACY)
        rich = [(c * raw[m + 1] - raw[m]) / (c - 1) for m in range(len(raw) - 1)]
        # truncation shrinks and rounding grows along the ladder; take the most self-consistent rung
        gaps = [_norm(rich[m + 1] - rich[m]) for m in range(len(rich) - 1)]
        return rich[int(np.argmin(gaps))]

    def deriv(k):
        n = k + ACCURACY
        L = side(k, [v[:n] for v in lefts], weights_as(-offsets[:n], k), sl)
        R = side(k, [v[:n] for v in rights], weights_as(offsets[:n], k), sr)
        return L, R

    derivs = {k: deriv(k) for k in range(1, top + 1)}
    g1 = max(_norm(derivs[1][0]), _norm(derivs[1][1]))

    def rel(k):
        L, R = derivs[k]
        den = max(_norm(L), _norm(R), g1 / ell ** (k - 1))
        return _norm(L - R) / den if den > 0 else 0.0

    mismatch = [rel(k) for k in range(1, r + 1)]
    extra_m = rel(r + 1) if extra else None

    if getattr(curve, "analytic", False):
        # exact one-sided derivatives; FD noise would swamp curvatures near zero
        N = curve.n_spans
        L1, L2 = np.asarray(curve.eval_span(i - 1, [float(i)], 2)[1:3, 0], dtype=float)
        j = 0 if i == N else i
        R1, R2 = np.asarray(curve.eval_span(j, [float(j)], 2)[1:3, 0], dtype=float)
    else:
        (L1, R1), (L2, R2) = derivs[1], derivs[2]
    kl = float(curvatures(L1.astype(float), L2.astype(float)))
    kr = float(curvatures(R1.astype(float), R2.astype(float)))
    jump = abs(kl - kr) / max(kl, kr, thresholds.curvature_floor) if np.isfinite(kl) and np.isfinite(kr) else math.inf
    nl, nr = _norm(L1), _norm(R1)
    cosang = float(np.dot(L1, R1) / (nl * nr)) if nl > 0 and nr > 0 else 1.0
    angle = math.degrees(math.acos(min(1.0, max(-1.0, cosang))))

    # two-point one-sided slopes converge at first order, so their gap halves with h
    gaps = []
    base = ladder.index(h)
    for m, step in enumerate(ladder[base:base + 2], start=base):
        d_left = (lefts[m][0] - lefts[m][1]) / LD(step) / sl
        d_right = (rights[m][1] - rights[m][0]) / LD(step) / sr
        gaps.append(_norm(d_right - d_left))
    ratio = None
    if gaps[1] > GUARD_FLOOR * max(g1, 1e-300):
        ratio = gaps[0] / gaps[1]
    return KnotReport(i, corner, mismatch, extra_m, kl, kr, jump, angle, ratio)


def verify(curve, cloud: Optional[PointCloud] = None, r: int = 2, thresholds: Optional[Thresholds] = None,
           corners: Sequence[int] = ()) -> SmoothnessReport:
    """Certificate of interpolation, regularity, span progress and knot smoothness."""
    th = thresholds or Thresholds()
    br = _breaks(curve)
    N = len(br) - 1
    if cloud is not None:
        data = cloud.knots()
    else:
        data = np.array([curve.eval_span(min(j, N - 1), [br[j]], 0)[0][0] for j in range(N + 1)])

    interp = 0.0
    for j in range(N + 1):
        span = min(j, N - 1)
        got = curve.eval_span(span, [br[j]], 0, data[j])[0][0]
        interp = max(interp, float(np.linalg.norm(np.asarray(got, dtype=float))))

    chords = np.diff(data, axis=0)
    scale = float(np.max(np.linalg.norm(chords, axis=1)))
    min_speed, min_at = math.inf, float(br[0])
    margins = []
    for j in range(N):
        t = _span_grid(br[j], br[j + 1], th.per_span)
        d1 = np.asarray(curve.eval_span(j, t, 1)[1], dtype=float)
        speed = np.linalg.norm(d1, axis=1)
        m = int(np.argmin(speed))
        if speed[m] < min_speed:
            min_speed, min_at = float(speed[m]), float(t[m])
        c = chords[j]
        margins.append(float(np.min(d1[1:-1] @ c) / np.dot(c, c)))

    knots = []
    if hasattr(curve, "qrcurves"):
        last = N if curve.closed else N - 1
        corner_set = {int(c) % N if curve.closed else int(c) for c in corners}
        for i in range(1, last + 1):
            is_corner = (i % N if curve.closed else i) in corner_set
            knots.append(knot_report(curve, i, r, np.asarray(data[i], dtype=float), th, is_corner))
    return SmoothnessReport(r, interp, min_speed, min_at, th.speed * scale, margins, knots, th)


@dataclass
class Samples:
    t: np.ndarray
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    curvature: np.ndarray
    closed: bool = False

    def __len__(self):
        return len(self.t)


def sample(curve, per_span: int = 64) -> Samples:
    """Uniform grid of ``per_span`` points per span; shared knots appear once."""
    if per_span < 2:
        raise BadParams("need at least two samples per span")
    br = _breaks(curve)
    N = len(br) - 1
    ts, vals = [], []
    for j in range(N):
        t = br[j] + (br[j + 1] - br[j]) * np.linspace(0.0, 1.0, per_span)
        t = np.clip(t, br[0], br[-1])
        if j < N - 1 or getattr(curve, "closed", False):
            t = t[:-1]
        ts.append(t)
        vals.append(np.asarray(curve.eval_span(j, t, 2), dtype=float))
    t = np.concatenate(ts)
    v = np.concatenate(vals, axis=1)
    return Samples(t, v[0], v[1], v[2], curvatures(v[1], v[2]), bool(getattr(curve, "closed", False)))
