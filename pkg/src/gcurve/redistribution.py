"""Piecewise-linear redistribution of local curves onto integer knots."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidDomain
from .local import LocalCurve

DEFAULT_SAMPLES = 512


@dataclass(frozen=True)
class Redistributor:
    """Maps local knots (lo, mid, hi) to (i-1, i, i+1), linearly on each half.

    ``lo`` or ``hi`` may be None for one-sided boundary curves.  Passing the
    knots in decreasing order yields a decreasing map.
    """

    index: int
    lo: Optional[float]
    mid: float
    hi: Optional[float]

    def __post_init__(self):
        ends = [x for x in (self.lo, self.hi) if x is not None]
        if not ends:
            raise InvalidDomain("a redistributor needs at least one half")
        diffs = []
        if self.lo is not None:
            diffs.append(self.mid - self.lo)
        if self.hi is not None:
            diffs.append(self.hi - self.mid)
        if any(d == 0.0 for d in diffs) or (len(diffs) == 2 and diffs[0] * diffs[1] < 0):
            raise InvalidDomain("redistribution knots must be strictly monotone")

    @property
    def has_left(self) -> bool:
        return self.lo is not None

    @property
    def has_right(self) -> bool:
        return self.hi is not None

    def slope(self, side: int) -> float:
        """ds/dt of the inverse map on the left (side < 0) or right half."""
        if side < 0:
            if self.lo is None:
                raise InvalidDomain("no left half")
            return self.mid - self.lo
        if self.hi is None:
            raise InvalidDomain("no right half")
        return self.hi - self.mid

    def inverse(self, t, side: int = 1):
        t = np.asarray(t)
        return self.mid + (t - self.index) * self.slope(side)

    def forward(self, s):
        """S(s) for s on either half."""
        s = np.asarray(s)
        if self.has_left and self.has_right:
            left = (s - self.mid) * self.slope(-1) < 0
            slope = np.where(left, self.slope(-1), self.slope(1))
        else:
            slope = self.slope(-1 if self.has_left else 1)
        return self.index + (s - self.mid) / slope


@dataclass(frozen=True, eq=False)
class QRCurve:
    """Redistributed local curve ``F_i = f_i o S_i^-1`` on [i-1, i+1].

    ``neighbors`` holds the data points (v_{i-1}, v_i, v_{i+1}); entries may be
    None at open boundaries.
    """

    local: LocalCurve
    redistributor: Redistributor
    neighbors: tuple = (None, None, None)

    @property
    def index(self) -> int:
        return self.redistributor.index

    @property
    def has_left(self) -> bool:
        return self.redistributor.has_left

    @property
    def has_right(self) -> bool:
        return self.redistributor.has_right

    def eval(self, t, order: int = 0, side: int = 1, origin=None) -> np.ndarray:
        """Values on one half: left half for side < 0, right half otherwise."""
        slope = self.redistributor.slope(side)
        s = self.redistributor.inverse(t, side)
        local_side = 1 if side * slope > 0 else -1
        out = self.local.eval(s, order, local_side, origin)
        for m in range(1, order + 1):
            out[m] = out[m] * slope**m
        return out

    def __call__(self, t, side: int = 1):
        return self.eval(t, 0, side)[0]


def make_qr(local: LocalCurve, i: int, neighbors: Sequence = (None, None, None),
            redistributor: Optional[Redistributor] = None) -> QRCurve:
    """QR curve from a local curve; the redistributor defaults to its own knots."""
    if redistributor is None:
        if local.p is not None and local.r is not None and not local.p < local.q < local.r:
            raise InvalidDomain("local knots must satisfy p < q < r")
        redistributor = Redistributor(i, local.p, local.q, local.r)
    return QRCurve(local, redistributor, tuple(neighbors))


class CertProperty(str, Enum):
    CONTRACTED = "Contracted"
    POSITIVE_DEFINITE = "PositiveDefinite"


@dataclass(frozen=True)
class CertReport:
    property: CertProperty
    passed: bool
    worst_margin: float
    worst_location: float
    equality: bool = False


def _interior(n):
    return (np.arange(n) + 1.0) / (n + 1.0)


def _data(F: QRCurve):
    i = F.index
    vals = []
    for k, side in zip((-1, 0, 1), (-1, 1, 1)):
        v = F.neighbors[k + 1]
        if v is None:
            if (k < 0 and not F.has_left) or (k > 0 and not F.has_right):
                vals.append(None)
                continue
            v = F(i + k, side=side if k else (1 if F.has_right else -1))
        vals.append(np.asarray(v, dtype=float))
    return vals


def _report(prop, margins, locations, scale):
    margins = np.concatenate(margins)
    locations = np.concatenate(locations)
    slack = 1e-12 * scale * scale
    j = int(np.argmin(margins))
    worst = float(margins[j])
    return CertReport(prop, worst >= -slack, worst, float(locations[j]), bool(np.all(np.abs(margins) <= slack)))


def certify_contracted(F: QRCurve, nsamples: int = DEFAULT_SAMPLES) -> CertReport:
    """Sampled check that F stays on the v_i side of the chord polyline."""
    i = F.index
    prev, cur, nxt = _data(F)
    tau = _interior(nsamples)
    margins, locations, chords = [], [], []
    if F.has_left and prev is not None:
        t = i - 1 + tau
        lin = prev + tau[:, None] * (cur - prev)
        margins.append((F(t, side=-1) - lin) @ (cur - prev))
        locations.append(t)
        chords.append(np.linalg.norm(cur - prev))
    if F.has_right and nxt is not None:
        t = i + tau
        lin = cur + tau[:, None] * (nxt - cur)
        margins.append((F(t, side=1) - lin) @ (cur - nxt))
        locations.append(t)
        chords.append(np.linalg.norm(nxt - cur))
    return _report(CertProperty.CONTRACTED, margins, locations, max(chords))


def certify_positive_definite(F: QRCurve, nsamples: int = DEFAULT_SAMPLES) -> CertReport:
    """Sampled check of <F'(x), F(beta) - F(alpha)> > 0 on each open half-span."""
    i = F.index
    tau = _interior(nsamples)
    margins, locations, chords = [], [], []
    for side, (alpha, beta) in ((-1, (i - 1, i)), (1, (i, i + 1))):
        if (side < 0 and not F.has_left) or (side > 0 and not F.has_right):
            continue
        ends = F(np.array([alpha, beta], dtype=float), side=side)
        chord = ends[1] - ends[0]
        t = alpha + tau
        margins.append(F.eval(t, 1, side)[1] @ chord)
        locations.append(t)
        chords.append(np.linalg.norm(chord))
    return _report(CertProperty.POSITIVE_DEFINITE, margins, locations, max(chords))
