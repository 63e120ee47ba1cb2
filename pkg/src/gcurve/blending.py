"""r-blending function pairs (B1, B2) on [0, 1] and an axiom checker."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable, List, Optional

import numpy as np

from ._fd import CENTRAL5, fd_weights

INFINITE = math.inf

# step per derivative order for finite-difference derivatives of non-polynomial blends
_FD_STEP = {1: 1e-4, 2: 1e-3, 3: 5e-3, 4: 1e-2}


class Blend:
    """A blending pair.  ``eval(t, k)`` returns two arrays of shape (k+1, len(t)):
    derivatives 0..k of B1 and of B2."""

    family = "custom"
    order: float = 0
    analytic = False

    def b1(self, t):
        raise NotImplementedError

    def b2(self, t):
        return 1.0 - self.b1(t)

    def eval(self, t, nderiv: int = 0):
        t = np.atleast_1d(np.asarray(t))
        if not np.issubdtype(t.dtype, np.floating):
            t = t.astype(float)
        d1 = np.empty((nderiv + 1,) + t.shape, dtype=np.result_type(t, float))
        d2 = np.empty_like(d1)
        d1[0] = self.b1(t)
        d2[0] = self.b2(t)
        for k in range(1, nderiv + 1):
            d1[k] = self._derivative(t, k)
            d2[k] = -d1[k]
        return d1, d2

    def _derivative(self, t, k):
        h = _FD_STEP.get(k, 2e-2)
        offsets = CENTRAL5 if k < 5 else tuple(range(-(k // 2 + 2), k // 2 + 3))
        w = fd_weights(offsets, k)
        return sum(wj * self.b1(t + o * h) for wj, o in zip(w, offsets)) / h**k

    def __repr__(self):
        return f"{type(self).__name__}(order={self.order})"


class PolynomialBlend(Blend):
    """Degree 2r+1 pair from the Bernstein basis: B2 sums the upper r+1 basis polynomials."""

    family = "poly"
    analytic = True

    def __init__(self, r: int):
        if r < 0:
            raise ValueError("blend order must be nonnegative")
        self.order = int(r)
        self.degree = 2 * r + 1
        self._c2 = np.array([0] * (r + 1) + [1] * (r + 1), dtype=np.int64)

    def _bernstein(self, coeffs, t):
        m = len(coeffs) - 1
        out = np.zeros_like(t, dtype=np.result_type(t, float))
        if m < 0:
            return out
        u = 1.0 - t
        for i, c in enumerate(coeffs):
            if c:
                out = out + float(c * comb(m, i)) * t**i * u ** (m - i)
        return out

    def _small(self, t):
        # the weight below one half is summed directly, the other is its complement
        t = np.asarray(t)
        low = t <= 0.5
        return low, np.where(low, self._bernstein(self._c2, t), self._bernstein(1 - self._c2, t))

    def b1(self, t):
        low, v = self._small(t)
        return np.where(low, 1.0 - v, v)

    def b2(self, t):
        low, v = self._small(t)
        return np.where(low, v, 1.0 - v)

    def _derivative(self, t, k):
        n = self.degree
        if k > n:
            return np.zeros_like(t, dtype=np.result_type(t, float))
        diffs = np.diff(1 - self._c2, k)
        return math.perm(n, k) * self._bernstein(diffs, t)

    def power_coefficients(self) -> List[int]:
        """Exact integer coefficients of B1 in ascending powers of t."""
        n = self.degree
        coeffs = [0] * (n + 1)
        for i in range(self.order + 1):
            for j in range(n - i + 1):
                coeffs[i + j] += comb(n, i) * comb(n - i, j) * (-1) ** j
        return coeffs


class TrigBlend(Blend):
    """B1 = cos^2(pi t / 2), B2 = sin^2(pi t / 2)."""

    family = "trig"
    analytic = True
    order = 1

    def b1(self, t):
        return 0.5 * (1.0 + np.cos(np.pi * t))

    def b2(self, t):
        return 0.5 * (1.0 - np.cos(np.pi * t))

    def _derivative(self, t, k):
        x = np.pi * t
        phase = (np.cos(x), -np.sin(x), -np.cos(x), np.sin(x))[k % 4]
        return 0.5 * np.pi**k * phase


def _bump(x):
    x = np.asarray(x)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, np.exp(-1.0 / safe), 0.0)


class SmoothBlend(Blend):
    """C-infinity pair built from exp(-1/x); derivatives by finite differences."""

    family = "smooth"
    order = INFINITE

    def b1(self, t):
        a, b = _bump(t), _bump(1.0 - t)
        return b / (a + b)

    def b2(self, t):
        a, b = _bump(t), _bump(1.0 - t)
        return a / (a + b)


class CustomBlend(Blend):
    """Blend from a user-supplied B1; B2 = 1 - B1.

    ``derivative(t, k)`` may supply exact derivatives, otherwise finite
    differences are used.
    """

    def __init__(self, b1: Callable, order: float, derivative: Optional[Callable] = None, family: str = "custom"):
        self._b1 = b1
        self._deriv = derivative
        self.order = order
        self.family = family
        self.analytic = derivative is not None

    def b1(self, t):
        return np.asarray(self._b1(t), dtype=np.result_type(t, float))

    def _derivative(self, t, k):
        if self._deriv is not None:
            return np.asarray(self._deriv(t, k), dtype=np.result_type(t, float))
        return super()._derivative(t, k)


def make_polynomial_blend(r: int) -> PolynomialBlend:
    return PolynomialBlend(r)


def make_trig_blend() -> TrigBlend:
    return TrigBlend()


def make_smooth_blend() -> SmoothBlend:
    return SmoothBlend()


def parse_blend(spec: str, default_order: int = 2) -> Blend:
    """``poly:R``, ``poly``, ``trig`` or ``smooth``."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "poly":
        return PolynomialBlend(int(arg) if arg else default_order)
    if name == "trig":
        return TrigBlend()
    if name == "smooth":
        return SmoothBlend()
    raise ValueError(f"unknown blend family {spec!r}")


@dataclass
class BlendReport:
    order: float
    passed: bool = True
    failures: List[str] = field(default_factory=list)
    partition_error: float = 0.0
    max_endpoint_derivative: float = 0.0

    def fail(self, message):
        self.passed = False
        self.failures.append(message)


GRID = np.linspace(0.0, 1.0, 1001)


def validate_blend(blend: Blend, r, *, grid: np.ndarray = GRID) -> BlendReport:
    """Check the r-blending axioms on a grid plus endpoint derivatives to order r.

    An infinite r checks endpoint derivatives through order 4.
    """
    report = BlendReport(order=r)
    b1 = np.asarray(blend.b1(grid), dtype=float)
    b2 = np.asarray(blend.b2(grid), dtype=float)

    report.partition_error = float(np.max(np.abs(b1 + b2 - 1.0)))
    if report.partition_error > 1e-12:
        report.fail(f"B1 + B2 deviates from 1 by {report.partition_error:.3g}")

    if np.any(b1 < 0) or np.any(b1 > 1) or np.any(b2 < 0) or np.any(b2 > 1):
        report.fail("values leave [0, 1]")
    inner = (grid >= 0.05) & (grid <= 0.95)
    if not (np.all(b1[inner] > 0) and np.all(b1[inner] < 1) and np.all(b2[inner] > 0) and np.all(b2[inner] < 1)):
        report.fail("values not strictly inside (0, 1) on the open interval")

    if np.any(np.diff(b2) < -1e-15) or np.any(np.diff(b1) > 1e-15):
        report.fail("B2 is not nondecreasing or B1 is not nonincreasing")

    ends = np.array([0.0, 1.0])
    e1, e2 = blend.eval(ends, 0)
    if abs(e1[0, 0] - 1) > 1e-14 or abs(e1[0, 1]) > 1e-14 or abs(e2[0, 0]) > 1e-14 or abs(e2[0, 1] - 1) > 1e-14:
        report.fail("endpoint values are not B1(0)=B2(1)=1, B1(1)=B2(0)=0")

    top = 4 if r == INFINITE else int(r)
    if top >= 1:
        d1, _ = blend.eval(ends, top)
        tol = 1e-10 if blend.analytic else 1e-6
        for k in range(1, top + 1):
            worst = float(np.max(np.abs(d1[k])))
            scale = np.pi**k if blend.analytic else 1.0
            report.max_endpoint_derivative = max(report.max_endpoint_derivative, worst)
            if worst > tol * scale:
                report.fail(f"derivative of order {k} does not vanish at the endpoints ({worst:.3g})")
    return report
