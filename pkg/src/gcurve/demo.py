"""Deterministic demo point clouds."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from .errors import BadParams
from .geometry import PointCloud

DEMOS = ("lissajous", "circle", "sphere-random", "square-corners", "convex-polygon")


def _count(n, minimum, name="n"):
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise BadParams(f"{name} must be an integer >= {minimum}")
    return int(n)


def lissajous(n: int = 20, a: int = 3, b: int = 2, c: int = 7, delta: float = math.pi / 4) -> PointCloud:
    """Closed 3-D knot (sin(a t + delta), sin(b t), sin(c t)) at n uniform t."""
    n = _count(n, 3)
    t = 2.0 * math.pi * np.arange(n) / n
    return PointCloud(np.c_[np.sin(a * t + delta), np.sin(b * t), np.sin(c * t)], closed=True)


def circle(n: int = 12, radius: float = 1.0) -> PointCloud:
    n = _count(n, 3)
    if not radius > 0:
        raise BadParams("radius must be positive")
    t = 2.0 * math.pi * np.arange(n) / n
    pts = radius * np.c_[np.cos(t), np.sin(t)]
    # exact values at the quarter turns
    pts[np.abs(pts) < 1e-12 * radius] = 0.0
    return PointCloud(pts, closed=True)


def _greedy_tour(pts):
    order = [0]
    left = list(range(1, len(pts)))
    while left:
        d = np.linalg.norm(pts[left] - pts[order[-1]], axis=1)
        order.append(left.pop(int(np.argmin(d))))
    return pts[order]


def sphere_random(n: int = 15, seed: int = 0) -> PointCloud:
    """Scrambled Halton points on the unit sphere in nearest-neighbour order."""
    n = _count(n, 3)
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    z = 2.0 * u[:, 0] - 1.0
    phi = 2.0 * math.pi * u[:, 1]
    s = np.sqrt(1.0 - z * z)
    pts = np.c_[s * np.cos(phi), s * np.sin(phi), z]
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return PointCloud(_greedy_tour(pts))


def square_corners(m: int = 1, side: float = 1.0) -> PointCloud:
    """Closed square: the 4 corners plus m evenly spaced points on each edge."""
    m = _count(m, 0, "m")
    if not side > 0:
        raise BadParams("side must be positive")
    corners = side * np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        for j in range(m + 1):
            pts.append(a + (b - a) * j / (m + 1))
    return PointCloud(np.array(pts), closed=True)


def convex_polygon(n: int = 8, radius: float = 1.0) -> PointCloud:
    """Vertices of the regular n-gon, counter-clockwise."""
    n = _count(n, 3)
    if not radius > 0:
        raise BadParams("radius must be positive")
    t = 2.0 * math.pi * np.arange(n) / n
    return PointCloud(radius * np.c_[np.cos(t), np.sin(t)], closed=True)


def gen_demo(name: str, **params) -> PointCloud:
    builders = {
        "lissajous": lissajous,
        "circle": circle,
        "sphere-random": sphere_random,
        "square-corners": square_corners,
        "convex-polygon": convex_polygon,
    }
    if name not in builders:
        raise BadParams(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    try:
        return builders[name](**params)
    except TypeError as exc:
        raise BadParams(str(exc)) from None


def random_flattenable(n_spans: int, dim: int, rng: np.random.Generator, scale: float = 1.0) -> PointCloud:
    """Uniform random points in a cube, redrawn until every consecutive triple is flattenable."""
    n_spans = _count(n_spans, 1, "n_spans")
    while True:
        pts = rng.uniform(-scale, scale, size=(n_spans + 1, dim))
        d = np.diff(pts, axis=0)
        u = d / np.linalg.norm(d, axis=1)[:, None]
        if np.all(np.linalg.norm(u[1:] + u[:-1], axis=1) > 1e-6):
            return PointCloud(pts)
