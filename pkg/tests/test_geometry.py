import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcurve.errors import DegenerateChord, DimensionMismatch, DuplicateConsecutivePoints, ZeroSpeed
from gcurve.geometry import (PointCloud, VertexTag, classify_vertex, curvature, curvatures, flattenable,
                             signed_curvatures)


def _rotation(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


# --- curvature --------------------------------------------------------------

def test_curvature_unit_circle():
    assert curvature([0.0, 1.0], [-1.0, 0.0]) == pytest.approx(1.0)


def test_curvature_line_is_zero():
    assert curvature([1.0, 0.0], [0.0, 0.0]) == 0.0


def test_curvature_parabola_vertex():
    # y = x^2 at the vertex: |x' y'' - y' x''| / |x'|^3 = 2
    assert curvature([1.0, 0.0], [0.0, 2.0]) == pytest.approx(2.0)


def test_curvature_zero_speed_raises():
    with pytest.raises(ZeroSpeed):
        curvature([0.0, 0.0], [1.0, 0.0])


def test_curvature_parallel_derivatives_near_zero():
    d = np.array([0.1, 0.7, 0.3])
    for c in (3.0, 0.3, 7.1, -2.0):
        k = curvature(d, c * d)
        assert 0.0 <= k <= 1e-14


def test_curvature_helix_oracle():
    # helix (a cos t, a sin t, b t) has curvature a / (a^2 + b^2)
    a, b, t = 2.0, 0.5, 0.3
    d1 = [-a * math.sin(t), a * math.cos(t), b]
    d2 = [-a * math.cos(t), -a * math.sin(t), 0.0]
    assert curvature(d1, d2) == pytest.approx(a / (a * a + b * b), rel=1e-14)


def test_curvatures_vectorised_matches_scalar():
    rng = np.random.default_rng(3)
    d1 = rng.normal(size=(20, 4))
    d2 = rng.normal(size=(20, 4))
    expected = [curvature(x, y) for x, y in zip(d1, d2)]
    assert curvatures(d1, d2) == pytest.approx(expected, rel=1e-13)


def test_signed_curvature_orientation():
    ccw = signed_curvatures(np.array([[0.0, 1.0]]), np.array([[-1.0, 0.0]]))
    cw = signed_curvatures(np.array([[0.0, 1.0]]), np.array([[1.0, 0.0]]))
    assert ccw[0] == pytest.approx(1.0)
    assert cw[0] == pytest.approx(-1.0)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.sampled_from([2, 3, 5]), lam=st.floats(0.05, 20.0))
def test_curvature_rotation_and_reparametrisation_invariant(seed, dim, lam):
    rng = np.random.default_rng(seed)
    d1 = rng.normal(size=dim)
    d2 = rng.normal(size=dim)
    k = curvature(d1, d2)
    Q = _rotation(rng, dim)
    assert curvature(Q @ d1, Q @ d2) == pytest.approx(k, rel=1e-10, abs=1e-14)
    assert curvature(lam * d1, lam * lam * d2) == pytest.approx(k, rel=1e-10, abs=1e-14)


# --- flattenability ----------------------------------------------------------

def test_flattenable_collinear():
    ok, u = flattenable([0, 0], [1, 0], [2, 0])
    assert ok
    assert u == pytest.approx([1.0, 0.0])


def test_flattenable_fold_back():
    ok, u = flattenable([0, 0], [1, 0], [0, 0])
    assert not ok
    assert u is None


def test_flattenable_right_angle():
    ok, u = flattenable([0, 0], [1, 0], [1, 1])
    assert ok
    assert u == pytest.approx([1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_flattenable_degenerate_chord():
    with pytest.raises(DegenerateChord):
        flattenable([0, 0], [0, 0], [1, 1])


def _brute_force(a, b, c, n=3600):
    # any valid direction stays valid after projection onto the span of the chords
    d1, d2 = b - a, c - b
    e1 = d1 / np.linalg.norm(d1)
    w = d2 - np.dot(d2, e1) * e1
    e2 = w / np.linalg.norm(w) if np.linalg.norm(w) > 1e-14 else np.roll(e1, 1) - np.dot(np.roll(e1, 1), e1) * e1
    e2 = e2 / np.linalg.norm(e2)
    ang = 2 * math.pi * np.arange(n) / n
    dirs = np.outer(np.cos(ang), e1) + np.outer(np.sin(ang), e2)
    return bool(np.any((dirs @ d1 > 0) & (dirs @ d2 > 0)))


def test_flattenable_agrees_with_brute_force():
    rng = np.random.default_rng(11)
    checked = 0
    for trial in range(1000):
        dim = 2 if trial % 2 else 3
        a, b = rng.normal(size=(2, dim))
        if trial % 10 == 0:
            # near fold-backs
            c = b - (b - a) * rng.uniform(0.5, 2.0) + rng.normal(scale=0.05, size=dim)
        else:
            c = rng.normal(size=dim)
        ok, u = flattenable(a, b, c)
        d1, d2 = b - a, c - b
        cos_turn = np.dot(d1, d2) / (np.linalg.norm(d1) * np.linalg.norm(d2))
        if cos_turn < -1 + 1e-5:
            continue  # inside the grid resolution of the brute force
        checked += 1
        assert ok == _brute_force(a, b, c)
        if ok:
            assert np.dot(d1, u) > 0 and np.dot(d2, u) > 0
    assert checked > 990


# --- vertex classification ---------------------------------------------------

def _octagon():
    t = 2 * math.pi * np.arange(8) / 8
    return np.c_[np.cos(t), np.sin(t)]


def test_classify_octagon_convex():
    assert classify_vertex(*_octagon()[:5]).tag is VertexTag.LOCAL_CONVEX


def test_classify_collinear_middle_degenerate():
    pts = [[0, 1], [1, 0], [2, 0], [3, 0], [4, 1]]
    assert classify_vertex(*pts).tag is VertexTag.DEGENERATE


def test_classify_corner_witness():
    cls = classify_vertex([0, -2], [0, -1], [0, 0], [1, 0], [2, 0])
    assert cls.tag is VertexTag.CORNER
    assert cls.witness == pytest.approx([0.0, 0.0], abs=1e-15)


def test_classify_mixed_turns_general():
    pts = [[0, 0], [1, 0.2], [2, 0], [3, 0.2], [4, 0]]
    assert classify_vertex(*pts).tag is VertexTag.GENERAL


def test_classify_corner_eps_controls_reach():
    # the rays meet at (0, 0) while the middle point sits 0.05 above it
    pts = [[0, -2], [0, -1], [0.0, 0.05], [1, 0], [2, 0]]
    assert classify_vertex(*pts, corner_eps=0.1).tag is VertexTag.CORNER
    assert classify_vertex(*pts, corner_eps=0.01).tag is VertexTag.DEGENERATE


def test_classify_three_dimensional_projects():
    pts = np.c_[np.array([[0, -2], [0, -1], [0, 0], [1, 0], [2, 0]], dtype=float), np.zeros(5)]
    rng = np.random.default_rng(5)
    Q = _rotation(rng, 3)
    moved = pts @ Q.T + np.array([1.0, -2.0, 0.5])
    cls = classify_vertex(*moved)
    assert cls.tag is VertexTag.CORNER
    assert cls.witness == pytest.approx(moved[2], abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.01, 100.0), which=st.sampled_from(["oct", "corner", "random"]))
def test_classification_rigid_and_scale_invariant(seed, scale, which):
    rng = np.random.default_rng(seed)
    if which == "oct":
        pts = _octagon()[:5]
    elif which == "corner":
        pts = np.array([[0, -2], [0, -1], [0, 0], [1, 0], [2, 0]], dtype=float)
    else:
        pts = rng.normal(size=(5, 2))
    Q = _rotation(rng, 2)
    shift = rng.normal(size=2)
    moved = scale * pts @ Q.T + shift
    a = classify_vertex(*pts)
    b = classify_vertex(*moved)
    assert a.tag is b.tag
    if a.witness is not None:
        assert b.witness == pytest.approx(scale * Q @ a.witness + shift, abs=1e-9 * max(1.0, scale))


# --- point clouds ------------------------------------------------------------

def test_point_cloud_spans():
    open_cloud = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    closed_cloud = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]), closed=True)
    assert open_cloud.n_spans == 2
    assert closed_cloud.n_spans == 3
    assert closed_cloud.knots()[-1] == pytest.approx([0.0, 0.0])
    assert closed_cloud.vertex(-1) == pytest.approx([1.0, 1.0])


def test_point_cloud_rejects_duplicates():
    with pytest.raises(DuplicateConsecutivePoints):
        PointCloud([[0, 0], [0, 0], [1, 1]])
    with pytest.raises(DuplicateConsecutivePoints):
        PointCloud([[0, 0], [1, 0], [0, 0]], closed=True)


def test_point_cloud_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        PointCloud([[0.0], [1.0]])
    with pytest.raises(ValueError):
        PointCloud([[0, 0], [1, 1]], closed=True)
