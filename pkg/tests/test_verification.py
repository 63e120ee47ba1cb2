import json
import math

import numpy as np
import pytest

from _helpers import qr_sequence
from gcurve.blending import make_polynomial_blend, make_trig_blend
from gcurve.demo import circle, random_flattenable, square_corners
from gcurve.errors import BadParams
from gcurve.gluing import glue_linear, glue_sphere
from gcurve.local import LocalMode
from gcurve.verification import ParametricCurve, Thresholds, clean_json, knot_report, sample, verify


def _curve(seed=0, n_spans=19, dim=3, r=2, blend=None):
    cloud = random_flattenable(n_spans, dim, np.random.default_rng(seed))
    return cloud, glue_linear(qr_sequence(cloud), blend or make_polynomial_blend(r))


def _example_two():
    F = lambda t: np.c_[0.5 + 4 * (t - 0.5) ** 3, t * (1 - t) ** 2]
    G = lambda t: np.c_[0.5 + 4 * (t - 0.5) ** 3, t**2 * (1 - t)]
    B1 = lambda t: 2 * t**3 - 3 * t**2 + 1
    return ParametricCurve(lambda t: F(t) * B1(t)[:, None] + G(t) * (1 - B1(t))[:, None], (0.0, 1.0))


def test_random_3d_cloud_passes():
    cloud, G = _curve()
    rep = verify(G, cloud, 2)
    assert rep.passed, rep.checks
    assert rep.interpolation_err <= 1e-10
    assert rep.max_curvature_jump <= 1e-3
    assert len(rep.knots) == cloud.n_spans - 1
    assert rep.span_pd_margin > 0


def test_cusp_fails_regularity():
    cusp = ParametricCurve(lambda t: np.c_[t**2, t**3], (-1.0, 1.0))
    rep = verify(cusp)
    assert not rep.checks["regularity"]
    assert rep.min_speed_at == pytest.approx(0.0, abs=1e-12)
    assert rep.min_speed < rep.speed_threshold


def test_weighted_sum_fails_regularity_at_half():
    rep = verify(_example_two())
    assert not rep.checks["regularity"]
    assert rep.min_speed_at == pytest.approx(0.5, abs=1e-12)


def test_parametric_curve_with_analytic_derivative():
    def deriv(t, k):
        return np.c_[-np.sin(t), np.cos(t)] if k == 1 else np.c_[-np.cos(t), -np.sin(t)]

    arc = ParametricCurve(lambda t: np.c_[np.cos(t), np.sin(t)], (0.0, 2.0), derivative=deriv)
    rep = verify(arc)
    assert rep.passed
    assert rep.min_speed == pytest.approx(1.0)
    s = sample(arc, 11)
    assert s.curvature == pytest.approx(np.ones(11), abs=1e-12)


@pytest.mark.parametrize("blend, good, bad", [(make_polynomial_blend(0), 1, 2), (make_trig_blend(), 2, 3)])
def test_under_order_blend_fails_knot_continuity(blend, good, bad):
    # locals through all three points buy one order beyond the blend
    cloud, G = _curve(3, 10, 3, blend=blend)
    assert verify(G, cloud, good).checks["knot_continuity"]
    rep = verify(G, cloud, bad)
    assert not rep.checks["knot_continuity"]
    assert rep.max_knot_mismatch > 1e-3


def test_fd_guard_ratio_near_two():
    cloud, G = _curve(4, 12, 2)
    rep = verify(G, cloud, 2)
    ratios = [k.guard_ratio for k in rep.knots if k.guard_ratio is not None]
    assert ratios
    assert all(1.5 <= q <= 8.0 for q in ratios)
    assert np.median(ratios) == pytest.approx(2.0, abs=0.05)


def test_extra_order_mismatch_reported():
    cloud, G = _curve(5, 8, 3, r=1)
    rep = verify(G, cloud, 1, Thresholds(check_extra_order=True))
    assert "extra_order" in rep.checks
    assert max(k.extra_mismatch for k in rep.knots) <= 1e-4


def test_knot_report_curvatures_agree_on_both_sides():
    cloud, G = _curve(6, 6, 3)
    k = knot_report(G, 3, 2, cloud.points[3])
    assert k.curvature_left == pytest.approx(k.curvature_right, rel=1e-6)
    assert k.tangent_jump_deg < 1e-4
    assert len(k.mismatch) == 2


def test_corners_excluded_from_gates():
    cloud = square_corners(1)
    from gcurve.local import build_locals
    from gcurve.redistribution import make_qr

    locs = build_locals(cloud, LocalMode.PARABOLA, "closed", corner_detect=True)
    qrs = [make_qr(f, i, (cloud.vertex(i - 1), cloud.vertex(i), cloud.vertex(i + 1))) for i, f in enumerate(locs)]
    G = glue_linear(qrs, make_polynomial_blend(2), closed=True)
    corners = [0, 2, 4, 6]
    rep = verify(G, cloud, 2, corners=corners)
    assert sorted(rep.corners) == [2, 4, 6, 8]
    jumps = {k.index: k.tangent_jump_deg for k in rep.knots}
    assert all(jumps[i] >= 80 for i in (2, 4, 6, 8))
    assert rep.passed
    ungated = verify(G, cloud, 2)
    assert not ungated.passed


def test_circle_sample_curvature():
    R = 2.5
    cloud = circle(12, R)
    qrs = qr_sequence(cloud, LocalMode.ARC)
    G = glue_sphere(qrs, make_polynomial_blend(2), np.zeros(2), R, closed=True)
    s = sample(G, 32)
    assert s.curvature == pytest.approx(np.full(len(s), 1 / R), abs=1e-6)
    assert len(s) == 12 * 31


def test_sample_counts_open():
    cloud, G = _curve(0, 5, 2)
    for per in (2, 3, 64):
        assert len(sample(G, per)) == 5 * per - 4
    one = ParametricCurve(lambda t: np.c_[t, t * t], (0.0, 1.0))
    s = sample(one, 2)
    assert s.t == pytest.approx([0.0, 1.0])
    with pytest.raises(BadParams):
        sample(G, 1)


def test_sample_knots_are_data():
    cloud, G = _curve(2, 6, 3)
    s = sample(G, 10)
    assert s.points[::9] == pytest.approx(cloud.points, abs=1e-12)


def test_verify_deterministic():
    cloud, G = _curve(7, 10, 3)
    a = verify(G, cloud, 2).to_json()
    b = verify(G, cloud, 2).to_json()
    assert a == b


def test_checks_follow_thresholds():
    cloud, G = _curve(8, 6, 2)
    rep = verify(G, cloud, 2)
    strict = verify(G, cloud, 2, Thresholds(curvature=0.0, knot=0.0))
    assert rep.passed
    assert strict.max_curvature_jump == rep.max_curvature_jump
    assert not strict.checks["knot_continuity"]


def test_report_serialisation():
    cloud, G = _curve(9, 4, 2)
    rep = verify(G, cloud, 2)
    doc = json.loads(rep.to_json())
    assert doc["passed"] is True
    assert set(doc["checks"]) == {"interpolation", "regularity", "positive_definite", "knot_continuity", "fd_guard",
                                  "curvature"}
    assert len(doc["knots"]) == 3
    kv = rep.to_keyvalue().splitlines()
    assert "passed=true" in kv
    assert any(line.startswith("knot.2.mismatch.2=") for line in kv)
    assert dict(line.split("=", 1) for line in kv)["check.curvature"] == "pass"


def test_clean_json_handles_numpy_and_non_finite():
    doc = clean_json({"a": np.float64(1.5), "b": np.int64(3), "c": np.bool_(True), "d": [math.inf, np.nan]})
    assert doc == {"a": 1.5, "b": 3, "c": True, "d": ["inf", "nan"]}
    json.dumps(doc)
