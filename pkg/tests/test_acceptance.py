"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
import math
import time

import numpy as np
import pytest
from scipy import integrate

from _helpers import qr_sequence
from gcurve.blending import make_polynomial_blend, validate_blend
from gcurve.demo import circle, convex_polygon, lissajous, random_flattenable, sphere_random, square_corners
from gcurve.geometry import signed_curvatures
from gcurve.gluing import glue_linear, glue_sphere
from gcurve.local import BoundaryRule, LocalMode, fit_circle_arc, fit_parabola
from gcurve.pipeline import JobConfig, build
from gcurve.redistribution import certify_contracted, certify_positive_definite, make_qr
from gcurve.verification import ParametricCurve, Thresholds, sample, verify

SIZES, DIMS = (5, 20, 100), (2, 3, 5)


def _clouds():
    out = []
    for seed in range(50):
        N, n = SIZES[seed % 3], DIMS[(seed // 3) % 3]
        out.append(random_flattenable(N, n, np.random.default_rng(seed)))
    return out


CLOUDS = _clouds()


@pytest.fixture
def verdict(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, detail

    return emit


def _scale(cloud):
    return float(np.max(np.linalg.norm(np.diff(cloud.knots(), axis=0), axis=1)))


def test_c01_interpolation(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for cloud in CLOUDS:
        G = glue_linear(qr_sequence(cloud), make_polynomial_blend(2))
        got = G.eval(np.arange(cloud.n_spans + 1, dtype=float))[0]
        worst = max(worst, float(np.max(np.linalg.norm(got - cloud.points, axis=1))))
    elapsed = time.perf_counter() - t0
    verdict("C1 interpolation", worst <= 1e-10 and elapsed < 5.0,
            f"max |G(i)-v_i| = {worst:.2e} over 50 clouds in {elapsed:.2f} s")


def test_c02_blending_axioms(verdict):
    valid = all(validate_blend(make_polynomial_blend(r), r).passed for r in range(6))
    coeffs = make_polynomial_blend(1).power_coefficients()
    ts = np.linspace(0.1, 0.9, 9)
    worst = 0.0
    for r in range(6):
        f = lambda x: x**r * (1 - x) ** r
        den = integrate.quad(f, 0, 1, epsabs=0, epsrel=1e-12)[0]
        oracle = np.array([integrate.quad(f, 0, t, epsabs=0, epsrel=1e-12)[0] / den for t in ts])
        worst = max(worst, float(np.max(np.abs(make_polynomial_blend(r).b2(ts) - oracle))))
    ok = valid and coeffs == [1, 0, -3, 2] and worst <= 1e-10
    verdict("C2 blending axioms", ok, f"r=0..5 valid={valid}, r=1 coefficients {coeffs}, max |B2-quad| = {worst:.1e}")


def test_c03_span_regularity(verdict):
    worst_dot, worst_speed = math.inf, math.inf
    u = np.linspace(0.0, 1.0, 2048)
    for r in (1, 2, 3):
        for cloud in CLOUDS:
            G = glue_linear(qr_sequence(cloud), make_polynomial_blend(r))
            scale = _scale(cloud)
            for j in range(cloud.n_spans):
                d1 = G.eval_span(j, j + u, 1)[1]
                chord = cloud.points[j + 1] - cloud.points[j]
                worst_dot = min(worst_dot, float(np.min(d1 @ chord)) / scale**2)
                worst_speed = min(worst_speed, float(np.min(np.linalg.norm(d1, axis=1))) / (1e-8 * scale))
    verdict("C3 span regularity", worst_dot > 0 and worst_speed > 1,
            f"min <G',chord>/scale^2 = {worst_dot:.3e}, min speed / (1e-8 scale) = {worst_speed:.3e}")


def test_c04_knot_continuity(verdict):
    worst, ratios, missing = 0.0, [], 0
    for r in (1, 2, 3):
        for cloud in CLOUDS:
            G = glue_linear(qr_sequence(cloud), make_polynomial_blend(r))
            rep = verify(G, cloud, r)
            worst = max(worst, rep.max_knot_mismatch)
            for k in rep.knots:
                if k.guard_ratio is None:
                    missing += 1
                else:
                    ratios.append(k.guard_ratio)
    lo, hi = min(ratios), max(ratios)
    ok = worst <= 1e-6 and 1.5 <= lo and hi <= 8.0
    verdict("C4 knot continuity", ok,
            f"max relative mismatch {worst:.2e}, guard ratio in [{lo:.3f}, {hi:.3f}] "
            f"({missing} knots below the noise floor)")


def test_c05_curvature_continuity(verdict):
    t0 = time.perf_counter()
    result = build(lissajous(20), JobConfig(blend="poly:2"))
    elapsed = time.perf_counter() - t0
    jump = result.report.max_curvature_jump
    verdict("C5 curvature continuity", jump <= 1e-3 and elapsed < 1.0,
            f"max relative curvature jump {jump:.2e} in {elapsed:.2f} s")


def test_c06_bonus_smoothness(verdict):
    worst = 0.0
    for cloud in CLOUDS:
        G = glue_linear(qr_sequence(cloud), make_polynomial_blend(1))
        rep = verify(G, cloud, 1, Thresholds(check_extra_order=True))
        worst = max(worst, max(k.extra_mismatch for k in rep.knots))
    verdict("C6 bonus smoothness", worst <= 1e-4, f"max relative order-2 mismatch with poly:1 = {worst:.2e}")


def test_c07_negative_controls(verdict):
    cusp = verify(ParametricCurve(lambda t: np.c_[t**2, t**3], (-1.0, 1.0)))
    F = lambda t: np.c_[0.5 + 4 * (t - 0.5) ** 3, t * (1 - t) ** 2]
    H = lambda t: np.c_[0.5 + 4 * (t - 0.5) ** 3, t**2 * (1 - t)]
    B1 = lambda t: 2 * t**3 - 3 * t**2 + 1
    mix = verify(ParametricCurve(lambda t: F(t) * B1(t)[:, None] + H(t) * (1 - B1(t))[:, None], (0.0, 1.0)))
    ok = (not cusp.checks["regularity"] and abs(cusp.min_speed_at) <= 1e-12
          and not mix.checks["regularity"] and abs(mix.min_speed_at - 0.5) <= 1e-12)
    verdict("C7 negative controls", ok,
            f"cusp speed {cusp.min_speed:.1e} at t={cusp.min_speed_at:g}, "
            f"weighted sum speed {mix.min_speed:.1e} at t={mix.min_speed_at:g}")


def test_c08_corners(verdict):
    on = build(square_corners(1), JobConfig(corner_detect=True))
    off = build(square_corners(1), JobConfig())
    sharp = sum(k.tangent_jump_deg >= 80 for k in on.report.knots)
    jumps = [k.curvature_jump for k in off.report.knots]
    ok = len(on.corners) == 4 and sharp == 4 and not off.corners and max(jumps) <= 1e-3
    verdict("C8 corners", ok, f"with detection {len(on.corners)} corners and {sharp} sharp knots; "
                              f"without {len(off.corners)} corners, max curvature jump {max(jumps):.1e}")


def test_c09_convexity(verdict):
    result = build(convex_polygon(8), JobConfig(local="convex-chord", blend="poly:2"))
    s = sample(result.curve, 256)
    k = signed_curvatures(s.d1, s.d2)
    ok = np.nanmin(k) >= -1e-9 or np.nanmax(k) <= 1e-9
    verdict("C9 convexity", ok, f"signed curvature in [{np.nanmin(k):.3e}, {np.nanmax(k):.3e}]")


def test_c10_circle_and_sphere(verdict):
    t0 = time.perf_counter()
    cloud = circle(12)
    G = glue_sphere(qr_sequence(cloud, LocalMode.ARC), make_polynomial_blend(2), np.zeros(2), 1.0, closed=True)
    dev_c = float(np.max(np.abs(np.linalg.norm(sample(G, 64).points, axis=1) - 1.0)))
    t1 = time.perf_counter()
    cloud = sphere_random(15, 0)
    H = glue_sphere(qr_sequence(cloud, LocalMode.ARC, BoundaryRule.NATURAL), make_polynomial_blend(2), np.zeros(3), 1.0)
    dev_s = float(np.max(np.abs(np.linalg.norm(sample(H, 64).points, axis=1) - 1.0)))
    t2 = time.perf_counter()
    ok = dev_c <= 1e-9 and dev_s <= 1e-8 and t1 - t0 < 1.0 and t2 - t1 < 1.0
    verdict("C10 circle and sphere", ok, f"circle radial deviation {dev_c:.1e} ({t1 - t0:.2f} s), "
                                         f"sphere {dev_s:.1e} ({t2 - t1:.2f} s)")


def test_c11_certification(verdict):
    rng = np.random.default_rng(11)
    passed = 0
    for _ in range(100):
        a, b, c = rng.normal(size=(3, 3))
        F = make_qr(fit_parabola(a, b, c), 1, (a, b, c))
        passed += certify_contracted(F).passed and certify_positive_definite(F).passed
    pts = [np.array([math.cos(math.radians(d)), math.sin(math.radians(d))]) for d in (0, 20, 250)]
    arc = fit_circle_arc(*pts)
    wide = certify_positive_definite(make_qr(arc, 1, tuple(pts)))
    ok = passed == 100 and arc.r - arc.q > math.pi and not wide.passed
    verdict("C11 certification", ok, f"parabola triples certified {passed}/100; arc half-span "
                                     f"{arc.r - arc.q:.3f} rad positive definite = {bool(wide.passed)}")
