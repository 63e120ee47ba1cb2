"""End-to-end interpolation: locals, redistribution, blending, gluing, verification."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .blending import Blend, BlendReport, parse_blend, validate_blend
from .errors import BadParams, OffSphereData
from .geometry import PointCloud, VertexTag
from .gluing import GluedCurve, glue_linear, glue_sphere
from .local import BoundaryRule, LocalMode, build_locals, vertex_class
from .redistribution import CertReport, QRCurve, certify_contracted, certify_positive_definite, make_qr
from .verification import Samples, SmoothnessReport, Thresholds, clean_json, sample, verify

log = logging.getLogger(__name__)

SPHERE_FIT_TOL = 1e-6
EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


@dataclass
class JobConfig:
    input: Optional[str] = None
    format: Optional[str] = None
    smoothness: int = 2
    local: str = "parabola"
    boundary: str = "linear"
    blend: Optional[str] = None
    corner_detect: bool = False
    corner_eps: float = 0.1
    sphere: Optional[Union[str, Sequence[float]]] = None
    samples_per_span: int = 64
    output: Optional[str] = None
    output_format: Optional[str] = None
    report: Optional[str] = None
    figure: Optional[str] = None

    def validate(self):
        LocalMode(self.local)
        BoundaryRule(self.boundary)
        if self.smoothness < 0:
            raise BadParams("smoothness must be nonnegative")
        if self.samples_per_span < 2:
            raise BadParams("need at least two samples per span")
        if not self.corner_eps > 0:
            raise BadParams("corner_eps must be positive")
        if self.sphere is not None and LocalMode(self.local) is not LocalMode.ARC:
            raise BadParams("sphere gluing needs circle-arc local curves (--local arc)")
        return self


def make_blend(config: JobConfig) -> Blend:
    spec = config.blend or "poly"
    blend = parse_blend(spec, default_order=config.smoothness)
    if blend.order < config.smoothness:
        log.warning("blend %s has order %s, below the requested smoothness %d", spec, blend.order, config.smoothness)
    return blend


def fit_sphere(points) -> Tuple[np.ndarray, float, float]:
    """Algebraic least-squares sphere; returns centre, radius and max radial residual."""
    pts = np.asarray(points, dtype=float)
    A = np.c_[2.0 * pts, np.ones(len(pts))]
    b = np.sum(pts * pts, axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    c = sol[:-1]
    R = math.sqrt(max(sol[-1] + c @ c, 0.0))
    res = float(np.max(np.abs(np.linalg.norm(pts - c, axis=1) - R)))
    return c, R, res


def resolve_sphere(spec, cloud: PointCloud) -> Tuple[np.ndarray, float]:
    if isinstance(spec, str) and spec.strip().lower() == "auto":
        c, R, res = fit_sphere(cloud.points)
        if not R > 0 or res > SPHERE_FIT_TOL * R:
            raise OffSphereData(f"points are not on a common sphere (residual {res:.3g})")
        return c, R
    vals = [float(x) for x in spec.split(",")] if isinstance(spec, str) else [float(x) for x in spec]
    if len(vals) != cloud.dim + 1:
        raise BadParams(f"sphere needs {cloud.dim} centre coordinates and a radius")
    c, R = np.array(vals[:-1]), vals[-1]
    if not R > 0:
        raise BadParams("sphere radius must be positive")
    res = float(np.max(np.abs(np.linalg.norm(cloud.points - c, axis=1) - R)))
    if res > 1e-8 * R:
        raise OffSphereData(f"data points are off the given sphere by up to {res:.3g}")
    return c, R


@dataclass
class Result:
    cloud: PointCloud
    config: JobConfig
    locals: list
    qrcurves: List[QRCurve]
    certificates: List[Tuple[int, CertReport, CertReport]]
    blend: Blend
    blend_report: BlendReport
    curve: GluedCurve
    report: SmoothnessReport
    samples: Samples
    vertex_tags: dict = field(default_factory=dict)
    sphere: Optional[Tuple[np.ndarray, float]] = None

    @property
    def corners(self) -> List[int]:
        return sorted(i for i, tag in self.vertex_tags.items() if tag is VertexTag.CORNER)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.report.passed else EXIT_FAILED

    def to_dict(self) -> dict:
        cfg = {k: v for k, v in asdict(self.config).items()}
        if cfg.get("sphere") is not None and not isinstance(cfg["sphere"], str):
            cfg["sphere"] = list(cfg["sphere"])
        counts = {}
        for tag in self.vertex_tags.values():
            counts[tag.value] = counts.get(tag.value, 0) + 1
        doc = {
            "config": cfg,
            "cloud": {"points": len(self.cloud), "dim": self.cloud.dim, "closed": self.cloud.closed,
                      "spans": self.cloud.n_spans},
            "vertices": {"classified": counts, "corners": self.corners},
            "blend": {"family": self.blend.family, "order": _num(self.blend.order), "valid": self.blend_report.passed,
                      "failures": self.blend_report.failures},
            "certification": [
                {"index": i, "contracted": c.passed, "contracted_margin": c.worst_margin,
                 "positive_definite": p.passed, "positive_definite_margin": p.worst_margin}
                for i, c, p in self.certificates
            ],
            "samples": len(self.samples),
            "verification": self.report.to_dict(),
        }
        if self.sphere is not None:
            doc["sphere"] = {"center": self.sphere[0].tolist(), "radius": self.sphere[1]}
        return clean_json(doc)

    def to_keyvalue(self) -> str:
        lines = [
            f"cloud.points={len(self.cloud)}",
            f"cloud.dim={self.cloud.dim}",
            f"cloud.closed={'true' if self.cloud.closed else 'false'}",
            f"blend={self.blend.family}:{_num(self.blend.order)}",
            f"blend.valid={'true' if self.blend_report.passed else 'false'}",
            "corners=" + ",".join(str(c) for c in self.corners),
            f"corner_count={len(self.corners)}",
            f"samples={len(self.samples)}",
        ]
        bad = [i for i, c, p in self.certificates if not (c.passed and p.passed)]
        lines.append("uncertified=" + ",".join(str(i) for i in bad))
        return "\n".join(lines) + "\n" + self.report.to_keyvalue()


def _num(v):
    return "inf" if v == math.inf else v


def build(cloud: PointCloud, config: JobConfig, thresholds: Optional[Thresholds] = None) -> Result:
    """Run every stage on an in-memory cloud."""
    config.validate()
    mode = LocalMode(config.local)
    boundary = BoundaryRule(config.boundary)
    if boundary is BoundaryRule.CLOSED and not cloud.closed:
        raise BadParams("the closed boundary rule needs a closed point cloud")
    if cloud.closed and boundary is not BoundaryRule.CLOSED:
        log.info("closed point cloud: using the closed boundary rule")
        boundary = BoundaryRule.CLOSED

    sphere = None
    if config.sphere is not None:
        sphere = resolve_sphere(config.sphere, cloud)
        if boundary is BoundaryRule.LINEAR:
            log.warning("linear boundary pieces leave the sphere; using the natural boundary rule")
            boundary = BoundaryRule.NATURAL

    N = cloud.n_spans
    tags = {}
    for i in range(N if cloud.closed else N + 1):
        cls = vertex_class(cloud, i, config.corner_eps)
        if cls is None:
            continue
        # without corner detection a corner is just a degenerate vertex
        tags[i] = VertexTag.DEGENERATE if cls.tag is VertexTag.CORNER and not config.corner_detect else cls.tag

    locs = build_locals(cloud, mode, boundary, config.corner_detect, config.corner_eps)
    qrs = []
    for i, f in enumerate(locs):
        nb = (cloud.vertex(i - 1) if (cloud.closed or i > 0) else None, cloud.vertex(i),
              cloud.vertex(i + 1) if (cloud.closed or i < N) else None)
        qrs.append(make_qr(f, i, nb))
    certs = [(F.index, certify_contracted(F), certify_positive_definite(F)) for F in qrs[: N if cloud.closed else N + 1]]

    blend = make_blend(config)
    blend_report = validate_blend(blend, blend.order)
    if sphere is not None:
        curve = glue_sphere(qrs, blend, sphere[0], sphere[1], closed=cloud.closed)
    else:
        curve = glue_linear(qrs, blend, closed=cloud.closed)

    corners = [i for i, t in tags.items() if t is VertexTag.CORNER]
    report = verify(curve, cloud, config.smoothness, thresholds, corners=corners)
    samples = sample(curve, config.samples_per_span)
    return Result(cloud, config, locs, qrs, certs, blend, blend_report, curve, report, samples, tags, sphere)


def load_cloud(config: JobConfig) -> PointCloud:
    from .fileio import load_points

    closed = True if BoundaryRule(config.boundary) is BoundaryRule.CLOSED else None
    return load_points(config.input, config.format, closed)


def report_paths(config: JobConfig) -> Tuple[Optional[Path], Optional[Path]]:
    """Report and figure destinations; both default to siblings of the curve output."""
    report = Path(config.report) if config.report else None
    if report is None and config.output:
        out = Path(config.output)
        report = out.with_name(out.stem + ".report.json")
    if config.figure:
        figure = Path(config.figure)
    else:
        figure = report.with_suffix(".png") if report is not None else None
    return report, figure


def write_report(result: Result, path: Path):
    import json

    if path.suffix.lower() == ".json":
        path.write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    else:
        path.write_text(result.to_keyvalue())


def run(config: JobConfig, figure: bool = True) -> Tuple[int, Result]:
    """Load, build, export and report; returns the exit status and the result."""
    from .fileio import export

    cloud = load_cloud(config)
    result = build(cloud, config)
    if config.output:
        export(result.samples, config.output, config.output_format, data=cloud.knots())
    report, fig = report_paths(config)
    if report is not None:
        write_report(result, report)
    if figure and fig is not None:
        from .plotting import plot_result

        plot_result(result, fig)
    return result.exit_code, result
