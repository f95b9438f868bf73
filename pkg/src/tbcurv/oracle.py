"""Ground-truth numerical curvature of (TM, G).

The oracle treats the induced-coordinate bundle metric as an opaque
2n-dimensional metric: it differentiates G(x, v) by finite differences,
assembles the Levi-Civita curvature under the same pinned sign convention
as the base machinery, and contracts with the adapted frame.  It never
evaluates any closed-form curvature expression, so agreement between the
two tables is a genuine two-route check.

A single global sign is calibrated per (manifold, family) run; the sign is
required to be consistent across all six component classes, and a mixed
requirement is reported as a formula erratum rather than absorbed.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .basemanifold import AdaptedFramePoint, ChartManifold, adapted_frame, frame_curvature
from .bundlemetric import BundlePoint, adapted_frame_vectors, induced_metric
from .closedform import CLASS_NAMES, component_class_masks, tm_curvature
from .errors import ConditioningWarning, TbcurvError
from .metricfamily import NaturalMetricFamily
from .numdiff import (
    christoffel_jacobian_from_jets,
    christoffels_from_jets,
    matrix_jets,
    riemann_from_christoffels,
)

__all__ = [
    "OracleConfig",
    "OracleResult",
    "SignCalibration",
    "CurvatureReport",
    "numeric_tm_curvature",
    "calibrate_sign",
    "compare",
]

_STRATEGIES = ("fixed", "scaled", "richardson")
_DEFAULT_STEP = {"fixed": 1e-3, "scaled": 3e-4, "richardson": 1e-3}
_DEFAULT_TOL = {
    "fixed": (1e-3, 1e-2),
    "scaled": (1e-3, 1e-2),
    "richardson": (1e-5, 1e-3),
}


@dataclass(frozen=True)
class OracleConfig:
    """Step strategy and tolerance policy for the numeric curvature.

    Unset step/tolerances resolve to strategy defaults: plain central
    differences get abs 1e-3 / rel 1e-2, Richardson gets abs 1e-5 /
    rel 1e-3.
    """

    step_strategy: str = "richardson"
    base_step: Optional[float] = None
    tol_abs: Optional[float] = None
    tol_rel: Optional[float] = None
    workers: Optional[int] = None

    def __post_init__(self):
        if self.step_strategy not in _STRATEGIES:
            raise ValueError(f"step_strategy must be one of {_STRATEGIES}")
        if self.base_step is not None and self.base_step <= 0:
            raise ValueError("base_step must be positive")
        for tol in (self.tol_abs, self.tol_rel):
            if tol is not None and tol <= 0:
                raise ValueError("tolerances must be positive")

    @property
    def step(self) -> float:
        return self.base_step if self.base_step is not None else _DEFAULT_STEP[
            self.step_strategy
        ]

    @property
    def abs_tol(self) -> float:
        return self.tol_abs if self.tol_abs is not None else _DEFAULT_TOL[
            self.step_strategy
        ][0]

    @property
    def rel_tol(self) -> float:
        return self.tol_rel if self.tol_rel is not None else _DEFAULT_TOL[
            self.step_strategy
        ][1]

    def to_dict(self) -> dict:
        return {
            "step_strategy": self.step_strategy,
            "base_step": self.step,
            "tol_abs": self.abs_tol,
            "tol_rel": self.rel_tol,
        }


@dataclass(frozen=True)
class OracleResult:
    table: np.ndarray  # raw frame-contracted curvature, no symmetry projection
    gram: np.ndarray
    cond: float
    fp: AdaptedFramePoint


def _steps_for(cfg: OracleConfig, z: np.ndarray) -> np.ndarray:
    if cfg.step_strategy == "fixed":
        return np.full(z.shape[0], cfg.step)
    return cfg.step * np.maximum(1.0, np.abs(z))


def numeric_tm_curvature(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    p: BundlePoint,
    cfg: OracleConfig = OracleConfig(),
    fp: Optional[AdaptedFramePoint] = None,
) -> OracleResult:
    """Frame-contracted curvature table of the 2n-dimensional metric G,
    from finite differences of induced_metric values only."""
    n = M.dim
    M.check_interior(p.x)
    z0 = np.concatenate([p.x, p.v])

    def gfun(z: np.ndarray) -> np.ndarray:
        return induced_metric(M, fam, BundlePoint(z[:n], z[n:]))

    steps = _steps_for(cfg, z0)
    g0, dg, d2g = matrix_jets(
        gfun, z0, steps, richardson=cfg.step_strategy == "richardson"
    )
    cond = float(np.linalg.cond(g0))
    if cond > 1e8:
        warnings.warn(
            f"bundle metric condition number {cond:.3g} exceeds 1e8",
            ConditioningWarning,
        )
    gamma = christoffels_from_jets(g0, dg)
    dgamma = christoffel_jacobian_from_jets(g0, dg, d2g)
    _, rlow = riemann_from_christoffels(g0, gamma, dgamma)

    if fp is None:
        fp = adapted_frame(M, p.x, p.v)
    frame = adapted_frame_vectors(M, fp)
    table = np.einsum(
        "aA,bB,cC,dD,ABCD->abcd", frame, frame, frame, frame, rlow, optimize=True
    )
    gram = frame @ g0 @ frame.T
    return OracleResult(table=table, gram=gram, cond=cond, fp=fp)


# --------------------------------------------------------------------------
# Sign calibration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SignCalibration:
    sign: int
    underdetermined: bool
    per_class: dict  # class name -> +1 | -1 | None (undetermined)
    mixed_classes: tuple

    @property
    def consistent(self) -> bool:
        return not self.mixed_classes


def calibrate_sign(
    closed_tables: Sequence[np.ndarray],
    oracle_tables: Sequence[np.ndarray],
    n: int,
    abs_tol: float,
) -> SignCalibration:
    """Global sign s minimizing the total deviation |closed - s*oracle|,
    pooled over tables.

    Components enter only where both tables exceed 100x the absolute
    tolerance.  The per-class signs must agree; disagreement is reported in
    ``mixed_classes`` (a formula erratum, never silently fixed).  With no
    usable component anywhere the result is underdetermined and s = +1.
    """
    floor = 100.0 * abs_tol
    masks = component_class_masks(n)
    per_class: dict = {}
    total_dot = 0.0
    for name in CLASS_NAMES:
        mask = masks[name]
        dot = 0.0
        seen = False
        for closed, orc in zip(closed_tables, oracle_tables):
            c = closed[mask]
            o = orc[mask]
            keep = (np.abs(c) > floor) & (np.abs(o) > floor)
            if np.any(keep):
                seen = True
                dot += float(c[keep] @ o[keep])
        if not seen or dot == 0.0:
            per_class[name] = None
        else:
            per_class[name] = 1 if dot > 0 else -1
            total_dot += dot
    determined = [s for s in per_class.values() if s is not None]
    if not determined:
        return SignCalibration(
            sign=1, underdetermined=True, per_class=per_class, mixed_classes=()
        )
    sign = 1 if total_dot > 0 else -1
    mixed = tuple(
        name for name, s in per_class.items() if s is not None and s != sign
    )
    return SignCalibration(
        sign=sign, underdetermined=False, per_class=per_class, mixed_classes=mixed
    )


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


@dataclass
class CurvatureReport:
    """Closed-form vs oracle comparison at one bundle point."""

    manifold_id: str
    manifold_params: dict
    family_name: str
    x: list
    v: list
    t: float
    config: dict
    status: str = "ok"  # "ok" | "error"
    error: Optional[str] = None
    closed: Optional[np.ndarray] = None
    oracle: Optional[np.ndarray] = None
    deviations: Optional[np.ndarray] = None
    max_abs_dev: Optional[float] = None
    max_rel_dev: Optional[float] = None
    sign: int = 1
    sign_underdetermined: bool = False
    mixed_sign_classes: tuple = ()
    cond: Optional[float] = None
    passed: bool = False
    notes: list = field(default_factory=list)

    def finalize(self, calibration: SignCalibration, abs_tol: float, rel_tol: float):
        s = calibration.sign
        self.sign = s
        self.sign_underdetermined = calibration.underdetermined
        self.mixed_sign_classes = calibration.mixed_classes
        dev = self.closed - s * self.oracle
        self.deviations = dev
        scale = np.maximum(np.abs(self.closed), np.abs(self.oracle))
        self.max_abs_dev = float(np.max(np.abs(dev)))
        significant = scale > abs_tol
        if np.any(significant):
            self.max_rel_dev = float(
                np.max(np.abs(dev[significant]) / scale[significant])
            )
        else:
            self.max_rel_dev = 0.0
        within = np.abs(dev) <= abs_tol + rel_tol * scale
        self.passed = bool(np.all(within)) and not calibration.mixed_classes
        if calibration.mixed_classes:
            self.notes.append(
                "sign calibration disagrees across component classes: "
                + ", ".join(calibration.mixed_classes)
            )

    def to_json_dict(self) -> dict:
        def flatten(a):
            return None if a is None else np.asarray(a).ravel().tolist()

        shape = None if self.closed is None else list(self.closed.shape)
        return {
            "manifold": {"id": self.manifold_id, "params": self.manifold_params},
            "family": self.family_name,
            "point": {"x": list(self.x), "v": list(self.v), "t": self.t},
            "config": self.config,
            "status": self.status,
            "error": self.error,
            "table_shape": shape,
            "closed_table": flatten(self.closed),
            "oracle_table": flatten(self.oracle),
            "deviations": flatten(self.deviations),
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "sign": self.sign,
            "sign_underdetermined": self.sign_underdetermined,
            "mixed_sign_classes": list(self.mixed_sign_classes),
            "condition_number": self.cond,
            "passed": self.passed,
            "notes": list(self.notes),
        }

    def summary_line(self) -> str:
        if self.status == "error":
            return (
                f"ERROR  {self.manifold_id}+{self.family_name} at t={self.t:.4g}: "
                f"{self.error}"
            )
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{verdict:5s}  {self.manifold_id}+{self.family_name} t={self.t:.4g} "
            f"max_abs={self.max_abs_dev:.3e} max_rel={self.max_rel_dev:.3e} "
            f"sign={self.sign:+d}"
        )


def _resolve_workers(cfg: OracleConfig, npoints: int) -> int:
    desired = cfg.workers if cfg.workers is not None else 1
    cap = os.environ.get("TBCURV_THREADS")
    if cap:
        try:
            desired = min(desired, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, min(desired, npoints)) if npoints else 1


def compare(
    M: ChartManifold,
    fam: NaturalMetricFamily,
    points: Sequence[BundlePoint],
    cfg: OracleConfig = OracleConfig(),
) -> list[CurvatureReport]:
    """Run closed form and oracle at each point, calibrate the sign once
    per (manifold, family), and emit one report per point.

    Per-point failures (validity, domain) are embedded in that point's
    report; the remaining points still get full comparisons.  Reports come
    back in point order regardless of worker count.
    """

    def run_point(p: BundlePoint):
        report = CurvatureReport(
            manifold_id=M.catalog_id,
            manifold_params=M.params,
            family_name=fam.name,
            x=[float(c) for c in np.atleast_1d(p.x)],
            v=[float(c) for c in np.atleast_1d(p.v)],
            t=0.0,
            config=cfg.to_dict(),
        )
        try:
            fp = adapted_frame(M, p.x, p.v)
            report.t = fp.t
            fam.check_point(fp.t * fp.t)
            frame = frame_curvature(M, fp, include_nabla=True)
            closed = tm_curvature(M, fam, fp, frame=frame).table
            orc = numeric_tm_curvature(M, fam, p, cfg, fp=fp)
            report.closed = closed
            report.oracle = orc.table
            report.cond = orc.cond
        except TbcurvError as exc:
            report.status = "error"
            report.error = f"{type(exc).__name__}: {exc}"
            report.passed = False
        return report

    points = list(points)
    workers = _resolve_workers(cfg, len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_point, points))
    else:
        reports = [run_point(p) for p in points]

    ok = [r for r in reports if r.status == "ok"]
    if ok:
        calibration = calibrate_sign(
            [r.closed for r in ok], [r.oracle for r in ok], M.dim, cfg.abs_tol
        )
        for r in ok:
            r.finalize(calibration, cfg.abs_tol, cfg.rel_tol)
    return reports
