"""Batch front end: family checks, curvature tables, oracle verification,
and scalar-curvature scans, driven by flags or a single JSON config.

Config files are one self-contained JSON document; every flag is an
override.  Outputs are byte-stable across runs with identical config:
iteration order is deterministic and floats are serialized with their
shortest round-trip decimal representation.

Exit codes: 0 success, 1 verification or property failure, 2 bad
configuration or invalid family.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import closedform
from .basemanifold import ChartManifold, adapted_frame, frame_curvature, make_manifold
from .bundlemetric import BundlePoint
from .errors import ConfigError, TbcurvError
from .metricfamily import NaturalMetricFamily, PRESET_NAMES, flatness_beta, preset
from .oracle import OracleConfig, compare

TASKS = ("family-check", "curvature", "sectional", "ricci", "scalar", "verify", "scan")


# --------------------------------------------------------------------------
# Config resolution
# --------------------------------------------------------------------------


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            cfg = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _merge_flags(cfg: dict, args: argparse.Namespace) -> dict:
    """Overlay CLI flags on the config document."""
    cfg = dict(cfg)
    man = dict(cfg.get("manifold") or {})
    if args.manifold is not None:
        man["id"] = args.manifold
    if args.dim is not None:
        man["dim"] = args.dim
    if args.radius is not None:
        man["radius"] = args.radius
    if args.chart is not None:
        man["chart"] = args.chart
    if args.coeffs is not None:
        try:
            man["coeffs"] = json.loads(args.coeffs)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--coeffs must be a JSON array: {exc}")
    if man:
        cfg["manifold"] = man

    fam = dict(cfg.get("family") or {})
    if args.family is not None:
        fam = {"preset": args.family}
    if args.alpha is not None:
        fam.pop("preset", None)
        fam["alpha"] = args.alpha
    if args.beta is not None:
        fam.pop("preset", None)
        fam["beta"] = args.beta
    if args.beta_flatness:
        fam.pop("preset", None)
        fam["beta_flatness"] = True
    if args.t_max is not None:
        fam["t_max"] = args.t_max
    if fam:
        cfg["family"] = fam

    if args.point:
        points = []
        vs = args.v or []
        if len(vs) != len(args.point):
            raise ConfigError("--point and --v must be given the same number of times")
        for xtext, vtext in zip(args.point, vs):
            points.append({"x": _parse_vector(xtext), "v": _parse_vector(vtext)})
        cfg["points"] = points
    if args.grid is not None:
        try:
            cfg["grid"] = json.loads(args.grid)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--grid must be JSON: {exc}")

    out = dict(cfg.get("output") or {})
    if args.out is not None:
        out["path"] = args.out
    if args.format is not None:
        out["format"] = args.format
    if out:
        cfg["output"] = out

    orc = dict(cfg.get("oracle") or {})
    if args.tol_abs is not None:
        orc["tol_abs"] = args.tol_abs
    if args.tol_rel is not None:
        orc["tol_rel"] = args.tol_rel
    if args.steps is not None:
        orc["base_step"] = args.steps
    if args.strategy is not None:
        orc["step_strategy"] = args.strategy
    if args.workers is not None:
        orc["workers"] = args.workers
    if orc:
        cfg["oracle"] = orc
    return cfg


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad vector {text!r}: {exc}")


def _resolve_manifold(cfg: dict) -> ChartManifold:
    man = cfg.get("manifold")
    if not man or "id" not in man:
        raise ConfigError("no manifold configured (--manifold or config.manifold.id)")
    dim = man.get("dim")
    if dim is None:
        raise ConfigError("manifold dim missing (--dim)")
    try:
        return make_manifold(
            man["id"],
            dim=int(dim),
            radius=float(man.get("radius", 1.0)),
            chart=man.get("chart"),
            coeffs=man.get("coeffs"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc))


def _resolve_family(cfg: dict) -> NaturalMetricFamily:
    fam = cfg.get("family")
    if not fam:
        raise ConfigError("no family configured (--family or --alpha/--beta)")
    t_max = float(fam.get("t_max", 25.0))
    if "preset" in fam:
        name = fam["preset"]
        if name not in PRESET_NAMES:
            raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
        return preset(name, t_max=t_max)
    alpha = fam.get("alpha")
    if alpha is None:
        raise ConfigError("custom family needs alpha")
    if fam.get("beta_flatness"):
        beta = flatness_beta(alpha)
        name = f"custom(alpha={alpha}, beta=flatness)"
    else:
        beta = fam.get("beta")
        if beta is None:
            raise ConfigError("custom family needs beta or beta_flatness")
        name = f"custom(alpha={alpha}, beta={beta})"
    try:
        return NaturalMetricFamily(alpha, beta, name=name, t_max=t_max)
    except TbcurvError as exc:
        raise ConfigError(f"bad family expression: {exc}")


def _resolve_points(cfg: dict, M: ChartManifold) -> list[BundlePoint]:
    points: list[BundlePoint] = []
    for entry in cfg.get("points") or []:
        x = np.asarray(entry["x"], dtype=float)
        v = np.asarray(entry["v"], dtype=float)
        if x.shape != (M.dim,) or v.shape != (M.dim,):
            raise ConfigError(
                f"point {entry} has wrong dimension (manifold dim {M.dim})"
            )
        points.append(BundlePoint(x, v))
    grid = cfg.get("grid")
    if grid:
        base_points = grid.get("base_points")
        if not base_points:
            raise ConfigError("grid needs base_points")
        v_norms = grid.get("v_norms", [0.0])
        directions = grid.get("v_directions")
        if directions is None:
            d = np.zeros(M.dim)
            d[0] = 1.0
            directions = [d.tolist()]
        for xs in base_points:
            x = np.asarray(xs, dtype=float)
            g = M.metric(x)
            for d in directions:
                d = np.asarray(d, dtype=float)
                nrm = float(np.sqrt(d @ g @ d))
                if nrm == 0.0:
                    raise ConfigError("grid direction has zero length")
                for s in v_norms:
                    points.append(BundlePoint(x, (float(s) / nrm) * d))
    if not points:
        raise ConfigError("no points configured (--point/--v or config points/grid)")
    return points


def _resolve_oracle(cfg: dict) -> OracleConfig:
    orc = cfg.get("oracle") or {}
    try:
        return OracleConfig(
            step_strategy=orc.get("step_strategy", "richardson"),
            base_step=orc.get("base_step"),
            tol_abs=orc.get("tol_abs"),
            tol_rel=orc.get("tol_rel"),
            workers=orc.get("workers"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------


def _fmt(x) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _emit(cfg: dict, rows: list[dict], header_note: str, payload_key: str) -> None:
    """Write rows as CSV (default) or JSON, deterministically."""
    out = cfg.get("output") or {}
    fmt = out.get("format", "csv")
    path = out.get("path")
    if fmt == "json":
        doc = {payload_key: rows, "note": header_note}
        _write_text(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")
        return
    if fmt != "csv":
        raise ConfigError(f"unknown output format {fmt!r}")
    if not rows:
        _write_text(path, f"# {header_note}\n")
        return
    cols = list(rows[0].keys())
    lines = [f"# {header_note}", ",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in cols))
    _write_text(path, "\n".join(lines) + "\n")


_NOTE = "family functions take t = |v|^2_g (squared norm) as argument"


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_family_check(cfg: dict, samples: int = 4096) -> int:
    fam = _resolve_family(cfg)
    validation = fam.validate(samples=samples)
    print(f"family {fam.name}: {validation.summary()}")
    if not validation.valid:
        return 2
    t_hi = fam.t_max
    ts = [0.0, 0.25 * t_hi, 0.5 * t_hi, t_hi]
    print("      t        F(t)            H(t)")
    for t in ts:
        print(f"{t:9.4f}  {fam.F(t): .8e}  {fam.H(t): .8e}")
    max_f = fam.max_abs_F(t_hi)
    max_h = fam.max_abs_H(t_hi)
    print(f"max |F| = {max_f:.3e}, max |H| = {max_h:.3e} on [0, {t_hi:g}]")

    failures = 0
    f_zero = max_f <= 1e-10
    h_zero = max_h <= 1e-8
    if f_zero:
        # F == 0 forces the flatness beta, alpha*Delta = phi^2, phi > 0, H == 0.
        beta_ref = flatness_beta(fam.alpha)
        grid = np.linspace(0.0, t_hi, 512)
        beta_dev = max(abs(fam.beta_at(t) - beta_ref.value(t)) for t in grid)
        prod_dev = max(
            abs(fam.alpha_at(t) * fam.delta_at(t) - fam.phi_at(t) ** 2) for t in grid
        )
        checks = [
            ("beta equals the flatness combination", beta_dev <= 1e-8),
            ("alpha*(alpha+t*beta) == (alpha+t*alpha')^2", prod_dev <= 1e-8),
            ("alpha + t*alpha' > 0", validation.phi_positive),
            ("H vanishes", h_zero),
        ]
        for label, ok in checks:
            print(f"  F == 0 consequence: {label}: {'ok' if ok else 'FAILED'}")
            failures += 0 if ok else 1
    if h_zero and validation.phi_positive:
        print(f"  H == 0 (with phi > 0) consequence: F vanishes: "
              f"{'ok' if f_zero else 'FAILED'}")
        failures += 0 if f_zero else 1
    return 1 if failures else 0


def _point_rows_header(M: ChartManifold, p: BundlePoint, fp) -> dict:
    return {
        "x": ";".join(repr(float(c)) for c in p.x),
        "v": ";".join(repr(float(c)) for c in p.v),
        "t": float(fp.t),
    }


def cmd_tables(cfg: dict, task: str) -> int:
    """curvature | sectional | ricci | scalar closed-form tables."""
    M = _resolve_manifold(cfg)
    fam = _resolve_family(cfg)
    points = _resolve_points(cfg, M)
    rows: list[dict] = []
    status = 0
    for p in points:
        try:
            fp = adapted_frame(M, p.x, p.v)
            fam.check_point(fp.t * fp.t)
            frame = frame_curvature(M, fp, include_nabla=task in ("curvature", "ricci"))
            head = _point_rows_header(M, p, fp)
            if task == "curvature":
                table = closedform.tm_curvature(M, fam, fp, frame=frame).table
                for idx in np.ndindex(*table.shape):
                    rows.append(
                        {
                            **head,
                            "a": idx[0],
                            "b": idx[1],
                            "c": idx[2],
                            "d": idx[3],
                            "value": float(table[idx]),
                        }
                    )
            elif task == "sectional":
                sec = closedform.tm_sectional(M, fam, fp, frame=frame)
                n = M.dim
                for i in range(n):
                    for j in range(n):
                        rows.append(
                            {
                                **head,
                                "i": i,
                                "j": j,
                                "K_hh": float(sec.hh[i, j]),
                                "K_vv": float(sec.vv[i, j]),
                                "K_hv": float(sec.hv[i, j]),
                            }
                        )
            elif task == "ricci":
                ricci = closedform.tm_ricci(M, fam, fp, frame=frame)
                for idx in np.ndindex(*ricci.shape):
                    rows.append(
                        {**head, "a": idx[0], "b": idx[1], "value": float(ricci[idx])}
                    )
            else:  # scalar
                rows.append(
                    {**head, "scalar": float(closedform.tm_scalar(M, fam, fp, frame=frame))}
                )
        except TbcurvError as exc:
            rows.append(
                {
                    "x": ";".join(repr(float(c)) for c in p.x),
                    "v": ";".join(repr(float(c)) for c in p.v),
                    "t": float("nan"),
                    "error": f"{type(exc).__name__}: {exc}",
                }
            )
            status = 1
    _emit(cfg, rows, f"{task} of (TM, G); {_NOTE}", task)
    return status


def cmd_verify(cfg: dict) -> int:
    M = _resolve_manifold(cfg)
    fam = _resolve_family(cfg)
    points = _resolve_points(cfg, M)
    oracle_cfg = _resolve_oracle(cfg)
    reports = compare(M, fam, points, oracle_cfg)
    for r in reports:
        print(r.summary_line())
    out = cfg.get("output") or {}
    doc = {
        "config": {
            "manifold": {"id": M.catalog_id, "params": M.params},
            "family": fam.name,
            "oracle": oracle_cfg.to_dict(),
        },
        "reports": [r.to_json_dict() for r in reports],
    }
    if out.get("path"):
        _write_text(out["path"], json.dumps(doc, sort_keys=True, indent=2) + "\n")
    ok = all(r.status == "ok" and r.passed for r in reports)
    return 0 if ok else 1


def _constant_curvature_of(M: ChartManifold) -> Optional[float]:
    """Sectional curvature constant of catalog space forms, else None."""
    if M.catalog_id == "euclidean":
        return 0.0
    if M.catalog_id == "sphere":
        radius = float(M.params.get("radius", 1.0))
        return 1.0 / (radius * radius)
    if M.catalog_id == "hyperbolic":
        return -1.0
    return None


def cmd_scan(cfg: dict) -> int:
    M = _resolve_manifold(cfg)
    fam = _resolve_family(cfg)
    points = _resolve_points(cfg, M)
    rows: list[dict] = []
    status = 0
    special = {"exp+": "plus", "exp-": "minus"}.get(fam.name)
    for p in points:
        base = {
            "x": ";".join(repr(float(c)) for c in p.x),
        }
        try:
            fp = adapted_frame(M, p.x, p.v)
            t_sq = fp.t * fp.t
            fam.check_point(t_sq)
            frame = frame_curvature(M, fp, include_nabla=False)
            s_general = closedform.tm_scalar(M, fam, fp, frame=frame)
            k0 = _constant_curvature_of(M)
            if special is not None and k0 is not None:
                s_special = closedform.scalar_exp_specials(
                    k0, M.dim, t_sq, special
                ).value
            else:
                s_special = float("nan")
            rows.append(
                {
                    **base,
                    "v_norm": float(fp.t),
                    "scalar_general": float(s_general),
                    "scalar_special": float(s_special),
                    "F": float(fam.F(t_sq)),
                    "H": float(fam.H(t_sq)),
                    "status": "ok",
                }
            )
        except TbcurvError as exc:
            rows.append(
                {
                    **base,
                    "v_norm": float(np.linalg.norm(p.v)),
                    "scalar_general": float("nan"),
                    "scalar_special": float("nan"),
                    "F": float("nan"),
                    "H": float("nan"),
                    "status": f"{type(exc).__name__}: {exc}",
                }
            )
            status = 1
    _emit(cfg, rows, f"scalar curvature scan; {_NOTE}", "scan")
    return status


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbcurv",
        description="Tangent-bundle curvature tables and oracle verification.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} task")
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--manifold", help="catalog id (euclidean, sphere, hyperbolic, torus-conformal)")
        p.add_argument("--dim", type=int)
        p.add_argument("--radius", type=float)
        p.add_argument("--chart", help="sphere chart: polar | stereographic")
        p.add_argument("--coeffs", help="conformal monomials as JSON [[c, e1, ..., en], ...]")
        p.add_argument("--family", help=f"preset: {', '.join(PRESET_NAMES)}")
        p.add_argument("--alpha", help="alpha(t) expression for a custom family")
        p.add_argument("--beta", help="beta(t) expression for a custom family")
        p.add_argument(
            "--beta-flatness",
            action="store_true",
            help="derive beta from alpha by the flatness formula",
        )
        p.add_argument("--t-max", type=float, help="validity horizon for t = |v|^2")
        p.add_argument(
            "--point", action="append", help="base point 'x1,x2,...' (repeatable)"
        )
        p.add_argument(
            "--v", action="append", help="fiber vector 'v1,v2,...' (repeatable)"
        )
        p.add_argument(
            "--grid",
            help='JSON {"base_points": [[...]], "v_norms": [...], "v_directions": [[...]]}',
        )
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--tol-abs", type=float)
        p.add_argument("--tol-rel", type=float)
        p.add_argument("--steps", type=float, help="finite-difference base step")
        p.add_argument(
            "--strategy", choices=("fixed", "scaled", "richardson"), dest="strategy"
        )
        p.add_argument("--workers", type=int)
        p.add_argument("--samples", type=int, default=4096,
                       help="family-check validation grid size")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_flags(_load_config(args.config), args)
        task = args.task
        if task == "family-check":
            return cmd_family_check(cfg, samples=args.samples)
        if task in ("curvature", "sectional", "ricci", "scalar"):
            return cmd_tables(cfg, task)
        if task == "verify":
            return cmd_verify(cfg)
        if task == "scan":
            return cmd_scan(cfg)
        raise ConfigError(f"unknown task {task!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except TbcurvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
