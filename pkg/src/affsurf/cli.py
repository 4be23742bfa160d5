"""Command line front end.

Subcommands: solve, sweep, render, limit, hausdorff, verify. Every run
writes one structured report whose manifest lists each emitted file, and
identical configurations produce byte-identical outputs, so reports and
figures diff cleanly across reruns. Exit codes: 0 all checks pass, 1 a
check failed, 2 bad usage, 3 a numerical stage gave up.
"""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .connection import RationalConnection
from .develop import DevelopingMap
from .embedding import (
    VirtualPointRep,
    edge_strip_chart,
    half_strip_chart,
    outer_chart,
    separation_check,
    spiral_ball_chart,
    transition_continuity_check,
)
from .limitset import (
    convergence_report,
    hausdorff_distance,
    limit_image_cloud,
    rectangle_image_boundary,
)
from .pointcloud import PointCloud, write_points
from .solver import continuation_sweep, extract_limit, solve_prevertex
from .surface import CORNER_COORD, CORNERS, corner_holonomy, hole_monodromy
from .svg import PALETTE, PlaneCurve, PlaneDots, figure

COMMANDS = ("solve", "sweep", "render", "limit", "hausdorff", "verify")

_DEFAULTS = {
    "k": (),
    "k_grid": (),
    "tol_solver": 1e-10,
    "tol_quad": 1e-12,
    "theta_max": 8.0 * math.pi,
    "strip_depth": 40.0,
    "density": 250.0,
    "out": "out",
    "seed": 0,
    "format": "svg",
}

_FLAG_KEYS = tuple(_DEFAULTS)


class UsageError(Exception):
    pass


def _k_label(K: float) -> str:
    if math.isinf(K):
        return "inf"
    if K == int(K) and abs(K) < 1e15:
        return str(int(K))
    return "%.12g" % K


def _decades(lo: int, hi: int) -> Tuple[float, ...]:
    return tuple(10.0**j for j in range(lo, hi + 1))


def _parse_k(raw) -> Tuple[float, ...]:
    if raw is None:
        return ()
    items = raw if isinstance(raw, (list, tuple)) else [raw]
    values = []
    for item in items:
        tokens = str(item).split(",") if isinstance(item, str) else [item]
        for tok in tokens:
            text = str(tok).strip()
            if not text:
                continue
            try:
                values.append(math.inf if text.lower() == "inf" else float(text))
            except ValueError:
                raise UsageError(f"bad aspect {text!r}") from None
    return tuple(sorted(set(values)))


def _parse_grid(raw) -> Tuple[float, ...]:
    if raw is None:
        return ()
    if isinstance(raw, (list, tuple)):
        values = [float(v) for v in raw]
    else:
        text = str(raw).strip()
        if not text:
            return ()
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"grid spec must be start:stop:count, got {text!r}")
            try:
                a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            except ValueError:
                raise UsageError(f"bad grid spec {text!r}") from None
            if not (0 < a <= b) or n < 2:
                raise UsageError(f"grid needs 0 < start <= stop and count >= 2, got {text!r}")
            exps = np.linspace(math.log10(a), math.log10(b), n)
            values = [float(10.0**e) for e in exps]
        else:
            try:
                values = [float(tok) for tok in text.split(",") if tok.strip()]
            except ValueError:
                raise UsageError(f"bad grid list {text!r}") from None
    return tuple(sorted(set(values)))


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one invocation, already validated."""

    command: str
    k: Tuple[float, ...]
    k_grid: Tuple[float, ...]
    tol_solver: float
    tol_quad: float
    theta_max: float
    strip_depth: float
    density: float
    out: str
    seed: int
    format: str

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("tol_solver", "tol_quad", "theta_max", "strip_depth", "density"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise UsageError(f"{name} must be a positive number, got {v!r}")
        if self.format not in ("svg", "txt"):
            raise UsageError(f"format must be svg or txt, got {self.format!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise UsageError(f"seed must be a nonnegative integer, got {self.seed!r}")
        ks = tuple(sorted(float(v) for v in self.k))
        for v in ks:
            if not v >= 1.0:
                raise UsageError(f"aspects start at 1, got {v}")
            if math.isinf(v) and self.command != "render":
                raise UsageError("aspect inf is only drawable; use render, limit, or sweep")
        grid = tuple(sorted(float(v) for v in self.k_grid))
        for v in grid:
            if not (v >= 1.0 and math.isfinite(v)):
                raise UsageError(f"grid aspects must be finite and >= 1, got {v}")
        object.__setattr__(self, "k", ks)
        object.__setattr__(self, "k_grid", grid)
        object.__setattr__(self, "out", str(self.out))

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "k": [_k_label(v) for v in self.k],
            "k_grid": list(self.k_grid),
            "tol_solver": self.tol_solver,
            "tol_quad": self.tol_quad,
            "theta_max": self.theta_max,
            "strip_depth": self.strip_depth,
            "density": self.density,
            "out": self.out,
            "seed": self.seed,
            "format": self.format,
        }


def make_config(command: str, **overrides) -> RunConfig:
    """RunConfig from defaults plus overrides, with per-command fallbacks."""
    merged = dict(_DEFAULTS)
    for key, value in overrides.items():
        if key not in merged:
            raise UsageError(f"unknown setting {key!r}")
        merged[key] = value
    merged["k"] = _parse_k(merged["k"])
    merged["k_grid"] = _parse_grid(merged["k_grid"])
    if not merged["k"]:
        if command in ("solve", "render"):
            raise UsageError(f"{command} needs at least one --k")
        if command == "verify":
            merged["k"] = (2.0, 5.0, 1000.0)
    if not merged["k_grid"]:
        merged["k_grid"] = _decades(2, 6) if command == "hausdorff" else _decades(1, 8)
    config = RunConfig(command=command, **merged)
    needs_sweep = command in ("sweep", "limit") or (
        command == "render" and any(math.isinf(v) for v in config.k)
    )
    if needs_sweep and len([v for v in config.k_grid if v > 1.0]) < 3:
        raise UsageError("extrapolation needs a grid of at least three aspects above 1")
    return config


def _sha256(payload: dict) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, allow_nan=False).encode()
    ).hexdigest()


def _plain(value):
    """Recursively reduce to json-serializable builtins; complex -> [re, im]."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


@dataclass(frozen=True)
class RunReport:
    command: str
    config: dict
    config_sha256: str
    steps: Tuple[dict, ...]
    results: dict
    manifest: Tuple[str, ...]
    status: str

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "config_sha256": self.config_sha256,
            "steps": list(self.steps),
            "results": self.results,
            "manifest": list(self.manifest),
            "status": self.status,
        }
        return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _resolve_out(config: RunConfig) -> Tuple[Path, Path, str]:
    out = Path(config.out)
    if out.suffix == ".json":
        return out.parent, out, out.stem + "."
    return out, out / "report.json", ""


class _Recorder:
    def __init__(self, out_dir: Path, prefix: str):
        self.out_dir = out_dir
        self.prefix = prefix
        self.steps: list = []
        self.files: list = []

    def step(self, name: str, ok: bool, detail: Optional[dict] = None) -> bool:
        entry = {"name": name, "status": "ok" if ok else "fail"}
        if detail:
            entry["detail"] = _plain(detail)
        self.steps.append(entry)
        return ok

    @property
    def first_failed(self) -> Optional[str]:
        for s in self.steps:
            if s["status"] == "fail":
                return s["name"]
        return None

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / (self.prefix + name)
        path.write_text(text)
        self.files.append(path.name)
        return path

    def write_cloud(self, name: str, cloud: PointCloud) -> Path:
        path = self.out_dir / (self.prefix + name)
        write_points(path, cloud)
        self.files.append(path.name)
        return path


def _table(title: str, columns: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [f"# affsurf {title}", "# columns: " + " ".join(columns)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, float):
                cells.append("%.17g" % cell)
            else:
                cells.append(str(cell))
        lines.append(" ".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def _solve_sorted(ks, config) -> dict:
    out = {}
    for K in ks:
        out[K] = solve_prevertex(K, tol=config.tol_solver, quad_tol=config.tol_quad)
    return out


def _run_solve(config: RunConfig, rec: _Recorder) -> dict:
    solves = []
    worst = 0.0
    for K in config.k:
        sol = solve_prevertex(K, tol=config.tol_solver, quad_tol=config.tol_quad)
        worst = max(worst, sol.residual)
        rec.step(
            f"solve k={_k_label(K)}",
            True,
            {"residual": sol.residual, "iterations": sol.iterations},
        )
        solves.append(
            {
                "k": _k_label(K),
                "z1": sol.prevertex,
                "residual": sol.residual,
                "iterations": sol.iterations,
                "evaluations": sol.evaluations,
                "converged": sol.converged,
            }
        )
    return {"solves": solves, "residual": worst}


def _sweep_fit(config: RunConfig, rec: _Recorder):
    sols = continuation_sweep(config.k_grid, tol=config.tol_solver, quad_tol=config.tol_quad)
    rec.step(
        f"sweep {len(sols)} aspects",
        True,
        {"max_residual": max(s.residual for s in sols)},
    )
    est = extract_limit(sols)
    rec.step(
        "extrapolate",
        True,
        {
            "x0": est.x0,
            "tau": est.tau,
            "x0_stability": est.x0_stability,
            "tau_stability": est.tau_stability,
        },
    )
    return sols, est


def _run_sweep(config: RunConfig, rec: _Recorder) -> dict:
    sols, est = _sweep_fit(config, rec)
    dev = DevelopingMap.merged_limit(est.x0, est.tau)
    shift = abs(dev.additive_monodromy_series(complex(est.x0)))
    rows = [
        (_k_label(s.K), s.prevertex.real, s.prevertex.imag, s.residual, s.iterations)
        for s in sols
    ]
    rec.write_text("sweep.txt", _table("sweep", ("k", "re_z1", "im_z1", "residual", "iterations"), rows))
    return {
        "aspects": [_k_label(s.K) for s in sols],
        "x0": est.x0,
        "tau": est.tau,
        "x0_stability": est.x0_stability,
        "tau_stability": est.tau_stability,
        "points_used": est.points_used,
        "hole_shift_magnitude": shift,
    }


def _finite_boundary(config: RunConfig, K: float):
    sol = solve_prevertex(K, tol=config.tol_solver, quad_tol=config.tol_quad)
    dev = DevelopingMap.from_aspect(K, sol.prevertex)
    cloud = rectangle_image_boundary(dev, spacing=1.0 / config.density, quad_tol=config.tol_quad)
    return sol, cloud


def _limit_boundary(config: RunConfig, est):
    return limit_image_cloud(
        est.x0,
        est.tau,
        theta_max=config.theta_max,
        spacing=1.0 / config.density,
        flank_outer=config.strip_depth + 1.0,
        quad_tol=config.tol_quad,
    )


def _run_render(config: RunConfig, rec: _Recorder) -> dict:
    entries = []
    est = None
    for K in config.k:
        label = _k_label(K)
        if math.isinf(K):
            if est is None:
                _, est = _sweep_fit(config, rec)
            cloud = _limit_boundary(config, est)
            rec.step(f"boundary k={label}", True, {"points": len(cloud.points)})
            entries.append(
                {
                    "k": K,
                    "label": label,
                    "cloud": cloud,
                    "source": "limit-boundary",
                    "markers": ("singular_points",),
                    "truncation": {
                        "theta_max": config.theta_max,
                        "strip_depth": config.strip_depth,
                    },
                }
            )
        else:
            sol, cloud = _finite_boundary(config, K)
            rec.step(
                f"boundary k={label}",
                True,
                {"residual": sol.residual, "points": len(cloud.points)},
            )
            entries.append(
                {
                    "k": K,
                    "label": label,
                    "cloud": cloud,
                    "source": "rectangle-boundary",
                    "markers": ("prevertices",),
                    "truncation": {},
                }
            )

    if config.format == "svg":
        curves, dots = [], []
        for i, entry in enumerate(entries):
            color = PALETTE[i % len(PALETTE)]
            pieces = entry["cloud"].pieces
            for piece in sorted(pieces):
                pts = np.asarray(pieces[piece])
                name = f"k{entry['label']}-{piece}"
                if piece in entry["markers"] or pts.size < 2:
                    dots.append(PlaneDots(name, pts, color))
                else:
                    curves.append(PlaneCurve(name, pts, color))
        rec.write_text("figure.svg", figure(curves, dots))
    else:
        for entry in entries:
            rec.write_cloud(
                f"cloud_k{entry['label']}.txt",
                PointCloud(
                    entry["cloud"].points,
                    entry["source"],
                    config.density,
                    k=entry["k"],
                    truncation=entry["truncation"],
                ),
            )
    return {
        "rendered": [
            {"k": e["label"], "points": len(e["cloud"].points), "pieces": len(e["cloud"].pieces)}
            for e in entries
        ],
        "format": config.format,
    }


def _run_limit(config: RunConfig, rec: _Recorder) -> dict:
    _, est = _sweep_fit(config, rec)
    cloud = _limit_boundary(config, est)
    rec.write_cloud(
        "limit.txt",
        PointCloud(
            cloud.points,
            "limit-boundary",
            config.density,
            k=math.inf,
            truncation={"theta_max": config.theta_max, "strip_depth": config.strip_depth},
        ),
    )
    return {
        "x0": est.x0,
        "tau": est.tau,
        "x0_stability": est.x0_stability,
        "tau_stability": est.tau_stability,
        "points": len(cloud.points),
        "pieces": sorted(cloud.pieces),
    }


def _run_hausdorff(config: RunConfig, rec: _Recorder) -> dict:
    report = convergence_report(
        list(config.k_grid),
        theta_max=config.theta_max,
        spacing=1.0 / config.density,
        quad_tol=config.tol_quad,
    )
    rows = [
        (_k_label(r["K"]), r["hausdorff"], r["boundary_points"]) for r in report["rows"]
    ]
    rec.write_text("hausdorff.txt", _table("hausdorff", ("k", "hausdorff", "boundary_points"), rows))
    rec.step(
        "hausdorff-convergence",
        report["verdict"] == "pass",
        {
            "verdict": report["verdict"],
            "final_distance": report["final_distance"],
            "threshold": report["threshold"],
            "strictly_decreasing": report["strictly_decreasing"],
        },
    )
    return report


# ------------------------------------------------------------------ verify


def _check_square(config: RunConfig, shared: dict):
    sol = solve_prevertex(1.0, tol=config.tol_solver, quad_tol=config.tol_quad)
    shared[1.0] = sol
    conn = RationalConnection.from_aspect(1.0, sol.prevertex)
    grid = 1j * np.linspace(-2.0, 2.0, 100)
    zeta_sup = float(np.max(np.abs(conn.value(grid))))
    dev = DevelopingMap.from_aspect(1.0, sol.prevertex)
    cloud = rectangle_image_boundary(dev, spacing=1.0 / config.density, quad_tol=config.tol_quad)
    pts = cloud.points
    square_dev = float(np.max(np.abs(np.maximum(np.abs(pts.real), np.abs(pts.imag)) - 1.0)))
    ok = (
        sol.prevertex == 1.0 + 1.0j
        and sol.residual < 1e-10
        and zeta_sup == 0.0
        and square_dev < 1e-9
    )
    return ok, {
        "z1": sol.prevertex,
        "residual": sol.residual,
        "zeta_sup": zeta_sup,
        "square_deviation": square_dev,
    }


def _check_residuals(config: RunConfig, shared: dict):
    ks = [K for K in config.k if not math.isinf(K)]
    cold = _solve_sorted(ks, config)
    warm = {s.K: s for s in continuation_sweep(ks, tol=config.tol_solver, quad_tol=config.tol_quad)}
    ok = True
    per = {}
    for K in ks:
        c, w = cold[K], warm[K]
        agreement = abs(c.prevertex - w.prevertex)
        good = (
            c.residual < 1e-8
            and w.residual < 1e-8
            and c.prevertex.real > 0
            and c.prevertex.imag > 0
            and agreement < 1e-8
        )
        per[_k_label(K)] = {
            "z1": c.prevertex,
            "residual_cold": c.residual,
            "residual_warm": w.residual,
            "cold_warm_gap": agreement,
        }
        ok = ok and good
    shared.update(cold)
    return ok, per


def _check_holonomy(config: RunConfig, shared: dict):
    ks = [K for K in config.k if not math.isinf(K)]
    worst_scale = 0.0
    worst_fix = 0.0
    for K in ks:
        for corner in CORNERS:
            h = corner_holonomy(K, corner)
            if corner in ("ul", "br"):
                worst_scale = max(worst_scale, abs(h.a - K))
            else:
                worst_scale = max(worst_scale, abs(h.a * K - 1.0))
            if not h.is_identity(tol=0.0):
                worst_fix = max(worst_fix, abs(h.fixed_point() - CORNER_COORD[corner]))
    ok = worst_scale < 1e-12 and worst_fix < 1e-12
    return ok, {"worst_scale_error": worst_scale, "worst_fixed_point_error": worst_fix}


def _check_loops(config: RunConfig, shared: dict):
    ok = True
    per = {}
    for K in (2.0, 5.0):
        sol = shared.get(K) or solve_prevertex(K, tol=config.tol_solver, quad_tol=config.tol_quad)
        z1 = sol.prevertex
        dev = DevelopingMap.from_aspect(K, z1)
        radius = 2.2 * z1.imag
        right = dev.loop_integral(complex(z1.real, 0.0), radius, tol=config.tol_quad)
        left = dev.loop_integral(complex(-z1.real, 0.0), radius, tol=config.tol_quad)
        shift = hole_monodromy(K, "right", "ccw").b
        gap = abs(right - shift)
        balance = abs(left + right)
        per[_k_label(K)] = {"loop_vs_translation": gap, "left_right_sum": balance}
        ok = ok and gap < 1e-6 and balance < 1e-8
    return ok, per


def _check_symmetry(config: RunConfig, shared: dict):
    above = [K for K in config.k if 1.0 < K < math.inf]
    K = above[0] if above else 2.0
    sol = shared.get(K) or solve_prevertex(K, tol=config.tol_solver, quad_tol=config.tol_quad)
    dev = DevelopingMap.from_aspect(K, sol.prevertex)
    pts = rectangle_image_boundary(
        dev, spacing=1.0 / config.density, quad_tol=config.tol_quad
    ).points
    d_conj = hausdorff_distance(pts, np.conj(pts))
    d_anti = hausdorff_distance(pts, -np.conj(pts))
    rng = np.random.default_rng(config.seed)
    xs = rng.uniform(-6.0, 6.0, 64)
    zeta_imag = float(np.max(np.abs(RationalConnection.from_aspect(K, sol.prevertex).value(xs).imag)))
    ok = d_conj < 1e-6 and d_anti < 1e-6 and zeta_imag < 1e-10
    return ok, {
        "k": _k_label(K),
        "conj_distance": d_conj,
        "anticonj_distance": d_anti,
        "zeta_imag_on_axis": zeta_imag,
    }


_T_GRID = (0.5, 0.1, 0.02, 0.004)


def _transition_pairs():
    ball = spiral_ball_chart("ul", cmath.log(0.85 + 0.125j), 0.45)
    return (
        (
            "half-strip-left-vs-outer",
            half_strip_chart("left"),
            outer_chart(),
            [complex(x, y) for x in (-1.5, -0.6, 0.0) for y in (-0.7, 0.2, 0.7)],
            1e-9,
        ),
        (
            "edge-strip-vs-outer-upper",
            edge_strip_chart(),
            outer_chart(),
            [complex(x, y) for x in (-0.5, 0.3) for y in (1.2, 2.5)],
            1e-9,
        ),
        (
            "edge-strip-vs-outer-lower",
            edge_strip_chart(),
            outer_chart(),
            [complex(x, y) for x in (-0.5, 0.3) for y in (-1.2, -4.0)],
            1e-2,
        ),
        (
            "half-strip-vs-spiral-ball",
            half_strip_chart("left"),
            ball,
            [0.8 + 1.3j, 0.9 + 1.2j, 0.9 + 0.95j, 0.75 + 1.05j],
            1e-9,
        ),
    )


def _check_transitions(config: RunConfig, shared: dict):
    ok = True
    per = {}
    for name, cha, chb, compact, tol in _transition_pairs():
        rep = transition_continuity_check(cha, chb, compact, _T_GRID, tol=tol)
        per[name] = {
            "verdict": rep["verdict"],
            "rate_bound": rep["rate_bound"],
            "final_sup": rep["sup"][-1],
        }
        ok = ok and rep["verdict"] == "pass" and math.isfinite(rep["rate_bound"])
    return ok, per


def _separation_scenarios():
    def sheet(n: int) -> VirtualPointRep:
        theta = 7 * math.pi / 4 + 2 * math.pi * (n - 1)
        return VirtualPointRep(
            cmath.exp(1j * (theta % (2 * math.pi))),
            spiral_ball_chart("ul", 1j * theta, 0.45),
        )

    strip = VirtualPointRep(1.0 + 0j, half_strip_chart("left"))
    far_outer = VirtualPointRep(4.0 + 3.0j, outer_chart())
    return (
        ("strip-vs-first-sheet", strip, sheet(1), 0.4, 0.4),
        ("outer-vs-strip", far_outer, strip, 0.5, 0.4),
        ("sheet-one-vs-sheet-two", sheet(1), sheet(2), 0.4, 0.4),
    )


def _check_separation(config: RunConfig, shared: dict):
    ks = (10.0, 100.0, 1000.0)
    ok = True
    per = {}
    for name, x, y, rx, ry in _separation_scenarios():
        rep = separation_check(x, y, ks, rx, ry)
        verdicts = {str(_k_label(r["K"])): r["verdict"] for r in rep["per_k"]}
        per[name] = verdicts
        ok = ok and all(v == "disjoint" for v in verdicts.values())
    return ok, per


_VERIFY_CHECKS = (
    ("square-identity", _check_square),
    ("solver-residuals", _check_residuals),
    ("corner-holonomy", _check_holonomy),
    ("hole-loop-translation", _check_loops),
    ("reflection-symmetry", _check_symmetry),
    ("chart-transitions", _check_transitions),
    ("separation-scenarios", _check_separation),
)


def _run_verify(config: RunConfig, rec: _Recorder) -> dict:
    shared: dict = {}
    failed = []
    for name, fn in _VERIFY_CHECKS:
        ok, detail = fn(config, shared)
        rec.step(name, ok, detail)
        if not ok:
            failed.append(name)
    return {
        "checks": [name for name, _ in _VERIFY_CHECKS],
        "failed": failed,
    }


_HANDLERS = {
    "solve": _run_solve,
    "sweep": _run_sweep,
    "render": _run_render,
    "limit": _run_limit,
    "hausdorff": _run_hausdorff,
    "verify": _run_verify,
}


def run(config: RunConfig) -> RunReport:
    """Execute one command and write its report; never raises numerically.

    A solver or quadrature failure is folded into the report as an error
    step with status "error" so the caller can map it to an exit code.
    """
    out_dir, report_path, prefix = _resolve_out(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    rec = _Recorder(out_dir, prefix)
    results: dict = {}
    status = "pass"
    try:
        results = _HANDLERS[config.command](config, rec)
        if rec.first_failed is not None:
            status = "fail"
    except (ArithmeticError, ValueError) as exc:
        rec.steps.append(
            {
                "name": "numerical-failure",
                "status": "error",
                "detail": {"message": f"{type(exc).__name__}: {exc}"},
            }
        )
        status = "error"
    cfg = config.as_dict()
    manifest = tuple(sorted(set(rec.files) | {report_path.name}))
    report = RunReport(
        command=config.command,
        config=cfg,
        config_sha256=_sha256(cfg),
        steps=tuple(rec.steps),
        results=_plain(results),
        manifest=manifest,
        status=status,
    )
    report_path.write_text(report.to_json())
    return report


# --------------------------------------------------------------- front end


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON file supplying any of the flags")
    common.add_argument(
        "--k",
        action="append",
        metavar="K",
        help="aspect ratio, repeatable or comma separated; 'inf' draws the limit (render only)",
    )
    common.add_argument(
        "--k-grid",
        dest="k_grid",
        metavar="SPEC",
        help="aspect grid, 'start:stop:count' (geometric) or a comma list",
    )
    common.add_argument("--tol-solver", dest="tol_solver", type=float, metavar="T")
    common.add_argument("--tol-quad", dest="tol_quad", type=float, metavar="T")
    common.add_argument(
        "--theta-max", dest="theta_max", type=float, metavar="R",
        help="spiral winding cutoff in radians",
    )
    common.add_argument(
        "--density", type=float, metavar="D", help="curve sampling, points per unit length"
    )
    common.add_argument(
        "--out", metavar="PATH", help="output directory, or a .json path for the report"
    )
    common.add_argument("--seed", type=int, metavar="N", help="seed for sampled checks")
    common.add_argument("--format", choices=("svg", "txt"))

    parser = argparse.ArgumentParser(
        prog="affsurf",
        description="Numerics for a family of glued affine surfaces and its limit.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "solve": "solve the corner condition at one or more aspects",
        "sweep": "continuation sweep over an aspect grid plus limit extrapolation",
        "render": "draw boundary curves (finite aspects and/or 'inf') as a figure",
        "limit": "build and save the limit boundary configuration",
        "hausdorff": "distance trend from finite boundaries to the limit",
        "verify": "run the property suite and report pass/fail per check",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _build_config(ns: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    if ns.config:
        path = Path(ns.config)
        try:
            loaded = json.loads(path.read_text())
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"config file {path} must hold a JSON object")
        for key, value in loaded.items():
            norm = key.replace("-", "_")
            if norm not in _FLAG_KEYS:
                raise UsageError(f"config file sets unknown key {key!r}")
            merged[norm] = value
    for key in _FLAG_KEYS:
        value = getattr(ns, key, None)
        if value is not None:
            merged[key] = value
    merged["k"] = _parse_k(merged["k"])
    merged["k_grid"] = _parse_grid(merged["k_grid"])
    if not isinstance(merged["seed"], int) or isinstance(merged["seed"], bool):
        try:
            merged["seed"] = int(merged["seed"])
        except (TypeError, ValueError):
            raise UsageError(f"seed must be an integer, got {merged['seed']!r}") from None
    for key in ("tol_solver", "tol_quad", "theta_max", "strip_depth", "density"):
        try:
            merged[key] = float(merged[key])
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be a number, got {merged[key]!r}") from None
    return make_config(ns.command, **merged)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        config = _build_config(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(config)
    except OSError as exc:
        print(f"usage error: cannot write outputs: {exc}", file=sys.stderr)
        return 2
    if config.command == "verify":
        for step in report.steps:
            print(("PASS " if step["status"] == "ok" else "FAIL ") + step["name"])
    _, report_path, _ = _resolve_out(config)
    if report.status == "pass":
        print(f"PASS {config.command}: report at {report_path}")
        return 0
    if report.status == "fail":
        first = next(s["name"] for s in report.steps if s["status"] == "fail")
        print(f"FAIL {config.command}: {first}")
        return 1
    message = report.steps[-1]["detail"]["message"] if report.steps else "unknown"
    print(f"ERROR {config.command}: {message}", file=sys.stderr)
    return 3


if __name__ == "__main__":
    sys.exit(main())
