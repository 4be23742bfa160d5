"""Boundary images and the limit curve configuration.

Everything here lives in the uniformized plane. For a finite aspect the
glued rectangle occupies a region whose boundary is the preimage of the
square boundary under the developing map; it is assembled from eight
tracked half-side curves that meet at the four prevertices. In the limit
the prevertex pairs have merged and the boundary configuration consists
of the two strip mouth curves, the seam rays between strips and spiral
sheets, the flank rays bounding each spiral sheet, the glued-edge
segment, and the two singular points that everything accumulates on.
Clouds are resampled to uniform arc-length spacing so that Hausdorff
distances between them are meaningful at that resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .develop import DevelopingMap
from .quadrature import QuadratureError
from .tracking import TrackResult, segment_target, track_level_curve

SQUARE_CORNERS = (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j)


def resample_curve(points: np.ndarray, spacing: float) -> np.ndarray:
    """Piecewise-linear resampling to uniform arc length."""
    pts = np.asarray(points, dtype=complex)
    if len(pts) < 2:
        return pts.copy()
    seg = np.abs(np.diff(pts))
    arc = np.concatenate(([0.0], np.cumsum(seg)))
    total = arc[-1]
    if total == 0.0:
        return pts[:1].copy()
    n = max(2, int(math.ceil(total / spacing)) + 1)
    grid = np.linspace(0.0, total, n)
    return np.interp(grid, arc, pts.real) + 1j * np.interp(grid, arc, pts.imag)


@dataclass
class CurveCloud:
    """Named curve pieces plus isolated points, all in one plane."""

    pieces: Dict[str, np.ndarray] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    def add(self, name: str, points: np.ndarray, note: str = "") -> None:
        self.pieces[name] = np.asarray(points, dtype=complex)
        if note:
            self.notes[name] = note

    @property
    def points(self) -> np.ndarray:
        if not self.pieces:
            return np.empty(0, dtype=complex)
        return np.concatenate([self.pieces[k] for k in sorted(self.pieces)])


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two planar point sets."""
    pa = np.column_stack([np.real(a), np.imag(a)])
    pb = np.column_stack([np.real(b), np.imag(b)])
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("empty point set")
    d_ab = cKDTree(pb).query(pa)[0].max()
    d_ba = cKDTree(pa).query(pb)[0].max()
    return float(max(d_ab, d_ba))


def _axis_anchor_real(dev: DevelopingMap, side: int) -> float:
    """Real-axis crossing of the boundary: g(u) = side (+1 right, -1 left).

    The inner bracket endpoint is probed inward by halving: at the limit
    kind the derivative grows like exp(tau/distance) toward the singular
    point, so the endpoint must stay where evaluation is finite. g drops
    to -infinity fast enough that a moderate distance already brackets.
    """
    base = dev.poles[0].real
    f = lambda u: complex(dev.develop_at(complex(u))).real - side
    hi = side * (0.95 * dev.tail_radius)
    fhi = f(hi)
    delta = 0.5
    for _ in range(40):
        lo = side * (base + delta)
        try:
            if f(lo) * fhi < 0.0:
                break
        except (QuadratureError, OverflowError, FloatingPointError):
            raise ArithmeticError(
                f"boundary axis crossing not bracketed before the singular scale at delta={delta:.3g}"
            )
        delta *= 0.5
    else:
        raise ArithmeticError("no sign change toward the singular point")
    ua, ub = (lo, hi) if lo < hi else (hi, lo)
    return float(brentq(f, ua, ub, xtol=1e-13))


def _axis_anchor_imag(dev: DevelopingMap, side: int) -> float:
    """Imaginary-axis crossing: Im g(i v) = side.

    The crossing height sinks roughly like the reciprocal aspect as the
    top edge flattens onto the real axis, so the inner bracket endpoint
    sits far below any aspect the distance grids use.
    """
    f = lambda v: complex(dev.develop_at(complex(0.0, v))).imag - side
    lo, hi = (1e-9, 0.95 * dev.tail_radius) if side > 0 else (-0.95 * dev.tail_radius, -1e-9)
    return float(brentq(f, lo, hi, xtol=1e-13))


def _track_toward_corner(
    dev: DevelopingMap,
    corner: complex,
    w0: complex,
    g0: complex,
    branch0: int,
    corner_clip: float,
    quad_tol: float,
) -> List[np.ndarray]:
    """Follow the square side radially into a corner value.

    The curve winds into the prevertex on a shrinking scale, so the
    approach runs in stages with the step cap tied to the current
    distance from the nearest prevertex.
    """
    rho = abs(g0 - corner)
    direction = (g0 - corner) / rho
    pieces = []
    w, g, m = w0, g0, branch0
    while rho > corner_clip:
        rho_next = max(corner_clip, rho / 4.0)
        p, dp = segment_target(corner + rho * direction, corner + rho_next * direction)
        near = min(abs(w - z) for z in dev.poles)
        step = max(2e-4, 0.2 * near)
        # the derivative collapses with the developed scale near the
        # prevertex, so the on-curve tolerance must shrink with it or
        # the Newton correction goes slack in w
        tol = float(np.clip(1e-3 * rho_next, 1e-13, 1e-10))
        r = track_level_curve(
            dev, p, dp, w, g0=g, branch0=m, max_step=step, tol=tol,
            quad_tol=min(quad_tol, 0.1 * tol),
            first_step=0.02, max_steps=4000,
        )
        pieces.append(r.w)
        w, g, m = complex(r.w[-1]), complex(r.g[-1]), int(r.branch[-1])
        if not r.completed:
            break
        rho = rho_next
    return pieces


def rectangle_image_boundary(
    dev: DevelopingMap,
    spacing: float = 0.004,
    corner_clip: float = 1e-3,
    quad_tol: float = 1e-12,
) -> CurveCloud:
    """Boundary of the glued rectangle's image, as a resampled cloud.

    Eight half-side tracks start on the coordinate axes, where symmetry
    puts the boundary's axis crossings, and run into the four corner
    values; the prevertices themselves are appended since the tracked
    curves end corner_clip short of them (in developed distance).
    """
    if dev.kind != "finite":
        raise ValueError("finite-aspect map required; use limit_image_cloud for the limit")
    cloud = CurveCloud()
    u_r = _axis_anchor_real(dev, +1) if not dev.is_trivial else 1.0
    u_l = _axis_anchor_real(dev, -1) if not dev.is_trivial else -1.0
    v_t = _axis_anchor_imag(dev, +1) if not dev.is_trivial else 1.0
    v_b = _axis_anchor_imag(dev, -1) if not dev.is_trivial else -1.0

    starts = {
        "right": (complex(u_r), 1 + 0j),
        "left": (complex(u_l), -1 + 0j),
        "top": (complex(0, v_t), 1j),
        "bottom": (complex(0, v_b), -1j),
    }
    halves = {
        "right": (1 + 1j, 1 - 1j),
        "left": (-1 + 1j, -1 - 1j),
        "top": (1 + 1j, -1 + 1j),
        "bottom": (1 - 1j, -1 - 1j),
    }
    for side, (w0, g_anchor) in starts.items():
        g0 = complex(dev.develop_at(w0))
        # the top and bottom edges carry the strip seams in their last
        # 1/K of developed parameter, so their corner approach must cut
        # off at a scale that shrinks with the aspect; the short edges
        # develop at unit scale and keep the fixed clip
        clip = corner_clip / dev.K if side in ("top", "bottom") else corner_clip
        for corner in halves[side]:
            name = f"{side}_to_{corner.real:+.0f}{corner.imag:+.0f}"
            pieces = _track_toward_corner(
                dev, corner, w0, g0, 0, clip, quad_tol
            )
            joined = np.concatenate(pieces) if pieces else np.array([w0])
            cloud.add(name, resample_curve(joined, spacing))
    cloud.add("prevertices", np.array(dev.poles), "isolated corner preimages")
    return cloud


# spiral assemblies of the limit configuration: corner value, seam-ray
# angle of the adjoining strip edge, winding direction deeper into the
# sheets, and the bridge's start angle on the coordinate axis anchor.
# seam: magnitude of the bridge angle of the strip edge glued into this
# corner (orient-signed in use). Window edges sit at orient*(2*pi*n - off)
# for the two offsets, n from first_n up; on the right corners the n=1
# window is bounded by the seam and the mouth themselves, so its edges
# are already laid and first_n starts one turn later.
_LIMIT_ASSEMBLY = {
    "ul": {"corner": -1 + 1j, "anchor_theta": -0.5 * math.pi, "orient": +1,
           "seam": 0.0, "offsets": (0.5 * math.pi, 0.0), "first_n": 1},
    "bl": {"corner": -1 - 1j, "anchor_theta": +0.5 * math.pi, "orient": -1,
           "seam": 0.0, "offsets": (0.5 * math.pi, 0.0), "first_n": 1},
    "ur": {"corner": 1 + 1j, "anchor_theta": -0.5 * math.pi, "orient": -1,
           "seam": math.pi, "offsets": (1.5 * math.pi, math.pi), "first_n": 2},
    "br": {"corner": 1 - 1j, "anchor_theta": +0.5 * math.pi, "orient": +1,
           "seam": math.pi, "offsets": (1.5 * math.pi, math.pi), "first_n": 2},
}


def _arc_target(center: complex, radius: float, th0: float, th1: float):
    om = th1 - th0

    def p(s):
        return center + radius * np.exp(1j * (th0 + om * s))

    def dp(s):
        return radius * 1j * om * np.exp(1j * (th0 + om * s))

    return p, dp


def _ray_target(center: complex, theta: float, r0: float, r1: float):
    """Radial developed-plane target, log-uniform in radius."""
    lr0, lr1 = math.log(r0), math.log(r1)
    e = complex(math.cos(theta), math.sin(theta))

    def p(s):
        return center + np.exp(lr0 + s * (lr1 - lr0)) * e

    def dp(s):
        return (lr1 - lr0) * np.exp(lr0 + s * (lr1 - lr0)) * e

    return p, dp


def limit_image_cloud(
    x0: float,
    tau: float,
    theta_max: float = 8 * math.pi,
    spacing: float = 0.004,
    flank_inner: float = 1e-3,
    flank_outer: float = 41.0,
    quad_tol: float = 1e-12,
) -> CurveCloud:
    """Limit boundary configuration around the two singular points.

    theta_max caps the spiral winding that is resolved explicitly; the
    sheets beyond it lie within the accumulation scale tau/theta_max of
    the singular points, which are included as cloud points themselves.
    """
    dev = DevelopingMap.merged_limit(x0, tau)
    cloud = CurveCloud()
    n_max = max(1, int(round(theta_max / (2 * math.pi))))

    # mouth curves: developed value on the left and right square edges
    for side, label in ((+1, "right"), (-1, "left")):
        u = _axis_anchor_real(dev, side)
        g0 = complex(dev.develop_at(complex(u)))
        for updown, cy in (("upper", 1.0), ("lower", -1.0)):
            p, dp = segment_target(side * (1 + 0j), side + 1j * cy * (1 - flank_inner))
            r = track_level_curve(
                dev, p, dp, complex(u), g0=g0, max_step=0.05,
                quad_tol=quad_tol, max_steps=8000,
            )
            cloud.add(f"mouth_{label}_{updown}", resample_curve(r.w, spacing))

    # glued edge: the identified top/bottom pair develops onto the real
    # segment between the singular points
    t = np.linspace(-x0 + 1e-4, x0 - 1e-4, max(3, int(math.ceil(2 * x0 / spacing))))
    cloud.add("glued_edge", t.astype(complex), "edge pair identified by the deck translation")

    # spiral assemblies: bridge along the unit developed circle from the
    # axis anchor, pausing at each seam or flank angle to lay rays
    for name, spec in _LIMIT_ASSEMBLY.items():
        corner = spec["corner"]
        orient = spec["orient"]
        th = spec["anchor_theta"]
        u = _axis_anchor_real(dev, int(np.sign(corner.real)))
        w = complex(u)
        g = complex(dev.develop_at(w))
        m = 0
        off_a, off_b = spec["offsets"]
        seam0 = orient * spec["seam"]
        stops: List[Tuple[float, str]] = [(seam0, f"seam_{name}")]
        for n in range(spec["first_n"], n_max + 2):
            stops.append((orient * (2 * math.pi * n - off_a), f"flank_{name}_n{n}a"))
            stops.append((orient * (2 * math.pi * n - off_b), f"flank_{name}_n{n}b"))
        # truncate by winding depth from the seam so mirror corners cut
        # at the same depth even though their absolute angles differ by pi
        stops = [(a, lbl) for a, lbl in stops if abs(a - seam0) <= theta_max + 1e-9]
        ok = True
        for angle, label in stops:
            # bridge to the next stop angle; not part of the cloud
            scale = tau / max(abs(angle), math.pi)
            p, dp = _arc_target(corner, 1.0, th, angle)
            if abs(angle - th) > 1e-12:
                br = track_level_curve(
                    dev, p, dp, w, g0=g, branch0=m,
                    max_step=min(0.05, 0.5 * scale), quad_tol=quad_tol,
                    max_steps=20000, first_step=0.005,
                )
                if not br.completed:
                    cloud.notes[label] = f"unreached: bridge {br.reason}"
                    ok = False
                    break
                w, g, m = complex(br.w[-1]), complex(br.g[-1]), int(br.branch[-1])
                th = angle
            for rng, tag in (((1.0, flank_inner), "in"), ((1.0, flank_outer), "out")):
                pr, dpr = _ray_target(corner, angle, rng[0], rng[1])
                rr = track_level_curve(
                    dev, pr, dpr, w, g0=g, branch0=m,
                    max_step=min(0.05, 0.5 * scale), quad_tol=quad_tol,
                    max_steps=20000, first_step=0.002,
                )
                piece = resample_curve(rr.w, spacing)
                cloud.add(f"{label}_{tag}", piece)
                if not rr.completed:
                    cloud.notes[f"{label}_{tag}"] = f"partial: {rr.reason}"
        if not ok:
            continue

    cloud.add("singular_points", np.array([x0 + 0j, -x0 + 0j]),
              "accumulation points of the deep sheets")
    return cloud


@dataclass(frozen=True)
class RegionSample:
    chart: str
    coords: np.ndarray


def sample_limit_region(
    theta_max: float = 8 * math.pi,
    sigma_max: float = 40.0,
    density: int = 24,
) -> List[RegionSample]:
    """Deterministic coordinate samples of the beyond-first-sheet region.

    Strip interiors are sampled on a log-by-linear grid, spiral sheets on
    log-radius by angle grids inside their quarter-turn windows, and the
    glued edge along its parameter. Coordinates are chart-native: strips
    in their own plane, spirals as log coordinates, the edge as the
    outer-chart top-edge parametrization t + i.
    """
    out: List[RegionSample] = []
    sig = np.geomspace(1e-3, sigma_max, density)
    ys = np.linspace(-1 + 1e-3, 1 - 1e-3, density)
    grid = (sig[:, None] + 1j * ys[None, :]).ravel()
    out.append(RegionSample("strip_left", grid))
    out.append(RegionSample("strip_right", -np.conj(grid)))

    n_max = max(1, int(round(theta_max / (2 * math.pi))))
    windows = {
        "spiral_ul": [(2 * math.pi * n - 0.5 * math.pi, 2 * math.pi * n) for n in range(1, n_max + 1)],
        "spiral_bl": [(-2 * math.pi * n, -2 * math.pi * n + 0.5 * math.pi) for n in range(1, n_max + 1)],
        "spiral_ur": [(math.pi - 2 * math.pi * n, 1.5 * math.pi - 2 * math.pi * n) for n in range(1, n_max + 1)],
        "spiral_br": [(2 * math.pi * n - 1.5 * math.pi, 2 * math.pi * n - math.pi) for n in range(1, n_max + 1)],
    }
    lnr = np.linspace(math.log(1e-3), math.log(10.0), density)
    for chart, wins in windows.items():
        pieces = []
        for lo, hi in wins:
            th = np.linspace(lo + 1e-6, hi - 1e-6, max(6, density // 3))
            pieces.append((lnr[:, None] + 1j * th[None, :]).ravel())
        out.append(RegionSample(chart, np.concatenate(pieces)))

    tt = np.linspace(-1 + 1e-3, 1 - 1e-3, density * density // 4)
    out.append(RegionSample("glued_edge", tt + 1j))
    return out


# frozen from the oracle run recorded in the build notes (distance at
# aspect 1e6 was 3.93e-2 and still shrinking); the convergence statement
# carries no rate, so the bar is empirical
HAUSDORFF_ACCEPT = 0.05


def convergence_report(
    k_values: Sequence[float],
    theta_max: float = 8 * math.pi,
    spacing: float = 0.004,
    quad_tol: float = 1e-12,
    solutions: Optional[Sequence] = None,
    threshold: Optional[float] = None,
) -> dict:
    """Hausdorff distances from finite-aspect boundaries to the limit.

    Returns a plain dict ready for serialization: the solved sweep, the
    extrapolated limit parameters, per-aspect distances, the truncation
    sensitivity of the final distance, and a verdict. The verdict is
    "pass" when the distances decrease along the grid and the final one
    is under the threshold, "inconclusive" when the truncation
    sensitivity exceeds a fifth of the final distance (the comparison
    cannot resolve the gap it is asked to certify), otherwise "fail".
    """
    from .solver import continuation_sweep, extract_limit

    ks = sorted(float(k) for k in k_values)
    if threshold is None:
        threshold = HAUSDORFF_ACCEPT
    if solutions is None:
        decades = [10.0**j for j in range(1, 9)]
        grid = sorted(set(ks) | set(decades))
        solutions = continuation_sweep(grid)
    by_k = {r.K: r for r in solutions}
    est = extract_limit(solutions)
    lim_pts = limit_image_cloud(
        est.x0, est.tau, theta_max=theta_max, spacing=spacing, quad_tol=quad_tol
    ).points

    rows = []
    finite_pts = {}
    for K in ks:
        dev = DevelopingMap.from_aspect(K, by_k[K].prevertex)
        cloud = rectangle_image_boundary(dev, spacing=spacing, quad_tol=quad_tol)
        finite_pts[K] = cloud.points
        d = hausdorff_distance(cloud.points, lim_pts)
        rows.append({"K": K, "hausdorff": d, "boundary_points": int(len(cloud.points))})
    dists = [row["hausdorff"] for row in rows]
    final = dists[-1] if dists else math.nan

    # one coarser truncation level; the spiral tails it drops sit within
    # tau/theta_max of the limit points, so a large swing means the
    # distances are dominated by truncation, not by the K-trend
    theta_alt = max(2 * math.pi, theta_max - 2 * math.pi)
    alt_pts = limit_image_cloud(
        est.x0, est.tau, theta_max=theta_alt, spacing=spacing, quad_tol=quad_tol
    ).points
    final_alt = (
        hausdorff_distance(finite_pts[ks[-1]], alt_pts) if ks else math.nan
    )
    sensitivity = abs(final - final_alt)

    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    if dists and sensitivity > 0.2 * final:
        verdict = "inconclusive"
    elif dists and decreasing and final < threshold:
        verdict = "pass"
    else:
        verdict = "fail"
    return {
        "k_values": ks,
        "x0": est.x0,
        "tau": est.tau,
        "theta_max": theta_max,
        "spacing": spacing,
        "limit_points": int(len(lim_pts)),
        "rows": rows,
        "strictly_decreasing": decreasing,
        "final_distance": final,
        "threshold": threshold,
        "truncation": {
            "theta_max_alt": theta_alt,
            "final_distance_alt": final_alt,
            "sensitivity": sensitivity,
        },
        "verdict": verdict,
    }
