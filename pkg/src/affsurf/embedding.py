"""Leaf-space charts across the whole family, with finite certificates.

The disjoint union of all the surfaces, one leaf per aspect t = 1/K plus
the limit leaf t = 0, carries charts defined on open subsets of
[0,1] x C. Each chart is described here by the inverse map psi: it sends
a leaf coordinate (t, z) to a concrete surface point of the aspect-1/t
member. Four cases cover the union: the outer plane, a vertical strip
straddling the identified edge, a half-strip with its corner flaps, and
a ball lifted into a spiral end. Two finite certificates accompany them:
a sampled continuity check of the coordinate changes as t -> 0, and a
disk-image separation check between pairs of limit points.

Spiral leaf coordinates are points of the projection plane C*; the chart
carries the branch (a base log-coordinate and a ball radius), so the
winding never needs unwrapping at call sites.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .surface import CORNER_COORD, ChartId, SurfacePoint

# seam angle of each spiral's gluing edge and the winding direction that
# leads deeper into the sheets (positive theta for ul, etc.)
_SEAM_DIR = {
    "ul": (0.0, +1.0),
    "bl": (0.0, -1.0),
    "ur": (math.pi, -1.0),
    "br": (-math.pi, +1.0),
}

# strip adjoining each spiral and the sign e of the edge it hangs on:
# strip coordinate s = w + i*e for a projection value w at the seam
_STRIP_EDGE = {
    "ul": ("left", +1.0),
    "bl": ("left", -1.0),
    "ur": ("right", +1.0),
    "br": ("right", -1.0),
}

_STRIP_CHART = {"left": ChartId.STRIP_LEFT, "right": ChartId.STRIP_RIGHT}
_SPIRAL_CHART = {
    "ul": ChartId.SPIRAL_UL,
    "ur": ChartId.SPIRAL_UR,
    "bl": ChartId.SPIRAL_BL,
    "br": ChartId.SPIRAL_BR,
}


def _window(corner: str, theta: float) -> Tuple[str, int]:
    """Classify an unwrapped angle into a sheet window.

    Measured as depth u from the seam in the winding direction, the
    sheets tile u > -pi/2: [2 pi n, 2 pi n + 3 pi/2] lands in the outer
    chart of the finite surfaces (sheet n), the complementary quarter
    turns land in the rectangle (sheet n, n >= 1). The collar
    (-pi/2, 0] below the seam belongs to the adjoining strip and is
    treated as the n = 0 rectangle window, which the strip formulas
    agree with through the edge gluing.
    """
    s0, d = _SEAM_DIR[corner]
    u = d * (theta - s0)
    if u <= -0.5 * math.pi:
        raise ValueError(f"angle {theta:.6g} beyond the {corner} cover")
    if u <= 0.0:
        return ("rect", 0)
    n = int(math.floor(u / (2.0 * math.pi)))
    frac = u - 2.0 * math.pi * n
    if frac <= 1.5 * math.pi:
        return ("outer", n)
    return ("rect", n + 1)


@dataclass(frozen=True)
class EmbedChart:
    """One inverse chart psi of the leaf space.

    case 1: the plane outside the closed square, same coordinate on
        every leaf.
    case 2: the vertical strip |Re z| < 1 running across the identified
        edge; the rectangle occupies the band of height 2/K below
        Im z = 1.
    case 3: a half strip and its corner flaps; `strip` picks the side.
    case 4: a ball in the projection plane lifted to a spiral end;
        `corner` picks the end, `base_log` fixes the branch, `radius`
        the ball. `sheet` records the window of the base point.
    """

    case: int
    strip: Optional[str] = None
    corner: Optional[str] = None
    base_log: complex = 0j
    radius: float = 0.0
    sheet: Optional[Tuple[str, int]] = None

    @property
    def proj(self) -> complex:
        """Projection of the case-4 base point to C*."""
        return cmath.exp(self.base_log)

    def contains(self, t: float, z: complex) -> bool:
        """Membership of (t, z) in the chart's leaf-space domain."""
        if not 0.0 <= t <= 1.0:
            return False
        x, y = z.real, z.imag
        if self.case == 1:
            return max(abs(x), abs(y)) > 1.0
        if self.case == 2:
            return -1.0 < x < 1.0
        if self.case == 3:
            s = 1.0 if self.strip == "left" else -1.0
            xs = s * x
            if t == 0.0:
                return -1.0 < y < 1.0 or xs > 0.0
            lim = 2.0 / t
            return (-1.0 < y < 1.0 and xs < lim) or (0.0 < xs < lim)
        if self.case == 4:
            if abs(z - self.proj) >= self.radius:
                return False
            try:
                kind, n = _window(self.corner, self._theta(z))
            except ValueError:
                return False
            if kind == "rect" and n >= 1 and t > 0.0:
                return abs(z) < 2.0 * (1.0 / t) ** n
            return True
        return False

    def _theta(self, z: complex) -> float:
        # inside the ball the angle moves by less than pi/2 around the
        # base, so the principal log of the ratio carries the branch
        return self.base_log.imag + cmath.log(z / self.proj).imag

    def describe(self) -> str:
        if self.case == 1:
            return "case 1 (outer plane)"
        if self.case == 2:
            return "case 2 (edge strip)"
        if self.case == 3:
            return f"case 3 ({self.strip} half strip)"
        kind, n = self.sheet
        return f"case 4 ({self.corner} spiral, {kind} sheet {n})"


def outer_chart() -> EmbedChart:
    return EmbedChart(case=1)


def edge_strip_chart() -> EmbedChart:
    return EmbedChart(case=2)


def half_strip_chart(strip: str) -> EmbedChart:
    if strip not in ("left", "right"):
        raise ValueError("strip must be 'left' or 'right'")
    return EmbedChart(case=3, strip=strip)


def spiral_ball_chart(corner: str, base_log: complex, radius: float) -> EmbedChart:
    """Ball chart on a spiral end.

    base_log = ln r + i theta names a point of the end's universal-cover
    half; the ball of the given radius around its projection must avoid
    the puncture, which also keeps the branch single-valued on it.
    """
    if corner not in _SEAM_DIR:
        raise ValueError(f"unknown spiral corner {corner!r}")
    proj = cmath.exp(base_log)
    if not 0.0 < radius < abs(proj):
        raise ValueError("radius must be positive and smaller than |base|")
    sheet = _window(corner, base_log.imag)
    return EmbedChart(
        case=4, corner=corner, base_log=base_log, radius=radius, sheet=sheet
    )


@dataclass(frozen=True)
class VirtualPointRep:
    """A limit-surface point presented through one of the charts."""

    a: complex
    chart: EmbedChart

    def __post_init__(self) -> None:
        if not self.chart.contains(0.0, self.a):
            raise ValueError("base point not in the chart's limit-leaf domain")

    def limit_point(self) -> SurfacePoint:
        return embed_eval(self.chart, 0.0, self.a)


def embed_eval(chart: EmbedChart, t: float, z: complex) -> SurfacePoint:
    """The surface point of the aspect-1/t member at leaf coordinate z.

    t = 0 addresses the limit member. Points on shared edges are
    returned in the closure of whichever chart the case formula names.
    """
    if not chart.contains(t, z):
        raise ValueError("leaf coordinate outside the chart domain")
    if chart.case == 1:
        return SurfacePoint(ChartId.OUTER, z)
    if chart.case == 2:
        return _eval_edge_strip(t, z)
    if chart.case == 3:
        return _eval_half_strip(chart.strip, t, z)
    return _eval_spiral(chart, t, z)


def _eval_edge_strip(t: float, z: complex) -> SurfacePoint:
    if t == 0.0:
        if z.imag >= 1.0:
            return SurfacePoint(ChartId.OUTER, z)
        return SurfacePoint(ChartId.OUTER, z - 2j)
    K = 1.0 / t
    if z.imag >= 1.0:
        return SurfacePoint(ChartId.OUTER, z)
    if z.imag > 1.0 - 2.0 / K:
        return SurfacePoint(ChartId.RECT, z + 1j / K - 1j)
    return SurfacePoint(ChartId.OUTER, z - 2j + 2j / K)


def _eval_half_strip(strip: str, t: float, z: complex) -> SurfacePoint:
    s = 1.0 if strip == "left" else -1.0
    # mirror the right strip onto the left formulas: w -> -conj(w) is a
    # symmetry of every member, so only signs on real parts flip
    x, y = s * z.real, z.imag
    if t == 0.0:
        if x <= 0.0:
            return SurfacePoint(ChartId.OUTER, z - s)
        if abs(y) <= 1.0:
            return SurfacePoint(_STRIP_CHART[strip], z)
        e = 1.0 if y > 0.0 else -1.0
        corner = {("left", 1.0): "ul", ("left", -1.0): "bl",
                  ("right", 1.0): "ur", ("right", -1.0): "br"}[(strip, e)]
        return SurfacePoint(_SPIRAL_CHART[corner], cmath.log(z - 1j * e))
    K = 1.0 / t
    if x <= 0.0:
        return SurfacePoint(ChartId.OUTER, z - s)
    if abs(y) <= 1.0:
        return SurfacePoint(ChartId.RECT, -s + z / K)
    e = 1.0 if y > 0.0 else -1.0
    c = complex(-s, e)
    return SurfacePoint(ChartId.OUTER, c + (z - 1j * e) / K)


def _eval_spiral(chart: EmbedChart, t: float, z: complex) -> SurfacePoint:
    lam = complex(chart.base_log + cmath.log(z / chart.proj))
    kind, n = _window(chart.corner, lam.imag)
    if t == 0.0:
        if kind == "rect" and n == 0:
            strip, e = _STRIP_EDGE[chart.corner]
            return SurfacePoint(_STRIP_CHART[strip], z + 1j * e)
        return SurfacePoint(_SPIRAL_CHART[chart.corner], lam)
    K = 1.0 / t
    c = CORNER_COORD[chart.corner]
    if kind == "outer":
        return SurfacePoint(ChartId.OUTER, c + z / K ** (n + 1))
    if n >= 1 and not abs(z) < 2.0 * K**n:
        raise ValueError("rectangle window needs |z| < 2 K^n")
    c_r = complex(c.real, c.imag / K)
    return SurfacePoint(ChartId.RECT, c_r + z / K ** (n + 1))


def embed_invert(chart: EmbedChart, t: float, p: SurfacePoint) -> Optional[complex]:
    """Leaf coordinate of a surface point, or None when out of range.

    Inverts embed_eval(chart, t, .) at the same leaf. Returning None is
    the normal signal that the point lives outside this chart.
    """
    if chart.case == 1:
        if p.chart is ChartId.OUTER and max(abs(p.coord.real), abs(p.coord.imag)) > 1.0:
            return p.coord
        return None
    if chart.case == 2:
        return _invert_edge_strip(t, p)
    if chart.case == 3:
        return _invert_half_strip(chart.strip, t, p)
    return _invert_spiral(chart, t, p)


def _invert_edge_strip(t: float, p: SurfacePoint) -> Optional[complex]:
    if p.chart is ChartId.OUTER:
        u = p.coord
        if not -1.0 < u.real < 1.0:
            return None
        if u.imag >= 1.0:
            return u
        if u.imag <= -1.0:
            return u + 2j if t == 0.0 else u + 2j - 2j * t
        return None
    if p.chart is ChartId.RECT and t > 0.0:
        return p.coord - 1j * t + 1j
    return None


def _invert_half_strip(strip: str, t: float, p: SurfacePoint) -> Optional[complex]:
    s = 1.0 if strip == "left" else -1.0
    if p.chart is ChartId.OUTER:
        u = p.coord
        if s * u.real <= -1.0 and -1.0 < u.imag < 1.0:
            return u + s
        if t == 0.0:
            return None
        K = 1.0 / t
        if -1.0 < s * u.real < 1.0 and abs(u.imag) >= 1.0:
            e = 1.0 if u.imag > 0.0 else -1.0
            z = 1j * e + K * (u - complex(-s, e))
            return z if 0.0 < s * z.real < 2.0 * K else None
        return None
    if p.chart is ChartId.RECT and t > 0.0:
        z = (p.coord + s) / t
        return z if 0.0 < s * z.real < 2.0 / t else None
    if t == 0.0 and p.chart is _STRIP_CHART[strip]:
        return p.coord
    if t == 0.0 and p.chart in _SPIRAL_CHART.values():
        corner = next(k for k, v in _SPIRAL_CHART.items() if v is p.chart)
        cst, e = _STRIP_EDGE[corner]
        if cst != strip:
            return None
        w = cmath.exp(p.coord)
        # only the first outward quarter turn of each spiral is reachable
        # from the half-strip flaps
        kind, n = _window(corner, p.coord.imag)
        if kind != "outer" or n != 0:
            return None
        z = w + 1j * e
        return z if abs(z.imag) >= 1.0 else None
    return None


def _invert_spiral(chart: EmbedChart, t: float, p: SurfacePoint) -> Optional[complex]:
    def accept(z: complex, want: Tuple[str, int]) -> Optional[complex]:
        if abs(z - chart.proj) >= chart.radius:
            return None
        try:
            got = _window(chart.corner, chart._theta(z))
        except ValueError:
            return None
        return z if got == want else None

    if t == 0.0:
        if p.chart is _SPIRAL_CHART[chart.corner]:
            lam = p.coord
            if abs(lam.imag - chart.base_log.imag) >= math.pi:
                return None
            return accept(cmath.exp(lam), _window(chart.corner, lam.imag))
        strip, e = _STRIP_EDGE[chart.corner]
        if p.chart is _STRIP_CHART[strip]:
            return accept(p.coord - 1j * e, ("rect", 0))
        return None
    K = 1.0 / t
    # the ball's angle span is under pi, so at most two consecutive
    # windows can meet it; try the candidates that land in p's chart
    lo = chart.base_log.imag - 0.5 * math.pi
    hi = chart.base_log.imag + 0.5 * math.pi
    cands = set()
    th = lo
    while th <= hi + 1e-12:
        try:
            cands.add(_window(chart.corner, th))
        except ValueError:
            pass
        th += 0.25 * math.pi
    c = CORNER_COORD[chart.corner]
    if p.chart is ChartId.OUTER:
        for kind, n in sorted(cands):
            if kind != "outer":
                continue
            z = accept((p.coord - c) * K ** (n + 1), ("outer", n))
            if z is not None:
                return z
        return None
    if p.chart is ChartId.RECT:
        c_r = complex(c.real, c.imag / K)
        for kind, n in sorted(cands):
            if kind != "rect":
                continue
            z = accept((p.coord - c_r) * K ** (n + 1), ("rect", n))
            if z is not None:
                return z
        return None
    return None


def transition_continuity_check(
    chart_a: EmbedChart,
    chart_b: EmbedChart,
    compact: Sequence[complex],
    t_grid: Sequence[float],
    tol: float = 1e-9,
) -> dict:
    """Sampled continuity certificate for one coordinate change.

    For each positive t in the grid, evaluates the change of coordinates
    from chart_a to chart_b on the samples that lie in the overlap at
    the limit leaf and records the sup distance to the limit change. The
    verdict is "pass" when the sups are non-increasing and end under
    tol, "empty" when the charts do not overlap over the samples, and
    "fail" otherwise. rate_bound is the largest sup/t ratio, finite for
    every implemented pair.
    """
    ts = sorted((float(t) for t in t_grid), reverse=True)
    if not ts or ts[-1] <= 0.0 or ts[0] > 1.0:
        raise ValueError("t_grid must be decreasing values in ]0, 1]")

    base: List[Tuple[complex, complex]] = []
    for z in compact:
        if not chart_a.contains(0.0, z):
            continue
        z2 = embed_invert(chart_b, 0.0, embed_eval(chart_a, 0.0, z))
        if z2 is not None:
            base.append((z, z2))
    if not base:
        return {
            "chart_a": chart_a.describe(),
            "chart_b": chart_b.describe(),
            "t_grid": ts,
            "sup": [],
            "n_samples": 0,
            "verdict": "empty",
        }

    sups: List[float] = []
    skipped: List[int] = []
    for t in ts:
        worst = 0.0
        miss = 0
        for z, z2 in base:
            if not chart_a.contains(t, z):
                miss += 1
                continue
            zb = embed_invert(chart_b, t, embed_eval(chart_a, t, z))
            if zb is None:
                miss += 1
                continue
            worst = max(worst, abs(zb - z2))
        sups.append(worst)
        skipped.append(miss)

    # sequences resting at rounding noise need not be monotone
    below = all(s < tol for s in sups)
    decreasing = all(b <= a + 1e-15 for a, b in zip(sups, sups[1:]))
    verdict = "pass" if below or (decreasing and sups[-1] < tol) else "fail"
    return {
        "chart_a": chart_a.describe(),
        "chart_b": chart_b.describe(),
        "t_grid": ts,
        "sup": sups,
        "n_samples": len(base),
        "skipped": skipped,
        "rate_bound": max(s / t for s, t in zip(sups, ts)),
        "verdict": verdict,
    }


def _disk_image(
    chart: EmbedChart, K: float, a: complex, r: float
) -> Tuple[ChartId, complex, float]:
    """Image of the closed disk B(a, r) on the aspect-K leaf.

    Each case formula is a similitude on its region, so a disk that
    stays inside one region maps to an exact disk; straddling disks are
    rejected rather than approximated.
    """
    t = 1.0 / K
    x, y = a.real, a.imag
    if chart.case == 1:
        if max(abs(x), abs(y)) - r <= 1.0:
            raise ValueError("disk touches the square; shrink the radius")
        return (ChartId.OUTER, a, r)
    if chart.case == 2:
        if abs(x) + r >= 1.0:
            raise ValueError("disk leaves the edge strip; shrink the radius")
        if y - r >= 1.0:
            return (ChartId.OUTER, a, r)
        if y + r <= 1.0 - 2.0 * t:
            return (ChartId.OUTER, a - 2j + 2j * t, r)
        if 1.0 - 2.0 * t < y - r and y + r < 1.0:
            return (ChartId.RECT, a + 1j * t - 1j, r)
        raise ValueError("disk straddles an edge of the rectangle band")
    if chart.case == 3:
        s = 1.0 if chart.strip == "left" else -1.0
        xs = s * x
        if xs + r <= 0.0 and abs(y) + r < 1.0:
            return (ChartId.OUTER, a - s, r)
        if xs - r >= 0.0 and abs(y) + r <= 1.0 and xs + r < 2.0 * K:
            return (ChartId.RECT, -s + a * t, r * t)
        e = 1.0 if y > 0.0 else -1.0
        if e * y - r >= 1.0 and xs - r > 0.0 and xs + r < 2.0 * K:
            return (ChartId.OUTER, complex(-s, e) + (a - 1j * e) * t, r * t)
        raise ValueError("disk straddles half-strip regions; shrink the radius")
    # case 4: the window must hold on the whole angular span of the disk
    if abs(a - chart.proj) + r >= chart.radius:
        raise ValueError("disk leaves the chart ball")
    span = math.asin(min(1.0, r / abs(a)))
    th = chart._theta(a)
    kind, n = _window(chart.corner, th)
    if _window(chart.corner, th - span) != (kind, n) or _window(
        chart.corner, th + span
    ) != (kind, n):
        raise ValueError("disk straddles sheet windows; shrink the radius")
    c = CORNER_COORD[chart.corner]
    scale = K ** -(n + 1)
    if kind == "outer":
        return (ChartId.OUTER, c + a * scale, r * scale)
    if n >= 1 and not abs(a) + r < 2.0 * K**n:
        raise ValueError("rectangle window needs |z| < 2 K^n on the disk")
    c_r = complex(c.real, c.imag / K)
    return (ChartId.RECT, c_r + a * scale, r * scale)


def _strictly_inside(chart_id: ChartId, center: complex, r: float, K: float) -> bool:
    x, y = abs(center.real), abs(center.imag)
    if chart_id is ChartId.OUTER:
        return max(x, y) - r > 1.0
    if chart_id is ChartId.RECT:
        return x + r < 1.0 and y + r < 1.0 / K
    return False


def separation_check(
    x: VirtualPointRep,
    y: VirtualPointRep,
    k_list: Sequence[float],
    r_x: float,
    r_y: float,
) -> dict:
    """Disk-image separation of two limit points along the family.

    For each aspect, the closed disks around the two base points are
    pushed through their charts; radii are rounded outward so a
    "disjoint" verdict survives the rounding. Returns the per-aspect
    verdicts and the smallest tested aspect from which every later one
    is disjoint.
    """
    if x.limit_point() == y.limit_point():
        raise ValueError("identical limit points cannot be separated")
    rows = []
    for K in sorted(float(k) for k in k_list):
        if K < 1.0:
            raise ValueError("aspects must be >= 1")
        cx, ox, rx = _disk_image(x.chart, K, x.a, r_x)
        cy, oy, ry = _disk_image(y.chart, K, y.a, r_y)
        pad = (rx + ry) * (1.0 + 1e-9)
        if cx is cy:
            verdict = "disjoint" if abs(ox - oy) > pad else "overlapping"
        elif _strictly_inside(cx, ox, rx, K) and _strictly_inside(cy, oy, ry, K):
            # different open charts are disjoint subsets of the surface
            verdict = "disjoint"
        else:
            verdict = "indeterminate"
        rows.append(
            {
                "K": K,
                "chart_x": cx.value,
                "center_x": ox,
                "radius_x": rx,
                "chart_y": cy.value,
                "center_y": oy,
                "radius_y": ry,
                "verdict": verdict,
            }
        )
    threshold = None
    for row in reversed(rows):
        if row["verdict"] != "disjoint":
            break
        threshold = row["K"]
    return {"per_k": rows, "threshold_K": threshold}
