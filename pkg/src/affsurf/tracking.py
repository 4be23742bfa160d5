"""Level-curve tracking through the branch structure.

The geometric output of the toolkit is curves in the uniformized plane
along which the developed value follows a prescribed path: boundary images
of the glued rectangle, seam rays, spiral flanks. Given a target path p(s)
in the developed plane and a seed on the curve, the tracker advances the
preimage by a Runge-Kutta predictor on w' = p'(s)/g'(w) and a Newton
corrector, maintaining the developed value incrementally by quadrature
along every chord the iteration moves through.

Branches: crossing one of the two vertical slits multiplies the continued
derivative by the aspect or its reciprocal. An integer exponent per point
records the current sheet, so curves may wind through any number of
sheets; the continued derivative is principal * K**m, and each quadrature
panel is split where a chord meets a slit so no panel straddles the jump.
The sign convention follows from the corner holonomy: a counterclockwise
circuit of the top-right prevertex crosses the right slit leftward once
and must scale the derivative by 1/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .develop import DevelopingMap
from .quadrature import QuadratureError, integrate_segment, segment_slit_crossing


def _chord_crossings(dev: DevelopingMap, a: complex, b: complex):
    """Slit crossings of the chord [a, b] in traversal order.

    Returns (t, slit_index, direction) triples; direction is the sign of
    the real velocity. A straight chord meets each vertical slit line at
    most once.
    """
    # trivial aspect: the slits are degenerate and carry no jump, and
    # boundary curves legitimately run along them
    if not dev.slits or dev.K == 1.0:
        return []
    dx = (b - a).real
    out = []
    for idx, (sx, sy) in enumerate(dev.slits):
        t = segment_slit_crossing(a, b, sx, sy, pad=0.0)
        if t is None:
            continue
        if dx == 0.0:
            raise ArithmeticError("chord runs along a branch slit")
        out.append((t, idx, 1 if dx > 0 else -1))
    out.sort()
    return out


def _branch_delta(slit_index: int, direction: int) -> int:
    # right slit (index 0): leftward crossing raises the exponent;
    # left slit mirrors it
    return -direction if slit_index == 0 else direction


def _continued_derivative(dev: DevelopingMap, a: complex, m: int, w: complex):
    """(continued g'(w), branch exponent at w) reached from (a, m) along the chord."""
    mm = m
    for _, idx, d in _chord_crossings(dev, a, w):
        mm += _branch_delta(idx, d)
    gp = complex(dev.derivative(w))
    if mm:
        gp *= dev.K**mm
    return gp, mm


def _chord_increment(dev: DevelopingMap, a: complex, b: complex, m: int, quad_tol: float):
    """(integral of the continued derivative along [a, b], exponent at b)."""
    crossings = _chord_crossings(dev, a, b)
    total = 0j
    mm = m
    t_prev = 0.0
    for t, idx, d in crossings:
        if t > t_prev:
            lo, hi = a + t_prev * (b - a), a + t * (b - a)
            piece = integrate_segment(dev.derivative, lo, hi, quad_tol)
            total += piece * (dev.K**mm if mm else 1.0)
        mm += _branch_delta(idx, d)
        t_prev = t
    if t_prev < 1.0:
        lo = a + t_prev * (b - a)
        piece = integrate_segment(dev.derivative, lo, b, quad_tol)
        total += piece * (dev.K**mm if mm else 1.0)
    return total, mm


@dataclass
class TrackResult:
    s: np.ndarray
    w: np.ndarray
    g: np.ndarray
    branch: np.ndarray
    status: str  # "completed" or "stalled"
    reason: str
    arc_length: float

    @property
    def completed(self) -> bool:
        return self.status == "completed"


def segment_target(a: complex, b: complex):
    """Straight developed-plane target from a to b on s in [0, 1]."""
    a, b = complex(a), complex(b)
    return (lambda s: a + s * (b - a)), (lambda s: b - a)


def circle_target(center: complex, start: complex, turns: float):
    """Developed-plane circular arc around center, beginning at start.

    Positive turns wind counterclockwise; s in [0, 1] covers the arc.
    """
    center, start = complex(center), complex(start)
    rho = start - center
    om = 2j * math.pi * turns

    def p(s):
        return center + rho * np.exp(om * s)

    def dp(s):
        return rho * om * np.exp(om * s)

    return p, dp


def track_level_curve(
    dev: DevelopingMap,
    p: Callable[[float], complex],
    dp: Callable[[float], complex],
    w0: complex,
    s_span: Tuple[float, float] = (0.0, 1.0),
    g0: Optional[complex] = None,
    branch0: int = 0,
    tol: float = 1e-10,
    quad_tol: float = 1e-13,
    max_step: float = 0.1,
    first_step: Optional[float] = None,
    min_step_fraction: float = 1e-10,
    max_steps: int = 20000,
    anchor_tol: float = 1e-6,
) -> TrackResult:
    """Track the curve g(w(s)) = p(s) from a seed on it.

    w0 must satisfy g(w0) = p(s_span[0]) on the branch given by branch0
    and g0; when g0 is omitted it is computed on the principal branch,
    which requires w0 to be reachable by develop_at. max_step caps the
    w-plane distance per step, so it should be set below the feature
    scale of the curve (a petal four sheets in is far smaller than the
    mouth of a strip). A track that cannot proceed returns the partial
    curve with status "stalled" rather than raising.
    """
    s0, s1 = float(s_span[0]), float(s_span[1])
    if not s1 > s0:
        raise ValueError(f"need s_span with s1 > s0, got {s_span}")
    w = complex(w0)
    m = int(branch0)
    if g0 is None:
        if m != 0:
            raise ValueError("an explicit g0 is required when branch0 is nonzero")
        g = complex(dev.develop_at(w))
    else:
        g = complex(g0)
    target0 = complex(p(s0))
    if abs(g - target0) > anchor_tol * (1.0 + abs(target0)):
        raise ValueError(
            f"seed develops to {g:.6g}, not the target start {target0:.6g}"
        )

    span = s1 - s0
    h = first_step if first_step is not None else span / 200.0
    h = min(h, span)
    min_step = min_step_fraction * span

    ss, ws, gs, ms = [s0], [w], [g], [m]
    arc = 0.0
    s = s0
    status, reason = "completed", ""
    steps = 0
    while s < s1 - 1e-14 * span:
        if steps >= max_steps:
            status, reason = "stalled", f"step budget {max_steps} exhausted"
            break
        steps += 1
        h = min(h, s1 - s)
        s_new = s + h
        ok = False
        try:
            # RK4 stages; branch for each stage point is resolved along
            # the chord from the accepted point
            k1 = dp(s) / _continued_derivative(dev, w, m, w)[0]
            w2 = w + 0.5 * h * k1
            k2 = dp(s + 0.5 * h) / _continued_derivative(dev, w, m, w2)[0]
            w3 = w + 0.5 * h * k2
            k3 = dp(s + 0.5 * h) / _continued_derivative(dev, w, m, w3)[0]
            w4 = w + h * k3
            k4 = dp(s_new) / _continued_derivative(dev, w, m, w4)[0]
            w_pred = w + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            chord = abs(w_pred - w)
            if chord <= max_step:
                inc, m_cur = _chord_increment(dev, w, w_pred, m, quad_tol)
                g_cur = g + inc
                w_cur = w_pred
                p_new = complex(p(s_new))
                scale = 1.0 + abs(p_new)
                move_cap = 4.0 * max(chord, 1e-3 * max_step)
                for _ in range(6):
                    r = g_cur - p_new
                    if abs(r) <= tol * scale:
                        ok = True
                        break
                    gp, _ = _continued_derivative(dev, w_cur, m_cur, w_cur)
                    dw = -r / gp
                    if abs(dw) > move_cap:
                        break
                    inc, m_cur = _chord_increment(dev, w_cur, w_cur + dw, m_cur, quad_tol)
                    w_cur += dw
                    g_cur += inc
        except (ValueError, ArithmeticError):
            # pole clearance, slit-parallel chord, or exhausted quadrature:
            # retry shorter
            ok = False
        if ok:
            arc += abs(w_cur - w)
            s, w, g, m = s_new, w_cur, g_cur, m_cur
            ss.append(s), ws.append(w), gs.append(g), ms.append(m)
            h = min(h * 1.4, span)
        else:
            h *= 0.5
            if h < min_step:
                status, reason = "stalled", f"step size underflow at s = {s:.6g}"
                break
    return TrackResult(
        s=np.array(ss),
        w=np.array(ws),
        g=np.array(gs),
        branch=np.array(ms, dtype=int),
        status=status,
        reason=reason,
        arc_length=arc,
    )
