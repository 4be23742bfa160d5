"""Developing map of a uniformized family member.

g maps the uniformized plane, minus the four prevertices (finite aspect) or
the two merged singular points (limit), to the outer-chart coordinate, and
is normalized by g(w) = w + O(1/w) at infinity. The derivative has the
closed form

    g'(w) = exp(beta * (Log((w-z4)/(w-z1)) + Log((w-z2)/(w-z3)))),

principal logarithms, beta = log(K)/(2*pi*i). Each Moebius ratio sends the
vertical segment joining its pole pair to the negative reals, so this
expression is single-valued and holomorphic exactly off the two closed
vertical slits between conjugate poles, and crossing a slit multiplies g'
by K or 1/K. develop() refuses slit-crossing paths; the curve tracker
carries an explicit winding count instead.

In the limit the pole pairs merge and

    g'(w) = exp(tau/(w-x0) - tau/(w+x0))

is single-valued with essential singularities at +-x0; a loop around one of
them adds 2*pi*i*Res(g') to g.
"""

from __future__ import annotations

import cmath
import math
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .connection import prevertex_ring
from .quadrature import integrate_segment, segment_slit_crossing

SERIES_TERMS = 26


def _log1p_c(u):
    """Principal log(1+u) for complex arrays, accurate for small |u|.

    numpy's complex log1p computes log(1+u) verbatim and loses the real
    part when |u| is near rounding scale.
    """
    u = np.asarray(u, dtype=complex)
    out = np.empty_like(u)
    small = np.abs(u) < 1e-4
    us = u[small]
    acc = np.zeros_like(us)
    term = np.ones_like(us)
    for k in range(1, 9):
        term = term * us
        acc = acc + ((-1.0) ** (k - 1) / k) * term
    out[small] = acc
    out[~small] = np.log(1.0 + u[~small])
    return out


class DevelopingMap:
    """Derivative, tail expansion, and path integration of the developing map."""

    def __init__(self, kind: str, K: float = 1.0, z1: complex = 0j,
                 x0: float = 0.0, tau: float = 0.0):
        self.kind = kind
        if kind == "finite":
            if math.isinf(K) or not K >= 1.0:
                raise ValueError(f"finite aspect in [1, inf) required, got {K}")
            z1 = complex(z1)
            if not (z1.real > 0 and z1.imag > 0):
                raise ValueError(f"prevertex must lie in the open first quadrant, got {z1}")
            self.K = float(K)
            self.beta = math.log(K) / (2j * math.pi)
            self.poles = prevertex_ring(z1)
            self.slits = ((z1.real, z1.imag), (-z1.real, z1.imag))
        elif kind == "limit":
            if not (x0 > 0 and tau > 0):
                raise ValueError(f"need x0 > 0 and tau > 0, got {x0}, {tau}")
            self.K = math.inf
            self.beta = 0j
            self.x0, self.tau = float(x0), float(tau)
            self.poles = (x0 + 0j, -x0 + 0j)
            self.slits = ()
        else:
            raise ValueError(f"unknown kind {kind!r}")
        self.tail_radius = 10.0 * (1.0 + max(abs(p) for p in self.poles))

    @classmethod
    def from_aspect(cls, K: float, prevertex: complex) -> "DevelopingMap":
        return cls("finite", K=K, z1=prevertex)

    @classmethod
    def merged_limit(cls, x0: float, tau: float) -> "DevelopingMap":
        return cls("limit", x0=x0, tau=tau)

    @property
    def is_trivial(self) -> bool:
        return self.kind == "finite" and self.K == 1.0

    # -- pointwise evaluation ------------------------------------------------

    def _guard_poles(self, arr) -> None:
        clearance = 1e-13 * (1.0 + max(abs(p) for p in self.poles))
        for p in self.poles:
            if np.any(np.abs(arr - p) < clearance):
                raise ValueError(f"evaluation too close to the singular point {p}")

    def log_derivative(self, w):
        """Principal branch of log g'. Scalar or ndarray."""
        arr = np.asarray(w, dtype=complex)
        self._guard_poles(arr)
        if self.kind == "finite":
            if self.is_trivial:
                out = np.zeros_like(arr)
            else:
                z1, z2, z3, z4 = self.poles
                out = self.beta * (
                    _log1p_c((z1 - z4) / (arr - z1)) + _log1p_c((z3 - z2) / (arr - z3))
                )
        else:
            # 1/(w-x0) - 1/(w+x0) written without cancellation at large w
            out = self.tau * 2.0 * self.x0 / ((arr - self.x0) * (arr + self.x0))
        return complex(out) if arr.ndim == 0 else out

    def derivative(self, w):
        arr = np.asarray(w, dtype=complex)
        out = np.exp(self.log_derivative(arr))
        return complex(out) if arr.ndim == 0 else out

    def derivative_minus_one(self, w):
        """g' - 1 without cancellation where log g' is small."""
        arr = np.asarray(w, dtype=complex)
        out = np.expm1(self.log_derivative(arr))
        return complex(out) if arr.ndim == 0 else out

    # -- expansion at infinity -----------------------------------------------

    @cached_property
    def series_coefficients(self) -> np.ndarray:
        """E_k with g' - 1 = sum_{k>=2} E_k w^{-k} (E_0 = 1, E_1 = 0)."""
        n = SERIES_TERMS
        p = np.zeros(n + 1, dtype=complex)
        for k in range(2, n + 1):
            if self.kind == "finite":
                z1, z2, z3, z4 = self.poles
                p[k] = self.beta * (z1**k - z4**k + z3**k - z2**k) / k
            else:
                p[k] = self.tau * (self.x0 ** (k - 1) - (-self.x0) ** (k - 1))
        e = np.zeros(n + 1, dtype=complex)
        e[0] = 1.0
        for m in range(1, n + 1):
            e[m] = sum(j * p[j] * e[m - j] for j in range(1, m + 1)) / m
        return e

    def tail_integral(self, w: complex) -> complex:
        """Integral of g'-1 from infinity to w; g(w) = w + tail_integral(w).

        Valid for |w| >= tail_radius, where the expansion converges far past
        machine precision.
        """
        w = complex(w)
        if abs(w) < 0.999 * self.tail_radius:
            raise ValueError(f"|w| = {abs(w):.3g} is inside the tail radius {self.tail_radius:.3g}")
        e = self.series_coefficients
        acc = 0j
        iw = 1.0 / w
        power = iw  # w^{1-k} starting at k = 2
        for k in range(2, len(e)):
            acc -= e[k] * power / (k - 1)
            power *= iw
        return acc

    # -- branch-cut geometry ---------------------------------------------

    def first_slit_crossing(self, a: complex, b: complex, pad: float = 0.0):
        """Earliest crossing of segment a->b with either slit.

        Returns (t, slit_index) or None. Trivial and limit maps have no cuts.
        """
        if self.kind != "finite" or self.is_trivial:
            return None
        best = None
        for i, (sx, hh) in enumerate(self.slits):
            t = segment_slit_crossing(a, b, sx, hh, pad)
            if t is not None and (best is None or t < best[0]):
                best = (t, i)
        return best

    # -- integration -------------------------------------------------------

    def develop(self, path: Sequence[complex], tol: float = 1e-11) -> np.ndarray:
        """Values of g at the nodes of a polyline anchored near infinity.

        path[0] must satisfy |path[0]| >= tail_radius; the anchor value comes
        from the tail expansion and each further node adds the integral of g'
        along the segment. Raises if any segment crosses a branch slit.
        """
        nodes = [complex(p) for p in path]
        if not nodes:
            raise ValueError("empty path")
        if abs(nodes[0]) < 0.999 * self.tail_radius:
            raise ValueError("path must start at or beyond the tail radius")
        out = np.empty(len(nodes), dtype=complex)
        out[0] = nodes[0] + self.tail_integral(nodes[0])
        if len(nodes) == 1:
            return out
        share = tol / (len(nodes) - 1)
        for i in range(len(nodes) - 1):
            a, b = nodes[i], nodes[i + 1]
            # pad 0: a segment running down the cut line but stopping above
            # the slit (how the solver approaches a prevertex) is legal
            if self.first_slit_crossing(a, b) is not None:
                raise ValueError(
                    f"path segment {a} -> {b} crosses a branch slit; "
                    "route around the slits or use the tracker"
                )
            out[i + 1] = out[i] + integrate_segment(self.derivative, a, b, share)
        return out

    def develop_at(self, w: complex, tol: float = 1e-11) -> complex:
        """g at a single point, routed radially or vertically from infinity."""
        w = complex(w)
        if abs(w) >= self.tail_radius:
            return w + self.tail_integral(w)
        if w != 0:
            anchor = w / abs(w) * self.tail_radius
            if self.first_slit_crossing(anchor, w) is None:
                return complex(self.develop([anchor, w], tol)[-1])
        anchor = complex(w.real, abs(w.imag) + self.tail_radius + 2.0)
        if self.first_slit_crossing(anchor, w) is not None:
            raise ValueError(f"no slit-free straight approach to {w}")
        return complex(self.develop([anchor, w], tol)[-1])

    def loop_integral(self, center: complex, radius: float, tol: float = 1e-11) -> complex:
        """Counterclockwise circle integral of g', the additive monodromy of g.

        The circle must not meet a branch slit (it may enclose one).
        """
        center = complex(center)
        if radius <= 0:
            raise ValueError("radius must be positive")
        for sx, hh in self.slits:
            d = abs(sx - center.real)
            if d <= radius:
                s = math.sqrt(max(radius**2 - d**2, 0.0))
                for y in (center.imag + s, center.imag - s):
                    if abs(y) <= hh + 1e-12:
                        raise ValueError("loop circle meets a branch slit")

        def f(theta):
            u = np.exp(1j * np.asarray(theta, dtype=complex))
            return self.derivative(center + radius * u) * 1j * radius * u

        arcs = np.linspace(0.0, 2.0 * math.pi, 9)
        share = tol / 8.0
        return sum(
            integrate_segment(f, arcs[i], arcs[i + 1], share) for i in range(8)
        )

    def additive_monodromy_series(self, pole: complex, n_terms: int = 48) -> complex:
        """2*pi*i times the residue of g' at an essential point, by series.

        Limit maps only. Writing w = pole + u, g' = exp(c/u) * exp(d/(u+e))
        and the residue is sum_n a_n c^(n+1)/(n+1)! with a_n the Taylor
        coefficients of the analytic factor.
        """
        if self.kind != "limit":
            raise ValueError("additive monodromy series applies to the limit map")
        pole = complex(pole)
        if abs(pole - self.x0) <= 1e-9:
            c, d, e = self.tau, -self.tau, 2.0 * self.x0
        elif abs(pole + self.x0) <= 1e-9:
            c, d, e = -self.tau, self.tau, -2.0 * self.x0
        else:
            raise ValueError(f"{pole} is not a singular point (have {self.poles})")
        # q(u) = d/du [d/(u+e)] = -d/(u+e)^2, expanded about u = 0
        q = np.array([-(d / e**2) * (k + 1) * (-1.0 / e) ** k for k in range(n_terms)])
        a = np.zeros(n_terms + 1)
        a[0] = math.exp(d / e)
        for n in range(n_terms):
            a[n + 1] = np.dot(q[: n + 1], a[n::-1]) / (n + 1)
        res = sum(a[n] * c ** (n + 1) / math.factorial(n + 1) for n in range(n_terms + 1))
        return 2j * math.pi * res
