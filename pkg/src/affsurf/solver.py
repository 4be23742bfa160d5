"""Accessory-parameter solve.

For each aspect K the developing map must send the first-quadrant
prevertex to the upper-right square corner 1+i; that single complex
condition pins the prevertex. The residual integrates g' down a vertical
ray onto the prevertex, where |g'| <= 1 keeps the quadrature tame at any
aspect. A damped two-real-dimensional Newton iteration drives it to zero,
with continuation in log K supplying starts that the plain iteration
could not reach on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .develop import DevelopingMap

CORNER_TARGET = 1 + 1j


@dataclass(frozen=True)
class SolveResult:
    K: float
    prevertex: complex
    residual: float
    iterations: int
    evaluations: int
    converged: bool


def corner_residual(K: float, prevertex: complex, quad_tol: float = 1e-12) -> complex:
    """g(prevertex) - (1+i), approached along the vertical ray from above.

    The ray stops 1e-12*(1+|prevertex|) short of the prevertex; since
    |g'| <= 1 on the ray the truncation error is below that.
    """
    z1 = complex(prevertex)
    dev = DevelopingMap.from_aspect(K, z1)
    delta = 1e-12 * (1.0 + abs(z1))
    anchor = complex(z1.real, dev.tail_radius)
    g = dev.develop([anchor, z1 + 1j * delta], tol=quad_tol)[-1]
    return g - CORNER_TARGET


def _newton(K, z0, tol, quad_tol, max_iter):
    z = complex(z0)
    r = corner_residual(K, z, quad_tol)
    evals = 1
    for it in range(max_iter):
        if abs(r) <= tol:
            return z, abs(r), it, evals, True
        jac = np.empty((2, 2))
        for col, h in enumerate((1e-6 * (1 + abs(z.real)), 1e-6 * (1 + abs(z.imag)))):
            dz = h if col == 0 else 1j * h
            rp = corner_residual(K, z + dz, quad_tol)
            rm = corner_residual(K, z - dz, quad_tol)
            evals += 2
            d = (rp - rm) / (2 * h)
            jac[0, col], jac[1, col] = d.real, d.imag
        try:
            sx, sy = np.linalg.solve(jac, [-r.real, -r.imag])
        except np.linalg.LinAlgError:
            break
        step = complex(sx, sy)
        lam, accepted = 1.0, False
        for _ in range(8):
            cand = z + lam * step
            if cand.real > 0 and cand.imag > 0:
                r_new = corner_residual(K, cand, quad_tol)
                evals += 1
                if abs(r_new) < abs(r) * (1 - 0.25 * lam) or abs(r_new) <= tol:
                    z, r, accepted = cand, r_new, True
                    break
            lam /= 2
        if not accepted:
            break
    return z, abs(r), max_iter, evals, abs(r) <= tol


def _cold_start(K: float, quad_tol: float) -> complex:
    """Walk the solution from aspect 1, a few geometric steps per decade."""
    z = CORNER_TARGET
    if K <= 1.3:
        return z
    n = max(2, math.ceil(4 * math.log10(K)))
    for j in range(1, n + 1):
        Kj = K ** (j / n)
        z, res, _, _, ok = _newton(Kj, z, 1e-8, quad_tol, 40)
        if not ok:
            raise ArithmeticError(f"continuation stalled at aspect {Kj:.4g} (residual {res:.2e})")
    return z


def solve_prevertex(
    K: float,
    initial: Optional[complex] = None,
    tol: float = 1e-10,
    quad_tol: float = 1e-12,
    max_iter: int = 60,
) -> SolveResult:
    """Prevertex of the aspect-K member, in the open first quadrant.

    Without an initial guess the solve is seeded by continuation from the
    square, where the map is the identity and the prevertex is 1+i itself.
    """
    if math.isinf(K):
        raise ValueError("the limit has no finite prevertex; extrapolate a sweep instead")
    if not K >= 1.0:
        raise ValueError(f"aspect must be >= 1, got {K}")
    if K == 1.0:
        r = corner_residual(1.0, CORNER_TARGET, quad_tol)
        return SolveResult(1.0, CORNER_TARGET, abs(r), 0, 1, abs(r) <= tol)
    z0 = initial if initial is not None else _cold_start(K, quad_tol)
    z, res, its, evals, ok = _newton(K, z0, tol, quad_tol, max_iter)
    if not ok:
        raise ArithmeticError(f"no convergence at aspect {K:.6g}: residual {res:.2e} after {its} iterations")
    return SolveResult(float(K), z, res, its, evals, True)


def _warm_guess(prev: Sequence[SolveResult], K: float) -> Optional[complex]:
    """Extrapolate (Re z1, log Im z1) linearly in log K from the last two solves."""
    if not prev:
        return None
    if len(prev) == 1 or prev[-1].K <= 1.0:
        return prev[-1].prevertex
    a, b = prev[-2], prev[-1]
    la, lb, lk = math.log(a.K), math.log(b.K), math.log(K)
    if lb == la:
        return b.prevertex
    t = (lk - lb) / (lb - la)
    x = b.prevertex.real + t * (b.prevertex.real - a.prevertex.real)
    ly = math.log(b.prevertex.imag) + t * (math.log(b.prevertex.imag) - math.log(a.prevertex.imag))
    if x <= 0:
        return b.prevertex
    return complex(x, math.exp(ly))


def continuation_sweep(
    k_values: Sequence[float],
    tol: float = 1e-10,
    quad_tol: float = 1e-12,
) -> list[SolveResult]:
    """Solve an increasing aspect grid with warm starts.

    A failed step is retried once through the geometric midpoint before
    giving up.
    """
    ks = sorted(float(k) for k in k_values)
    if ks and ks[0] < 1.0:
        raise ValueError(f"aspects must be >= 1, got {ks[0]}")
    results: list[SolveResult] = []
    for K in ks:
        guess = _warm_guess(results, K)
        try:
            results.append(solve_prevertex(K, initial=guess, tol=tol, quad_tol=quad_tol))
        except ArithmeticError:
            mid = math.sqrt(results[-1].K * K) if results else math.sqrt(K)
            bridge = solve_prevertex(mid, initial=guess, tol=tol, quad_tol=quad_tol)
            retry = _warm_guess(results + [bridge], K)
            results.append(solve_prevertex(K, initial=retry, tol=tol, quad_tol=quad_tol))
    return results


def _neville_at_zero(v: np.ndarray, f: np.ndarray) -> float:
    """Neville tableau evaluated at 0."""
    p = np.array(f, dtype=float)
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (0.0 - v[i + m]) * p[i] / (v[i] - v[i + m]) + (0.0 - v[i]) * p[i + 1] / (
                v[i + m] - v[i]
            )
    return float(p[0])


@dataclass(frozen=True)
class LimitEstimate:
    x0: float
    tau: float
    x0_stability: float
    tau_stability: float
    points_used: int


def extract_limit(results: Sequence[SolveResult], order: int = 4) -> LimitEstimate:
    """Limit parameters by Richardson extrapolation of a solved sweep.

    The pole abscissa Re z1 and the rescaled height log(K) Im z1 / pi are
    both smooth in 1/log K; Neville extrapolation to 0 of the last few sweep
    points estimates their limits. Stability numbers compare against a
    sweep thinned to every other aspect (largest kept), one order lower.
    """
    usable = [r for r in results if r.K > 1.0 and not math.isinf(r.K)]
    if len(usable) < 3:
        raise ValueError("need at least three solved aspects above 1")
    usable.sort(key=lambda r: r.K)
    L = np.array([math.log(r.K) for r in usable])
    v = 1.0 / L
    x = np.array([r.prevertex.real for r in usable])
    t = L * np.array([r.prevertex.imag for r in usable]) / math.pi

    def fit(vv, ff, kmax):
        k = min(kmax, len(vv) - 1)
        return _neville_at_zero(vv[-(k + 1):], ff[-(k + 1):])

    x0 = fit(v, x, order)
    tau = fit(v, t, order)
    # thin to every other point, keeping the largest aspect
    idx = np.arange(len(usable) - 1, -1, -2)[::-1]
    x0_h = fit(v[idx], x[idx], order - 1)
    tau_h = fit(v[idx], t[idx], order - 1)
    return LimitEstimate(
        x0=x0,
        tau=tau,
        x0_stability=abs(x0 - x0_h),
        tau_stability=abs(tau - tau_h),
        points_used=len(usable),
    )
