import cmath
import math

import numpy as np
import pytest

from affsurf.connection import RationalConnection
from affsurf.develop import DevelopingMap, _log1p_c
from affsurf.quadrature import (
    QuadratureError,
    integrate_polyline,
    integrate_segment,
    segment_slit_crossing,
)


class TestQuadrature:
    def test_polynomial_exact_in_one_panel(self):
        val = integrate_segment(lambda w: 3 * w**2 + 2 * w, 1 - 1j, 2 + 1j)
        a, b = 1 - 1j, 2 + 1j
        assert val == pytest.approx((b**3 + b**2) - (a**3 + a**2), abs=1e-13)

    def test_oscillatory_adaptive(self):
        omega = 197.0
        val = integrate_segment(lambda t: np.exp(1j * omega * t), 0.0, 1.0, tol=1e-12)
        assert val == pytest.approx((cmath.exp(1j * omega) - 1) / (1j * omega), abs=1e-11)

    def test_polyline_matches_single_segment(self):
        f = lambda w: np.sin(w)
        direct = integrate_segment(f, 0j, 2 + 2j)
        split = integrate_polyline(f, [0j, 1 + 1j, 2 + 2j])
        assert split == pytest.approx(direct, abs=1e-11)

    def test_budget_exhaustion(self):
        # integrable singularity squeezed to the endpoint defeats the budget
        with pytest.raises(QuadratureError):
            integrate_segment(lambda t: np.abs(t - 0.123456) ** -0.99, 0.0, 1.0,
                              tol=1e-14, max_panels=8)

    def test_slit_crossing_detection(self):
        assert segment_slit_crossing(0j, 2 + 0j, 1.0, 0.5) == pytest.approx(0.5)
        assert segment_slit_crossing(1j, 2 + 1j, 1.0, 0.5) is None
        # along the cut line but above the slit
        assert segment_slit_crossing(1 + 2j, 1 + 0.6j, 1.0, 0.5) is None
        assert segment_slit_crossing(1 + 2j, 1 + 0.4j, 1.0, 0.5) == pytest.approx(0.0)


K2 = DevelopingMap.from_aspect(2.0, 0.8 + 0.55j)


class TestDerivative:
    def test_one_at_infinity(self):
        assert K2.derivative(1e6 + 1e6j) == pytest.approx(1.0, abs=1e-10)

    def test_trivial_aspect(self):
        d = DevelopingMap.from_aspect(1.0, 1 + 1j)
        w = np.array([3 + 0j, 0j, 0.8 + 0.2j])
        assert np.all(d.derivative(w) == 1.0)

    def test_conjugation_symmetries(self):
        rng = np.random.default_rng(3)
        w = rng.normal(size=25) * 3 + 1j * (rng.normal(size=25) * 3 + 4)
        vals = K2.derivative(w)
        assert np.allclose(K2.derivative(np.conj(w)), np.conj(vals), rtol=1e-13)
        assert np.allclose(K2.derivative(-np.conj(w)), np.conj(vals), rtol=1e-13)

    def test_continuous_across_cut_line_outside_slit(self):
        x, y = 0.8, 0.55
        eps = 1e-9
        above = K2.derivative(x + 1j * (y + 0.2))
        left = K2.derivative(x - eps + 1j * (y + 0.2))
        right = K2.derivative(x + eps + 1j * (y + 0.2))
        assert left == pytest.approx(right, rel=1e-6)
        assert left == pytest.approx(above, rel=1e-6)

    def test_jump_factor_across_slit(self):
        # crossing the right slit right-to-left divides g' by the aspect,
        # crossing the left slit right-to-left multiplies by it
        eps = 1e-9
        r = K2.derivative(0.8 - eps + 0.2j) / K2.derivative(0.8 + eps + 0.2j)
        assert r == pytest.approx(1 / 2.0, rel=1e-6)
        l = K2.derivative(-0.8 - eps + 0.2j) / K2.derivative(-0.8 + eps + 0.2j)
        assert l == pytest.approx(2.0, rel=1e-6)

    def test_pole_guard(self):
        with pytest.raises(ValueError):
            K2.derivative(0.8 + 0.55j)

    def test_derivative_solves_connection_ode(self):
        # independent route: log g' is a primitive of the connection
        K, z1 = 3.0, 0.75 + 0.4j
        d = DevelopingMap.from_aspect(K, z1)
        conn = RationalConnection.from_aspect(K, z1)
        w, anchor = -1.5 + 0.8j, -1.5 + 60.8j
        logg = d.log_derivative(anchor) + integrate_segment(conn.value, anchor, w, 1e-13)
        assert cmath.exp(logg) == pytest.approx(d.derivative(w), rel=1e-10)

    def test_minus_one_accuracy_far_out(self):
        w = 1e7 + 3e6j
        exact = K2.log_derivative(w)  # ~ E2/w^2, far below 1
        got = K2.derivative_minus_one(w)
        assert got == pytest.approx(exact, rel=1e-10)
        assert abs(got) < 1e-13


class TestSeries:
    def test_log1p_small(self):
        u = np.array([1e-18 + 1e-18j, 1e-6 - 2e-6j, 0.3 + 0.1j])
        got = _log1p_c(u)
        assert got[0] == pytest.approx(1e-18 + 1e-18j, rel=1e-12)
        assert got[1] == pytest.approx(cmath.log(1 + 1e-6 - 2e-6j), rel=1e-12)
        assert got[2] == pytest.approx(cmath.log(1.3 + 0.1j), rel=1e-14)

    def test_coefficients_against_highprec_oracle(self):
        mp = pytest.importorskip("mpmath")
        K, z1 = 2.0, mp.mpc("0.8", "0.55")
        beta = mp.log(K) / (2j * mp.pi)
        z2, z3, z4 = -mp.conj(z1), -z1, mp.conj(z1)

        def f(u):
            if u == 0:
                return mp.mpc(1)
            return mp.e ** (
                beta * (mp.log((1 - z4 * u) / (1 - z1 * u)) + mp.log((1 - z2 * u) / (1 - z3 * u)))
            )

        coeffs = mp.taylor(f, 0, 8)
        d = DevelopingMap.from_aspect(2.0, 0.8 + 0.55j)
        e = d.series_coefficients
        assert abs(e[1]) < 1e-15
        for k in range(2, 9):
            assert complex(coeffs[k]) == pytest.approx(complex(e[k]), abs=1e-12)

    def test_tail_matches_quadrature(self):
        d = K2
        R = d.tail_radius
        w0 = R * cmath.exp(0.4j)
        far = 40 * R * cmath.exp(0.4j)
        quad = integrate_segment(d.derivative_minus_one, far, w0, 1e-13)
        assert d.tail_integral(w0) - d.tail_integral(far) == pytest.approx(quad, abs=1e-11)

    def test_limit_tail(self):
        d = DevelopingMap.merged_limit(0.5, 0.6)
        R = d.tail_radius
        w0 = R * cmath.exp(2.2j)
        far = 40 * R * cmath.exp(2.2j)
        quad = integrate_segment(d.derivative_minus_one, far, w0, 1e-13)
        assert d.tail_integral(w0) - d.tail_integral(far) == pytest.approx(quad, abs=1e-11)


class TestDevelop:
    def test_identity_at_aspect_one(self):
        d = DevelopingMap.from_aspect(1.0, 1 + 1j)
        path = [30 + 5j, 3 + 1j, -2 - 1j]
        vals = d.develop(path)
        assert np.allclose(vals, path, atol=1e-12)

    def test_normalization_far_field(self):
        w = 200 + 120j
        g = K2.develop_at(w)
        e2 = K2.series_coefficients[2]
        assert g - w == pytest.approx(-e2 / w, rel=1e-3)

    def test_path_independence(self):
        w = -2.0 + 1.5j
        via_a = K2.develop([30j, 3j + 1, w])[-1]
        via_b = K2.develop([-30 + 0.5j, -4 + 2.5j, w])[-1]
        assert via_a == pytest.approx(via_b, abs=1e-10)
        assert K2.develop_at(w) == pytest.approx(via_a, abs=1e-10)

    def test_conjugation_symmetry(self):
        w = 1.4 + 0.9j
        g = K2.develop_at(w)
        assert K2.develop_at(w.conjugate()) == pytest.approx(g.conjugate(), abs=1e-10)
        assert K2.develop_at(-w.conjugate()) == pytest.approx(-g.conjugate(), abs=1e-10)

    def test_real_axis_outside_slits_stays_real(self):
        for x in (2.5, -1.7):
            g = K2.develop([x + 30j, x + 0j])[-1]
            assert abs(g.imag) < 1e-10

    def test_midline_height_constant_between_slits(self):
        # g' is real on the inter-slit segment, so the from-above branch has
        # constant imaginary part there: the image of a horizontal midline.
        # (It equals 1 - 1/K once the prevertex is actually solved.)
        vals = [K2.develop([x + 30j, x + 0j])[-1] for x in (-0.5, 0.0, 0.3, 0.6)]
        ims = [v.imag for v in vals]
        assert max(ims) - min(ims) < 1e-10
        assert ims[0] > 0

    def test_slit_crossing_rejected(self):
        with pytest.raises(ValueError):
            K2.develop([30 + 0.2j, 0.2j])  # straight through the right slit
        with pytest.raises(ValueError):
            K2.develop([2 + 0j, 3 + 0j])  # anchor inside the tail radius

    def test_descent_along_cut_line_is_legal(self):
        path = [0.8 + 30j, 0.8 + 1j * (0.55 + 1e-10)]
        vals = K2.develop(path, tol=1e-12)
        assert np.isfinite(vals[-1].real) and np.isfinite(vals[-1].imag)


class TestLoops:
    def test_pair_loops_cancel(self):
        i_r = K2.loop_integral(0.8, 1.0)
        i_l = K2.loop_integral(-0.8, 1.0)
        assert abs(i_r + i_l) < 1e-9

    def test_loop_radius_validation(self):
        with pytest.raises(ValueError):
            K2.loop_integral(0.8, 0.3)  # circle pierces the slit

    def test_far_loop_vanishes(self):
        # encloses everything: residues at infinity cancel (E_1 = 0)
        assert abs(K2.loop_integral(0.0, 50.0)) < 1e-9

    def test_limit_monodromy_series_vs_quadrature(self):
        d = DevelopingMap.merged_limit(0.5, 0.55)
        series = d.additive_monodromy_series(0.5)
        quad = d.loop_integral(0.5, 0.45, tol=1e-12)
        assert series == pytest.approx(quad, rel=1e-9)
        # opposite singular point gives the inverse translation
        assert d.additive_monodromy_series(-0.5) == pytest.approx(-series, rel=1e-12)
        # and it is close to the glued-edge deck translation 2i
        assert abs(series.real) < 1e-12
        assert series.imag == pytest.approx(2.0, rel=0.2)
