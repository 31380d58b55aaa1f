import math

import numpy as np
import pytest

from liyau import (exact_kernel, gaussian_kernel_state, harnack_quantities,
                   initial_datum, make_model_manifold, solve_heat)
from liyau.heatflow import (_circle_kernel_spectral, _circle_kernel_wrapped,
                            _interval_kernel_images, _interval_kernel_spectral,
                            radial_eigenpair)
from liyau.numerics import SolverError


class TestKernels:
    def test_line_normalisation(self, line):
        t = 1.0 / (4.0 * math.pi)
        assert exact_kernel(line, t, 0.3, 0.3) == pytest.approx(1.0, abs=1e-14)

    def test_half_line_doubling_at_wall(self, half_line):
        t = 0.25
        ref = 2.0 * (4 * math.pi * t) ** -0.5
        assert exact_kernel(half_line, t, 0.0, 0.0) == pytest.approx(ref,
                                                                     abs=1e-14)

    def test_circle_dual_representations(self):
        for t in (0.01, 0.05, 0.4, 1.0, 5.0):
            for d in (0.0, 0.7, 3.1):
                w = _circle_kernel_wrapped(d, t)
                s = _circle_kernel_spectral(d, t)
                assert abs(w - s) < 1e-12

    def test_interval_dual_representations(self):
        L = math.pi
        for t in (0.02, 0.3, 1.5):
            for x, y in ((0.3, 1.1), (0.0, 0.0), (3.0, 0.2)):
                a = _interval_kernel_images(x, y, t, L)
                b = _interval_kernel_spectral(x, y, t, L)
                assert abs(a - b) < 1e-11

    def test_kernel_mass_is_one(self, half_line, interval, line):
        from scipy.integrate import quad
        for M, lo, hi in ((line, -12, 12), (half_line, 0, 14),
                          (interval, 0, math.pi)):
            val, _ = quad(lambda y: exact_kernel(M, 0.7, 0.9, y), lo, hi,
                          epsabs=1e-12, limit=200)
            assert val == pytest.approx(1.0, abs=1e-9)

    def test_kernel_symmetry(self, interval):
        assert exact_kernel(interval, 0.4, 0.5, 1.3) == pytest.approx(
            exact_kernel(interval, 0.4, 1.3, 0.5), rel=1e-13)

    def test_radial_kernel_centered_only(self):
        M = make_model_manifold("euclidean-radial", m=2)
        val = exact_kernel(M, 0.5, 1.0, 0.0)
        assert val == pytest.approx((4 * math.pi * 0.5) ** -1.0
                                    * math.exp(-1.0 / 2.0), rel=1e-13)
        with pytest.raises(ValueError):
            exact_kernel(M, 0.5, 1.0, 0.3)

    def test_no_kernel_on_sphere(self, sphere2):
        with pytest.raises(ValueError):
            exact_kernel(sphere2, 0.5, 1.0, 1.0)

    def test_kernel_time_positive(self, line):
        with pytest.raises(ValueError):
            exact_kernel(line, 0.0, 0.0, 0.0)


class TestGaussianSaturation:
    def test_line_identity(self, line):
        rng = np.random.default_rng(0)
        for _ in range(20):
            t = rng.uniform(0.05, 2.0)
            grid = rng.uniform(-3, 3, size=7)
            st = gaussian_kernel_state(line, t, grid)
            assert np.max(np.abs(st.X() - st.Y() - 1.0 / (2 * t))) < 1e-9

    def test_kernel_state_matches_finite_difference(self, line):
        st = gaussian_kernel_state(line, 0.7, np.array([0.4]))
        h = 1e-6
        u = lambda x: exact_kernel(line, 0.7, x, 0.0)
        fd = (u(0.4 + h) - u(0.4 - h)) / (2 * h)
        assert fd == pytest.approx(float(st.grad_u[0]), rel=1e-8)


class TestSolvers:
    def test_circle_eigen_decay(self, circle):
        datum = initial_datum("eigen", {"index": 1, "amp": 0.5})
        st = solve_heat(circle, datum, 1.0)
        exact = 1 + 0.5 * math.exp(-1.0) * np.cos(st.grid)
        assert np.max(np.abs(st.u - exact)) < 1e-10

    def test_interval_eigen_decay(self, interval):
        datum = initial_datum("cosine", {"k": 1, "amp": 1.0})
        for t in (0.3, 1.0):
            st = solve_heat(interval, datum, t)
            exact = 1 + math.exp(-t) * np.cos(st.grid)
            assert np.max(np.abs(st.u - exact)) < 1e-10

    def test_constants_are_invariant(self, circle, interval, sphere2,
                                     hyperbolic2):
        datum = initial_datum("constant", {"c": 2.5})
        for M in (circle, interval, sphere2, hyperbolic2):
            st = solve_heat(M, datum, 0.8)
            assert np.max(np.abs(st.u - 2.5)) < 1e-11
            assert np.max(np.abs(st.grad_u)) < 1e-9
            assert np.max(np.abs(st.Lu)) < 1e-8

    def test_discrete_eigen_decay_on_sphere(self, sphere2):
        lam, vec = radial_eigenpair(sphere2, 401, 1)
        datum = initial_datum("eigen", {"index": 1, "amp": 0.5})
        st = solve_heat(sphere2, datum, 0.7)
        exact = 1 + 0.5 * math.exp(-lam * 0.7) * vec
        assert np.max(np.abs(st.u - exact)) < 1e-10

    def test_sphere_first_eigenvalue(self, sphere2):
        lam, _ = radial_eigenpair(sphere2, 401, 1)
        assert lam == pytest.approx(2.0, abs=2e-5)

    def test_semigroup_property(self, circle, sphere2):
        datum = initial_datum("eigen", {"index": 1, "amp": 0.5})
        for M in (circle, sphere2):
            a = solve_heat(M, datum, 0.9)
            b = solve_heat(M, datum, 0.4)
            # evolve b.u for 0.5 more by hand through the same basis
            if M is circle:
                freq = np.fft.rfftfreq(b.u.size, d=1.0 / b.u.size)
                u2 = np.fft.irfft(np.fft.rfft(b.u) * np.exp(-freq**2 * 0.5),
                                  n=b.u.size)
            else:
                from liyau.heatflow import _radial_operator
                u2 = _radial_operator(M, b.u.size).evolve(b.u, 0.5)
            assert np.max(np.abs(u2 - a.u)) < 1e-8

    def test_self_convergence_order(self, sphere2):
        # nested grids share nodes, so the comparison point is common to
        # every resolution; consecutive-difference Richardson orders are
        # measured above the O(pole_cut^2) modeling floor of the scheme
        datum = initial_datum("cosine", {"k": 3, "amp": 0.3})
        t = 0.2
        coarse = solve_heat(sphere2, datum, t, grid_size=51)
        x_eval = float(coarse.grid[coarse.index_of(1.3)])
        vals = {}
        for size in (51, 101, 201, 401):
            st = solve_heat(sphere2, datum, t, grid_size=size)
            assert abs(st.grid[st.index_of(x_eval)] - x_eval) < 1e-12
            vals[size] = harnack_quantities(st, x_eval)[:2]
        for a, b, c in ((51, 101, 201), (101, 201, 401)):
            orderX = math.log2(abs(vals[a][0] - vals[b][0])
                               / abs(vals[b][0] - vals[c][0]))
            orderY = math.log2(abs(vals[a][1] - vals[b][1])
                               / abs(vals[b][1] - vals[c][1]))
            assert orderX > 1.8
            assert orderY > 1.8

    def test_crank_nicolson_tracks_spectral(self, interval, sphere2, circle):
        cases = ((interval, initial_datum("cosine", {"k": 1, "amp": 0.5})),
                 (circle, initial_datum("cosine", {"k": 1, "amp": 0.5})),
                 (sphere2, initial_datum("legendre", {"index": 1,
                                                      "amp": 0.4})))
        for M, datum in cases:
            sp = solve_heat(M, datum, 0.5)
            cn = solve_heat(M, datum, 0.5, scheme="crank-nicolson-fd")
            assert np.max(np.abs(sp.u - cn.u)) < 5e-4, M.family

    def test_half_line_kernel_scheme_closed_form(self, half_line):
        datum = initial_datum("gaussian", {"amp": 1.0, "width": 0.3})
        st = solve_heat(half_line, datum, 0.5, scheme="kernel")
        stt = 0.3 + 0.5
        exact = 1 + math.sqrt(0.3 / stt) * np.exp(-st.grid**2 / (4 * stt))
        assert np.max(np.abs(st.u - exact)) < 1e-12

    def test_positivity_and_max_principle_enforced(self, circle):
        datum = initial_datum("eigen", {"index": 2, "amp": 0.25})
        st = solve_heat(circle, datum, 0.05)
        assert st.u.min() > 0
        assert st.u.max() <= 1.25 + 1e-9

    def test_neumann_incompatible_rejected(self, interval):
        bad = initial_datum("gaussian", {"amp": 1.0, "width": 0.3})
        with pytest.raises(ValueError):
            solve_heat(interval, bad, 0.1)

    def test_nonpositive_datum_rejected(self, circle):
        with pytest.raises(ValueError):
            solve_heat(circle, initial_datum("cosine", {"k": 1, "amp": 1.5}),
                       0.1)

    def test_mass_conservation_reported(self, sphere2):
        datum = initial_datum("legendre", {"index": 1, "amp": 0.5})
        st0 = solve_heat(sphere2, datum, 0.0)
        st1 = solve_heat(sphere2, datum, 1.5)
        assert st1.mass() == pytest.approx(st0.mass(), rel=1e-9)


class TestHarnackQuantities:
    def test_constant_state_is_zero(self, circle):
        st = solve_heat(circle, initial_datum("constant", {"c": 3.0}), 0.4)
        X, Y, W = harnack_quantities(st, 1.0)
        assert (X, W) == (0.0, 0.0)
        assert abs(Y) < 1e-12

    def test_circle_mode_values(self, circle):
        # u = 1 + (1/2) e^{-1} cos theta: at theta = pi/2 the gradient is
        # (1/2) e^{-1} and Lu vanishes; at theta = 0 the ratio Y is extremal
        st = solve_heat(circle, initial_datum("eigen", {"index": 1,
                                                        "amp": 0.5}), 1.0)
        amp = 0.5 * math.exp(-1.0)
        X, Y, W = harnack_quantities(st, math.pi / 2)
        assert X == pytest.approx(amp**2, abs=1e-10)
        assert abs(Y) < 1e-10
        assert W == pytest.approx(amp**2, abs=1e-10)
        X0, Y0, _ = harnack_quantities(st, 0.0)
        assert X0 == pytest.approx(0.0, abs=1e-12)
        assert Y0 == pytest.approx(-amp / (1 + amp), abs=1e-10)

    def test_positivity_floor_guard(self, line):
        st = gaussian_kernel_state(line, 0.05, np.array([0.0, 12.0]))
        with pytest.raises(SolverError):
            harnack_quantities(st, 12.0)

    def test_csv_export(self, circle, tmp_path):
        st = solve_heat(circle, initial_datum("eigen", {"index": 1,
                                                        "amp": 0.5}), 0.3)
        path = tmp_path / "state.csv"
        st.to_csv(path)
        body = path.read_text().splitlines()
        assert "family=circle" in body[0]
        assert body[1].endswith("coord,u,grad_u,Lu")
        assert len(body) == 2 + st.grid.size
