import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from dampedjc.exact import (StepTooLargeError, rates_from_amplitude, reduced_state, solve_exact_j1,
                            solve_ilt, solve_volterra, volterra_raw)
from dampedjc.model import KindMismatch, ModelError

from conftest import make


class TestImpulseClosedForm:
    def test_resonance(self):
        p = make("impulse", 0.64, 1.0)
        t = np.linspace(0, 30, 301)
        s = solve_exact_j1(p, t)
        assert np.allclose(s.c1, p.c1_0 * np.cos(0.8 * t), atol=1e-14)

    def test_minimum_population(self):
        p = make("impulse", 1.0, 0.5)
        delta = np.sqrt(0.25 + 4)
        t = np.linspace(0, 4 * np.pi / delta, 20001)
        pop = np.abs(solve_exact_j1(p, t).c1) ** 2 / abs(p.c1_0) ** 2
        assert abs(pop.min() - 0.25 / delta**2) < 1e-8

    def test_initial_and_kind(self):
        p = make("impulse", 1.0, 2.0)
        assert solve_exact_j1(p, [0.0]).c1[0] == p.c1_0
        with pytest.raises(KindMismatch):
            solve_exact_j1(make("ohmic", 1.0, 1.0), [0.0])


class TestVolterra:
    @pytest.mark.parametrize("omega_0", [0.5, 2.0])
    def test_matches_closed_form(self, omega_0):
        p = make("impulse", 1.0, omega_0)
        t = np.linspace(0, 20, 2001)
        v = solve_volterra(p, t, step=1e-3)
        e = solve_exact_j1(p, t)
        assert np.abs(v.c1 - e.c1).max() <= 1e-8
        assert np.abs(v.c1_dot - e.c1_dot).max() <= 1e-8

    def test_derivative_vanishes_at_zero(self):
        v = solve_volterra(make("ohmic", 1.0, 1.0), [0.0, 1.0])
        assert v.c1_dot[0] == 0 and v.c1[0] == v.c1[0]

    def test_second_order(self):
        p = make("ohmic", 1.0, 1.0)
        ends = [volterra_raw(p, n, 5.0 / n)[1][-1] for n in (250, 500, 1000)]
        ratio = abs(ends[0] - ends[1]) / abs(ends[1] - ends[2])
        assert 3.6 < ratio < 4.4

    def test_step_too_large(self):
        with pytest.raises(StepTooLargeError):
            solve_volterra(make("ohmic", 1.0, 1.0), np.linspace(0, 10, 11), step=0.5, tol=1e-6)

    def test_ohmic_resonance_oscillates(self):
        t = np.linspace(0, 20, 2001)
        pop = np.abs(solve_volterra(make("ohmic", 1.0, 1.0), t).c1) ** 2
        d = np.diff(pop)
        assert np.any(d > 0) and np.any(d < 0)

    @pytest.mark.parametrize("kind,omega_0", [("ohmic", 0.5), ("ohmic", 4.0), ("triangular", 0.5), ("triangular", 1.8)])
    def test_amplitude_bounded(self, kind, omega_0):
        p = make(kind, 1.0, omega_0)
        c = solve_volterra(p, np.linspace(0, 20, 401)).c1
        assert np.all(np.abs(c) <= abs(p.c1_0) + 1e-9)


class TestILT:
    def test_requires_positive_times(self):
        with pytest.raises(ModelError):
            solve_ilt(make("ohmic", 1.0, 1.0), [0.0, 1.0])
        with pytest.raises(KindMismatch):
            solve_ilt(make("impulse", 1.0, 1.0), [1.0])

    def test_small_time_limit(self):
        p = make("triangular", 1.0, 0.5)
        s = solve_ilt(p, [1e-4])
        assert abs(s.c1[0] - p.c1_0) < 1e-6

    def test_derivative_matches_volterra(self):
        p = make("ohmic", 1.0, 1.0)
        t = np.linspace(0.5, 10, 20)
        assert np.abs(solve_ilt(p, t).c1_dot - solve_volterra(p, t).c1_dot).max() < 1e-6

    def test_triangular_plateau(self):
        p = make("triangular", 1.0, 1.8)
        t = np.linspace(60, 100, 41)
        s = solve_ilt(p, t)
        pop = np.abs(s.c1) ** 2
        assert s.converged.all()
        assert pop.min() > 0.3 and pop.max() - pop.min() < 0.005


class TestRates:
    def test_origin(self):
        r = rates_from_amplitude(solve_volterra(make("ohmic", 1.0, 1.0), [0.0, 0.5]))
        assert r.S[0] == 0 and r.gamma[0] == 0

    @pytest.mark.parametrize("omega_0", [0.5, 1.0, 2.0])
    def test_impulse_cotangent_forms(self, omega_0):
        p = make("impulse", 1.0, omega_0)
        dl = omega_0 - 1.0
        delta = np.sqrt(dl**2 + 4)
        t = np.linspace(0.05, 12, 400)
        r = rates_from_amplitude(solve_exact_j1(p, t))
        cot = 1 / np.tan(t * delta / 2)
        pref = delta * (1 - dl**2 / delta**2)
        S_ref = pref * (dl / delta) / (cot**2 + dl**2 / delta**2)
        g_ref = pref * cot / (cot**2 + dl**2 / delta**2)
        ok = ~r.breakdown
        assert np.allclose(r.S[ok], S_ref[ok], rtol=0, atol=1e-9 * np.abs(S_ref).max() + 1e-12)
        assert np.allclose(r.gamma[ok], g_ref[ok], rtol=1e-9, atol=1e-9)

    def test_sign_changes_every_half_period(self):
        p = make("impulse", 1.0, 1.0)
        t = np.linspace(0.01, 4 * np.pi, 4000)
        g = rates_from_amplitude(solve_exact_j1(p, t)).gamma
        ok = ~np.isnan(g)
        flips = np.sum(np.diff(np.sign(g[ok])) != 0)
        assert flips == 7

    def test_breakdown_flag(self):
        p = make("impulse", 1.0, 1.0)
        r = rates_from_amplitude(solve_exact_j1(p, [0.1, np.pi / 2]))
        assert list(r.breakdown) == [False, True] and np.isnan(r.gamma[1])

    def test_exponent_consistency(self):
        p = make("ohmic", 1.0, 1.0)
        t = np.linspace(0, 20, 8001)
        s = solve_volterra(p, t)
        g = rates_from_amplitude(s).gamma
        rho11 = abs(p.c1_0) ** 2 * np.exp(-cumulative_trapezoid(g, t, initial=0))
        assert np.abs(rho11 - np.abs(s.c1) ** 2).max() < 1e-6


class TestReducedState:
    def test_examples(self):
        st = reduced_state(0.0, 0.0)
        assert st.rho11 == 0 and st.rho01 == 0
        r = 1 / np.sqrt(2)
        st = reduced_state(r, r)
        assert abs(st.rho11 - 0.5) < 1e-15 and abs(st.rho01 - 0.5) < 1e-15

    def test_positivity_and_trace(self, rng):
        for _ in range(200):
            c = rng.normal(size=4)
            c = (c[:2] + 1j * c[2:]) / np.linalg.norm(c) * rng.uniform(0, 1)
            m = reduced_state(c[0], c[1]).matrix()
            assert abs(np.trace(m) - 1) < 1e-15
            assert np.linalg.eigvalsh(m).min() > -1e-12

    def test_norm_violation(self):
        with pytest.raises(ModelError):
            reduced_state(0.9, 0.9)
