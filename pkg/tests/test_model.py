import numpy as np
import pytest
from scipy.integrate import quad

from dampedjc.model import (Atom, ModelError, ModelParams, SpectralDensity, bath_correlation,
                            kernel_f, kernel_laplace, spectral_j)

from conftest import make


def laplace_quad(p, s, T=None):
    """Truncated Laplace integral of the kernel, tail below 1e-13."""
    T = T or 35.0 / s.real
    re = quad(lambda t: (np.exp(-s * t) * kernel_f(p, t)).real, 0, T, limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    im = quad(lambda t: (np.exp(-s * t) * kernel_f(p, t)).imag, 0, T, limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    return re + 1j * im


class TestSpectral:
    def test_examples(self):
        assert spectral_j(SpectralDensity.triangular(1.0, 2.0), 4.0) == 0
        assert spectral_j(SpectralDensity.ohmic(1.0, 3.0), 3.0) == pytest.approx(3 * np.exp(-1), rel=1e-15)
        assert spectral_j(SpectralDensity.triangular(1.0, 2.0), 1.0) == 1.0

    def test_impulse_is_an_atom(self):
        v = spectral_j(SpectralDensity.impulse(0.7, 1.5), 1.5)
        assert isinstance(v, Atom) and v == (0.7, 1.5)

    def test_negative_frequency(self):
        with pytest.raises(ModelError):
            spectral_j(SpectralDensity.ohmic(1.0), -0.1)

    @pytest.mark.parametrize("args", [("ohmic", 0.0, 1.0), ("ohmic", 1.0, -1.0), ("bogus", 1.0, 1.0)])
    def test_invalid_density(self, args):
        with pytest.raises(ValueError):
            SpectralDensity(*args)

    def test_params_norm(self):
        with pytest.raises(ModelError):
            ModelParams(1.0, SpectralDensity.ohmic(1.0), c0=0.8, c1_0=0.8)
        with pytest.raises(ModelError):
            ModelParams(0.0, SpectralDensity.ohmic(1.0))


class TestKernel:
    def test_impulse_modulus(self):
        p = make("impulse", 0.7, 0.4)
        assert np.allclose(np.abs(kernel_f(p, np.linspace(-5, 40, 50))), 0.7, rtol=1e-15)

    def test_ohmic_origin(self):
        assert kernel_f(make("ohmic", 0.8, 1.3, 2.0), 0.0) == pytest.approx(0.8 * 4)

    def test_triangular_origin_and_taylor_seam(self):
        p = make("triangular", 1.3, 0.5, 2.0)
        assert kernel_f(p, 0.0) == pytest.approx(1.3 * 4 / 2, rel=1e-15)
        # values straddling the Taylor switch at |omega_c t| = 1e-3
        t = np.array([0.4999e-3, 0.5001e-3]) 
        a = kernel_f(p, t)
        x = 2.0 * t
        direct = 1.3 * 4 * np.exp(1j * (0.5 - 2.0) * t) * (1 - np.exp(1j * x) + 1j * x) / x**2
        assert np.allclose(a, direct, rtol=1e-9)
        assert abs(a[1] - a[0]) < 1e-6

    def test_triangular_matches_frequency_integral(self):
        p = make("triangular", 1.0, 0.7)
        for t in (0.3, 2.0, -4.0):
            re = quad(lambda w: w * np.cos((0.7 - w) * t), 0, 1)[0]
            im = quad(lambda w: w * np.sin((0.7 - w) * t), 0, 1)[0]
            assert abs(kernel_f(p, t) - (re + 1j * im)) < 1e-13


class TestLaplace:
    def test_impulse_resonance(self):
        assert kernel_laplace(make("impulse", 0.6, 1.0), 1.0) == pytest.approx(0.6)

    def test_ohmic_initial_value(self):
        p = make("ohmic", 0.9, 1.0, 1.5)
        s = np.array([1e3, 1e5, 1e7])
        sf = s * kernel_laplace(p, s)
        assert np.allclose(sf, 0.9 * 1.5**2, rtol=1e-2)
        assert abs(sf[-1] - 0.9 * 1.5**2) < abs(sf[0] - 0.9 * 1.5**2)

    def test_triangular_example(self):
        p = make("triangular", 1.0, 0.5)
        s = 1 + 1j
        assert abs(kernel_laplace(p, s) - laplace_quad(p, s)) < 1e-9

    @pytest.mark.parametrize("kind", ["impulse", "ohmic", "triangular"])
    def test_random_points(self, kind, rng):
        wc = 1.7
        p = make(kind, 0.8, 0.9 * wc, wc)
        for _ in range(10):
            s = wc * (rng.uniform(0.2, 5.0) + 1j * rng.uniform(-5, 5))
            ref = laplace_quad(p, s)
            assert abs(kernel_laplace(p, s) - ref) <= 1e-6 * abs(ref)

    def test_domain(self):
        with pytest.raises(ModelError):
            kernel_laplace(make("ohmic", 1.0, 1.0), 0.0 + 1j)


class TestCorrelation:
    @pytest.mark.parametrize("kind", ["impulse", "ohmic", "triangular"])
    def test_shift_relation(self, kind):
        p = make(kind, 1.0, 0.6)
        tau = np.linspace(-10, 10, 101)
        assert np.allclose(bath_correlation(p, tau), kernel_f(p, tau) * np.exp(-0.6j * tau), rtol=0, atol=1e-12)

    def test_ohmic_values(self):
        p = make("ohmic", 1.0, 0.3, 2.0)
        assert bath_correlation(p, 0.0) == pytest.approx(4.0)
        assert abs(bath_correlation(p, 0.5) - (-0.5j * 4)) < 1e-14

    def test_triangular_origin(self):
        p = make("triangular", 1.0, 0.3, 2.0)
        assert abs(bath_correlation(p, 1e-9) - 2.0) < 1e-8

    def test_ohmic_modulus_nonincreasing(self):
        p = make("ohmic", 1.0, 1.0)
        tau = np.linspace(0, 30, 500)
        m = np.abs(bath_correlation(p, tau))
        assert np.all(np.diff(m) <= 0)
        assert np.allclose(m, 1 / (1 + tau**2), rtol=1e-14)
