"""Exact reduced dynamics in the single-excitation subspace.

The excited amplitude obeys c1'(t) = -int_0^t f(t - s) c1(s) ds. It is solved
in closed form for the impulse density, by product integration in time, and
by numerical inversion of c1(0) / (s + f^(s)).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import comb

from .model import DensityKind, KindMismatch, ModelError, kernel_f, kernel_laplace

BREAKDOWN_THRESHOLD = 1e-8


class StepTooLargeError(ArithmeticError):
    """Halving the Volterra step moved the endpoint by more than the tolerance."""


@dataclass
class AmplitudeSeries:
    t: np.ndarray
    c1: np.ndarray
    c1_dot: np.ndarray
    converged: Optional[np.ndarray] = None
    error_estimate: float = 0.0


@dataclass
class RatePair:
    """Lamb shift S and decay rate gamma, scalars or series."""

    S: np.ndarray
    gamma: np.ndarray
    breakdown: Optional[np.ndarray] = None


@dataclass
class QubitState:
    """Reduced state through rho11 and rho01; rho00 = 1 - rho11."""

    rho11: np.ndarray
    rho01: np.ndarray

    def matrix(self):
        r11 = np.asarray(self.rho11)
        r01 = np.asarray(self.rho01)
        return np.array([[1 - r11, r01], [np.conj(r01), r11]])


@dataclass
class Trajectory:
    t: np.ndarray
    rho11: np.ndarray
    rho01: np.ndarray
    gamma: Optional[np.ndarray] = None
    S: Optional[np.ndarray] = None
    c1: Optional[np.ndarray] = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def state(self):
        return QubitState(self.rho11, self.rho01)


def reduced_state(c0, c1):
    """rho11 = |c1|^2 and rho01 = c0 conj(c1)."""
    c1 = np.asarray(c1, dtype=complex)
    if np.any(abs(c0) ** 2 + np.abs(c1) ** 2 > 1 + 1e-12):
        raise ModelError("amplitudes violate the normalization bound")
    return QubitState(np.abs(c1) ** 2, c0 * np.conj(c1))


def solve_exact_j1(params, t_grid):
    """Closed-form amplitude for the single-mode (impulse) bath."""
    if params.kind is not DensityKind.IMPULSE:
        raise KindMismatch("closed form exists only for the impulse density")
    t = np.asarray(t_grid, dtype=float)
    g2 = params.density.coupling
    dl = params.detuning
    delta = np.sqrt(dl**2 + 4 * g2)
    ph = np.exp(0.5j * dl * t)
    c1 = params.c1_0 * ph * (np.cos(delta * t / 2) - 1j * dl / delta * np.sin(delta * t / 2))
    c1_dot = -params.c1_0 * ph * (2 * g2 / delta) * np.sin(delta * t / 2)
    return AmplitudeSeries(t, c1, c1_dot)


def _product_weights(params, n, h, nodes=8):
    """Moments of the kernel against the two linear hat pieces on each cell.

    P[m] = h int_0^1 f((m + u) h) u du, Q[m] = h int_0^1 f((m + u) h)(1 - u) du.
    """
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    u = (xg + 1) / 2
    w = wg / 2
    m = np.arange(n)[:, None]
    fu = kernel_f(params, (m + u) * h)
    P = (fu * u * w).sum(axis=1) * h
    Q = (fu * (1 - u) * w).sum(axis=1) * h
    return P, Q


def volterra_raw(params, n_steps, h):
    """Second-order product-trapezoid solution on t_k = k h, k = 0..n_steps.

    The amplitude is piecewise linear inside the convolution, the kernel is
    integrated exactly (Gauss-Legendre) on each cell, and the derivative is
    advanced with the trapezoid rule. Returns (t, c1, c1_dot).
    """
    P, Q = _product_weights(params, n_steps, h)
    c = np.zeros(n_steps + 1, dtype=complex)
    cd = np.zeros(n_steps + 1, dtype=complex)
    c[0] = params.c1_0
    Pr = P[::-1].copy()
    Qr = Q[::-1].copy()
    q0 = Q[0]
    denom = 1 + 0.5 * h * q0
    for n in range(n_steps):
        # history part of the convolution at t_{n+1}; c_{n+1} Q[0] is implicit
        r = np.dot(c[: n + 1], Pr[n_steps - n - 1 :]) + np.dot(c[1 : n + 1], Qr[n_steps - n - 1 : n_steps - 1])
        c[n + 1] = (c[n] + 0.5 * h * cd[n] - 0.5 * h * r) / denom
        cd[n + 1] = -(r + q0 * c[n + 1])
    return np.arange(n_steps + 1) * h, c, cd


def solve_volterra(params, t_grid, step=1e-3, tol=1e-6, extrapolate=True):
    """Amplitude from the integro-differential equation on a uniform grid.

    The equation is integrated at `step` and `step/2`. If the endpoints differ
    by more than `tol` a StepTooLargeError is raised. With `extrapolate` the
    two runs are combined by Richardson extrapolation, otherwise the raw
    half-step solution is returned. Values at `t_grid` are taken from the
    internal grid directly or by Hermite interpolation with the exact
    derivative.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ModelError("t_grid must be non-negative")
    t_end = float(t_grid.max())
    n = max(2, int(np.ceil(t_end / step - 1e-9)))
    h = t_end / n if t_end > 0 else step
    _, c_h, cd_h = volterra_raw(params, n, h)
    t2, c_2, cd_2 = volterra_raw(params, 2 * n, h / 2)
    err = abs(c_2[-1] - c_h[-1])
    if err > tol:
        raise StepTooLargeError(f"endpoint moved by {err:.3e} on halving the step {h:.3e}")
    if extrapolate:
        c = (4 * c_2[::2] - c_h) / 3
        cd = (4 * cd_2[::2] - cd_h) / 3
        tt = t2[::2]
    else:
        c, cd, tt = c_2, cd_2, t2
    return AmplitudeSeries(t_grid, *_resample(tt, c, cd, t_grid), error_estimate=err / 3)


def _resample(tt, c, cd, t_grid):
    hh = tt[1] - tt[0]
    idx = np.rint(t_grid / hh)
    if np.allclose(idx * hh, t_grid, rtol=0, atol=1e-12 * max(1.0, tt[-1])):
        k = idx.astype(int)
        return c[k], cd[k]
    spl = CubicHermiteSpline(tt, c, cd)
    dspl = spl.derivative()
    return spl(t_grid), dspl(t_grid)


def _laplace_amplitude(params, s):
    fh = kernel_laplace(params, s)
    den = s + fh
    return params.c1_0 / den, -params.c1_0 * fh / den


def _ilt_fixed(params, t_grid, abscissa, n_terms, n_euler):
    t = t_grid[:, None]
    k = np.arange(n_terms + n_euler + 1)[None, :]
    a = abscissa / (2 * t)
    cp, dp = _laplace_amplitude(params, a + 1j * np.pi * k / t)
    cm, dm = _laplace_amplitude(params, a - 1j * np.pi * k / t)
    sign = (-1.0) ** k
    pref = np.exp(abscissa / 2) / (2 * t_grid)
    w = comb(n_euler, np.arange(n_euler + 1)) / 2.0**n_euler
    w1 = comb(n_euler - 1, np.arange(n_euler)) / 2.0 ** (n_euler - 1)

    def accelerate(vp, vm):
        terms = vp + vm
        terms[:, 0] = vp[:, 0]
        ps = np.cumsum(terms * sign, axis=1)
        est = (ps[:, n_terms : n_terms + n_euler + 1] * w).sum(axis=1)
        est1 = (ps[:, n_terms : n_terms + n_euler] * w1).sum(axis=1)
        return pref * est, pref * np.abs(est - est1)

    c1, err = accelerate(cp, cm)
    cd, _ = accelerate(dp, dm)
    return c1, cd, err


def solve_ilt(params, t_grid, abscissa=18.4, n_terms=15, n_euler=15, tol=1e-7, max_doublings=3):
    """Numerical Bromwich inversion of c1(0)/(s + f^(s)) and of s c1^ - c1(0).

    For each time t the Bromwich line Re s = A/(2t) is discretized with a
    Fourier series of period 2t. Positive and negative frequencies are paired
    because the transform is not real-symmetric. The alternating tail is
    accelerated by binomial (Euler) averaging of `n_euler + 1` partial sums
    beyond the first `n_terms`. Discretization error scales like exp(-A).
    A point counts as converged when the Euler estimates with n_euler and
    n_euler - 1 averaging levels differ by at most `tol`. Points that miss
    this are retried with doubled term counts up to `max_doublings` times;
    the remaining failures are reported in `converged`.
    """
    if params.kind is DensityKind.IMPULSE:
        raise KindMismatch("use solve_exact_j1 for the impulse density")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0):
        raise ModelError("solve_ilt needs t > 0")
    c1, cd, err = _ilt_fixed(params, t_grid, abscissa, n_terms, n_euler)
    for _ in range(max_doublings):
        bad = err > tol
        if not bad.any():
            break
        n_terms, n_euler = 2 * n_terms, 2 * n_euler
        c1[bad], cd[bad], err[bad] = _ilt_fixed(params, t_grid[bad], abscissa, n_terms, n_euler)
    return AmplitudeSeries(t_grid, c1, cd, converged=err <= tol, error_estimate=float(err.max()))


def solve_exact(params, t_grid, step=None, tol=None):
    """Exact amplitude: closed form for the impulse density, Volterra otherwise.

    Short horizons (t <= 25/omega_c) default to step 1e-3 with a 1e-6 halving
    tolerance. Longer horizons use step 1e-2 with a 1e-4 tolerance on the raw
    halving difference; the returned extrapolated values are far more
    accurate than that difference.
    """
    if params.kind is DensityKind.IMPULSE:
        return solve_exact_j1(params, t_grid)
    long_run = float(np.max(t_grid)) * params.density.omega_c > 25
    if step is None:
        step = (1e-2 if long_run else 1e-3) / params.density.omega_c
    if tol is None:
        tol = 1e-4 if long_run else 1e-6
    return solve_volterra(params, t_grid, step=step, tol=tol)


def rates_from_amplitude(series, threshold=BREAKDOWN_THRESHOLD):
    """S = -2 Im(c1'/c1) and gamma = -2 Re(c1'/c1).

    Points with |c1| below `threshold` are flagged as breakdowns and carry NaN.
    """
    c1 = np.asarray(series.c1)
    bad = np.abs(c1) < threshold
    ratio = np.where(bad, np.nan, series.c1_dot / np.where(bad, 1.0, c1))
    return RatePair(-2 * ratio.imag, -2 * ratio.real, breakdown=bad)


def exact_trajectory(params, t_grid, step=None, tol=None):
    series = solve_exact(params, t_grid, step=step, tol=tol)
    st = reduced_state(params.c0, series.c1)
    rates = rates_from_amplitude(series)
    return Trajectory(series.t, st.rho11, st.rho01, rates.gamma, rates.S, series.c1, label="exact")
