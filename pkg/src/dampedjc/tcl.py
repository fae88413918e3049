"""Time-convolutionless master equations to second and fourth order.

Everything is expressed through the kernel primitive F(u) = int_0^u f(v) dv:
  gamma_2 + i S_2 = 2 F(t)
  Z(t, t1) = int_0^t1 f(t - x) dx = F(t) - F(t - t1)
  gamma_4 + i S_4 = 2 int_0^t dt1 int_0^t1 dt2 [f(t - t2) Z(t1, t2) + f(t1 - t2) Z(t, t2)]
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.signal import fftconvolve

from .exact import RatePair, Trajectory, reduced_state
from .markov import SINGULAR_GAP, SingularParameterError
from .model import DensityKind, KindMismatch, ModelError, kernel_f
from .specfun import cin, expint_ei_complex, expint_ei_real, sinc, sine_integral


class QuadratureError(ArithmeticError):
    """Double quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class TclOrder:
    order: int

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError("TCL order must be 2 or 4")


def _reject_singular(params):
    d = params.density
    if d.kind is DensityKind.TRIANGULAR and abs(params.omega_0 - d.omega_c) < SINGULAR_GAP * d.omega_c:
        raise SingularParameterError("TCL rates are rejected at Omega_0 = omega_c for the triangular density")


def kernel_primitive(params, u):
    """F(u) = int_0^u f(v) dv in closed form, for any real u."""
    u = np.asarray(u, dtype=float)
    d = params.density
    wc = d.omega_c
    eta = d.coupling
    if d.kind is DensityKind.IMPULSE:
        dl = params.detuning
        out = eta * u * np.exp(0.5j * dl * u) * sinc(dl * u / 2)
    elif d.kind is DensityKind.OHMIC:
        W = params.omega_0 / wc
        x = wc * u
        ei0 = float(expint_ei_real(W))
        ei = expint_ei_complex(W * (1 + 1j * x))
        out = eta * wc * (1j * np.exp(1j * W * x) / (1 + 1j * x) - 1j - 1j * W * np.exp(-W) * (ei - ei0))
    else:
        W = params.omega_0 / wc
        x = wc * u
        inner = (
            W * (cin((W - 1) * x) - cin(W * x))
            + 1j * W * (sine_integral(W * x) - sine_integral((W - 1) * x))
            - np.exp(1j * (W - 0.5) * x) * sinc(x / 2)
            + 1
        )
        out = -1j * eta * wc * inner
    return out[()] if np.ndim(out) == 0 else out


def z_kernel(params, t, t1):
    """Z(t, t1) = int_0^t1 f(t - x) dx; zero when t1 = 0."""
    return kernel_primitive(params, t) - kernel_primitive(params, np.asarray(t) - np.asarray(t1))


def tcl2_rates(params, t):
    """Second-order Lamb shift and decay rate."""
    _reject_singular(params)
    v = 2 * np.asarray(kernel_primitive(params, t))
    return RatePair(v.imag, v.real)


def _tcl4_j1(params, t):
    t = np.asarray(t, dtype=float)
    g4 = params.density.coupling**2
    dl = params.detuning
    x = dl * t
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    d3 = np.where(small, 1.0, dl) ** 3
    gam = 2 * g4 * (2 * xs * np.cos(xs) - np.sin(2 * xs)) / d3
    lam = 4 * g4 * (-np.sin(xs) ** 2 + xs * np.sin(xs)) / d3
    x2 = x * x
    gam_s = 2 * g4 * t**3 * (1 / 3 - 11 * x2 / 60 + 19 * x2**2 / 840)
    lam_s = 4 * g4 * t**3 * x * (1 / 6 - 13 * x2 / 360 + x2**2 / 336)
    return RatePair(np.where(small, lam_s, lam), np.where(small, gam_s, gam))


def _triangle_trapezoid(params, t, n):
    """Composite trapezoid of the fourth-order integrand on the triangle
    0 <= t2 <= t1 <= t with n intervals per side."""
    h = t / n
    grid = np.arange(n + 1) * h
    F = kernel_primitive(params, grid)
    f = kernel_f(params, grid)
    i = np.arange(n + 1)[:, None]
    j = np.arange(n + 1)[None, :]
    lower = j <= i
    diff = np.where(lower, i - j, 0)
    # Z(t_i, t_j) = F(t_i) - F(t_i - t_j), Z(t, t_j) = F(t) - F(t - t_j)
    z_ij = F[i] - F[diff]
    z_tj = F[n] - F[n - j]
    g = f[n - j] * z_ij + f[diff] * z_tj
    wj = np.where(lower, 1.0, 0.0)
    wj[i[:, 0], i[:, 0]] = 0.5
    wj[:, 0] = np.where(i[:, 0] > 0, 0.5, 0.0)
    inner = (g * wj).sum(axis=1) * h
    wi = np.full(n + 1, h)
    wi[0] = wi[-1] = h / 2
    return 2 * np.dot(wi, inner)


def tcl4_correction_quad(params, t, n=600, tol=1e-6):
    """Fourth-order correction (S_4, gamma_4) by product-trapezoid quadrature
    of the Z-form double integral.

    The rule is run with n/4, n/2 and n intervals; the last two are combined
    by Richardson extrapolation and the spread of the two extrapolants gives
    the error estimate. Raises QuadratureError when it exceeds `tol`.
    """
    t = float(t)
    if t == 0:
        return RatePair(0.0, 0.0), 0.0
    n = 4 * max(1, n // 4)
    q1, q2, q3 = (_triangle_trapezoid(params, t, m) for m in (n // 4, n // 2, n))
    r_coarse = (4 * q2 - q1) / 3
    val = (4 * q3 - q2) / 3
    err = abs(val - r_coarse) / 15
    if err > tol:
        raise QuadratureError(f"fourth-order quadrature error {err:.2e} above {tol:.1e} at t={t}")
    return RatePair(val.imag, val.real), err


def _cell_moments(fun, n, h, nodes=8):
    """Per-cell integrals of fun against the four cubic Hermite basis functions,
    with the cell [m h, (m+1) h] traversed backwards (argument (m + 1 - u) h)."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    u = (xg + 1) / 2
    w = wg / 2
    vals = fun((np.arange(n)[:, None] + 1 - u[None, :]) * h)
    h00 = 2 * u**3 - 3 * u**2 + 1
    h10 = u**3 - 2 * u**2 + u
    h01 = -2 * u**3 + 3 * u**2
    h11 = u**3 - u**2
    return [(vals * b * w).sum(axis=1) * h for b in (h00, h10, h01, h11)]


def _cumulative_cells(fun, n, h, nodes=8):
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    u = (xg + 1) / 2
    vals = fun((np.arange(n)[:, None] + u[None, :]) * h)
    cells = (vals * wg / 2).sum(axis=1) * h
    return np.concatenate([[0.0], np.cumsum(cells)])


def tcl4_correction_series(params, n, h):
    """Fourth-order correction on t_k = k h through single convolutions.

    Integrating the triple time-ordered integral over the outer variables gives
    gamma_4 + i S_4 = 2[2 F H - (f * H)(t) - int_0^t f H - int_0^t F^2] with
    H(u) = int_0^u F. H is tabulated exactly per cell, the convolution uses
    cubic Hermite interpolation of H (H' = F is known), and the remaining
    integrals are cumulative Gauss-Legendre sums.
    """
    F_fun = lambda u: kernel_primitive(params, u)
    f_fun = lambda u: kernel_f(params, u)
    grid = np.arange(n + 1) * h
    F = F_fun(grid)
    H = _cumulative_cells(F_fun, n, h)
    fH_int = _cumulative_cells(lambda u: f_fun(u) * _hermite_H(u, h, H, F), n, h)
    FF_int = _cumulative_cells(lambda u: F_fun(u) ** 2, n, h)
    # (f * H)(t_k) = sum_j int_{cell j} f(t_k - s) H(s) ds, s = (j + u) h
    m00, m10, m01, m11 = _cell_moments(f_fun, n, h)
    conv = np.zeros(n + 1, dtype=complex)
    # cell j contributes through moment index k - 1 - j
    for weights, nodal in ((m00, H[:-1]), (m10, h * F[:-1]), (m01, H[1:]), (m11, h * F[1:])):
        conv[1:] += fftconvolve(nodal, weights)[:n]
    val = 2 * (2 * F * H - conv - fH_int - FF_int)
    return grid, RatePair(val.imag, val.real)


def _hermite_H(u, h, H, F):
    """Cubic Hermite interpolant of H from nodal values and slopes."""
    k = np.clip(np.floor(u / h).astype(int), 0, len(H) - 2)
    s = u / h - k
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * H[k] + h * h10 * F[k] + h01 * H[k + 1] + h * h11 * F[k + 1]


def tcl4_rates(params, t, n=600, tol=1e-6):
    """Total fourth-order rates S_2 + S_4 and gamma_2 + gamma_4.

    Closed form for the impulse density, Z-form double quadrature otherwise.
    """
    _reject_singular(params)
    r2 = tcl2_rates(params, t)
    if params.kind is DensityKind.IMPULSE:
        r4 = _tcl4_j1(params, t)
    else:
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        vals = [tcl4_correction_quad(params, ti, n=n, tol=tol)[0] for ti in ts]
        S4 = np.array([v.S for v in vals])
        g4 = np.array([v.gamma for v in vals])
        if np.ndim(t) == 0:
            S4, g4 = S4[0], g4[0]
        r4 = RatePair(S4, g4)
    return RatePair(r2.S + r4.S, r2.gamma + r4.gamma)


def _uniform_step(t):
    t = np.asarray(t, dtype=float)
    if t[0] != 0 or len(t) < 3:
        raise ModelError("TCL trajectories need a grid starting at t = 0 with at least 3 points")
    h = (t[-1] - t[0]) / (len(t) - 1)
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=1e-12):
        raise ModelError("TCL trajectories need a uniform grid")
    return h


def tcl_trajectory(order, params, t_grid, zero_correction=False):
    """Populations and coherences from the cumulative TCL exponent.

    With `zero_correction` the fourth-order correction is replaced by zeros.
    """
    if not isinstance(order, TclOrder):
        order = TclOrder(int(order))
    _reject_singular(params)
    t = np.asarray(t_grid, dtype=float)
    h = _uniform_step(t)
    r = tcl2_rates(params, t)
    gamma, S = np.asarray(r.gamma, dtype=float), np.asarray(r.S, dtype=float)
    if order.order == 4:
        if zero_correction:
            g4 = np.zeros_like(gamma)
            S4 = np.zeros_like(S)
        elif params.kind is DensityKind.IMPULSE:
            r4 = _tcl4_j1(params, t)
            g4, S4 = r4.gamma, r4.S
        else:
            _, r4 = tcl4_correction_series(params, len(t) - 1, h)
            g4, S4 = r4.gamma, r4.S
        gamma = gamma + g4
        S = S + S4
    return integrate_rates(t, gamma, S, reduced_state(params.c0, params.c1_0), label=f"tcl{order.order}")


def integrate_rates(t_grid, gamma, S, rho0, label=""):
    """rho11 = rho11(0) exp(-int gamma), rho01 = rho01(0) exp(int (iS - gamma)/2)
    with cumulative composite Simpson on a uniform grid."""
    t = np.asarray(t_grid, dtype=float)
    h = _uniform_step(t)
    gamma = np.asarray(gamma, dtype=float)
    S = np.asarray(S, dtype=float)
    Ig = cumulative_simpson(gamma, dx=h, initial=0.0)
    IS = cumulative_simpson(S, dx=h, initial=0.0)
    rho11 = rho0.rho11 * np.exp(-Ig)
    rho01 = rho0.rho01 * np.exp(0.5 * (1j * IS - Ig))
    return Trajectory(t, rho11, rho01, gamma, S, label=label)


def tcl2_asymptote_j3(omega_0, eta, omega_c=1.0):
    """int_0^inf gamma_2 for the triangular density above the cutoff."""
    if not omega_0 > omega_c:
        raise ModelError("asymptote requires Omega_0 > omega_c")
    return 2 * eta * (omega_c / (omega_0 - omega_c) + np.log((omega_0 - omega_c) / omega_0))


def breakdown_times_j1(params, n_max):
    """Times t_n = (2/delta)(arctan(delta/|Omega_0 - omega_c|) + n pi)."""
    if params.kind is not DensityKind.IMPULSE:
        raise KindMismatch("breakdown times are defined for the impulse density")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    dl = abs(params.detuning)
    delta = np.sqrt(dl**2 + 4 * params.density.coupling)
    base = np.pi / 2 if dl == 0 else np.arctan(delta / dl)
    return [2 / delta * (base + k * np.pi) for k in range(n_max + 1)]
