"""Markovian master equations: coarse-grained (CG-LE / C-LE) and RWA Lindblad.

The coarse-grained rate is gamma(tau) = int J(w) tau sinc^2((Omega_0 - w) tau/2) dw
and its Lamb shift vanishes. The RWA rates are the tau -> infinity limit.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .exact import Trajectory
from .model import DensityKind, KindMismatch, ModelError, spectral_j
from .specfun import cin, expint_ei_complex, expint_ei_real, si_ci, sinc, sine_integral

SINGULAR_GAP = 1e-6


class SingularParameterError(ModelError):
    """Parameters sit on a genuine singularity of a closed form."""


class ClosedFormDefect(ArithmeticError):
    """A closed form disagrees with its quadrature check."""


@dataclass(frozen=True)
class CoarseGrainedRate:
    tau: float
    gamma: float
    S: float = 0.0


@dataclass(frozen=True)
class RWARates:
    S: float
    gamma: float


@dataclass(frozen=True)
class Unsuitable:
    """Marker returned where an approximation has no meaningful rates."""

    reason: str


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise ModelError("tau must be positive")
    return tau


def _cg_ohmic(W, x, printed=False):
    """Dimensionless CG rate for the Ohmic density (omega_c = 1, eta = 1).

    W = Omega_0/omega_c, x = omega_c tau.
    """
    z = W + 1j * W * x
    ez = expint_ei_complex(z)
    # the two conjugate Ei terms combine into twice the real part
    bracket = 2 * ((1 - W - 1j * W * x) * ez).real + 2 * (W - 1) * expint_ei_real(W)
    osc = 2 * (1 - np.cos(W * x)) / x
    body = np.exp(-W) * bracket / x
    return body + osc if printed else body - osc


def _cg_triangular(W, x):
    d = 1 - W
    si_a, ci_a = si_ci(x * W)
    ci_b = si_ci(x * abs(d))[1]
    logterm = np.log(abs(1 / W - 1))
    brk = logterm + ci_a - ci_b + (np.cos(x * d) - 1) / d - np.cos(x * d) + np.cos(x * W)
    return 2 / x * brk + 2 * W * (sine_integral(x * d) + si_a)


def cg_gamma(density, omega_0, tau, ohmic_form="corrected", verify=True):
    """Coarse-grained decay rate gamma(tau) in closed form.

    `ohmic_form="printed"` evaluates the published Ohmic expression, whose
    oscillating boundary term carries the opposite sign; it is kept only to
    reproduce published optima. For the triangular density above the cutoff
    the closed form uses real logarithms and Ci(|x|); with `verify` each such
    value is checked against quadrature.
    """
    tau = _check_tau(tau)
    wc = density.omega_c
    if density.kind is DensityKind.IMPULSE:
        out = density.coupling * tau * sinc((omega_0 - wc) * tau / 2) ** 2
    elif density.kind is DensityKind.OHMIC:
        if ohmic_form not in ("corrected", "printed"):
            raise ValueError("ohmic_form must be 'corrected' or 'printed'")
        out = density.coupling * wc * _cg_ohmic(omega_0 / wc, wc * tau, ohmic_form == "printed")
    else:
        if abs(omega_0 - wc) < SINGULAR_GAP * wc:
            raise SingularParameterError("triangular closed form is singular at Omega_0 = omega_c")
        out = density.coupling * wc * _cg_triangular(omega_0 / wc, wc * tau)
        if verify and omega_0 > wc:
            for ti, gi in zip(np.atleast_1d(tau), np.atleast_1d(out)):
                ref = cg_gamma_quad(density, omega_0, ti)
                if abs(gi - ref) > 1e-6 * abs(ref) + 1e-12:
                    raise ClosedFormDefect(f"closed form {gi} vs quadrature {ref} at tau={ti}")
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def _sinc2_weight(omega_0, tau):
    return lambda w: tau * sinc((omega_0 - w) * tau / 2) ** 2


def cg_gamma_quad(density, omega_0, tau, rel=1e-13):
    """Direct adaptive quadrature of the coarse-grained rate integral."""
    tau = float(_check_tau(tau))
    if density.kind is DensityKind.IMPULSE:
        return density.coupling * tau * float(sinc((omega_0 - density.omega_c) * tau / 2)) ** 2
    wc = density.omega_c
    kern = _sinc2_weight(omega_0, tau)
    if density.kind is DensityKind.OHMIC:
        w_max = omega_0 + 30 * wc + 60 / tau
        integrand = lambda w: density.coupling * w * np.exp(-w / wc) * kern(w)
    else:
        w_max = wc
        integrand = lambda w: density.coupling * w * kern(w)
    # panels a few sinc lobes wide keep quad well resolved
    n_panels = int(np.ceil(w_max * tau / (8 * np.pi))) + 1
    edges = np.union1d(np.linspace(0, w_max, n_panels + 1), [omega_0] if omega_0 < w_max else [])
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(integrand, a, b, epsabs=0, epsrel=rel, limit=500)[0]
    return total


def cle_gamma_quad(params, tau):
    """Cumulant-route rate (1/tau) int_0^tau int_0^tau f(s - s') ds ds'.

    Reduced to (2/tau) Re int_0^tau (tau - u) f(u) du and integrated
    numerically; it is an independent route to the same rate.
    """
    from .model import kernel_f

    tau = float(_check_tau(tau))
    re = lambda u: ((tau - u) * kernel_f(params, u)).real
    n_panels = int(np.ceil(tau * max(params.omega_0, params.density.omega_c) / 4)) + 1
    edges = np.linspace(0, tau, n_panels + 1)
    tot = sum(quad(re, a, b, epsabs=0, epsrel=1e-12, limit=500)[0] for a, b in zip(edges[:-1], edges[1:]))
    return 2 * tot / tau


def rwa_rates(density, omega_0):
    """Constant RWA Lamb shift and decay rate, or Unsuitable for the impulse bath."""
    wc = density.omega_c
    eta = density.coupling
    if density.kind is DensityKind.IMPULSE:
        return Unsuitable("impulse density: RWA rate vanishes or is singular")
    J = float(spectral_j(density, omega_0))
    if density.kind is DensityKind.OHMIC:
        S = 2 * J * float(expint_ei_real(omega_0 / wc)) - 2 * eta * wc
    else:
        if abs(omega_0 - wc) < SINGULAR_GAP * wc:
            raise SingularParameterError("triangular Lamb shift diverges at Omega_0 = omega_c")
        S = -2 * eta * omega_0 * np.log(abs(wc / omega_0 - 1)) - 2 * eta * wc
    return RWARates(float(S), 2 * np.pi * J)


def markov_trajectory(rates, rho0, t_grid, label=""):
    """Exponential Lindblad solution for constant (S, gamma)."""
    S = float(rates.S)
    g = float(rates.gamma)
    if g < 0:
        raise ModelError("Lindblad rate must be non-negative")
    t = np.asarray(t_grid, dtype=float)
    rho11 = rho0.rho11 * np.exp(-g * t)
    rho01 = rho0.rho01 * np.exp((1j * S - g) * t / 2)
    return Trajectory(t, rho11, rho01, np.full_like(t, g), np.full_like(t, S), label=label)


def cg_trajectory(density, omega_0, tau, rho0, t_grid, **kw):
    g = cg_gamma(density, omega_0, tau, **kw)
    tr = markov_trajectory(CoarseGrainedRate(float(tau), float(g)), rho0, t_grid, label="cgle")
    tr.meta["tau"] = float(tau)
    return tr


def rwa_truncation_bound(density, t):
    """Bound (pi/2 - arctan(omega_c t)) eta omega_c on the truncated RWA term."""
    if density.kind is not DensityKind.OHMIC:
        raise KindMismatch("truncation bound is defined for the Ohmic density")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ModelError("t must be non-negative")
    wc = density.omega_c
    out = (np.pi / 2 - np.arctan(wc * t)) * density.coupling * wc
    return out[()] if out.ndim == 0 else out
