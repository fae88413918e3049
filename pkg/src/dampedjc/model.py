"""Bath spectral densities, memory kernels and their Laplace transforms.

Frequencies are in units of energy with hbar = 1. Formulas are written in the
dimensionless variables x = omega_c t and W = Omega_0 / omega_c and scaled back
at the boundary.
"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from .specfun import expint_e1_scaled

TAYLOR_CUTOFF = 1e-3


class DensityKind(str, Enum):
    IMPULSE = "impulse"
    OHMIC = "ohmic"
    TRIANGULAR = "triangular"


class ModelError(ValueError):
    """Invalid model parameters or evaluation point."""


class KindMismatch(ModelError):
    """Operation not defined for the given spectral density."""


@dataclass(frozen=True)
class SpectralDensity:
    """J1 = g2 delta(w - wc), J2 = eta w exp(-w/wc), J3 = eta w Theta(wc - w).

    `coupling` is |g|^2 for the impulse density and eta otherwise.
    """

    kind: DensityKind
    coupling: float
    omega_c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind(self.kind))
        if not self.coupling > 0:
            raise ModelError("coupling must be positive")
        if not self.omega_c > 0:
            raise ModelError("omega_c must be positive")

    @classmethod
    def impulse(cls, g2, omega_c=1.0):
        return cls(DensityKind.IMPULSE, g2, omega_c)

    @classmethod
    def ohmic(cls, eta, omega_c=1.0):
        return cls(DensityKind.OHMIC, eta, omega_c)

    @classmethod
    def triangular(cls, eta, omega_c=1.0):
        return cls(DensityKind.TRIANGULAR, eta, omega_c)


@dataclass(frozen=True)
class ModelParams:
    omega_0: float
    density: SpectralDensity
    c0: complex = 1 / np.sqrt(2)
    c1_0: complex = 1 / np.sqrt(2)

    def __post_init__(self):
        if not self.omega_0 > 0:
            raise ModelError("omega_0 must be positive")
        if abs(self.c0) ** 2 + abs(self.c1_0) ** 2 > 1 + 1e-12:
            raise ModelError("|c0|^2 + |c1(0)|^2 exceeds 1")

    @property
    def kind(self):
        return self.density.kind

    @property
    def detuning(self):
        """Omega_0 - omega_c."""
        return self.omega_0 - self.density.omega_c


class Atom(NamedTuple):
    """Point mass of the impulse density: weight |g|^2 located at omega_c."""

    weight: float
    location: float


def spectral_j(density, omega):
    """J(omega) for the Ohmic and triangular densities.

    The impulse density has no pointwise value; an `Atom` is returned instead
    and callers integrate against it by sifting.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ModelError("omega must be non-negative")
    if density.kind is DensityKind.IMPULSE:
        return Atom(density.coupling, density.omega_c)
    wc = density.omega_c
    if density.kind is DensityKind.OHMIC:
        out = density.coupling * omega * np.exp(-omega / wc)
    else:
        out = np.where(omega <= wc, density.coupling * omega, 0.0)
    return out[()] if out.ndim == 0 else out


def spectral_at_omega0(params):
    """J(Omega_0) for the Ohmic and triangular densities."""
    if params.kind is DensityKind.IMPULSE:
        raise KindMismatch("impulse density has no pointwise value")
    return float(spectral_j(params.density, params.omega_0))


def _j3_shape(x):
    """(1 - e^{ix} + ix)/x^2 with a Taylor fill near x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < TAYLOR_CUTOFF
    xs = np.where(small, 1.0, x)
    full = (1 - np.exp(1j * xs) + 1j * xs) / xs**2
    taylor = 0.5 + 1j * x / 6 - x**2 / 24 - 1j * x**3 / 120 + x**4 / 720
    return np.where(small, taylor, full)


def kernel_f(params, t):
    """Memory kernel f(t) = int J(w) exp(i (Omega_0 - w) t) dw.

    Defined for any real t (negative arguments are needed by the TCL terms).
    """
    t = np.asarray(t, dtype=float)
    d = params.density
    wc = d.omega_c
    W0 = params.omega_0
    if d.kind is DensityKind.IMPULSE:
        out = d.coupling * np.exp(1j * (W0 - wc) * t)
    elif d.kind is DensityKind.OHMIC:
        out = d.coupling * wc**2 * np.exp(1j * W0 * t) / (1 + 1j * wc * t) ** 2
    else:
        x = wc * t
        out = d.coupling * wc**2 * np.exp(1j * (W0 - wc) * t) * _j3_shape(x)
    return out[()] if out.ndim == 0 else out


def bath_correlation(params, tau):
    """Stationary correlation B(tau) = int J(w) exp(-i w tau) dw."""
    tau = np.asarray(tau, dtype=float)
    out = kernel_f(params, tau) * np.exp(-1j * params.omega_0 * tau)
    return out[()] if out.ndim == 0 else out


def kernel_laplace(params, s):
    """Laplace transform of the memory kernel for Re s > 0."""
    s = np.asarray(s, dtype=complex)
    if np.any(s.real <= 0):
        raise ModelError("kernel_laplace requires Re s > 0")
    d = params.density
    wc = d.omega_c
    if d.kind is DensityKind.IMPULSE:
        out = d.coupling / (s - 1j * params.detuning)
    elif d.kind is DensityKind.OHMIC:
        q = (s - 1j * params.omega_0) / wc
        # q e^{-iq} E1(-iq) - i, with the exponential folded into E1
        out = d.coupling * wc * (q * expint_e1_scaled(-1j * q) - 1j)
    else:
        p = s - 1j * params.omega_0
        # Re p > 0 along the whole segment p + i w, so principal logs are safe
        out = -1j * d.coupling * wc + d.coupling * p * (np.log(p + 1j * wc) - np.log(p))
    return out[()] if out.ndim == 0 else out
