"""Choice of the coarse-graining time by minimizing the integrated distance
between the exact and the CG-LE trajectories."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exact import exact_trajectory, reduced_state
from .markov import Unsuitable, cg_gamma, rwa_rates
from .model import DensityKind

GOLDEN = (math.sqrt(5) - 1) / 2
TIE_RTOL = 1e-9


class ValidityWarning(UserWarning):
    """The optimal tau violates omega_c tau << 1."""


@dataclass
class TauScan:
    tau_grid: np.ndarray
    distance: np.ndarray
    tau_star: float
    d_star: float
    d_rwa: float = float("nan")
    boundary: bool = False
    validity_warning: bool = False
    candidates: list = field(default_factory=list)


def default_scan_range(density):
    return (1e-3, 50.0) if density.kind is DensityKind.IMPULSE else (1e-3, 20.0)


class _DistanceOfGamma:
    """D_[0,T] between the exact solution and exponential decay at rate gamma.

    The CG-LE state depends on tau only through gamma(tau), so the exact data
    are prepared once.
    """

    def __init__(self, exact, rho0, T):
        self.t = exact.t
        self.r11 = exact.rho11
        self.r01 = exact.rho01
        self.rho0 = rho0
        self.T = T

    def __call__(self, gamma, S=0.0):
        e = np.exp(-gamma * self.t)
        d11 = self.r11 - self.rho0.rho11 * e
        d01 = self.r01 - self.rho0.rho01 * np.exp((1j * S - gamma) * self.t / 2)
        pw = 2 * np.sqrt(d11**2 + np.abs(d01) ** 2)
        return float(np.trapezoid(pw, self.t) / (2 * self.T))


def _golden(fun, a, b, fa_best, tol, max_iter=200):
    """Golden-section search on [a, b]; the incumbent never gets worse."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    best_x, best_f = fa_best
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx < best_f or (fx == best_f and x < best_x):
                best_x, best_f = x, fx
    return best_x, best_f


def optimize_tau(params, T=100.0, scan_range=None, refine_tol=1e-8, n_scan=400,
                 exact=None, step=None, n_points=None, ohmic_form="corrected",
                 max_candidates=8):
    """Global log-spaced scan of D(tau) followed by golden-section refinement.

    Every interior local minimum of the scan (up to `max_candidates`, best
    first) is refined. Minima whose distances agree to a relative 1e-9 are
    treated as ties and the smallest tau wins. A minimum on the scan edge is
    reported with `boundary=True`.
    """
    if scan_range is None:
        scan_range = default_scan_range(params.density)
    lo, hi = scan_range
    if not (0 < lo < hi):
        raise ValueError("scan range must satisfy 0 < lo < hi")
    if n_scan < 200:
        raise ValueError("at least 200 scan points are required")
    if exact is None:
        if n_points is None:
            n_points = int(round(T / 0.01)) + 1
        t = np.linspace(0.0, T, n_points)
        exact = exact_trajectory(params, t, step=step)
    rho0 = reduced_state(params.c0, params.c1_0)
    dist_of_gamma = _DistanceOfGamma(exact, rho0, T)

    def gamma_of(tau):
        return cg_gamma(params.density, params.omega_0, tau, ohmic_form=ohmic_form)

    def D(tau):
        return dist_of_gamma(float(gamma_of(tau)))

    taus = np.geomspace(lo, hi, n_scan)
    gam = np.asarray(gamma_of(taus))
    ds = np.array([dist_of_gamma(float(g)) for g in gam])
    interior = [i for i in range(1, n_scan - 1) if ds[i] <= ds[i - 1] and ds[i] <= ds[i + 1]]
    interior.sort(key=lambda i: (ds[i], i))
    cands = []
    for i in interior[:max_candidates]:
        x, fx = _golden(D, taus[i - 1], taus[i + 1], (taus[i], ds[i]), refine_tol * taus[i])
        cands.append((x, fx))
    i_best = int(np.argmin(ds))
    boundary = i_best in (0, n_scan - 1)
    if boundary:
        cands.append((taus[i_best], ds[i_best]))
    d_min = min(f for _, f in cands)
    tied = [(x, f) for x, f in cands if f <= d_min * (1 + TIE_RTOL) + 1e-300]
    tau_star, d_star = min(tied)
    boundary = boundary and tau_star == taus[i_best]

    rwa = rwa_rates(params.density, params.omega_0)
    d_rwa = float("nan") if isinstance(rwa, Unsuitable) else dist_of_gamma(rwa.gamma, rwa.S)
    invalid = params.density.omega_c * tau_star > 1
    if invalid:
        warnings.warn(f"omega_c tau* = {params.density.omega_c * tau_star:.3g} > 1: "
                      "coarse-graining validity condition violated", ValidityWarning, stacklevel=2)
    return TauScan(taus, ds, float(tau_star), float(d_star), d_rwa, bool(boundary), bool(invalid),
                   sorted(cands))
