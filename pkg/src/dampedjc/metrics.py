"""Trace-norm distance between qubit states and its time average."""

from dataclasses import dataclass

import numpy as np


class GridMismatch(ValueError):
    """Trajectories are not sampled on the same time grid."""


@dataclass
class DistanceReport:
    pointwise: np.ndarray
    integrated: float
    T: float


def trace_norm_diff(a, b):
    """||a - b||_1 = 2 sqrt(d11^2 + |d01|^2) for qubit states."""
    d11 = np.asarray(a.rho11) - np.asarray(b.rho11)
    d01 = np.asarray(a.rho01) - np.asarray(b.rho01)
    out = 2 * np.sqrt(d11**2 + np.abs(d01) ** 2)
    return out[()] if np.ndim(out) == 0 else out


def integrated_distance(traj_a, traj_b, T=None):
    """(1/2T) int_0^T ||rho_a - rho_b||_1 dt with the trapezoid rule."""
    t = np.asarray(traj_a.t, dtype=float)
    if len(t) != len(traj_b.t) or not np.allclose(t, traj_b.t, rtol=0, atol=1e-12):
        raise GridMismatch("trajectories use different time grids")
    if T is None:
        T = float(t[-1])
    if t[0] != 0 or T > t[-1] * (1 + 1e-12) or T <= 0:
        raise GridMismatch("grid must start at 0 and cover [0, T]")
    keep = t <= T * (1 + 1e-12)
    pw = trace_norm_diff(traj_a.state(), traj_b.state())
    integral = np.trapezoid(pw[keep], t[keep])
    return DistanceReport(pw, float(integral / (2 * T)), float(T))
