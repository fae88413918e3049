"""Exponential, sine and cosine integrals for real and complex arguments.

Everything is vectorized over numpy arrays. The complex exponential integral
is built on E1 with three regimes: a power series for small or benign
arguments, a continued fraction in the intermediate annulus and an
asymptotic expansion for large moduli.
"""

import numpy as np

EULER_GAMMA = 0.57721566490153286061

_SERIES_RADIUS = 4.0
_ASYMPTOTIC_RADIUS = 40.0
# series is kept beyond the radius while |w| + Re(w) (the log of its worst
# cancellation factor) stays small
_SERIES_CANCELLATION = 4.0
_CF_MAX_ITER = 5000
_EPS = 1e-16


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def sinc(x):
    """sin(x)/x with the removable point at zero filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    x2 = x * x
    taylor = 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    out = np.where(small, taylor, np.sin(xs) / xs)
    return out[()] if out.ndim == 0 else out


def _kahan_series(term0, update, z, tol=_EPS, max_terms=400):
    """Sum a power series term by term with compensated summation.

    `update(term, k, z)` returns term k from term k-1. Returns the partial sum
    starting at k=1.
    """
    s = np.zeros_like(z)
    comp = np.zeros_like(z)
    term = term0
    for k in range(1, max_terms):
        term = update(term, k, z)
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if np.all(np.abs(term) <= tol * np.abs(s) + 1e-300):
            break
    return s


def _e1_series(w):
    # E1(w) = -gamma - ln w - sum_{k>=1} (-w)^k / (k k!)
    def upd(term, k, z):
        # term carries (-z)^k / k!; the 1/k weight is applied in the sum
        return term * (-z) / k

    s = np.zeros_like(w)
    comp = np.zeros_like(w)
    pk = np.ones_like(w)
    for k in range(1, 400):
        pk = upd(pk, k, w)
        term = pk / k
        y = term - comp
        t = s + y
        comp = (t - s) - y
        s = t
        if np.all(np.abs(term) <= _EPS * np.abs(s) + 1e-300):
            break
    return -EULER_GAMMA - np.log(w) - s


def _e1_scaled_cf(w):
    """exp(w) E1(w) from the continued fraction 1/(w+1- 1/(w+3- 4/(w+5- ...)))
    evaluated with the modified Lentz algorithm."""
    tiny = 1e-300
    b = w + 1.0
    f = np.where(np.abs(b) < tiny, tiny, b)
    C = f.copy()
    D = np.zeros_like(w)
    active = np.ones(w.shape, dtype=bool)
    for n in range(1, _CF_MAX_ITER):
        a = -float(n * n)
        b = w + (2 * n + 1)
        D = b + a * D
        D = np.where(np.abs(D) < tiny, tiny, D)
        C = b + a / C
        C = np.where(np.abs(C) < tiny, tiny, C)
        D = 1.0 / D
        delta = C * D
        f = np.where(active, f * delta, f)
        active &= np.abs(delta - 1.0) > 1e-16
        if not active.any():
            break
    if active.any():
        raise ArithmeticError("continued fraction for E1 did not converge")
    return 1.0 / f


def _e1_scaled_asymptotic(w):
    """exp(w) E1(w) ~ sum (-1)^k k! / w^(k+1), truncated before terms grow."""
    s = np.zeros_like(w)
    term = 1.0 / w
    live = np.ones(w.shape, dtype=bool)
    prev = np.abs(term)
    for k in range(1, 200):
        s = np.where(live, s + term, s)
        nxt = term * (-k) / w
        grow = np.abs(nxt) >= prev
        live &= ~grow & (np.abs(term) > _EPS * np.abs(s))
        if not live.any():
            break
        prev = np.abs(nxt)
        term = nxt
    return s


def _split_regimes(w):
    r = np.abs(w)
    use_series = (r <= _SERIES_RADIUS) | (
        (r < _ASYMPTOTIC_RADIUS) & (r + w.real < _SERIES_CANCELLATION)
    )
    use_asym = (r >= _ASYMPTOTIC_RADIUS) & ~use_series
    use_cf = ~use_series & ~use_asym
    return use_series, use_cf, use_asym


def _e1_core(w, scaled):
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    ser, cf, asym = _split_regimes(w)
    if ser.any():
        v = _e1_series(w[ser])
        out[ser] = v * np.exp(w[ser]) if scaled else v
    for mask, fn in ((cf, _e1_scaled_cf), (asym, _e1_scaled_asymptotic)):
        if mask.any():
            v = fn(w[mask])
            out[mask] = v if scaled else v * np.exp(-w[mask])
    return out


def _check_nonzero(z):
    if np.any(z == 0):
        raise DomainError("exponential integral is singular at 0")


def expint_e1(z):
    """Principal E1(z) for complex z, branch cut on the negative real axis.

    Points on the cut take the limit from above (Im z -> 0+).
    """
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z)
    w = np.where((z.imag == 0) & (z.real < 0), z.real + 0.0j, z)
    out = _e1_core(w, scaled=False)
    return out[()] if out.ndim == 0 else out


def expint_e1_scaled(z):
    """exp(z) E1(z), finite for arguments far out in the left half-plane."""
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z)
    out = _e1_core(z, scaled=True)
    return out[()] if out.ndim == 0 else out


def expint_ei_real(x, at_zero="raise"):
    """Real exponential integral Ei(x), principal value for x > 0.

    at_zero="raise" raises DomainError at x == 0, at_zero="inf" returns -inf.
    """
    x = np.asarray(x, dtype=float)
    zero = x == 0
    if zero.any() and at_zero == "raise":
        raise DomainError("Ei(0) diverges")
    out = np.empty_like(x)
    neg = x < 0
    if neg.any():
        out[neg] = -_e1_core(-x[neg] + 0j, scaled=False).real
    pos_small = (x > 0) & (x <= _ASYMPTOTIC_RADIUS)
    if pos_small.any():
        xs = x[pos_small]
        s = np.zeros_like(xs)
        pk = np.ones_like(xs)
        for k in range(1, 200):
            pk = pk * xs / k
            term = pk / k
            s += term
            if np.all(term <= _EPS * s):
                break
        out[pos_small] = EULER_GAMMA + np.log(xs) + s
    pos_big = x > _ASYMPTOTIC_RADIUS
    if pos_big.any():
        xb = x[pos_big]
        s = np.ones_like(xb)
        term = np.ones_like(xb)
        for k in range(1, 60):
            nxt = term * k / xb
            if np.all(nxt < _EPS * s):
                break
            term = nxt
            s += term
        out[pos_big] = np.exp(xb) / xb * s
    out[zero] = -np.inf
    return out[()] if out.ndim == 0 else out


def expint_ei_complex(z):
    """Ei(z) = -E1(-z) + i pi sgn(Im z), continued analytically from the
    positive real axis. Branch cut on the negative real axis with values on
    the cut taken from above.
    """
    z = np.asarray(z, dtype=complex)
    _check_nonzero(z)
    out = np.empty_like(z)
    real_pos = (z.imag == 0) & (z.real > 0)
    if real_pos.any():
        out[real_pos] = expint_ei_real(z.real[real_pos])
    rest = ~real_pos
    if rest.any():
        zr = z[rest]
        sgn = np.where(zr.imag < 0, -1.0, 1.0)
        # -z with the sign of zero arranged so -z lies just below the cut
        # when z is on it, matching E1 evaluated off the cut
        e1 = _e1_core(-zr, scaled=False)
        on_cut = zr.imag == 0
        # -E1(-x) for x < 0 is real; the iPi offset gives the limit from above
        out[rest] = np.where(on_cut, -e1.real + 1j * np.pi, -e1 + 1j * np.pi * sgn)
    return out[()] if out.ndim == 0 else out


def _si_ci_series(x):
    x2 = x * x
    si = np.zeros_like(x)
    cin = np.zeros_like(x)
    # odd powers for Si, even powers for Cin
    t = np.ones_like(x)  # x^n / n!
    for n in range(1, 120):
        t = t * x / n
        if n % 2 == 1:
            si += (-1) ** ((n - 1) // 2) * t / n
        else:
            cin -= (-1) ** (n // 2) * t / n
        if np.all(np.abs(t) <= _EPS * 1e-2):
            break
    del x2
    return si, cin


def _large_si_ci(x):
    e1 = _e1_core(1j * x, scaled=False)
    return e1.imag + np.pi / 2, -e1.real


def si_ci(x):
    """Sine and cosine integrals Si(x), Ci(x) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("si_ci requires x > 0")
    si = np.empty_like(x)
    ci = np.empty_like(x)
    small = x <= _SERIES_RADIUS
    if small.any():
        s, cin = _si_ci_series(x[small])
        si[small] = s
        ci[small] = EULER_GAMMA + np.log(x[small]) - cin
    if (~small).any():
        si[~small], ci[~small] = _large_si_ci(x[~small])
    if si.ndim == 0:
        return si[()], ci[()]
    return si, ci


def sine_integral(x):
    """Si(x) for any real x (odd function, Si(0) = 0)."""
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    out = np.zeros_like(a)
    nz = a > 0
    if nz.any():
        out[nz] = si_ci(a[nz])[0]
    out = np.sign(x) * out
    return out[()] if out.ndim == 0 else out


def cin(x):
    """Entire cosine integral Cin(x) = int_0^x (1 - cos t)/t dt, even in x."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(x)
    small = x <= _SERIES_RADIUS
    if small.any():
        out[small] = _si_ci_series(x[small])[1]
    big = ~small
    if big.any():
        out[big] = EULER_GAMMA + np.log(x[big]) - _large_si_ci(x[big])[1]
    return out[()] if out.ndim == 0 else out


def ei_imag(y):
    """Ei(iy) for real y != 0 as Ci(|y|) + i sgn(y)(Si(|y|) + pi/2)."""
    y = np.asarray(y, dtype=float)
    if np.any(y == 0):
        raise DomainError("Ei(0) diverges")
    si, ci = si_ci(np.abs(y))
    out = ci + 1j * np.sign(y) * (si + np.pi / 2)
    return out[()] if out.ndim == 0 else out
