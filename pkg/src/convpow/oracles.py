"""Independent quadratures for H_3, used to check the Airy-based evaluation.

pi H_3(x) = int_0^inf cos(u^3 - x u) du.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .kernels import gauss_legendre


def filon_cos(h_vals: np.ndarray, t0: float, step: float) -> float:
    """Filon-Simpson rule for int h(t) cos(t) dt on a uniform grid with an even number of panels."""
    npts = len(h_vals)
    if npts < 3 or npts % 2 == 0:
        raise ValueError("need an odd number (>= 3) of samples")
    t = t0 + step * np.arange(npts)
    th = step
    s, c = math.sin(th), math.cos(th)
    if th < 1e-3:
        alpha = 2 * th**3 / 45 - 2 * th**5 / 315
        beta = 2 / 3 + 2 * th**2 / 15 - 4 * th**4 / 105
        gamma = 4 / 3 - 2 * th**2 / 15 + th**4 / 210
    else:
        alpha = (th**2 + th * s * c - 2 * s * s) / th**3
        beta = 2 * (th * (1 + c * c) - 2 * s * c) / th**3
        gamma = 4 * (s - th * c) / th**3
    fc = h_vals * np.cos(t)
    c_even = fc[::2].sum() - 0.5 * (fc[0] + fc[-1])
    c_odd = fc[1::2].sum()
    ends = h_vals[-1] * math.sin(t[-1]) - h_vals[0] * math.sin(t[0])
    return step * (alpha * ends + beta * c_even + gamma * c_odd)


def _invert_cubic(t: np.ndarray, x: float, u_start: np.ndarray) -> np.ndarray:
    """Solve u^3 - x u = t for the branch u >= u_start (monotone there)."""
    u = np.maximum(np.cbrt(np.abs(t) + abs(x) * np.cbrt(np.abs(t))), u_start)
    for _ in range(60):
        g = u**3 - x * u - t
        du = g / (3 * u * u - x)
        u = np.maximum(u - du, u_start)
        if np.max(np.abs(du) / u) < 1e-15:
            break
    return u


def h3_filon(x: float, periods: int = 400, samples_per_period: int = 64) -> float:
    """H_3(x) by Gauss-Legendre on a head interval plus a Filon tail in the phase variable."""
    x = float(x)
    u0 = max(2.0, 2 * math.sqrt(max(x, 0.0) / 3) + 1)
    head = gauss_legendre(lambda u: np.cos(u**3 - x * u), 0.0, u0, 64)
    t0 = u0**3 - x * u0
    k0 = math.ceil(t0 / (2 * math.pi))
    t_end = 2 * math.pi * (k0 + periods)
    npts = 2 * ((samples_per_period * (k0 + periods) - int(t0 / (2 * math.pi) * samples_per_period)) // 2) + 1
    ts = np.linspace(t0, t_end, npts)
    us = _invert_cubic(ts, x, np.full_like(ts, u0))
    amp = 1 / (3 * us * us - x)
    tail = filon_cos(amp, t0, ts[1] - ts[0])
    # int_T^inf h cos t dt ~ -h(T) sin T - h'(T) cos T, with sin T = 0, cos T = 1
    uT = us[-1]
    dh = -6 * uT / (3 * uT * uT - x) ** 3
    tail += -dh
    return (head + tail) / math.pi


def h3_contour(x: float) -> float:
    """H_3(x) from the ray u = r e^{i pi/6}, on which exp(i u^3) = exp(-r^3)."""
    w = cmath.exp(1j * math.pi / 6)

    def integrand(r):
        return np.exp(-(r**3) - 1j * x * r * w)

    val = gauss_legendre(integrand, 0.0, 4.0 + abs(x) ** 0.5, 48)
    return float((w * val).real / math.pi)
