"""Limit kernels of convolution powers.

``H_{m,b}`` (m even, b real) is the function whose Fourier transform
``int H(x) e^{i x xi} dx`` equals ``exp(-(1 + i b) xi^m)``, i.e.

    H_{m,b}(x) = (1/pi) int_0^inf cos(x xi) exp(-(1 + i b) xi^m) d xi.

``H_3`` has Fourier transform ``exp(i xi^3)`` and is a dilated Airy function,
``H_3(x) = 3^{-1/3} Ai(-3^{-1/3} x)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import integrate, special

TAIL_EXPONENT = 18 * math.log(10)  # e^{-T^m} <= 1e-18
QUAD_ABS_TOL = 1e-13


class Parity(str, Enum):
    EVEN = "Even"
    ODD_AIRY = "OddAiry"


class SeriesDivergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    m: int
    b: float = 0.0
    parity: Parity = Parity.EVEN

    def __post_init__(self):
        if self.parity is Parity.EVEN:
            if self.m < 2 or self.m % 2:
                raise ValueError(f"even kernel needs even m >= 2, got m={self.m}")
        elif self.m != 3 or self.b != 0:
            raise ValueError("only H_3 (b = 0) is supported among odd kernels")

    @classmethod
    def of(cls, m: int, b: float = 0.0) -> "KernelSpec":
        if m % 2:
            if m != 3:
                raise ValueError(f"odd kernels other than m=3 are unsupported (m={m})")
            return cls(3, float(b), Parity.ODD_AIRY)
        return cls(m, float(b), Parity.EVEN)

    @property
    def z(self) -> complex:
        return complex(1.0, self.b)


def x_switch(m: int) -> float:
    """Series branch is used for |x| <= x_switch(m), quadrature beyond."""
    return 6.0 if m <= 4 else 8.0


# -- even kernels -------------------------------------------------------------

@lru_cache(maxsize=64)
def _series_coefficients(m: int, b: float, count: int = 320) -> np.ndarray:
    """Gamma((2n+1)/m) z^{-(2n+1)/m} / (m pi) for n < count (principal branch)."""
    logz = cmath.log(complex(1.0, b))
    out = np.zeros(count, dtype=complex)
    for n in range(count):
        a = (2 * n + 1) / m
        if a > 170:
            break
        out[n] = math.gamma(a) * cmath.exp(-a * logz) / (m * math.pi)
    return out


def kernel_series(m: int, b: float, x) -> np.ndarray:
    """Taylor series of H_{m,b} at 0, summed until terms fall below 1e-16 of the sum."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    coef = _series_coefficients(m, float(b))
    x2 = x * x
    power = np.ones_like(x)  # (-x^2)^n / (2n)!
    total = np.zeros(x.shape, dtype=complex)
    active = np.ones(x.shape, dtype=bool)
    growing = np.zeros(x.shape, dtype=int)
    prev = np.full(x.shape, np.inf)
    for n in range(len(coef)):
        if n:
            power = power * (-x2) / ((2 * n - 1) * (2 * n))
        term = power * coef[n]
        total = np.where(active, total + term, total)
        mag = np.abs(term)
        growing = np.where(mag > prev, growing + 1, 0)
        prev = mag
        active &= ~(mag < 1e-16 * np.abs(total))
        active &= x2 != 0
        if np.any(growing[active] >= 60):
            raise SeriesDivergence("use quadrature branch")
        if not active.any():
            return total
        if coef[n] == 0 and n:
            break
    raise SeriesDivergence("use quadrature branch")


def _quad_one(m: int, b: float, x: float) -> complex:
    T = TAIL_EXPONENT ** (1 / m)
    kw = dict(weight="cos", wvar=abs(x), epsabs=QUAD_ABS_TOL, epsrel=0.0, limit=500)
    if b == 0:
        re, _ = integrate.quad(lambda t: math.exp(-t**m), 0.0, T, **kw)
        return complex(re / math.pi, 0.0)
    re, _ = integrate.quad(lambda t: math.cos(b * t**m) * math.exp(-t**m), 0.0, T, **kw)
    im, _ = integrate.quad(lambda t: math.sin(b * t**m) * math.exp(-t**m), 0.0, T, **kw)
    # exp(-i b t^m) = cos - i sin
    return complex(re / math.pi, -im / math.pi)


def kernel_quadrature(m: int, b: float, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([_quad_one(m, float(b), float(v)) for v in x], dtype=complex)


# -- H_3 ----------------------------------------------------------------------

def h3(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    c = 3 ** (-1 / 3)
    return c * special.airy(-c * x)[0]


# -- public evaluation --------------------------------------------------------

def eval_kernel(spec: KernelSpec, x):
    """H_{m,b}(x) (complex).  Scalar in, scalar out; arrays are evaluated elementwise."""
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xa) > 1e6):
        raise ValueError("|x| must be <= 1e6")
    if spec.parity is Parity.ODD_AIRY:
        out = h3(xa).astype(complex)
    else:
        out = np.empty(xa.shape, dtype=complex)
        near = np.abs(xa) <= x_switch(spec.m)
        if near.any():
            try:
                out[near] = kernel_series(spec.m, spec.b, xa[near])
            except SeriesDivergence:
                out[near] = kernel_quadrature(spec.m, spec.b, xa[near])
        if (~near).any():
            out[~near] = kernel_quadrature(spec.m, spec.b, xa[~near])
    return complex(out[0]) if scalar else out


def h2_closed_form(x, b: float = 0.0):
    """Heat kernel at complex time 1 + ib: (4 pi z)^{-1/2} exp(-x^2 / (4 z))."""
    z = complex(1.0, b)
    x = np.asarray(x, dtype=float)
    return np.exp(-(x**2) / (4 * z)) / np.sqrt(4 * np.pi * z)


def h_even_at_zero(m: int, b: float = 0.0) -> complex:
    """H_{m,b}(0) = Gamma(1/m) z^{-1/m} / (m pi)."""
    return math.gamma(1 / m) * complex(1.0, b) ** (-1 / m) / (m * math.pi)


# -- decay ----------------------------------------------------------------------

def decay_rate(m: int, b: float = 0.0) -> float:
    """Saddle-point rate kappa with |H_{m,b}(x)| ~ exp(-kappa |x|^{m/(m-1)}).

    Saddles of x xi + ... solve xi^{m-1} = -i x/(m z); the slowest decaying
    one among those with negative real exponent governs the tail.
    """
    z = complex(1.0, b)
    base = (m - 1) / m * (m * abs(z)) ** (-1 / (m - 1))
    sines = [math.sin((-math.pi / 2 - cmath.phase(z) + 2 * math.pi * j) / (m - 1)) for j in range(m - 1)]
    neg = [-s for s in sines if s < -1e-12]
    return base * min(neg)


def kernel_decay_fit(spec: KernelSpec, x_max: float, c: float = 0.1, step: float = 0.02):
    """Smallest C with |H(x)| <= C exp(-c |x|^{m/(m-1)}) on a grid of [0, x_max]."""
    if spec.parity is not Parity.EVEN:
        raise ValueError("decay fit is defined for even kernels")
    p = spec.m / (spec.m - 1)
    xs = np.arange(0.0, x_max + step / 2, step)
    vals = np.abs(eval_kernel(spec, xs))
    C = float(np.max(vals * np.exp(c * xs**p)))
    return C, c


@lru_cache(maxsize=64)
def negligible_radius(m: int, b: float = 0.0, level: float = 1e-18) -> float:
    """Radius beyond which |H_{m,b}| <= level, from a half-rate envelope fitted on [0, 16]."""
    c = decay_rate(m, b) / 2
    C, _ = kernel_decay_fit(KernelSpec.of(m, b), 16.0, c, step=0.05)
    p = m / (m - 1)
    return max(16.0, (math.log(max(C, 1.0) / level) / c) ** (1 / p))


def kernel_normalization(spec: KernelSpec, nodes_per_unit: int = 24) -> complex:
    """int_{-R}^{R} H(x) dx with R past the decay envelope's 1e-10 tail mass."""
    if spec.parity is not Parity.EVEN:
        raise ValueError("normalization is defined for even kernels")
    m, b = spec.m, spec.b
    c = min(0.1, decay_rate(m, b) / 2)
    C, _ = kernel_decay_fit(spec, 16.0, c, step=0.05)
    p = m / (m - 1)
    # int_R^inf C e^{-c x^p} dx <= C e^{-c R^p} / (c p R^{p-1}) <= 1e-10 / 2
    R = 4.0
    while C * math.exp(-c * R**p) / (c * p * R ** (p - 1)) > 5e-11:
        R *= 1.1
    return 2 * gauss_legendre(lambda t: eval_kernel(spec, t), 0.0, R, nodes_per_unit)


def gauss_legendre(fn, a: float, b: float, nodes_per_unit: int = 24, order: int = 24):
    """Composite Gauss-Legendre rule with unit-length panels; ``fn`` takes arrays."""
    panels = max(1, int(math.ceil((b - a) * nodes_per_unit / order)))
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    xs = (0.5 * (hi - lo) * t + 0.5 * (hi + lo)).ravel()
    ws = (0.5 * (hi - lo) * w).ravel()
    return np.sum(ws * fn(xs))
