"""Local limit approximations of convolution powers and empirical checks of their bounds.

Around a maximum-modulus point theta_q with local expansion
``log(phi_hat(theta_q + xi) / phi_hat(theta_q)) = i alpha xi - gamma xi^nu + ...``
the n-th power is approximated by

    e^{-i x theta_q} phi_hat(theta_q)^n (Re(gamma) n)^{-1/nu}
        H_{nu, b}((x - alpha n) (Re(gamma) n)^{-1/nu}),   b = Im(gamma)/Re(gamma),

summed over the principal points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .symbol import Kind, MaxPoint, SymbolAnalysis, analyze
from .zfun import LatticeFunction, difference, l1_norm, power

UNDERFLOW = 1e-290


class LLTPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class LLTReport:
    n: int
    sup_error_scaled: float
    xs: np.ndarray = field(repr=False)
    approx_values: np.ndarray = field(repr=False)
    exact_values: np.ndarray = field(repr=False)

    @property
    def approx(self) -> dict[int, complex]:
        return {int(x): complex(v) for x, v in zip(self.xs, self.approx_values)}

    def to_dict(self) -> dict:
        return {"n": self.n, "sup_error_scaled": self.sup_error_scaled}


@dataclass(frozen=True)
class DecayFit:
    c: float
    C_of_n: dict
    exponent: float

    @property
    def spread(self) -> float:
        vals = list(self.C_of_n.values())
        return max(vals) / min(vals)


@dataclass(frozen=True)
class MultipointFit:
    N: int
    C_of_n: dict
    overall: float

    @property
    def spread(self) -> float:
        vals = list(self.C_of_n.values())
        return max(vals) / min(vals)


@dataclass(frozen=True)
class NearDiagonalReport:
    theta: float
    c1: float
    min_real_scaled: dict
    max_abs_imag_scaled: dict
    expected_imag_sign: int  # sign of Im(power) near the diagonal; 0 when gamma is real
    imag_sign_agreement: dict  # fraction of window points whose Im has the expected sign


# -- principal points -----------------------------------------------------------

def principal_points(analysis: SymbolAnalysis, drop_secondary: bool = True) -> list[MaxPoint]:
    """Maximum points entering the local limit sum: EvenDecay points of the largest order."""
    pts = analysis.points
    if not pts:
        raise LLTPreconditionError("no maximum points")
    bad = [p for p in pts if p.kind is not Kind.EVEN_DECAY]
    if bad or analysis.flat:
        raise LLTPreconditionError("local limit approximation needs EvenDecay points only")
    orders = {p.nu for p in pts}
    if len(orders) > 1 and not drop_secondary:
        raise LLTPreconditionError("inhomogeneous orders")
    m = max(orders)
    return [p for p in pts if p.nu == m]


def _kernel_term(p: MaxPoint, n: int, xs: np.ndarray) -> np.ndarray:
    """Contribution of one point with phi_hat(theta_q) replaced by its phase."""
    m = p.nu
    re_g = p.gamma.real
    b = p.gamma.imag / re_g
    scale = (re_g * n) ** (-1 / m)
    u = (xs - p.alpha * n) * scale
    out = np.zeros(xs.shape, dtype=complex)
    near = np.abs(u) <= kernels.negligible_radius(m, round(b, 12))
    if near.any():
        spec = kernels.KernelSpec.of(m, b)
        phase = np.exp(1j * n * np.angle(p.value)) if p.theta != 0 or p.value.imag else 1.0
        out[near] = (phase * np.exp(-1j * xs[near] * p.theta) * scale
                     * kernels.eval_kernel(spec, u[near]))
    return out


def _normalized_approx(points: list[MaxPoint], n: int, xs: np.ndarray) -> np.ndarray:
    total = np.zeros(xs.shape, dtype=complex)
    for p in points:
        total += _kernel_term(p, n, xs)
    return total


def llt_approx(analysis: SymbolAnalysis, n: int, x, drop_secondary: bool = True):
    """Local limit approximation of phi^(n)(x); ``x`` may be an integer or an array.

    Points of order lower than the largest are treated as secondary and
    omitted unless ``drop_secondary`` is False, in which case mixed orders
    are an error.  The modulus A = max|phi_hat| enters as A^n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    pts = principal_points(analysis, drop_secondary)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = _normalized_approx(pts, n, xs) * analysis.normalization**n
    return complex(out[0]) if scalar else out


def approx_window(points: list[MaxPoint], n: int) -> tuple[int, int]:
    """Integer range outside which every principal kernel term is negligible."""
    lo, hi = math.inf, -math.inf
    for p in points:
        r = kernels.negligible_radius(p.nu, round(p.gamma.imag / p.gamma.real, 12))
        half = r * (p.gamma.real * n) ** (1 / p.nu)
        lo = min(lo, p.alpha * n - half)
        hi = max(hi, p.alpha * n + half)
    return math.floor(lo), math.ceil(hi)


def _normalized_power(f: LatticeFunction, n: int, A: float, method: str) -> LatticeFunction:
    return power(f * (1 / A), n, method)


def llt_report(f: LatticeFunction, analysis: SymbolAnalysis, n: int,
               method: str = "fft") -> LLTReport:
    pts = principal_points(analysis)
    m = pts[0].nu
    exact = _normalized_power(f, n, analysis.normalization, method)
    lo, hi = approx_window(pts, n)
    lo, hi = min(lo, exact.offset), max(hi, exact.offset + exact.width - 1)
    xs = np.arange(lo, hi + 1)
    ex = exact.values_on(xs)
    ap = _normalized_approx(pts, n, xs.astype(float))
    err = float(np.max(np.abs(ex - ap))) * n ** (1 / m)
    return LLTReport(n, err, xs, ap, ex)


def llt_error_curve(f: LatticeFunction, analysis: SymbolAnalysis, n_list,
                    method: str = "fft") -> list[LLTReport]:
    """Scaled sup errors of the local limit approximation (divided by A^n)."""
    if f.width == 1:
        raise LLTPreconditionError("single-point support has no local limit")
    return [llt_report(f, analysis, int(n), method) for n in n_list]


# -- odd order three --------------------------------------------------------------

def third_moment_coefficient(f: LatticeFunction) -> float:
    """a with phi_hat(theta) = 1 + a (i theta)^3 + O(theta^4), i.e. sum x^3 phi(x) / 6."""
    xs = f.xs.astype(float)
    return float((xs**3 * f.coeffs.real).sum() / 6)


def _check_odd3(f: LatticeFunction, analysis: Optional[SymbolAnalysis]) -> SymbolAnalysis:
    if not f.is_real():
        raise LLTPreconditionError("odd local limit needs a real function")
    if analysis is None:
        analysis = analyze(f)
    pts = analysis.points
    if (len(pts) != 1 or abs(pts[0].theta) > 1e-12 or pts[0].mu != 3
            or abs(analysis.normalization - 1) > 1e-9 or abs(pts[0].alpha) > 1e-9):
        raise LLTPreconditionError(
            "odd local limit needs a single maximum at 0 with value 1, no drift and mu = 3")
    return analysis


def llt_odd3_approx(f: LatticeFunction, n: int, x, analysis: Optional[SymbolAnalysis] = None):
    """(|a| n)^{-1/3} H_3(eps x (|a| n)^{-1/3}) with eps = sign(-a)."""
    _check_odd3(f, analysis)
    a = third_moment_coefficient(f)
    eps = 1.0 if a < 0 else -1.0
    scale = (abs(a) * n) ** (-1 / 3)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = scale * kernels.h3(eps * xs * scale)
    return float(out[0]) if scalar else out


def llt_odd3_error(f: LatticeFunction, n: int, analysis: Optional[SymbolAnalysis] = None,
                   method: str = "fft") -> float:
    """sup_x |phi^(n)(x) - odd approximation| n^{1/3} over the support of phi^(n)."""
    analysis = _check_odd3(f, analysis)
    exact = power(f, n, method)
    approx = llt_odd3_approx(f, n, exact.xs, analysis)
    return float(np.max(np.abs(exact.coeffs.real - approx))) * n ** (1 / 3)


# -- bound verifications ----------------------------------------------------------

def saddle_rate(p: MaxPoint) -> float:
    """Decay rate of the limit kernel in the variable (x - alpha n) / n^{1/nu}."""
    b = p.gamma.imag / p.gamma.real
    return kernels.decay_rate(p.nu, b) * p.gamma.real ** (-1 / (p.nu - 1))


def default_decay_c(p: MaxPoint) -> float:
    return saddle_rate(p) / 2


def _single_point(analysis: SymbolAnalysis) -> MaxPoint:
    if analysis.flat or len(analysis.points) != 1:
        raise LLTPreconditionError("needs a single maximum point")
    p = analysis.points[0]
    if p.kind is not Kind.EVEN_DECAY:
        raise LLTPreconditionError("needs an EvenDecay maximum")
    return p


def _modulated(f: LatticeFunction, p: MaxPoint) -> LatticeFunction:
    """Move the maximum to 0 with value 1: x -> e^{i x theta} f(x) / phi_hat(theta)."""
    return f.modulate(p.theta) * (1 / p.value)


def _log_envelope(xs, p: MaxPoint, n: int, c: float) -> np.ndarray:
    r = np.abs(xs - p.alpha * n) / n ** (1 / p.nu)
    return -c * r ** (p.nu / (p.nu - 1))


def _log_abs(vals: np.ndarray):
    a = np.abs(vals)
    keep = a > UNDERFLOW
    return keep, np.log(np.where(keep, a, 1.0))


def verify_decay_bound(f: LatticeFunction, analysis: SymbolAnalysis, n_list,
                       c: Optional[float] = None, method: str = "squaring") -> DecayFit:
    """C_of_n = max_x |phi^(n)(x)| n^{1/nu} exp(c (|x - alpha n| / n^{1/nu})^{nu/(nu-1)}).

    Powers come from the direct engine so the far tails keep relative
    accuracy; values below the double underflow range are skipped.
    """
    p = _single_point(analysis)
    if c is None:
        c = default_decay_c(p)
    g = _modulated(f, p)
    out = {}
    for n in n_list:
        n = int(n)
        pw = power(g, n, method)
        keep, la = _log_abs(pw.coeffs)
        logs = la[keep] + math.log(n) / p.nu - _log_envelope(pw.xs[keep], p, n, c)
        out[n] = float(np.exp(np.max(logs)))
    return DecayFit(c, out, p.nu / (p.nu - 1))


def verify_regularity_bound(f: LatticeFunction, analysis: SymbolAnalysis, n: int, y_list,
                            c: Optional[float] = None, method: str = "squaring") -> float:
    """Smallest K with |D_{y_1}...D_{y_m} phi^(n)(x)| <= K prod|y_j| n^{-(1+m)/nu} e^{-c(...)}.

    D_y g(x) = g(x + y) - g(x); the function is modulated so the maximum sits at 0.
    K plays the role of C^m.
    """
    p = _single_point(analysis)
    ys = [int(y) for y in y_list]
    if not 1 <= len(ys) <= 3:
        raise ValueError("between one and three differences")
    if any(abs(y) > n ** (1 / p.nu) for y in ys):
        raise ValueError("|y| must be at most n^{1/nu}")
    if any(y == 0 for y in ys):
        return 0.0
    if c is None:
        c = default_decay_c(p)
    g = power(_modulated(f, p), n, method)
    for y in ys:
        g = difference(g, y)
    if g.is_zero():
        return 0.0
    keep, la = _log_abs(g.coeffs)
    m = len(ys)
    logs = (la[keep] - sum(math.log(abs(y)) for y in ys) + (1 + m) / p.nu * math.log(n)
            - _log_envelope(g.xs[keep], p, n, c))
    return float(np.exp(np.max(logs)))


def regularity_l1_constant(f: LatticeFunction, analysis: SymbolAnalysis, n: int, y: int,
                           method: str = "fft") -> float:
    """sum_x |D_y phi^(n)(x)| n^{1/nu} / |y| (bounded in n and y for stable inputs)."""
    p = _single_point(analysis)
    if y == 0:
        return 0.0
    g = difference(power(_modulated(f, p), n, method), int(y))
    return l1_norm(g) * n ** (1 / p.nu) / abs(y)


def verify_multipoint_bound(f: LatticeFunction, analysis: SymbolAnalysis, n_list, N: int,
                            method: str = "squaring") -> MultipointFit:
    """Smallest C_N with |phi^(n)(x)| <= C_N sum_q n^{-1/nu_q}(1 + |x - alpha_q n| / n^{1/nu_q})^{-N}."""
    if analysis.flat or any(p.kind is not Kind.EVEN_DECAY for p in analysis.points):
        raise LLTPreconditionError("all maxima must be EvenDecay")
    if N < 0:
        raise ValueError("N must be nonnegative")
    out = {}
    for n in n_list:
        n = int(n)
        pw = _normalized_power(f, n, analysis.normalization, method)
        xs = pw.xs.astype(float)
        denom = np.zeros(xs.shape)
        for p in analysis.points:
            w = n ** (1 / p.nu)
            denom += (1 + np.abs(xs - p.alpha * n) / w) ** (-N) / w
        out[n] = float(np.max(np.abs(pw.coeffs) / denom))
    return MultipointFit(N, out, max(out.values()))


def near_diagonal_check(f: LatticeFunction, analysis: SymbolAnalysis, n_list, c1: float = 0.5,
                        point: Optional[int] = None, method: str = "fft") -> NearDiagonalReport:
    """Real and imaginary parts of the modulated power on |x - alpha n| <= c1 n^{1/nu}.

    With several maxima, ``point`` selects one and the local limit terms of
    the others are subtracted first.
    """
    pts = analysis.points
    if point is None:
        if len(pts) != 1:
            raise LLTPreconditionError("several maxima: choose a point")
        point = 0
    p = pts[point]
    if p.kind is not Kind.EVEN_DECAY:
        raise LLTPreconditionError("needs an EvenDecay maximum")
    others = [q for i, q in enumerate(pts) if i != point]
    if others:
        principal_points(analysis)  # all others must admit a local limit term
    A = analysis.normalization
    expected = 0 if p.gamma.imag == 0 else (-1 if p.gamma.imag > 0 else 1)
    mins, ims, agree = {}, {}, {}
    for n in n_list:
        n = int(n)
        w = n ** (1 / p.nu)
        lo = math.ceil(p.alpha * n - c1 * w)
        hi = math.floor(p.alpha * n + c1 * w)
        if hi < lo:
            raise ValueError("empty near-diagonal window (n too small)")
        xs = np.arange(lo, hi + 1)
        vals = _normalized_power(f, n, A, method).values_on(xs)
        if others:
            vals = vals - _normalized_approx(others, n, xs.astype(float))
        phase = np.exp(-1j * n * np.angle(p.value))
        z = phase * np.exp(1j * xs * p.theta) * vals * w
        mins[n] = float(z.real.min())
        ims[n] = float(np.abs(z.imag).max())
        if expected:
            agree[n] = float(np.mean(np.sign(z.imag) == expected))
    return NearDiagonalReport(p.theta, c1, mins, ims, expected, agree)


def sup_norm_ratio(f: LatticeFunction, n: int, method: str = "fft") -> float:
    """sup|phi^(2n)| / sup|phi^(n)|, which approaches 2^{-1/nu} for one EvenDecay maximum."""
    a = np.abs(power(f, n, method).coeffs).max()
    b = np.abs(power(f, 2 * n, method).coeffs).max()
    return float(b / a)
