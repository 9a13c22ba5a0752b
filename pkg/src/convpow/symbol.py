"""Characteristic function of a lattice function: evaluation, modulus maxima, local expansions.

The symbol of ``f`` is the trigonometric polynomial
``sum_x f(x) exp(i x theta)``.  At a point where its modulus is maximal we
expand ``log(symbol(theta_q + xi) / symbol(theta_q)) = sum_j c_j xi^j`` and
read off the drift ``alpha = Im c_1``, the first nonlinear order ``mu``, the
decay order ``nu`` (first even ``j`` with ``Re c_j < 0``) and ``gamma = -c_nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .zfun import LatticeFunction, convolve

MAX_DERIVATIVE_ORDER = 32
ZERO_THRESHOLD = 1e-9
DEDUP_TOL = 1e-8
TIE_TOL = 1e-10


class Kind(str, Enum):
    EVEN_DECAY = "EvenDecay"
    ODD_DRIFT = "OddDrift"
    DEGENERATE = "Degenerate"


class NotAMaximumError(ValueError):
    pass


class RefinementError(RuntimeError):
    pass


@dataclass(frozen=True)
class MaxPoint:
    theta: float
    value: complex
    alpha: float
    expansion: tuple  # c_1 .. c_J
    mu: Optional[int]
    nu: Optional[int]
    gamma: Optional[complex]
    kind: Kind
    diagnostic: str = ""

    def coefficient(self, j: int) -> complex:
        return self.expansion[j - 1] if 1 <= j <= len(self.expansion) else 0j

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "value": [self.value.real, self.value.imag],
            "alpha": self.alpha,
            "mu": self.mu,
            "nu": self.nu,
            "gamma": None if self.gamma is None else [self.gamma.real, self.gamma.imag],
            "kind": self.kind.value,
        }


@dataclass(frozen=True)
class SymbolAnalysis:
    normalization: float
    points: list
    strictness: bool
    flat: bool = False
    support_width: int = field(default=0, compare=False)

    def to_dict(self) -> dict:
        return {
            "normalization": self.normalization,
            "points": [p.to_dict() for p in self.points],
            "strictness": self.strictness,
        }


# -- evaluation ---------------------------------------------------------------

def _derivatives(xs: np.ndarray, coeffs: np.ndarray, theta: float, kmax: int) -> np.ndarray:
    """[d^k/dtheta^k sum c_x e^{i x theta} for k = 0..kmax]."""
    terms = coeffs * np.exp(1j * xs * theta)
    ix = 1j * xs
    out = np.empty(kmax + 1, dtype=complex)
    for k in range(kmax + 1):
        out[k] = terms.sum()
        terms = terms * ix
    return out


def eval_symbol(f: LatticeFunction, theta):
    """sum_x f(x) e^{i x theta}; ``theta`` may be an array."""
    th = np.asarray(theta, dtype=float)
    out = np.exp(1j * np.multiply.outer(th, f.xs)) @ f.coeffs
    return complex(out) if out.ndim == 0 else out


def symbol_derivative(f: LatticeFunction, theta: float, k: int) -> complex:
    """k-th derivative of the symbol, sum_x f(x) (ix)^k e^{ixtheta}."""
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if k > MAX_DERIVATIVE_ORDER:
        raise ValueError(f"unsupported derivative order {k} (max {MAX_DERIVATIVE_ORDER})")
    xs = f.xs.astype(float)
    return complex(np.sum(f.coeffs * (1j * xs) ** k * np.exp(1j * xs * theta)))


def _centered(f: LatticeFunction) -> tuple[LatticeFunction, int]:
    s = f.offset + (f.width - 1) // 2
    return f.shift(-s), s


def _wrap(theta: float) -> float:
    """Representative of theta in (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    if t <= -math.pi:
        t += 2 * math.pi
    return t


def _periodic_distance(a: float, b: float) -> float:
    return abs(math.remainder(a - b, 2 * math.pi))


# -- modulus maxima -----------------------------------------------------------

class _SquaredModulus:
    """|symbol|^2 as the real trigonometric polynomial of the autocorrelation."""

    def __init__(self, f: LatticeFunction):
        auto = convolve(f, f.conj().reflect())
        self.xs = auto.xs.astype(float)
        self.coeffs = auto.coeffs
        self.scales = np.array(
            [np.sum(np.abs(self.coeffs) * np.abs(self.xs) ** j) for j in range(MAX_DERIVATIVE_ORDER + 2)]
        )

    def derivs(self, theta: float, kmax: int) -> np.ndarray:
        return _derivatives(self.xs, self.coeffs, theta, kmax).real

    def grid(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        th = -np.pi + 2 * np.pi * (np.arange(n) + 1) / n
        vals = (np.exp(1j * np.multiply.outer(th, self.xs)) @ self.coeffs).real
        return th, vals


def _newton_stage(sq: _SquaredModulus, theta: float, j: int, lo: float, hi: float, maxiter: int):
    """Newton on the j-th derivative of |symbol|^2.  Returns (theta, converged)."""
    for _ in range(maxiter):
        d = sq.derivs(theta, j + 1)
        if d[j + 1] >= 0:
            return theta, False
        step = -d[j] / d[j + 1]
        new = theta + step
        if not (lo <= new <= hi):
            return theta, False
        theta = new
        if abs(step) <= 4e-16 * max(1.0, abs(theta)):
            return theta, True
    return theta, False


def _refine_maximum(sq: _SquaredModulus, theta: float, h: float) -> tuple[float, int]:
    """Locate a local maximum of |symbol|^2 near ``theta`` to full precision.

    Returns (theta, order) where order is the even vanishing order of
    |symbol|^2 - max at the point.  The first stage is Newton on the first
    derivative; at a degenerate maximum of order nu that root is only
    determined to about eps^(1/(nu-1)), so subsequent stages run Newton on the
    odd derivatives 3, 5, ... whose roots are simple at such a point.
    """
    lo, hi = theta - h, theta + h
    s = sq.scales
    theta1 = theta
    ok = False
    for _ in range(2):
        theta1, ok = _newton_stage(sq, theta1, 1, lo, hi, 100)
        if ok or abs(sq.derivs(theta1, 1)[1]) <= 1e-13 * s[1]:
            ok = True
            break
        res = minimize_scalar(
            lambda t: -sq.derivs(t, 0)[0], bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        theta1 = float(res.x)
    # an unconverged first stage is expected at flat maxima; the odd-derivative
    # stages below still pin the point down
    theta = theta1
    for j in range(1, MAX_DERIVATIVE_ORDER, 2):
        if j > 1:
            cand, _ = _newton_stage(sq, theta, j, theta - 1e-2, theta + 1e-2, 80)
            # never accept a move that lowers the modulus beyond rounding
            if sq.derivs(cand, 0)[0] >= sq.derivs(theta, 0)[0] - 4e-16 * s[0]:
                theta = cand
        d = sq.derivs(theta, j + 1)
        if d[j + 1] < -1e-7 * s[j + 1]:
            return theta, j + 1
        if d[j + 1] > 1e-7 * s[j + 1]:
            break
    if not ok:
        raise RefinementError("maximum refinement failed")
    return theta, 0


def _maxima_candidates(f: LatticeFunction):
    g, _ = _centered(f)
    sq = _SquaredModulus(g)
    n = max(16 * f.width, 128)
    th, vals = sq.grid(n)
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    idx = np.flatnonzero((vals >= left) & (vals >= right))
    h = 2 * np.pi / n
    found = []
    for i in idx:
        t, order = _refine_maximum(sq, float(th[i]), 1.5 * h)
        found.append((_wrap(t), math.sqrt(max(sq.derivs(t, 0)[0], 0.0)), order))
    return found


def find_max_modulus_points(f: LatticeFunction, tol: float = TIE_TOL) -> list[float]:
    """All theta in (-pi, pi] where |symbol| attains its maximum (to ``tol``)."""
    if f.is_zero():
        raise ValueError("identically zero function has no maximum")
    if f.width == 1:
        return [0.0]
    found = _maxima_candidates(f)
    amax = max(m for _, m, _ in found)
    keep: list[float] = []
    for t, m, _ in sorted(found, key=lambda r: -r[1]):
        if m < amax * (1 - tol):
            continue
        if any(_periodic_distance(t, u) <= DEDUP_TOL for u in keep):
            continue
        keep.append(t)
    return sorted(keep)


# -- local expansion ----------------------------------------------------------

def _log_series(t: np.ndarray) -> np.ndarray:
    """Coefficients c_1..c_J of log(1 + sum_{j>=1} t_j xi^j)."""
    J = len(t) - 1
    c = np.zeros(J + 1, dtype=complex)
    for j in range(1, J + 1):
        acc = j * t[j]
        for k in range(1, j):
            acc -= k * c[k] * t[j - k]
        c[j] = acc / j
    return c[1:]


def _coefficient_scales(g: LatticeFunction, value: complex, J: int) -> np.ndarray:
    radius = max(1.0, float(np.max(np.abs(g.xs))))
    mass = float(np.abs(g.coeffs).sum()) / abs(value)
    return np.array([mass * radius**j / math.factorial(j) for j in range(1, J + 1)])


def local_expansion(f: LatticeFunction, theta_q: float, max_order: int = 12) -> MaxPoint:
    """Expansion data of log(symbol) at the modulus maximum ``theta_q``."""
    if not 2 <= max_order <= MAX_DERIVATIVE_ORDER:
        raise ValueError("max_order must lie in [2, 32]")
    g, s = _centered(f)
    d = _derivatives(g.xs.astype(float), g.coeffs, theta_q, max_order)
    value_g = d[0]
    if value_g == 0:
        raise ValueError("symbol vanishes at theta_q")
    t = np.array([d[j] / (math.factorial(j) * value_g) for j in range(max_order + 1)])
    c = _log_series(t)
    c[0] += 1j * s
    thr = ZERO_THRESHOLD * _coefficient_scales(g, value_g, max_order)
    thr[0] = max(thr[0], ZERO_THRESHOLD * (1 + abs(s)))
    re = np.where(np.abs(c.real) <= thr, 0.0, c.real)
    im = np.where(np.abs(c.imag) <= thr, 0.0, c.imag)
    c = re + 1j * im

    value = complex(value_g * np.exp(1j * s * theta_q))
    alpha = float(c[0].imag)
    mu = next((j for j in range(2, max_order + 1) if c[j - 1] != 0), None)
    first_real = next((j for j in range(2, max_order + 1) if c[j - 1].real != 0), None)
    if first_real is not None and (first_real % 2 == 1 or c[first_real - 1].real > 0):
        raise NotAMaximumError(f"theta={theta_q!r} is not a local maximum of |symbol|")
    nu = first_real
    gamma = None if nu is None else complex(-c[nu - 1]) + 0.0  # + 0.0 clears negative zeros

    if mu is None:
        kind = Kind.DEGENERATE
        diag = f"all coefficients c_2..c_{max_order} vanish below threshold"
    elif nu is not None and mu == nu:
        kind, diag = Kind.EVEN_DECAY, ""
    else:
        kind = Kind.ODD_DRIFT
        diag = "" if nu is not None else f"no decaying even term up to order {max_order}"
    return MaxPoint(
        theta=float(theta_q), value=value, alpha=alpha, expansion=tuple(complex(v) for v in c),
        mu=mu, nu=nu, gamma=gamma, kind=kind, diagnostic=diag,
    )


# -- full analysis ------------------------------------------------------------

def _exclusion_radius(p: MaxPoint) -> float:
    """Half-width of the neighbourhood of a maximum skipped by the strictness scan.

    Inside it the local expansion already forces |symbol| < A; the radius is
    where the decay term drops |symbol|/A by 2e-10.
    """
    r = 1e-3
    if p.nu is not None and p.gamma is not None and p.gamma.real > 0:
        r = max(r, 2 * (2e-10 / p.gamma.real) ** (1 / p.nu))
    return min(r, 0.5)


def analyze(f: LatticeFunction, max_order: int = 12) -> SymbolAnalysis:
    if f.is_zero():
        raise ValueError("identically zero function")
    if f.width == 1:
        v = complex(f.coeffs[0])
        expansion = (1j * f.offset,) + (0j,) * (max_order - 1)
        p = MaxPoint(0.0, v, float(f.offset), expansion, None, None, None, Kind.DEGENERATE,
                     "single-point support: |symbol| is constant")
        return SymbolAnalysis(abs(v), [p], strictness=False, flat=True, support_width=1)

    thetas = find_max_modulus_points(f)
    points = []
    for t in thetas:
        try:
            points.append(local_expansion(f, t, max_order))
        except NotAMaximumError:
            # |symbol| is flat to rounding here; the true order exceeds what the
            # refinement could resolve
            points.append(MaxPoint(t, complex(eval_symbol(f, t)), 0.0, (0j,) * max_order, None, None, None,
                                   Kind.DEGENERATE,
                                   "maximum too flat to resolve; raise max_order"))
    amax = max(abs(p.value) for p in points)

    n = max(64 * f.width, 1024)
    grid = -np.pi + 2 * np.pi * (np.arange(n) + 1) / n
    mask = np.ones(n, dtype=bool)
    for p in points:
        dist = np.abs(np.remainder(grid - p.theta + np.pi, 2 * np.pi) - np.pi)
        mask &= dist >= _exclusion_radius(p)
    vals = np.abs(eval_symbol(f, grid[mask]))
    strict = bool(np.all(vals <= amax * (1 - 1e-10)))
    return SymbolAnalysis(amax, points, strictness=strict, flat=False, support_width=f.width)
