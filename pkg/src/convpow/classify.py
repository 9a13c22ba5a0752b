"""Stability of convolution powers: the bounded / trivial-shift / growing trichotomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .symbol import Kind, SymbolAnalysis, analyze, eval_symbol, find_max_modulus_points
from .zfun import LatticeFunction, l1_norm, power


class Case(str, Enum):
    TRIVIAL_SHIFT = "TrivialShift"
    STABLE = "Stable"
    UNSTABLE = "Unstable"


class InconclusiveExpansion(RuntimeError):
    pass


@dataclass(frozen=True)
class Witness:
    theta: float
    kind: Kind
    mu: Optional[int]
    nu: Optional[int]
    exponent: Optional[float]  # (1 - mu/nu)/2 for OddDrift points

    def to_dict(self) -> dict:
        return {"theta": self.theta, "kind": self.kind.value, "mu": self.mu, "nu": self.nu,
                "exponent": self.exponent}


@dataclass(frozen=True)
class StabilityVerdict:
    case: Case
    growth_exponent: Optional[float] = None
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"case": self.case.value, "witnesses": [w.to_dict() for w in self.witnesses]}
        if self.case is Case.UNSTABLE:
            out["growth_exponent"] = self.growth_exponent
        return out


def classify_stability(analysis: SymbolAnalysis, f: LatticeFunction) -> StabilityVerdict:
    """Decide whether sup_n ||f^(n)||_1 is finite.

    ``analysis`` must come from ``f`` normalised so that max|symbol| = 1.
    An Unstable verdict carries the growth exponent (1 - mu/nu)/2 of the
    worst drifting point, or None when no point has a decaying even term
    within the expansion order.
    """
    if abs(analysis.normalization - 1) > 1e-9:
        raise ValueError(f"normalise first: max|symbol| = {analysis.normalization!r}")
    if f.width == 1:
        if abs(abs(complex(f.coeffs[0])) - 1) <= 1e-9:
            return StabilityVerdict(Case.TRIVIAL_SHIFT, None, [])
    witnesses = []
    for p in analysis.points:
        if p.kind is Kind.DEGENERATE:
            raise InconclusiveExpansion(
                f"inconclusive expansion at theta={p.theta:.12g}: {p.diagnostic}")
        exponent = None
        if p.kind is Kind.ODD_DRIFT and p.nu is not None:
            exponent = (1 - p.mu / p.nu) / 2
        witnesses.append(Witness(p.theta, p.kind, p.mu, p.nu, exponent))
    if all(w.kind is Kind.EVEN_DECAY for w in witnesses):
        return StabilityVerdict(Case.STABLE, None, witnesses)
    exps = [w.exponent for w in witnesses if w.exponent is not None]
    return StabilityVerdict(Case.UNSTABLE, max(exps) if exps else None, witnesses)


def normalized(f: LatticeFunction, analysis: Optional[SymbolAnalysis] = None) -> LatticeFunction:
    if analysis is None:
        analysis = analyze(f)
    return f * (1 / analysis.normalization)


def classify(f: LatticeFunction, max_order: int = 12) -> tuple[SymbolAnalysis, StabilityVerdict]:
    """Normalise ``f`` by max|symbol|, analyse and classify."""
    g = normalized(f)
    an = analyze(g, max_order)
    return an, classify_stability(an, g)


def geometric_ns(n_min: int, n_max: int, count: int = 12) -> np.ndarray:
    count = max(count, 2)
    while True:
        ns = np.unique(np.round(np.geomspace(n_min, n_max, count)).astype(int))
        if len(ns) >= min(count, n_max - n_min + 1) or count > 10 * (n_max - n_min + 1):
            return ns
        count += 1


def l1_norms(f: LatticeFunction, ns, method: str = "fft") -> np.ndarray:
    return np.array([l1_norm(power(f, int(n), method)) for n in ns])


def growth_exponent_fit(f: LatticeFunction, n_min: int = 100, n_max: int = 3200,
                        count: int = 12) -> float:
    """Least-squares slope of log ||f^(n)||_1 against log n on a geometric grid."""
    if n_min < 100 or n_max > 8192 or n_max < 4 * n_min:
        raise ValueError("need 100 <= n_min, 4 n_min <= n_max <= 8192")
    amax = float(max(abs(eval_symbol(f, t)) for t in find_max_modulus_points(f)))
    if abs(amax - 1) > 1e-9:
        raise ValueError(f"normalise first: max|symbol| ~ {amax!r}")
    ns = geometric_ns(n_min, n_max, count)
    norms = l1_norms(f, ns)
    if not np.all(np.isfinite(norms)) or np.any(norms <= 0):
        raise ArithmeticError("non-finite norms")
    slope, _ = np.polyfit(np.log(ns), np.log(norms), 1)
    return float(slope)
