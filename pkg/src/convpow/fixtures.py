"""Named example functions with expected analyses, and runnable end-to-end checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .zfun import LatticeFunction, bernoulli, lazy_bernoulli, psi

PAPER, DERIVED, TRIVIAL = "PAPER", "DERIVED", "TRIVIAL"


# -- named functions ------------------------------------------------------------

def quartic_example() -> LatticeFunction:
    """phi(0) = 1/3, phi(+-1) = 4/9, phi(+-2) = -1/9; symbol 1 - theta^4/9 + ..."""
    return LatticeFunction(-2, [-1 / 9, 4 / 9, 1 / 3, 4 / 9, -1 / 9])


def cubic_drift(a: float = 1 / 8) -> LatticeFunction:
    """phi(-1) = a, phi(0) = 1 - 3a, phi(1) = 3a, phi(2) = -a (unstable third-order drift)."""
    return LatticeFunction(-1, [a, 1 - 3 * a, 3 * a, -a])


def cos4() -> LatticeFunction:
    """Symbol 1 - cos^4(theta): maxima at +-pi/2."""
    return LatticeFunction(-4, [-1 / 16, 0, -1 / 4, 0, 5 / 8, 0, -1 / 4, 0, -1 / 16])


def three_point(a0: float, a_plus: float, a_minus: float) -> LatticeFunction:
    return LatticeFunction(-1, [a_minus, a0, a_plus])


def complex_single() -> LatticeFunction:
    """delta_0 - w (delta_0 - beta) with w = 0.4 (1 + i): one maximum, gamma = 0.2 + 0.2i."""
    w = 0.4 * (1 + 1j)
    return LatticeFunction(-1, [w / 2, 1 - w, w / 2])


def three_point_closed_form(a0: float, a_plus: float, a_minus: float) -> dict:
    """Closed forms for max|symbol| and the local data of phi = a_- d_{-1} + a0 d_0 + a_+ d_1.

    Returns A, alpha, gamma (real part), b (imaginary part of gamma at the
    maximum theta0 in [0, pi]) and theta0.  With s = a_+ + a_- and p = a_+ a_-:
    one maximum (at 0 if s > 0, at pi if s < 0) when p >= 0 or 4|p| < a0|s|,
    twin maxima at +-theta0 when p < 0 and 4|p| > a0|s|.
    """
    s, p, d = a_plus + a_minus, a_plus * a_minus, a_plus - a_minus
    if a0 <= 0 or (a_plus == 0 and a_minus == 0):
        raise ValueError("need a0 > 0 and a nonzero neighbour")
    if p >= 0 or 4 * abs(p) < a0 * abs(s):
        A = a0 + abs(s)
        alpha = math.copysign(1.0, s) * d / A
        return {"regime": "single", "A": A, "alpha": alpha,
                "gamma": abs(s) / (2 * A) - alpha**2 / 2, "b": 0.0,
                "theta0": 0.0 if s > 0 else math.pi}
    if 4 * abs(p) == a0 * abs(s):
        raise ValueError("boundary case 4|a+ a-| = a0 |a+ + a-|")
    q = 4 * abs(p)
    theta0 = math.acos(-a0 * s / (4 * p))
    return {"regime": "twin",
            "A": abs(d) * math.sqrt(1 + a0**2 / q),
            "alpha": s / d,
            "gamma": (q**2 - a0**2 * s**2) / (2 * (a0**2 + q) * d**2),
            "b": 2 * a0 * abs(p) * math.sin(theta0) / (d * (q + a0**2)),
            "theta0": theta0}


# -- fixtures ---------------------------------------------------------------------

@dataclass(frozen=True)
class ExampleFixture:
    name: str
    function: LatticeFunction
    expected: dict
    provenance: str
    note: str = ""


def _fixtures() -> dict[str, ExampleFixture]:
    s_lim = 1 / math.sqrt(2)
    tp = three_point_closed_form(0.5, 0.25, -0.25)
    items = [
        ExampleFixture("delta0", LatticeFunction.delta(0), {"verdict": "TrivialShift"}, TRIVIAL,
                       "single point mass"),
        ExampleFixture("quartic", quartic_example(), {"thetas": [0.0], "alpha": [0.0], "nu": [4],
                                        "gamma": [1 / 9], "verdict": "Stable"}, PAPER,
                       "fourth-order stable example"),
        ExampleFixture("cubic-drift", cubic_drift(1 / 8),
                       {"thetas": [0.0], "alpha": [0.0], "mu": [3], "nu": [4],
                        "verdict": "Unstable", "growth_exponent": 1 / 8}, DERIVED,
                       "third-order drift, unstable"),
        ExampleFixture("cos4", cos4(), {"thetas": [-math.pi / 2, math.pi / 2], "alpha": [0.0, 0.0],
                                        "nu": [4, 4], "gamma": [1.0, 1.0], "verdict": "Stable"},
                       PAPER, "symbol 1 - cos^4"),
        ExampleFixture("bernoulli", bernoulli(), {"thetas": [0.0, math.pi], "alpha": [0.0, 0.0],
                                                  "nu": [2, 2], "gamma": [0.5, 0.5],
                                                  "verdict": "Stable"}, PAPER, "symbol cos"),
        ExampleFixture("lazy-bernoulli", lazy_bernoulli(0.5),
                       {"thetas": [0.0], "alpha": [0.0], "nu": [2], "gamma": [0.25],
                        "verdict": "Stable"}, DERIVED, "s = 1/2"),
        ExampleFixture("psi-k3", psi(0.5, 3),
                       {"thetas": [0.0], "alpha": [0.0], "nu": [6], "gamma": [1 / 64],
                        "verdict": "Stable"}, DERIVED, "symbol 1 - (1 - cos)^3 / 8"),
        ExampleFixture("threepoint-twin", three_point(0.5, 0.25, -0.25),
                       {"thetas": [-tp["theta0"], tp["theta0"]], "alpha": [tp["alpha"]] * 2,
                        "nu": [2, 2], "normalization": tp["A"],
                        "gamma": [complex(tp["gamma"], -tp["b"]), complex(tp["gamma"], tp["b"])],
                        "verdict": "Stable"}, DERIVED,
                       "twin maxima; b from the corrected closed form"),
        ExampleFixture("psi-mixed-orders", psi(s_lim, 2),
                       {"thetas": [0.0, math.pi], "alpha": [0.0, 0.0], "nu": [4, 2],
                        "gamma": [1 / 8, 1.0], "verdict": "Stable"}, PAPER,
                       "mixed orders 4 and 2"),
        ExampleFixture("threepoint-boundary", three_point(1.0, 1.0, -0.2),
                       {"thetas": [0.0], "alpha": [2 / 3], "mu": [3], "nu": [4],
                        "verdict": "Unstable", "growth_exponent": 1 / 8}, DERIVED,
                       "4|a+ a-| = a0 |a+ + a-|"),
        ExampleFixture("complex-single", complex_single(),
                       {"thetas": [0.0], "alpha": [0.0], "nu": [2], "gamma": [0.2 + 0.2j],
                        "verdict": "Stable"}, DERIVED, "complex gamma"),
    ]
    return {f.name: f for f in items}


FIXTURES = _fixtures()


def compare_analysis(fx: ExampleFixture, tol: float = 1e-8) -> list[tuple[str, object, object, bool]]:
    """Rows (field, expected, got, ok) comparing analyze/classify output to the record."""
    from .classify import classify

    an, verdict = classify(fx.function)
    exp = fx.expected
    rows = [("verdict", exp["verdict"], verdict.case.value, verdict.case.value == exp["verdict"])]
    if "growth_exponent" in exp:
        got = verdict.growth_exponent
        rows.append(("growth_exponent", exp["growth_exponent"], got,
                     got is not None and abs(got - exp["growth_exponent"]) <= tol))
    if "normalization" in exp:
        from .symbol import analyze

        A = analyze(fx.function).normalization
        rows.append(("normalization", exp["normalization"], A, abs(A - exp["normalization"]) <= tol))
    if "thetas" not in exp:
        return rows
    pts = an.points
    rows.append(("count", len(exp["thetas"]), len(pts), len(pts) == len(exp["thetas"])))
    if len(pts) != len(exp["thetas"]):
        return rows
    for key, attr in [("thetas", "theta"), ("alpha", "alpha"), ("mu", "mu"), ("nu", "nu"),
                      ("gamma", "gamma")]:
        if key not in exp:
            continue
        for i, (want, p) in enumerate(zip(exp[key], pts)):
            got = getattr(p, attr)
            if isinstance(want, int) and not isinstance(want, bool):
                ok = got == want
            else:
                ok = got is not None and abs(complex(got) - complex(want)) <= tol
            rows.append((f"{key}[{i}]", want, got, ok))
    return rows


# -- end-to-end checks ----------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    rows: list = field(default_factory=list)  # (label, value, requirement, ok)

    @property
    def passed(self) -> bool:
        return all(r[3] for r in self.rows)

    def add(self, label: str, value, requirement: str, ok: bool):
        self.rows.append((label, value, requirement, bool(ok)))


def _decreasing(vals) -> bool:
    return all(b < a for a, b in zip(vals, vals[1:]))


def check_quartic_llt() -> CheckResult:
    from .llt import llt_error_curve
    from .symbol import analyze

    f = quartic_example()
    errs = [r.sup_error_scaled for r in llt_error_curve(f, analyze(f), [200, 800, 3200])]
    out = CheckResult("quartic-llt")
    for n, e in zip([200, 800, 3200], errs):
        out.add(f"scaled error n={n}", e, "", True)
    out.add("monotone decrease", errs, "strictly decreasing", _decreasing(errs))
    out.add("error at n=3200", errs[-1], "<= 0.05", errs[-1] <= 0.05)
    return out


def check_cubic_drift_odd3() -> CheckResult:
    from .llt import llt_odd3_error

    f = cubic_drift(1 / 8)
    errs = [llt_odd3_error(f, n) for n in [500, 2000, 8000]]
    out = CheckResult("cubic-drift-odd3")
    out.add("scaled errors n=500,2000,8000", errs, "strictly decreasing", _decreasing(errs))
    return out


def check_cubic_drift_growth() -> CheckResult:
    from .classify import growth_exponent_fit

    e = growth_exponent_fit(cubic_drift(1 / 8), 500, 8000, 12)
    out = CheckResult("cubic-drift-growth")
    out.add("fitted l1 growth exponent", e, "in [0.095, 0.155]", 0.095 <= e <= 0.155)
    return out


def check_kernels() -> CheckResult:
    from . import kernels as K
    from .oracles import h3_filon

    out = CheckResult("kernel-identities")
    xs = np.linspace(-8, 8, 321)
    e = float(np.max(np.abs(K.eval_kernel(K.KernelSpec.of(2), xs) - K.h2_closed_form(xs))))
    out.add("H2 vs Gaussian on [-8,8]", e, "<= 1e-10", e <= 1e-10)
    h40 = K.eval_kernel(K.KernelSpec.of(4), 0.0)
    e = abs(h40 - math.gamma(0.25) / (4 * math.pi))
    out.add("H4(0) - Gamma(1/4)/(4 pi)", e, "<= 1e-9", e <= 1e-9)
    e = abs(K.kernel_normalization(K.KernelSpec.of(4)) - 1)
    out.add("|int H4 - 1|", e, "<= 1e-8", e <= 1e-8)
    worst = 0.0
    for m, b in [(2, 0.0), (2, 1.0), (4, 0.0), (4, 0.5), (6, 0.0), (8, 0.0)]:
        xw = np.linspace(K.x_switch(m) - 1, K.x_switch(m) + 1, 41)
        worst = max(worst, float(np.max(np.abs(K.kernel_series(m, b, xw) - K.kernel_quadrature(m, b, xw)))))
    out.add("series vs quadrature overlap", worst, "<= 5e-11", worst <= 5e-11)
    e = abs(K.h3(0.0) - 1 / (3 * math.gamma(2 / 3)))
    out.add("H3(0) - 1/(3 Gamma(2/3))", e, "<= 1e-8", e <= 1e-8)
    x3 = np.linspace(-6, 6, 49)
    e = float(np.max(np.abs(K.h3(x3) - np.array([h3_filon(x) for x in x3]))))
    out.add("H3 vs Filon on [-6,6]", e, "<= 1e-6", e <= 1e-6)
    return out


def check_carne_transmutation() -> CheckResult:
    from .carne import BandedHermitian, WalkParams, chebyshev_Q, dense_mk_power, transmutation_apply

    M = BandedHermitian.path_walk(401)
    out = CheckResult("carne-transmutation")
    rng = np.random.default_rng(42)
    V = rng.standard_normal((401, 20))
    for k in (1, 2):
        for n in (10, 50, 100):
            D = dense_mk_power(M, k, n) @ V
            T = transmutation_apply(M, WalkParams(0.5, k), n, V)
            e = float(np.max(M.pi_norm(D - T) / M.pi_norm(V)))
            out.add(f"k={k} n={n} discrepancy", e, "<= 1e-7", e <= 1e-7)
    th = rng.uniform(0, math.pi, 200)
    e = max(float(np.max(np.abs(chebyshev_Q(m, np.cos(th)) - np.cos(m * th)))) for m in range(65))
    out.add("Q_m(cos t) - cos(m t), m<=64", e, "<= 1e-10", e <= 1e-10)
    return out


def check_carne_bound() -> CheckResult:
    from .carne import BandedHermitian, carne_bound_report

    rep = carne_bound_report(BandedHermitian.path_walk(401), 2, [25, 50, 100, 200], 0.1)
    out = CheckResult("carne-bound")
    out.add("C(n) spread, k=2, c=0.1", rep.spread, "<= 3", rep.spread <= 3)
    out.add("locality violations", rep.locality_violations, "== 0", rep.locality_violations == 0)
    return out


def check_carne_diag() -> CheckResult:
    from .carne import BandedHermitian, diag_lower_check

    M = BandedHermitian.path_walk(4001)
    out = CheckResult("carne-diag")
    for k in (1, 2):
        rep = diag_lower_check(M, k, [64, 128, 256, 512, 1024])
        lo = min(rep.ratios.values()) / rep.median
        hi = max(rep.ratios.values()) / rep.median
        out.add(f"k={k} ratio/median range", (lo, hi), "within [0.1, 10]", rep.ok)
    return out


def _analysis_check(name: str) -> Callable[[], CheckResult]:
    def run() -> CheckResult:
        out = CheckResult(name)
        for label, want, got, ok in compare_analysis(FIXTURES[name]):
            out.add(label, got, f"expected {want}", ok)
        return out
    return run


CHECKS: dict[str, tuple[str, Callable[[], CheckResult]]] = {
    **{name: (fx.provenance, _analysis_check(name)) for name, fx in FIXTURES.items()},
    "quartic-llt": (DERIVED, check_quartic_llt),
    "cubic-drift-odd3": (DERIVED, check_cubic_drift_odd3),
    "cubic-drift-growth": (DERIVED, check_cubic_drift_growth),
    "kernel-identities": (DERIVED, check_kernels),
    "carne-transmutation": (DERIVED, check_carne_transmutation),
    "carne-bound": (DERIVED, check_carne_bound),
    "carne-diag": (DERIVED, check_carne_diag),
}


def describe(name: str) -> Optional[str]:
    if name in FIXTURES:
        fx = FIXTURES[name]
        return f"{fx.name}\t[{fx.provenance}]\t{fx.note}"
    if name in CHECKS:
        return f"{name}\t[{CHECKS[name][0]}]\tend-to-end check"
    return None
