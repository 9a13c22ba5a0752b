import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from convpow.fixtures import cos4, quartic_example, cubic_drift, three_point, three_point_closed_form
from convpow.symbol import (Kind, MAX_DERIVATIVE_ORDER, analyze, eval_symbol,
                            find_max_modulus_points, local_expansion, symbol_derivative)
from convpow.zfun import LatticeFunction, bernoulli, lazy_bernoulli, psi


def test_eval_symbol_examples():
    th = np.linspace(-3, 3, 25)
    assert np.allclose(eval_symbol(bernoulli(), th), np.cos(th), atol=1e-15)
    assert np.allclose(eval_symbol(LatticeFunction.delta(0), th), 1)
    assert np.max(np.abs(eval_symbol(cos4(), th) - (1 - np.cos(th) ** 4))) < 1e-15


def test_symbol_derivative_examples():
    assert abs(symbol_derivative(bernoulli(), 0.0, 1)) < 1e-15
    t = 0.7
    assert abs(symbol_derivative(LatticeFunction.delta(1), t, 1) - 1j * cmath.exp(1j * t)) < 1e-15
    assert abs(symbol_derivative(quartic_example(), 0.0, 4) + 8 / 3) < 1e-13
    with pytest.raises(ValueError):
        symbol_derivative(quartic_example(), 0.0, MAX_DERIVATIVE_ORDER + 1)


def test_derivative_matches_finite_differences():
    f = cubic_drift()
    h = 1e-3
    for t in [0.0, 0.4]:
        fd = (eval_symbol(f, t + h) - eval_symbol(f, t - h)) / (2 * h)
        assert abs(fd - symbol_derivative(f, t, 1)) < 1e-5
        fd2 = (eval_symbol(f, t + h) - 2 * eval_symbol(f, t) + eval_symbol(f, t - h)) / h**2
        assert abs(fd2 - symbol_derivative(f, t, 2)) < 1e-5


def test_find_maxima_examples():
    assert find_max_modulus_points(quartic_example()) == pytest.approx([0.0], abs=1e-12)
    assert find_max_modulus_points(cos4()) == pytest.approx([-math.pi / 2, math.pi / 2], abs=1e-8)
    assert find_max_modulus_points(bernoulli()) == pytest.approx([0.0, math.pi], abs=1e-10)
    with pytest.raises(ValueError):
        find_max_modulus_points(LatticeFunction(0, [0]))


def test_local_expansion_quartic():
    p = local_expansion(quartic_example(), 0.0)
    assert p.kind is Kind.EVEN_DECAY and p.nu == 4 and p.mu == 4
    assert abs(p.alpha) < 1e-12 and abs(p.gamma - 1 / 9) < 1e-12


def test_local_expansion_remark_lambda_family():
    # symbol 1 - lam (1 - cos)^k with lam = 1/2, k = 3; 0 is only a local maximum here
    lap3 = LatticeFunction.delta(0) - psi(1.0, 3)  # (delta_0 - beta)^{*3}, symbol (1 - cos)^3
    f = LatticeFunction.delta(0) - 0.5 * lap3
    p = local_expansion(f, 0.0)
    assert p.nu == 6 and abs(p.gamma - 1 / 16) < 1e-12 and abs(p.alpha) < 1e-12


def test_local_expansion_cubic_drift():
    a = 1 / 8
    p = local_expansion(cubic_drift(a), 0.0)
    assert p.kind is Kind.ODD_DRIFT and p.mu == 3 and p.nu == 4
    assert abs(p.coefficient(3) - 1j * a) < 1e-12
    assert abs(p.coefficient(4).real + a / 2) < 1e-12


def test_cubic_drift_coefficients_by_finite_differences():
    # oracle: log(symbol) sampled on a small circle, Cauchy integral for the Taylor coefficients
    f = cubic_drift(1 / 8)
    r, N = 0.3, 64
    z = r * np.exp(2j * np.pi * np.arange(N) / N)
    logs = np.log(np.array([complex(sum(v * cmath.exp(1j * x * t) for x, v in zip(f.xs, f.coeffs)))
                            for t in z]))
    coef = np.fft.fft(logs) / N / r ** np.arange(N)
    p = local_expansion(f, 0.0)
    for j in range(1, 7):
        assert abs(coef[j] - p.coefficient(j)) < 1e-10


def test_analyze_flat_case():
    an = analyze(LatticeFunction.delta(3))
    assert an.flat and an.normalization == 1 and an.points[0].kind is Kind.DEGENERATE


def test_analyze_lazy_bernoulli():
    an = analyze(lazy_bernoulli(0.5))
    (p,) = an.points
    assert p.theta == 0 and abs(p.gamma - 0.25) < 1e-12 and p.nu == 2 and an.strictness


def test_analyze_three_point_twin():
    an = analyze(three_point(0.5, 0.25, -0.25))
    assert abs(an.normalization - 1 / math.sqrt(2)) < 1e-12
    lo, hi = an.points
    assert lo.theta == pytest.approx(-math.pi / 2) and hi.theta == pytest.approx(math.pi / 2)
    # real part 1/4, imaginary parts of opposite sign, magnitude 1/4
    assert abs(lo.gamma - (0.25 - 0.25j)) < 1e-10 and abs(hi.gamma - (0.25 + 0.25j)) < 1e-10


def test_analyze_to_dict_shape():
    d = analyze(quartic_example()).to_dict()
    assert set(d) >= {"normalization", "points", "strictness"}
    assert set(d["points"][0]) >= {"theta", "value", "alpha", "mu", "nu", "gamma", "kind"}


ALL = [quartic_example(), cubic_drift(), cos4(), bernoulli(), lazy_bernoulli(0.3), psi(0.5, 3),
       three_point(0.5, 0.25, -0.25), three_point(1.0, 0.3, 0.1)]


@pytest.mark.parametrize("f", ALL)
def test_stationarity_invariants(f):
    an = analyze(f)
    A = an.normalization
    for p in an.points:
        assert abs(abs(p.value) - A) <= 1e-10 * A
        assert abs(p.coefficient(1).real) <= 1e-9
        t = p.theta
        v = eval_symbol(f, t)
        d1 = symbol_derivative(f, t, 1)
        d2 = symbol_derivative(f, t, 2)
        assert abs(2 * (v.conjugate() * d1).real) <= 1e-10 * A**2
        assert 2 * (abs(d1) ** 2 + (v.conjugate() * d2).real) <= 1e-8
        if p.kind is Kind.EVEN_DECAY:
            assert p.nu == p.mu and p.nu % 2 == 0 and p.gamma.real > 0


@given(st.sampled_from(range(len(ALL))), st.complex_numbers(min_magnitude=0.1, max_magnitude=10,
                                                            allow_nan=False, allow_infinity=False))
def test_normalization_equivariance(i, z):
    f = ALL[i]
    a, b = analyze(f), analyze(f * z)
    assert abs(b.normalization - abs(z) * a.normalization) <= 1e-10 * b.normalization
    assert [p.theta for p in b.points] == pytest.approx([p.theta for p in a.points], abs=1e-10)
    for p, q in zip(a.points, b.points):
        assert np.max(np.abs(np.array(p.expansion[1:]) - np.array(q.expansion[1:]))) <= 1e-9


def _wrap(t):
    return (t + math.pi) % (2 * math.pi) - math.pi if abs(t - math.pi) > 1e-12 else math.pi


@given(st.sampled_from([0, 2, 4, 5]), st.floats(-3.0, 3.0))
def test_modulation_equivariance(i, t0):
    f = ALL[i]
    a = analyze(f)
    g = f.modulate(t0) * (1 / eval_symbol(f, t0)) if abs(eval_symbol(f, t0)) > 1e-3 else f.modulate(t0)
    b = analyze(g)
    want = sorted(_wrap(p.theta - t0) for p in a.points)
    got = [p.theta for p in b.points]
    assert len(got) == len(want)
    for w, g_ in zip(want, got):
        assert min(abs(w - g_), 2 * math.pi - abs(w - g_)) <= 1e-8
    pa = {round(_wrap(p.theta - t0), 6) % round(2 * math.pi, 6): p for p in a.points}
    for q in b.points:
        p = min(a.points, key=lambda p: abs(cmath.exp(1j * (p.theta - t0)) - cmath.exp(1j * q.theta)))
        assert (p.mu, p.nu) == (q.mu, q.nu)
        assert abs(p.alpha - q.alpha) <= 1e-8
        if p.gamma is not None:
            assert abs(p.gamma - q.gamma) <= 1e-8


@given(st.floats(0.05, 2.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0),
       st.sampled_from([(1, 1), (1, -1), (-1, 1), (-1, -1)]))
def test_three_point_closed_forms(a0, x, y, signs):
    ap, am = signs[0] * x, signs[1] * y
    s, p = ap + am, ap * am
    assume(abs(s) > 1e-3)
    assume(abs(4 * abs(p) - a0 * abs(s)) > 0.05 * max(4 * abs(p), a0 * abs(s)))
    cf = three_point_closed_form(a0, ap, am)
    an = analyze(three_point(a0, ap, am))
    assert abs(an.normalization - cf["A"]) <= 1e-7
    pts = an.points
    if cf["regime"] == "single":
        assert len(pts) == 1
        q = pts[0]
        assert min(abs(q.theta - cf["theta0"]), abs(abs(q.theta) - cf["theta0"])) <= 1e-7
        assert abs(q.alpha - cf["alpha"]) <= 1e-7
        assert abs(q.gamma - cf["gamma"]) <= 1e-7
    else:
        assert len(pts) == 2
        q = pts[1]
        assert abs(q.theta - cf["theta0"]) <= 1e-7 and abs(pts[0].theta + cf["theta0"]) <= 1e-7
        assert abs(q.alpha - cf["alpha"]) <= 1e-7
        assert abs(q.gamma - complex(cf["gamma"], cf["b"])) <= 1e-7
        assert abs(pts[0].gamma - complex(cf["gamma"], -cf["b"])) <= 1e-7


@pytest.mark.parametrize("t0", [3.0, -2.37, 0.013, 1.1])
def test_flat_maximum_off_grid(t0):
    # an order-4 maximum away from the sampling grid still refines exactly
    an = analyze(quartic_example().modulate(t0))
    (p,) = an.points
    assert abs((p.theta + t0 + np.pi) % (2 * np.pi) - np.pi) < 1e-9
    assert p.nu == 4 and abs(p.gamma - 1 / 9) < 1e-8
