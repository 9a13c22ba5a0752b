import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from convpow.fixtures import quartic_example, cubic_drift
from convpow.symbol import eval_symbol
from convpow.zfun import (FormatError, LatticeFunction, NonFiniteError, bernoulli, convolve,
                          difference, from_json, from_text, l1_norm, lazy_bernoulli, load,
                          power, psi, save, sup_distance, sup_norm, to_json, total_sum)


def lf(d):
    return LatticeFunction.from_dict(d)


complex_entry = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def small_functions(draw, max_width=6):
    w = draw(st.integers(1, max_width))
    coeffs = draw(st.lists(complex_entry, min_size=w, max_size=w))
    off = draw(st.integers(-5, 5))
    f = LatticeFunction(off, coeffs)
    norm = l1_norm(f)
    return f * (1 / norm) if norm > 1 else f


def test_trimming_and_zero():
    f = LatticeFunction(3, [0, 0, 1, 2, 0])
    assert f.offset == 5 and list(f.coeffs) == [1, 2]
    z = LatticeFunction(7, [0, 0])
    assert z.is_zero() and z.offset == 0 and z.width == 1


def test_non_finite_rejected():
    with pytest.raises(NonFiniteError):
        LatticeFunction(0, [1, np.nan])


def test_coeffs_read_only():
    f = bernoulli()
    with pytest.raises(ValueError):
        f.coeffs[0] = 3


def test_delta_is_identity():
    f = cubic_drift()
    assert sup_distance(convolve(LatticeFunction.delta(0), f), f) == 0


def test_bernoulli_squared():
    b2 = convolve(bernoulli(), bernoulli())
    assert b2.to_dict() == {-2: 0.25, -1: 0, 0: 0.5, 1: 0, 2: 0.25}


def test_laplacian_squared_table():
    lap = LatticeFunction.delta(0) - bernoulli()
    got = convolve(lap, lap).to_dict()
    assert got == {-2: 0.25, -1: -1, 0: 1.5, 1: -1, 2: 0.25}


def test_overflow_is_reported():
    big = LatticeFunction(0, [1e300, 1e300])
    with pytest.raises(NonFiniteError):
        convolve(big, big)


@pytest.mark.parametrize("method", ["direct", "squaring", "fft"])
def test_power_small_cases(method):
    assert power(LatticeFunction.delta(0), 7, method).to_dict() == {0: 1}
    assert power(bernoulli(), 0, method).to_dict() == {0: 1}
    b2 = power(bernoulli(), 2, method)
    assert sup_distance(b2, convolve(bernoulli(), bernoulli())) < 1e-15


def test_power_negative_and_unknown():
    with pytest.raises(ValueError):
        power(bernoulli(), -1)
    with pytest.raises(ValueError):
        power(bernoulli(), 2, "magic")


def test_quartic_sum_rule():
    f = quartic_example()
    for n in [1, 2, 7, 64, 255, 512]:
        assert abs(total_sum(power(f, n)) - 1) < 1e-10


@pytest.mark.parametrize("f", [quartic_example(), cubic_drift(), lazy_bernoulli(0.3), psi(0.5, 2)])
def test_engines_agree(f):
    for n in [3, 50, 512]:
        ref = power(f, n, "direct")
        scale = sup_norm(ref)
        for m in ["squaring", "fft"]:
            assert sup_distance(power(f, n, m), ref) <= 1e-9 * scale


def test_norms():
    for s in [0.0, 0.3, 1.0]:
        assert abs(l1_norm(lazy_bernoulli(s)) - 1) < 1e-15
    assert abs(total_sum(cubic_drift(1 / 8)) - 1) < 1e-15
    assert abs(l1_norm(cubic_drift(1 / 8)) - 1.25) < 1e-15
    assert sup_norm(quartic_example()) == pytest.approx(4 / 9)


def test_difference():
    assert difference(LatticeFunction.delta(0), 1).to_dict() == {-1: 1, 0: -1}
    assert difference(quartic_example(), 0).is_zero()
    got = difference(bernoulli(), 2).to_dict()
    # oracle: x -> beta(x + 2) - beta(x)
    want = {x: bernoulli()(x + 2) - bernoulli()(x) for x in range(-3, 2)}
    assert {k: v for k, v in got.items()} == {k: v for k, v in want.items() if k in got}
    assert all(v == 0 for k, v in want.items() if k not in got)


def test_psi_symbol():
    th = np.linspace(-3, 3, 13)
    for s, k in [(0.5, 1), (0.5, 2), (0.6, 3)]:
        want = 1 - s**k * (1 - np.cos(th)) ** k
        assert np.max(np.abs(eval_symbol(psi(s, k), th) - want)) < 1e-12


@given(small_functions(), small_functions())
def test_convolution_commutes(f, g):
    assert sup_distance(convolve(f, g), convolve(g, f)) <= 1e-12


@given(small_functions(), small_functions(), small_functions())
def test_convolution_associates(f, g, h):
    assert sup_distance(convolve(convolve(f, g), h), convolve(f, convolve(g, h))) <= 1e-12


@given(small_functions(), small_functions(), st.floats(-math.pi, math.pi))
def test_symbol_homomorphism(f, g, th):
    lhs = eval_symbol(convolve(f, g), th)
    assert abs(lhs - eval_symbol(f, th) * eval_symbol(g, th)) <= 1e-12


@given(small_functions(max_width=4), st.integers(1, 40))
def test_sum_rule(f, n):
    s = total_sum(f)
    got = total_sum(power(f, n, "squaring"))
    assert abs(got - s**n) <= 1e-10 * max(1.0, abs(s) ** n) + 1e-13


@given(small_functions(max_width=4), st.integers(1, 64))
def test_parseval(f, n):
    p = power(f, n, "squaring")
    lhs = float(np.sum(np.abs(p.coeffs) ** 2))

    def integrand(t):
        return abs(eval_symbol(f, t)) ** (2 * n)

    rhs, _ = integrate.quad(integrand, -math.pi, math.pi, limit=400, epsabs=0, epsrel=1e-12)
    rhs /= 2 * math.pi
    assert abs(lhs - rhs) <= 1e-8 * max(lhs, 1e-300) or lhs < 1e-280


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=3), st.integers(1, 30))
def test_even_real_stays_even_real(half, n):
    c = list(reversed(half)) + half[1:]
    f = LatticeFunction(-(len(half) - 1), c)
    p = power(f, n, "squaring")
    vals = p.values_on(np.arange(-p.width, p.width + 1))
    assert np.max(np.abs(vals.imag)) <= 1e-12
    assert np.max(np.abs(vals - vals[::-1])) <= 1e-12 * max(1.0, sup_norm(p))


def test_json_roundtrip(tmp_path):
    f = LatticeFunction(-2, [1 + 2j, 0, -0.5])
    assert sup_distance(from_json(to_json(f)), f) == 0
    save(f, tmp_path / "f.json")
    assert sup_distance(load(tmp_path / "f.json"), f) == 0


def test_text_format(tmp_path):
    f = from_text("# comment\n1 0.5 0\n-1 0.5 0\n")
    assert f.to_dict() == {-1: 0.5, 0: 0, 1: 0.5}
    with pytest.raises(FormatError):
        from_text("1 1 0\n1 2 0\n")
    with pytest.raises(FormatError):
        from_text("1 1\n")
    (tmp_path / "f.txt").write_text("0 1 0\n")
    assert load(tmp_path / "f.txt").to_dict() == {0: 1}


@pytest.mark.parametrize("bad", ['{"offset": 1.5, "coeffs": [[1,0]]}', '{"offset": 0, "coeffs": []}',
                                 '{"coeffs": [[1,0]]}', '{"offset": 0, "coeffs": [[1]]}', "{"])
def test_json_errors(bad):
    with pytest.raises(FormatError):
        from_json(bad)


def test_algebra_helpers():
    f = LatticeFunction(0, [1, 2j])
    assert f.shift(3).offset == 3
    assert f.reflect().to_dict() == {-1: 2j, 0: 1}
    assert f.conj().to_dict() == {0: 1, 1: -2j}
    m = f.modulate(math.pi)
    assert abs(m(1) + 2j) < 1e-15
