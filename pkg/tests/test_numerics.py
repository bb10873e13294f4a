"""Scalar coercion, parameter polynomials, and truncated series."""

import random

import mpmath
import pytest
from mpmath import mpf, mpc, workprec

from degenpot.numerics import (
    ParamPoly,
    TruncatedSeries,
    VALUATION_ABOVE_TRUNCATION,
    binomial_series,
    default_zero_tol,
    log_max_norm,
    to_mpc,
)


def _rand_mpc(rng, scale=1.0):
    return mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def test_to_mpc_preserves_wide_precision():
    # a value produced at 512 bits must survive storage at ambient 53 bits
    with workprec(512):
        x = mpmath.exp(mpf(1))
    y = to_mpc(x)
    with workprec(512):
        assert abs(y.real - x) < mpf(2) ** -500
    big = 1 << 300
    assert int(to_mpc(big).real) == big


def test_to_mpc_inside_constructors():
    with workprec(512):
        lam = mpmath.sqrt(mpc(2, 1))
    p = ParamPoly([lam])
    with workprec(512):
        assert abs(p.eval(0) - lam) == 0


def test_log_max_norm_huge_exponents():
    with workprec(64):
        x = mpmath.exp(mpf(-50000))
        val = log_max_norm((x, x / 3))
        assert abs(val - (-50000)) < 1e-10
    with pytest.raises(ValueError):
        log_max_norm((mpc(0), mpc(0)))


def test_parampoly_eval_matches_direct_sum():
    rng = random.Random(7)
    with workprec(128):
        coeffs = [_rand_mpc(rng) for _ in range(6)]
        p = ParamPoly(coeffs)
        for _ in range(10):
            t = _rand_mpc(rng, 0.8)
            direct = sum(c * t**k for k, c in enumerate(coeffs))
            assert abs(p.eval(t) - direct) < mpf(2) ** -100


def test_parampoly_bound_on_disk_dominates_samples():
    rng = random.Random(8)
    with workprec(64):
        p = ParamPoly([_rand_mpc(rng) for _ in range(5)])
        bound = p.bound_on_disk(mpf("0.7"))
        for k in range(32):
            t = mpf("0.7") * mpmath.exp(2j * mpmath.pi * k / 32)
            assert abs(p.eval(t)) <= bound + mpf(2) ** -50


def test_parampoly_normalizes_leading_zeros():
    p = ParamPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert ParamPoly([0]).is_zero()


def test_series_mul_matches_convolution_oracle():
    rng = random.Random(9)
    T = 12
    with workprec(128):
        a = [_rand_mpc(rng) for _ in range(T + 1)]
        b = [_rand_mpc(rng) for _ in range(T + 1)]
        prod = TruncatedSeries(a, T).mul(TruncatedSeries(b, T))
        for n in range(T + 1):
            direct = sum(a[i] * b[n - i] for i in range(n + 1))
            assert abs(prod.coefficients[n] - direct) < mpf(2) ** -100


def test_series_inverse_is_two_sided():
    rng = random.Random(10)
    T = 10
    with workprec(128):
        coeffs = [mpc(1)] + [_rand_mpc(rng, 0.5) for _ in range(T)]
        s = TruncatedSeries(coeffs, T)
        one = s.mul(s.inverse())
        assert abs(one.coefficients[0] - 1) < mpf(2) ** -100
        assert all(abs(c) < mpf(2) ** -100 for c in one.coefficients[1:])


def test_series_shift_down_and_valuation():
    with workprec(64):
        s = TruncatedSeries([0, 0, 3, 1, 0, 0], 5)
        assert s.valuation() == 2
        shifted = s.shift_down(2)
        assert shifted.valuation() == 0
        assert abs(shifted.coefficients[0] - 3) == 0
        with pytest.raises(ValueError):
            TruncatedSeries([1, 0, 0], 2).shift_down(1)
        zero = TruncatedSeries([0] * 4, 3)
        assert zero.valuation() is VALUATION_ABOVE_TRUNCATION


def test_binomial_series_against_mpmath_taylor():
    with workprec(128):
        # (1 - t^2)^(1/2) coefficient oracle from mpmath's own expansion
        s = binomial_series(mpf(1) / 2, -1, 2, 10)
        oracle = mpmath.taylor(lambda x: mpmath.sqrt(1 - x * x), 0, 10)
        for got, want in zip(s.coefficients, oracle):
            assert abs(got - want) < mpf(2) ** -100


def test_default_zero_tol_tracks_precision():
    with workprec(128):
        assert default_zero_tol() == mpf(2) ** -64
    assert default_zero_tol(300) == mpf(2) ** -150
