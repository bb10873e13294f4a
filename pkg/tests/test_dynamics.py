"""Escape rates, resultants, orbit valuations, and the iteration identity."""

import itertools
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf, mpc, workprec

from degenpot.dynamics import (
    DegenerateParameterError,
    HomogeneousFamily,
    TruncationError,
    escape_rate,
    evaluate,
    iteration_identity_check,
    lemma22_constant,
    orbit_valuations,
    potential,
    resultant_at,
)
from degenpot.families import (
    ContinuedFraction,
    build_quadratic_critical_family,
    build_rotation_family,
)
from degenpot.geometry import ProjPoint
from degenpot.numerics import ParamPoly


def _power_family(d=2):
    zero = ParamPoly.zero()
    cp = [zero] * (d + 1)
    cq = [zero] * (d + 1)
    cp[0] = ParamPoly([1])
    cq[d] = ParamPoly([1])
    return HomogeneousFamily(d, cp, cq)


def _det_permutation_expansion(rows):
    """Independent determinant oracle: full Leibniz expansion."""
    n = len(rows)
    total = mpc(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = mpc(sign)
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def test_resultant_matches_permutation_expansion_oracle():
    rng = random.Random(21)
    with workprec(128):
        th = ContinuedFraction.golden()
        fam = build_rotation_family(th, h=-1, epsilon=1, prec=128).family
        for _ in range(5):
            t = mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
            fat = fam.at(t)
            rows = [[fat.sylvester()[i, j] for j in range(4)] for i in range(4)]
            want = _det_permutation_expansion(rows)
            assert abs(fat.resultant() - want) < mpf(2) ** -90


def test_power_map_resultant_and_escape_rate():
    with workprec(128):
        fam = _power_family(2)
        assert abs(resultant_at(fam, mpc("0.3")) - 1) < mpf(2) ** -100
        res = escape_rate(fam, mpc("0.1"), ProjPoint(2, 1), 64, 128)
        assert res.tail_bound < mpf(10) ** -15
        assert abs(res.value - mpmath.log(2)) <= res.tail_bound


def test_escape_rate_homogeneity():
    rng = random.Random(22)
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 256)
    with workprec(256):
        for _ in range(5):
            t = mpc(0.2 * rng.random() + 0.05, 0.2 * rng.random())
            p = ProjPoint(mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)), 1)
            lam = mpc(rng.uniform(0.5, 3), rng.uniform(-1, 1))
            a = escape_rate(b.family, t, p, 64, 256)
            q = ProjPoint(lam * p.z, lam * p.w)
            c = escape_rate(b.family, t, q, 64, 256)
            resid = abs(c.value - a.value - mpmath.log(abs(lam)))
            assert resid <= 2 * a.tail_bound + mpf(2) ** (-256 + 16)


def test_escape_rate_functional_equation():
    rng = random.Random(23)
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 256)
    d = b.family.degree
    with workprec(256):
        for _ in range(5):
            t = mpc(0.2 * rng.random() + 0.05, 0.2 * rng.random())
            p = ProjPoint(mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)), 1)
            fp = evaluate(b.family, t, p)
            a = escape_rate(b.family, t, p, 64, 256)
            c = escape_rate(b.family, t, fp, 64, 256)
            assert abs(c.value - d * a.value) <= (d + 1) * a.tail_bound


def test_tail_bound_honest_under_depth_doubling():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 256)
    sec = b.section("a")
    with workprec(256):
        t = mpc("0.21", "0.1")
        shallow = potential(b.family, sec.at, t, sec.eta, 24, 256)
        deep = potential(b.family, sec.at, t, sec.eta, 96, 256)
        assert abs(shallow.value - deep.value) <= shallow.tail_bound
        assert deep.tail_bound < shallow.tail_bound


def test_degeneracy_refused_at_t_zero():
    th = ContinuedFraction.golden()
    b = build_rotation_family(th, h=-1, epsilon=1, prec=128)
    with workprec(128):
        with pytest.raises(DegenerateParameterError):
            escape_rate(b.family, mpc(0), ProjPoint(1, 1), 16, 128)


def test_min_sphere_certificate_below_sampled_minimum():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 128)
    with workprec(128):
        fat = b.family.at(mpc("0.2", "0.1"))
        cert, heur = fat.min_sphere_log(certified=True)
        assert heur is False
        sampled, flag = b.family.at(mpc("0.2", "0.1")).min_sphere_log(
            certified=False, samples=64
        )
        assert flag is True
        assert cert <= sampled


def test_lemma22_rigorous_dominates_sampled():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 128)
    with workprec(128):
        bound = lemma22_constant(b.family)
        assert bound.empirical <= bound.rigorous


def test_orbit_valuations_small_quadratic_case():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 512)
    sec = b.section("a")
    with workprec(512):
        series = sec.series_at(40)
    prof = orbit_valuations(b.family, series, 5, 40, 512)
    assert prof.orders == (1, 2, 4, 8, 16)
    assert prof.eta == Fraction(1, 2)


def test_orbit_valuations_raises_rather_than_guessing():
    # at 64 bits the doubly exponential coefficient spread hits the audit
    # window before step 8; a wrong answer is never returned silently
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 64)
    sec = b.section("a")
    with workprec(64):
        series = sec.series_at(300)
    with pytest.raises(TruncationError):
        orbit_valuations(b.family, series, 8, 300, 64)


def test_iteration_identity_small_residual():
    with workprec(128):
        resid = iteration_identity_check(
            ([1, 0, 0], [0, 0, 1]), mpc(-1), 3, ProjPoint(mpc("0.4", "0.3"), 1), 128
        )
        assert resid < mpf(10) ** -25
