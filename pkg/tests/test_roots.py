"""Certified polynomial root finding."""

import random

import mpmath
import pytest
from mpmath import mpf, mpc, workprec

from degenpot.roots import RootFindingError, certify_roots, poly_roots


def _poly_from_roots(roots):
    coeffs = [mpc(1)]
    for r in roots:
        nxt = [mpc(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c
            nxt[i + 1] -= c * r
        coeffs = nxt
    return coeffs


def _match_multisets(found, wanted, tol):
    wanted = list(wanted)
    for r in found:
        best = min(range(len(wanted)), key=lambda i: abs(wanted[i] - r))
        assert abs(wanted[best] - r) < tol
        wanted.pop(best)
    assert not wanted


def test_reconstructs_random_roots():
    rng = random.Random(5)
    with workprec(128):
        for deg in (3, 4, 6):
            roots = [
                mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(deg)
            ]
            found = poly_roots(_poly_from_roots(roots))
            _match_multisets(found, roots, mpf(2) ** -50)


def test_quadratic_closed_form_avoids_cancellation():
    with workprec(128):
        # roots 1e-12 and 1e12: the naive formula loses the small root
        found = poly_roots([1, -(mpf(10) ** 12 + mpf(10) ** -12), 1])
        small = min(found, key=abs)
        assert abs(small - mpf(10) ** -12) < mpf(10) ** -30


def test_linear_and_constant_cases():
    with workprec(64):
        assert poly_roots([2, -6]) == [mpc(3)]
        assert poly_roots([5]) == []
        with pytest.raises(RootFindingError):
            poly_roots([0, 0])


def test_leading_zeros_stripped():
    with workprec(64):
        found = poly_roots([0, 0, 1, -1])
        assert len(found) == 1 and abs(found[0] - 1) < mpf(2) ** -30


def test_deterministic_sorted_output():
    with workprec(64):
        coeffs = _poly_from_roots([mpc(1), mpc(-1), mpc(0, 1), mpc(0, -1)])
        a = poly_roots(coeffs)
        b = poly_roots(coeffs)
        assert a == b
        assert a == sorted(a, key=lambda r: (mpmath.re(r), mpmath.im(r)))


def test_certification_rejects_wrong_roots():
    with workprec(64):
        coeffs = _poly_from_roots([mpc(1), mpc(2), mpc(3)])
        good = poly_roots(coeffs)
        assert certify_roots(coeffs, good)
        bad = [r + mpf(1) / 100 for r in good]
        assert not certify_roots(coeffs, bad)
