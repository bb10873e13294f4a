"""Simultaneous-iteration polynomial root finding with residual certification.

Durand-Kerner (Weierstrass) iteration at the caller's working precision.
A solve is accepted only when every root satisfies
|p(root)| <= tol * ||p||_1 * max(1, |root|)**deg, with tol defaulting to
2**(-p/2); otherwise RootFindingError is raised.  Degrees 1 and 2 go through
closed forms (and are certified the same way).
"""

from __future__ import annotations

import mpmath
from mpmath import mp, mpf, mpc

__all__ = ["RootFindingError", "poly_roots", "certify_roots"]


class RootFindingError(RuntimeError):
    pass


def _poly_eval(coeffs, x):
    # coeffs[0] is the leading coefficient
    acc = mpc(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _strip(coeffs):
    coeffs = [mpc(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    return coeffs


def certify_roots(coeffs, roots, tol=None) -> bool:
    coeffs = _strip(coeffs)
    if tol is None:
        tol = mpf(2) ** (-(mp.prec // 2))
    norm = sum(abs(c) for c in coeffs)
    deg = len(coeffs) - 1
    for r in roots:
        scale = max(mpf(1), abs(r)) ** deg
        if abs(_poly_eval(coeffs, r)) > tol * norm * scale:
            return False
    return True


def poly_roots(coeffs, tol=None, max_iter=200):
    """All complex roots (with multiplicity) of sum coeffs[i] x^(deg-i).

    Leading zeros are stripped; a constant polynomial has no roots.  Roots
    are returned sorted by (real, imag) for determinism.
    """
    coeffs = _strip(coeffs)
    if not coeffs:
        raise RootFindingError("zero polynomial has every point as a root")
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    lead = coeffs[0]
    monic = [c / lead for c in coeffs]

    if deg == 1:
        roots = [-monic[1]]
    elif deg == 2:
        b, c = monic[1], monic[2]
        disc = mpmath.sqrt(b * b - 4 * c)
        # pick the sign avoiding cancellation in -b -/+ disc
        if mpmath.re(mpmath.conj(b) * disc) > 0:
            disc = -disc
        r1 = (-b + disc) / 2
        r2 = c / r1 if r1 != 0 else (-b - disc) / 2
        roots = [r1, r2]
    else:
        roots = _durand_kerner(monic, max_iter)

    if not certify_roots(coeffs, roots, tol):
        raise RootFindingError("residual certification failed at degree %d" % deg)
    return sorted(roots, key=lambda r: (mpmath.re(r), mpmath.im(r)))


def _durand_kerner(monic, max_iter):
    deg = len(monic) - 1
    # radius from the Cauchy bound, starts spread on a circle with an
    # irrational phase so no start coincides with a symmetric root
    radius = 1 + max(abs(c) for c in monic[1:])
    roots = [
        radius * mpmath.exp(mpc(0, 1) * (2 * mpmath.pi * k / deg + mpf(1) / 2))
        for k in range(deg)
    ]
    eps = mpf(2) ** (-mp.prec + 8)
    for _ in range(max_iter):
        moved = mpf(0)
        for i in range(deg):
            num = _poly_eval(monic, roots[i])
            den = mpc(1)
            for j in range(deg):
                if j != i:
                    den *= roots[i] - roots[j]
            if den == 0:
                roots[i] += mpf(1) / 1000
                moved = mpf(1)
                continue
            delta = num / den
            roots[i] -= delta
            moved = max(moved, abs(delta))
        if moved < eps * radius:
            break
    return roots
