"""Lyapunov exponents, critical-potential sums, discrete Laplacians of
potential grids, and the quadratic-family decomposition check.

The Lyapunov estimator samples the measure of maximal entropy by a backward
orbit: preimages are drawn uniformly among the d roots (with multiplicity)
of f(w) = z.  It runs at double-range precision; only potentials near dip
radii need the extended exponent range, the equilibrium measure lives at
unit scale.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mpf, mpc, workprec

from .dynamics import HomogeneousFamily, escape_rate, potential
from .families import FamilyBundle, RationalMap, Section
from .geometry import ProjPoint
from .roots import RootFindingError

__all__ = [
    "LyapunovEstimate",
    "PotentialGrid",
    "lyapunov",
    "critical_potential_sum",
    "potential_grid",
    "laplacian_stencil",
    "relation_check_quadratic",
]


@dataclass(frozen=True)
class LyapunovEstimate:
    mean: float
    std_error: float
    samples: int
    burn_in: int
    seed: int


def _roots_double(coeffs):
    """Roots of a complex-coefficient polynomial in doubles, residual-checked.

    Closed forms for degree <= 2, Durand-Kerner above; certification
    threshold 2**-26 * ||p||_1 matches the half-precision rule at 53 bits.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    deg = len(coeffs) - 1
    if deg < 1:
        raise RootFindingError("no roots: constant polynomial")
    lead = coeffs[0]
    monic = [c / lead for c in coeffs]
    if deg == 1:
        roots = [-monic[1]]
    elif deg == 2:
        b, c = monic[1], monic[2]
        disc = cmath.sqrt(b * b - 4 * c)
        if (b.conjugate() * disc).real > 0:
            disc = -disc
        r1 = (-b + disc) / 2
        roots = [r1, c / r1 if r1 != 0 else (-b - disc) / 2]
    else:
        roots = _dk_double(monic)
    norm = sum(abs(c) for c in coeffs)
    for r in roots:
        acc = 0j
        for c in coeffs:
            acc = acc * r + c
        if abs(acc) > 2.0**-26 * norm * max(1.0, abs(r)) ** deg:
            raise RootFindingError("double-precision residual certification failed")
    return roots


def _dk_double(monic):
    deg = len(monic) - 1
    radius = 1 + max(abs(c) for c in monic[1:])
    roots = [radius * cmath.exp(1j * (2 * math.pi * k / deg + 0.5)) for k in range(deg)]
    for _ in range(200):
        moved = 0.0
        for i in range(deg):
            num = 0j
            for c in monic:
                num = num * roots[i] + c
            den = 1 + 0j
            for j in range(deg):
                if j != i:
                    den *= roots[i] - roots[j]
            if den == 0:
                roots[i] += 1e-3
                moved = 1.0
                continue
            delta = num / den
            roots[i] -= delta
            moved = max(moved, abs(delta))
        if moved < 1e-14 * radius:
            break
    return roots


def lyapunov(
    f: RationalMap,
    samples: int,
    burn_in: int = 64,
    seed: int = 0,
) -> LyapunovEstimate:
    """Monte Carlo Lyapunov exponent against the maximal-entropy measure.

    Averages the log spherical derivative log(|f'| (1+|z|^2)/(1+|f(z)|^2))
    along one backward orbit; the empirical law of backward orbits converges
    weakly to the equilibrium measure.  Deterministic for fixed
    (seed, samples, burn_in).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    num = [complex(c) for c in f.num]
    den = [complex(c) for c in f.den]
    dnum = [c * (len(num) - 1 - i) for i, c in enumerate(num[:-1])]
    dden = [c * (len(den) - 1 - i) for i, c in enumerate(den[:-1])]

    def ev(coeffs, z):
        acc = 0j
        for c in coeffs:
            acc = acc * z + c
        return acc

    rng = random.Random(seed)
    z = 0.4142 + 0.2718j  # generic start; burn-in forgets it
    total = 0.0
    total_sq = 0.0
    kept = 0
    steps = burn_in + samples
    for step in range(steps):
        # preimages: roots of num(w) - z*den(w)
        n = max(len(num), len(den))
        coeffs = [0j] * n
        for i, c in enumerate(reversed(num)):
            coeffs[n - 1 - i] += c
        for i, c in enumerate(reversed(den)):
            coeffs[n - 1 - i] -= z * c
        roots = _roots_double(coeffs)
        w = roots[rng.randrange(len(roots))]
        if step >= burn_in:
            d = ev(den, w)
            nv = ev(num, w)
            dpv = ev(dnum, w) if dnum else 0j
            ddv = ev(dden, w) if dden else 0j
            deriv = (dpv * d - nv * ddv) / (d * d)
            fw = nv / d
            val = math.log(abs(deriv) * (1 + abs(w) ** 2) / (1 + abs(fw) ** 2))
            total += val
            total_sq += val * val
            kept += 1
        z = w
    mean = total / kept
    var = max(0.0, total_sq / kept - mean * mean)
    std_error = math.sqrt(var / kept)
    return LyapunovEstimate(mean, std_error, samples, burn_in, seed)


def critical_potential_sum(
    fam: HomogeneousFamily,
    sections: Sequence[Section],
    t,
    depth: int,
    p_bits: int,
):
    """Sum of degeneration potentials over the marked critical sections.

    Returns (value, combined tail bound).  This is the non-harmonic part of
    the Lyapunov exponent's decomposition over the family.
    """
    if not sections or any(s is None for s in sections):
        raise ValueError("all critical sections must be supplied")
    with workprec(p_bits):
        total = mpf(0)
        tail = mpf(0)
        for s in sections:
            res = potential(fam, s.at, t, s.eta, depth, p_bits)
            total += res.value
            tail += res.tail_bound
        return total, tail


@dataclass(frozen=True)
class PotentialGrid:
    """Potential samples on a uniform rectangular mesh in the t-plane.

    values[i][j] is the sample at t = origin + (i*spacing) + (j*spacing) i,
    or None where no sample was taken (outside the annulus of interest).
    All samples share family, section, depth and precision.
    """

    values: tuple
    spacing: float
    origin: complex
    tail_bound: float = 0.0

    @property
    def shape(self):
        return len(self.values), len(self.values[0])


def potential_grid(
    fam: HomogeneousFamily,
    section,
    eta,
    center: complex,
    half_width: float,
    mesh: int,
    depth: int,
    p_bits: int,
    r_min: float = 0.0,
    r_max: float = float("inf"),
) -> PotentialGrid:
    """Sample the potential on a mesh x mesh grid over a square, keeping only
    points whose radius lies in [r_min, r_max]."""
    if mesh < 3:
        raise ValueError("mesh too small")
    spacing = 2 * half_width / (mesh - 1)
    origin = complex(center) - half_width - 1j * half_width
    rows = []
    worst_tail = 0.0
    for i in range(mesh):
        row = []
        for j in range(mesh):
            t = origin + i * spacing + 1j * j * spacing
            r = abs(t)
            if r < r_min or r > r_max:
                row.append(None)
                continue
            res = potential(fam, section, t, eta, depth, p_bits)
            row.append(float(res.value))
            worst_tail = max(worst_tail, float(res.tail_bound))
        rows.append(tuple(row))
    return PotentialGrid(tuple(rows), spacing, origin, worst_tail)


def laplacian_stencil(grid: PotentialGrid):
    """Five-point discrete Laplacian scaled by 1/(2 pi).

    Returns a grid of the same shape with None wherever the center or any
    neighbor is missing.  Requires uniform spacing (guaranteed by the type).
    """
    n, m = grid.shape
    v = grid.values
    d2 = grid.spacing * grid.spacing
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            if 0 < i < n - 1 and 0 < j < m - 1:
                c = v[i][j]
                nb = (v[i + 1][j], v[i - 1][j], v[i][j + 1], v[i][j - 1])
                if c is not None and all(x is not None for x in nb):
                    row.append((sum(nb) - 4 * c) / d2 / (2 * math.pi))
                    continue
            row.append(None)
        out.append(tuple(row))
    return tuple(out)


def relation_check_quadratic(
    bundle: FamilyBundle, t, depth: int = 64, p_bits: int = 256
) -> mpf:
    """Residual of the critical-point/critical-value potential relation for
    the marked quadratic family:

        |pot(a; eta=1/2) - 1/2 pot(v; eta=0) - 1/2 h(t)|,

    h(t) = log|a(t) - 1 + t^2| - log|t| (harmonic across t = 0).  The a-side
    runs one level deeper so the truncated series on both sides telescope to
    the same tail.
    """
    if bundle.label != "quadratic-critical":
        raise ValueError("relation check applies to the quadratic critical family")
    with workprec(p_bits):
        t = mpc(t)
        if not 0 < abs(t) < mpf(1) / 2:
            raise ValueError("t must lie in the punctured disk of radius 1/2")
        a_pt = bundle.section("a").at(t)
        v_pt = bundle.section("v").at(t)
        er_a = escape_rate(bundle.family, t, a_pt, depth + 1, p_bits)
        er_v = escape_rate(bundle.family, t, v_pt, depth, p_bits)
        # a(t) - 1 + t^2 = i sqrt2 t sqrt(1-t^2), cancellation-free
        shift = 1j * mpmath.sqrt(mpf(2)) * t * mpmath.sqrt(1 - t * t)
        return abs(er_a.value - er_v.value / 2 - mpmath.log(abs(shift)) / 2)
