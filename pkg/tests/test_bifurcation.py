"""Lyapunov Monte Carlo, potential grids, and the quadratic relation."""

import math

import mpmath
import pytest
from mpmath import mpf, mpc, workprec

from degenpot.bifurcation import (
    PotentialGrid,
    critical_potential_sum,
    laplacian_stencil,
    lyapunov,
    potential_grid,
    relation_check_quadratic,
)
from degenpot.families import (
    ContinuedFraction,
    RationalMap,
    build_quadratic_critical_family,
    build_rotation_family,
)


def test_lyapunov_power_map_closed_form():
    # L(z^d) = log d exactly
    est = lyapunov(RationalMap([1, 0, 0, 0]), 20000, seed=2)
    assert abs(est.mean - math.log(3)) < 0.03
    assert est.std_error < 0.02


def test_lyapunov_deterministic_across_reruns():
    f = RationalMap([1, 0, -2])
    a = lyapunov(f, 5000, seed=17)
    b = lyapunov(f, 5000, seed=17)
    assert a == b
    c = lyapunov(f, 5000, seed=18)
    assert c.mean != a.mean


def test_lyapunov_positivity_with_error_bars():
    for coeffs in ([1, 0, 0], [1, 0, -2], [1, 0, 1, 0]):
        est = lyapunov(RationalMap(coeffs), 5000, seed=3)
        assert est.mean > -3 * est.std_error


def test_critical_potential_sum_combines_tails():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 192)
    secs = [b.section("c_plus"), b.section("c_minus")]
    with workprec(192):
        total, tail = critical_potential_sum(b.family, secs, mpc("0.2", "0.1"), 48, 192)
        assert tail > 0
        assert mpmath.isfinite(total)
    with pytest.raises(ValueError):
        critical_potential_sum(b.family, [], mpc("0.2"), 48, 192)


def test_potential_grid_respects_annulus_mask():
    th = ContinuedFraction.golden()
    b = build_rotation_family(th, h=-1, epsilon=1, prec=128)
    sec = b.section("a")
    grid = potential_grid(
        b.family, sec.at, sec.eta, 0j, 0.4, 9, 16, 128, r_min=0.15, r_max=0.4
    )
    assert grid.shape == (9, 9)
    # the center of the mesh is inside the excluded disk
    assert grid.values[4][4] is None
    assert any(x is not None for row in grid.values for x in row)
    assert grid.tail_bound > 0


def test_laplacian_stencil_on_exact_harmonic_grid():
    mesh, spacing, origin = 17, 0.02, complex(0.2, -0.16)
    vals = tuple(
        tuple(
            math.log(abs(origin + i * spacing + 1j * j * spacing))
            for j in range(mesh)
        )
        for i in range(mesh)
    )
    lap = laplacian_stencil(PotentialGrid(vals, spacing, origin))
    inner = [x for row in lap for x in row if x is not None]
    assert len(inner) == (mesh - 2) ** 2
    # log|t| is harmonic; the stencil defect is pure discretization error
    assert max(abs(x) for x in inner) < 0.05


def test_laplacian_stencil_positive_on_subharmonic_peak():
    # |t|^2 has Laplacian 4, so the scaled stencil must sit near 4/(2 pi)
    mesh, spacing = 9, 0.1
    origin = complex(-0.4, -0.4)
    vals = tuple(
        tuple(abs(origin + i * spacing + 1j * j * spacing) ** 2 for j in range(mesh))
        for i in range(mesh)
    )
    lap = laplacian_stencil(PotentialGrid(vals, spacing, origin))
    inner = [x for row in lap for x in row if x is not None]
    for x in inner:
        assert abs(x - 4 / (2 * math.pi)) < 1e-9


def test_quadratic_relation_residual():
    th = ContinuedFraction.golden()
    b = build_quadratic_critical_family(th, 256)
    with workprec(256):
        for t in (mpc("0.08", "0.21"), mpc("0.3"), mpc("-0.1", "0.15")):
            assert relation_check_quadratic(b, t, 64, 256) < mpf(10) ** -20
