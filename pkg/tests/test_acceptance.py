"""End-to-end acceptance gate: twelve numbered criteria.

Each test prints one "[acceptance NN] ... PASS/FAIL" line and enforces the
stated tolerances and runtime budgets.  Frozen reference values were computed
by independent evaluations before being asserted here.
"""

import io
import math
import random
import time
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc, workprec

from degenpot.bifurcation import (
    PotentialGrid,
    laplacian_stencil,
    lyapunov,
    potential_grid,
    relation_check_quadratic,
)
from degenpot.checks import run_check
from degenpot.dip import dip_predict, find_dip_radius
from degenpot.dynamics import (
    HomogeneousFamily,
    escape_rate,
    evaluate,
    iteration_identity_check,
    lemma22_constant,
    orbit_valuations,
    potential,
)
from degenpot.families import (
    ContinuedFraction,
    DipSchedule,
    RationalMap,
    build_quadratic_critical_family,
    build_rotation_family,
    condition41_partial_sums,
    construct_theta,
    prop41_ratio_check,
    quadratic_critical_derivative_residual,
)
from degenpot.geometry import ProjPoint
from degenpot.numerics import ParamPoly


def _criterion(number, name, budget_seconds, body):
    start = time.monotonic()
    try:
        body()
    except BaseException:
        print("[acceptance %02d] %s: FAIL" % (number, name))
        raise
    elapsed = time.monotonic() - start
    assert elapsed < budget_seconds, (
        "criterion %d exceeded its %ds budget (%.1fs)"
        % (number, budget_seconds, elapsed)
    )
    print("[acceptance %02d] %s: PASS (%.1fs)" % (number, name, elapsed))


def _golden_quadratic(prec):
    return build_quadratic_critical_family(ContinuedFraction.golden(), prec)


def _golden_rotation(prec):
    return build_rotation_family(
        ContinuedFraction.golden(), h=-1, epsilon=1, prec=prec
    )


# -- 1 ----------------------------------------------------------------------


def test_acceptance_01_power_map_escape_rate():
    def body():
        zero = ParamPoly.zero()
        cp = [ParamPoly([1]), zero, zero]
        cq = [zero, zero, ParamPoly([1])]
        fam = HomogeneousFamily(2, cp, cq)
        with workprec(128):
            res = escape_rate(fam, mpc("0.1"), ProjPoint(2, 1), 64, 128)
            assert res.tail_bound <= mpf(10) ** -15, res.tail_bound
            assert abs(res.value - mpmath.log(2)) <= res.tail_bound

    _criterion(1, "power-map escape rate", 1.0, body)


# -- 2 ----------------------------------------------------------------------


def test_acceptance_02_escape_rate_axioms():
    def body():
        b = _golden_quadratic(256)
        d = b.family.degree
        rng = random.Random(2024)
        with workprec(256):
            eps = mpf(2) ** (-256 + 16)
            for _ in range(100):
                r = 0.05 + 0.4 * rng.random()
                ang = 2 * math.pi * rng.random()
                t = mpc(r * math.cos(ang), r * math.sin(ang))
                p = ProjPoint(
                    mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                    mpc(rng.uniform(-2, 2), rng.uniform(1, 2)),
                )
                lam = mpc(rng.uniform(-3, 3), rng.uniform(-3, 3))
                if abs(lam) < 0.1:
                    lam += 1
                base = escape_rate(b.family, t, p, 64, 256)
                scaled = escape_rate(
                    b.family, t, ProjPoint(lam * p.z, lam * p.w), 64, 256
                )
                resid = abs(scaled.value - base.value - mpmath.log(abs(lam)))
                assert resid <= 2 * base.tail_bound + eps, resid
                image = escape_rate(b.family, t, evaluate(b.family, t, p), 64, 256)
                resid2 = abs(image.value - d * base.value)
                assert resid2 <= (d + 1) * base.tail_bound, resid2

    _criterion(2, "escape-rate axioms, 100 random triples", 30.0, body)


# -- 3 ----------------------------------------------------------------------


def test_acceptance_03_local_heights():
    def body():
        # ten steps of the rotation orbit need the wider audit window
        rot = _golden_rotation(3072)
        with workprec(3072):
            series = rot.section("a").series_at(300)
        prof = orbit_valuations(rot.family, series, 10, 300, 3072)
        assert prof.orders == (0,) * 10, prof.orders
        assert prof.eta == Fraction(0)

        quad = _golden_quadratic(2048)
        with workprec(2048):
            series = quad.section("a").series_at(300)
        prof = orbit_valuations(quad.family, series, 8, 300, 2048)
        assert prof.orders == tuple(2 ** (n - 1) for n in range(1, 9)), prof.orders
        assert prof.eta == Fraction(1, 2)

    _criterion(3, "local heights eta = 0 and eta = 1/2", 60.0, body)


# -- 4 ----------------------------------------------------------------------


def test_acceptance_04_dip_one_scale_with_control():
    def body():
        sched = DipSchedule.parse("3:60")
        th = construct_theta(sched, 1024)
        b = build_quadratic_critical_family(th, 512)
        with workprec(512):
            c_plus = lemma22_constant(b.family, samples=0).rigorous
            c_corr = c_plus / (b.degree - 1) + b.metric_constant
            delta1 = dip_predict(b, sched.entries[0])
            assert abs(delta1 - (mpf(60) / 8 - c_corr)) < mpf(2) ** -400
        rep = find_dip_radius(b, "v", sched.entries[0], slack=3, p_bits=512)
        assert rep.status == "confirmed", rep
        with workprec(512):
            assert mpmath.exp(mpf(-240)) < rep.located_radius < mpf(1) / 4
            assert rep.measured_min <= rep.reference_level - delta1 + 3

        control = _golden_quadratic(2048)
        crep = find_dip_radius(control, "v", sched.entries[0], slack=3, p_bits=2048)
        assert crep.status == "not found", crep
        # the lowest ring minimum of the whole search stays near the reference
        assert crep.measured_min >= crep.reference_level - 2

    _criterion(4, "dip reproduction, one scale + control", 300.0, body)


# -- 5 ----------------------------------------------------------------------


def test_acceptance_05_dip_two_scales():
    def body():
        sched = DipSchedule.parse("3:60,6:1500")
        prec = 9216
        th = construct_theta(sched, prec)
        b = build_quadratic_critical_family(th, prec)
        rep1 = find_dip_radius(b, "v", sched.entries[0], slack=3, p_bits=prec, j=1)
        rep2 = find_dip_radius(b, "v", sched.entries[1], slack=3, p_bits=prec, j=2)
        assert rep1.status == "confirmed", rep1
        assert rep2.status == "confirmed", rep2
        assert rep2.predicted_drop > rep1.predicted_drop
        assert rep2.measured_drop - rep1.measured_drop >= 10

    _criterion(5, "dip reproduction, two scales", 1800.0, body)


# -- 6 ----------------------------------------------------------------------


def test_acceptance_06_condition_dichotomy():
    def body():
        # convergent side: phi = z^2, a0 = 1/2, h = 0, d = 3
        phi = RationalMap([1, 0, 0])
        sums = condition41_partial_sums(phi, mpf(1) / 2, 0, 3, 40, 256)
        with workprec(256):
            assert mpf("-2.25") <= sums[40] <= mpf("-2.15"), sums[40]
        geom, _ = prop41_ratio_check(phi, mpf(1) / 2, 0, 3, 40, 256)
        assert geom >= mpf("-0.85"), geom

        # divergent side: scheduled rotation; the engineered close return at
        # orbit index 2 contributes about -60/4 to S_3
        th = construct_theta(DipSchedule.parse("3:60"), 1024)
        with workprec(512):
            lam = th.unit_root(512)
            sums = condition41_partial_sums(RationalMap([lam, 0]), lam, 1, 2, 3, 512)
            assert sums[3] <= mpf(-13), sums[3]

    _criterion(6, "condition dichotomy diagnostics", 10.0, body)


# -- 7 ----------------------------------------------------------------------


def test_acceptance_07_iteration_identity():
    def body():
        rng = random.Random(7)
        phi_coords = ([1, 0, 0], [0, 0, 1])
        with workprec(128):
            done = 0
            while done < 50:
                n = rng.randint(1, 5)
                p = ProjPoint(
                    mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                    mpc(rng.uniform(-2, 2), rng.uniform(1, 2)),
                )
                resid = iteration_identity_check(phi_coords, mpc(-1), n, p, 128)
                assert resid <= mpf(10) ** -25, resid
                done += 1

    _criterion(7, "iteration identity, 50 random points", 30.0, body)


# -- 8 ----------------------------------------------------------------------


def test_acceptance_08_structural_identities():
    def body():
        b = _golden_quadratic(256)
        rng = random.Random(8)
        with workprec(256):
            for _ in range(20):
                t = mpc(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
                resid = quadratic_critical_derivative_residual(b, t, 256)
                assert resid <= mpf(2) ** -128, resid
            for _ in range(10):
                r = 0.05 + 0.35 * rng.random()
                ang = 2 * math.pi * rng.random()
                t = mpc(r * math.cos(ang), r * math.sin(ang))
                resid = relation_check_quadratic(b, t, 64, 256)
                assert resid <= mpf(10) ** -20, resid

    _criterion(8, "critical-point and relation identities", 60.0, body)


# -- 9 ----------------------------------------------------------------------


def test_acceptance_09_ring_upper_bound():
    def body():
        for b in (_golden_rotation(192), _golden_quadratic(192)):
            sec = b.section("a")

            def ring_max(rho):
                best = None
                with workprec(192):
                    for a in range(64):
                        ang = 2 * mpmath.pi * a / 64 + mpf(1) / 7
                        t = rho * mpmath.exp(mpc(0, 1) * ang)
                        r = potential(b.family, sec.at, t, sec.eta, 32, 192)
                        best = r.value if best is None else max(best, r.value)
                return best

            ref = ring_max(mpf(1) / 2)
            for rho in (mpf("0.4"), mpf("0.2"), mpf("0.1"), mpf("0.01")):
                assert ring_max(rho) <= ref + 1

    _criterion(9, "ring maxima bounded by outer reference", 120.0, body)


# -- 10 ---------------------------------------------------------------------


def test_acceptance_10_lyapunov():
    def body():
        log2 = math.log(2)
        a = lyapunov(RationalMap([1, 0, 0]), 100000, seed=0)
        assert abs(a.mean - log2) <= 0.02 * log2, a.mean
        assert lyapunov(RationalMap([1, 0, 0]), 100000, seed=0) == a
        b = lyapunov(RationalMap([1, 0, -2]), 100000, seed=0)
        assert abs(b.mean - log2) <= 0.03 * log2, b.mean
        assert lyapunov(RationalMap([1, 0, -2]), 100000, seed=0) == b

    _criterion(10, "Lyapunov Monte Carlo, deterministic", 120.0, body)


# -- 11 ---------------------------------------------------------------------


def test_acceptance_11_subharmonicity_proxy():
    def body():
        b = _golden_rotation(192)
        sec = b.section("a")
        grid = potential_grid(
            b.family, sec.at, sec.eta, 0j, 0.4, 33, 32, 192, r_min=0.1, r_max=0.4
        )
        d2 = grid.spacing * grid.spacing
        assert grid.tail_bound <= d2 / 100, grid.tail_bound
        lap = laplacian_stencil(grid)
        densities = [x for row in lap for x in row if x is not None]
        assert densities
        # laplacian_stencil returns the measure density (stencil / 2 pi d^2);
        # the raw five-point difference is density * 2 pi * d^2
        raw_min = min(densities) * 2 * math.pi * d2
        assert raw_min >= -10 * d2, raw_min

        # harmonic control on the same mesh geometry
        mesh, hw = 33, 0.4
        spacing = 2 * hw / (mesh - 1)
        origin = complex(-hw, -hw)
        vals = []
        for i in range(mesh):
            row = []
            for j in range(mesh):
                t = origin + i * spacing + 1j * j * spacing
                row.append(math.log(abs(t)) if 0.1 <= abs(t) <= 0.4 else None)
            vals.append(tuple(row))
        clap = laplacian_stencil(PotentialGrid(tuple(vals), spacing, origin))
        raws = [
            x * 2 * math.pi * d2 for row in clap for x in row if x is not None
        ]
        assert max(abs(x) for x in raws) <= 10 * d2, max(abs(x) for x in raws)

    _criterion(11, "subharmonicity proxy on the annulus grid", 300.0, body)


# -- 12 ---------------------------------------------------------------------


def test_acceptance_12_run_check():
    def body():
        buf = io.StringIO()
        assert run_check(out=buf) == 0, buf.getvalue()

    _criterion(12, "full invariant suite exits clean", 600.0, body)
