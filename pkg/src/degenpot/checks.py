"""Self-check suites: one fast property run per module invariant.

Each check is a named callable that raises AssertionError (or any exception)
on failure; run_check prints a table and returns a process exit code.  The
whole battery is sized to finish in a few minutes at default precisions.
"""

from __future__ import annotations

import io
import random
import time
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc, workprec

from . import bifurcation, dip, dynamics, families, geometry, numerics, roots, scan
from .geometry import ProjPoint

__all__ = ["run_check", "CHECK_SUITES"]


def _rng(tag: str) -> random.Random:
    return random.Random("degenpot:" + tag)


def _rand_mpc(rng, scale=1.0) -> mpc:
    return mpc(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


# ---------------------------------------------------------------------------
# numerics
# ---------------------------------------------------------------------------


def check_series_ring():
    rng = _rng("series")
    with workprec(128):
        for _ in range(5):
            T = 24
            a = numerics.TruncatedSeries.from_coeffs(
                [_rand_mpc(rng) for _ in range(T + 1)], T
            )
            b = numerics.TruncatedSeries.from_coeffs(
                [_rand_mpc(rng) for _ in range(T + 1)], T
            )
            c = numerics.TruncatedSeries.from_coeffs(
                [_rand_mpc(rng) for _ in range(T + 1)], T
            )
            lhs = a.mul(b.add(c))
            rhs = a.mul(b).add(a.mul(c))
            err = max(
                abs(x - y) for x, y in zip(lhs.coefficients, rhs.coefficients)
            )
            assert err < mpf(2) ** -100, err


def check_series_inverse():
    rng = _rng("inverse")
    with workprec(128):
        T = 24
        coeffs = [mpc(1)] + [_rand_mpc(rng) for _ in range(T)]
        s = numerics.TruncatedSeries.from_coeffs(coeffs, T)
        prod = s.mul(s.inverse())
        assert abs(prod.coefficients[0] - 1) < mpf(2) ** -100
        assert max(abs(c) for c in prod.coefficients[1:]) < mpf(2) ** -90


def check_poly_bound():
    rng = _rng("bound")
    with workprec(128):
        p = numerics.ParamPoly([_rand_mpc(rng) for _ in range(6)])
        r = mpf("0.37")
        bound = p.bound_on_disk(r)
        for k in range(40):
            t = r * mpmath.exp(mpc(0, 2 * mpmath.pi * k / 40))
            assert abs(p.eval(t)) <= bound + mpf(2) ** -90


def check_binomial_series():
    with workprec(128):
        T = 40
        # (1 - t^2)^(1/2) squared recovers 1 - t^2
        s = numerics.binomial_series(mpf(1) / 2, mpc(-1), 2, T)
        sq = s.mul(s)
        assert abs(sq.coefficients[0] - 1) < mpf(2) ** -100
        assert abs(sq.coefficients[2] + 1) < mpf(2) ** -100
        rest = [abs(c) for i, c in enumerate(sq.coefficients) if i not in (0, 2)]
        assert max(rest) < mpf(2) ** -90


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------


def check_chordal_metric():
    rng = _rng("chordal")
    with workprec(128):
        for _ in range(30):
            p = ProjPoint(_rand_mpc(rng, 2), _rand_mpc(rng, 2))
            q = ProjPoint(_rand_mpc(rng, 2), _rand_mpc(rng, 2))
            d1 = geometry.chordal(p, q)
            d2 = geometry.chordal(q, p)
            assert abs(d1 - d2) < mpf(2) ** -100
            assert 0 <= d1 <= 1 + mpf(2) ** -100
            # scaling invariance, including huge scales
            s = mpmath.exp(mpc(rng.uniform(-300, 300), rng.uniform(-3, 3)))
            ps = ProjPoint(p.z * s, p.w * s)
            assert abs(geometry.chordal(ps, q) - d1) < mpf(2) ** -90


def check_chordal_infinity_identity():
    with workprec(128):
        rng = _rng("inf")
        for _ in range(20):
            z = _rand_mpc(rng, 3)
            lhs = geometry.chordal(geometry.affine_embed(z), ProjPoint(1, 0))
            rhs = 1 / mpmath.sqrt(1 + abs(z) ** 2)
            assert abs(lhs - rhs) < mpf(2) ** -100


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


def check_roots_reconstruct():
    rng = _rng("roots")
    with workprec(192):
        true = [_rand_mpc(rng, 2) for _ in range(5)]
        coeffs = [mpc(1)]
        for r in true:
            coeffs = [a - r * b for a, b in zip(coeffs + [mpc(0)], [mpc(0)] + coeffs)]
        found = roots.poly_roots(coeffs)
        for r in true:
            assert min(abs(r - f) for f in found) < mpf(2) ** -60


def check_roots_certification_rejects():
    with workprec(128):
        ok = roots.certify_roots([1, 0, -2], [mpmath.sqrt(2), -mpmath.sqrt(2)])
        bad = roots.certify_roots([1, 0, -2], [mpf(1), mpf(-1)])
        assert ok and not bad


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------


def _quad_bundle(prec=256):
    return families.build_quadratic_critical_family(
        families.ContinuedFraction.golden(), prec
    )


def check_escape_rate_homogeneity():
    rng = _rng("homog")
    b = _quad_bundle()
    with workprec(256):
        for _ in range(10):
            t = mpc(rng.uniform(0.05, 0.4), rng.uniform(-0.2, 0.2))
            p = ProjPoint(_rand_mpc(rng, 2), 1 + _rand_mpc(rng, 0.3))
            lam = mpmath.exp(_rand_mpc(rng, 2))
            base = dynamics.escape_rate(b.family, t, p, 48, 256)
            scaled = dynamics.escape_rate(
                b.family, t, ProjPoint(p.z * lam, p.w * lam), 48, 256
            )
            err = abs(scaled.value - base.value - mpmath.log(abs(lam)))
            assert err <= base.tail_bound + scaled.tail_bound + mpf(2) ** -200, err


def check_escape_rate_functional_equation():
    rng = _rng("funceq")
    b = _quad_bundle()
    d = b.family.degree
    with workprec(256):
        for _ in range(10):
            t = mpc(rng.uniform(0.05, 0.4), rng.uniform(-0.2, 0.2))
            p = ProjPoint(_rand_mpc(rng, 2), 1 + _rand_mpc(rng, 0.3))
            fat = b.family.at(t)
            img = fat.apply(p.z, p.w)
            base = dynamics.escape_rate(b.family, t, p, 49, 256)
            pushed = dynamics.escape_rate(b.family, t, ProjPoint(*img), 48, 256)
            err = abs(pushed.value - d * base.value)
            assert err <= d * base.tail_bound + pushed.tail_bound + mpf(2) ** -200, err


def check_tail_bound_honest():
    """Halved-depth value must sit within the halved-depth tail of the deep one."""
    b = _quad_bundle()
    with workprec(256):
        t = mpc("0.17", "0.05")
        p = b.section("v").at(t)
        shallow = dynamics.escape_rate(b.family, t, p, 24, 256)
        deep = dynamics.escape_rate(b.family, t, p, 96, 256)
        assert abs(shallow.value - deep.value) <= shallow.tail_bound


def check_degeneracy_refusal():
    b = _quad_bundle()
    try:
        dynamics.escape_rate(b.family, 0, ProjPoint(1, 1), 16, 128)
    except dynamics.DegenerateParameterError:
        return
    raise AssertionError("resultant zero at t = 0 was not refused")


def check_resultant_profile():
    rng = _rng("res")
    for bundle in (
        _quad_bundle(),
        families.build_rotation_family(
            families.ContinuedFraction.golden(), -1, prec=256
        ),
    ):
        with workprec(256):
            for _ in range(10):
                r = mpf(10) ** rng.uniform(-3, -0.31)
                t = r * mpmath.exp(mpc(0, 2 * mpmath.pi * rng.random()))
                fat = bundle.family.at(t)
                fat.check_nondegenerate()   # raises on failure
            assert abs(bundle.family.at(mpc(0)).resultant()) < mpf(2) ** -60


def check_min_sphere_certificate():
    """The certified lower bound must not exceed sampled sphere minima."""
    b = _quad_bundle()
    with workprec(256):
        fat = b.family.at(mpc("0.2", "0.1"))
        cert, heur = fat.min_sphere_log(certified=True)
        assert not heur
        for z, w in dynamics._sphere_points(64):
            m = max(abs(z), abs(w))
            pz, qz = fat.apply(z / m, w / m)
            assert mpmath.log(max(abs(pz), abs(qz))) >= cert


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def check_theta_postcondition():
    sched = families.DipSchedule.parse("2:10,4:200")
    th = families.construct_theta(sched, 512)
    table = dict(families.closeness_table(th, 4, 512))
    with workprec(512):
        assert 0 < table[2] < mpmath.exp(-10)
        assert 0 < table[4] < mpmath.exp(-200)


def check_cf_convergent_recurrence():
    th = families.construct_theta(families.DipSchedule.parse("3:20"), 256)
    conv = th.convergents(8)
    for k in range(2, 8):
        a = th.quotient(k + 1)
        assert conv[k][1] == a * conv[k - 1][1] + conv[k - 2][1]


def check_quadratic_critical_derivative():
    rng = _rng("crit")
    b = _quad_bundle()
    with workprec(256):
        for _ in range(20):
            t = mpf(rng.uniform(0.01, 0.49)) * mpmath.exp(
                mpc(0, 2 * mpmath.pi * rng.random())
            )
            res = families.quadratic_critical_derivative_residual(b, t, 256)
            assert res < mpf(2) ** -120, res


def check_perturbation_validation():
    lam = families.ContinuedFraction.golden().unit_root(128)
    phi = families.RationalMap((lam, 0), (1,))
    with workprec(128):
        try:
            families.PerturbationSpec(phi, mpc(0.5), mpf(0.75)).validate()
        except ValueError:
            pass
        else:
            raise AssertionError("zero of phi inside the punctured epsilon disk")


# ---------------------------------------------------------------------------
# dip
# ---------------------------------------------------------------------------


def check_dip_confirmed_stable():
    """A confirmed report must re-confirm at doubled precision and depth."""
    sched = families.DipSchedule.parse("3:30")
    th = families.construct_theta(sched, 1024)
    b = families.build_quadratic_critical_family(th, 256)
    rep = dip.find_dip_radius(b, "v", sched.entries[0], slack=3, p_bits=256, depth=32)
    assert rep.status == "confirmed", rep.status
    b2 = families.build_quadratic_critical_family(th, 512)
    with workprec(512):
        section = b2.section("v")
        again = dynamics.potential(
            b2.family, section.at, rep.located_radius, section.eta, 64, 512
        )
        # re-measure the located ring minimum at the stored radius
        best = None
        for a in range(8):
            ang = 2 * mpmath.pi * a / 8 + mpf(1) / 7
            t = rep.located_radius * mpmath.exp(mpc(0, 1) * ang)
            r = dynamics.potential(b2.family, section.at, t, section.eta, 64, 512)
            best = r.value if best is None else min(best, r.value)
        assert best <= rep.reference_level - rep.predicted_drop + rep.slack + mpf(1) / 1000


def check_dip_rejects_tiny_budget():
    sched = families.DipSchedule.parse("3:600")
    th = families.ContinuedFraction.golden()
    b = families.build_quadratic_critical_family(th, 128)
    try:
        dip.find_dip_radius(b, "v", sched.entries[0], p_bits=128)
    except dip.PrecisionBudgetError:
        return
    raise AssertionError("precision budget precheck did not fire")


# ---------------------------------------------------------------------------
# bifurcation
# ---------------------------------------------------------------------------


def check_lyapunov_deterministic():
    f = families.RationalMap((1, 0, 0), (1,))
    a = bifurcation.lyapunov(f, 2000, seed=11)
    b = bifurcation.lyapunov(f, 2000, seed=11)
    assert a == b
    assert abs(a.mean - 0.6931471805599453) < 0.05


def check_laplacian_harmonic_control():
    import math

    vals = []
    mesh = 17
    spacing = 0.02
    origin = complex(0.2, -0.16)
    for i in range(mesh):
        row = []
        for j in range(mesh):
            t = origin + i * spacing + 1j * j * spacing
            row.append(math.log(abs(t)))
        vals.append(tuple(row))
    grid = bifurcation.PotentialGrid(tuple(vals), spacing, origin)
    lap = bifurcation.laplacian_stencil(grid)
    worst = max(
        abs(x) for rowv in lap for x in rowv if x is not None
    )
    # fourth-derivative bound of log|t| on this window keeps the defect small
    assert worst < 0.05, worst


def check_relation_residual():
    b = _quad_bundle()
    with workprec(256):
        res = bifurcation.relation_check_quadratic(b, mpc("0.08", "0.21"), 64, 256)
        assert res < mpf(10) ** -20, res


# ---------------------------------------------------------------------------
# cli / scan plumbing
# ---------------------------------------------------------------------------


def check_csv_roundtrip():
    cfg = scan.RunConfig(family="power", radius_count=3, angles=3, depth=16, prec=128)
    rows = scan.run_scan(cfg)
    text = scan.write_csv(rows, None)
    again = scan.write_csv(scan.read_csv(io.StringIO(text)), None)
    assert text == again
    assert scan.write_csv(scan.run_scan(cfg), None) == text


CHECK_SUITES = {
    "numerics": [
        ("series ring distributivity", check_series_ring),
        ("series inverse", check_series_inverse),
        ("poly disk bound", check_poly_bound),
        ("binomial series square", check_binomial_series),
    ],
    "geometry": [
        ("chordal symmetry/scale invariance", check_chordal_metric),
        ("chordal infinity identity", check_chordal_infinity_identity),
    ],
    "roots": [
        ("root reconstruction", check_roots_reconstruct),
        ("certification rejects bad roots", check_roots_certification_rejects),
    ],
    "dynamics": [
        ("escape rate homogeneity", check_escape_rate_homogeneity),
        ("escape rate functional equation", check_escape_rate_functional_equation),
        ("tail bound honest", check_tail_bound_honest),
        ("degeneracy refusal at t=0", check_degeneracy_refusal),
        ("resultant profile", check_resultant_profile),
        ("min-sphere certificate", check_min_sphere_certificate),
    ],
    "families": [
        ("theta schedule postcondition", check_theta_postcondition),
        ("convergent recurrence", check_cf_convergent_recurrence),
        ("critical derivative vanishes", check_quadratic_critical_derivative),
        ("perturbation validation", check_perturbation_validation),
    ],
    "dip": [
        ("confirmed dip re-measures", check_dip_confirmed_stable),
        ("precision budget precheck", check_dip_rejects_tiny_budget),
    ],
    "bifurcation": [
        ("lyapunov deterministic", check_lyapunov_deterministic),
        ("laplacian harmonic control", check_laplacian_harmonic_control),
        ("critical relation residual", check_relation_residual),
    ],
    "cli": [
        ("csv round-trip and determinism", check_csv_roundtrip),
    ],
}


def run_check(filter_name=None, out=None) -> int:
    """Run the selected suites, print a table, return 0 iff all passed."""
    import sys

    out = out or sys.stdout
    names = list(CHECK_SUITES)
    if filter_name is not None:
        if filter_name not in CHECK_SUITES:
            raise scan.ConfigError(
                "unknown suite %r (have: %s)" % (filter_name, ", ".join(names))
            )
        names = [filter_name]
    failures = 0
    width = max(
        len("%s: %s" % (suite, name))
        for suite in names
        for name, _ in CHECK_SUITES[suite]
    )
    for suite in names:
        for name, fn in CHECK_SUITES[suite]:
            label = "%s: %s" % (suite, name)
            start = time.time()
            try:
                fn()
            except Exception as exc:   # report, keep going
                failures += 1
                out.write(
                    "%-*s  FAIL  %5.1fs  %s\n"
                    % (width, label, time.time() - start, exc)
                )
            else:
                out.write("%-*s  pass  %5.1fs\n" % (width, label, time.time() - start))
    out.write(
        "%d checks, %d failed\n"
        % (sum(len(CHECK_SUITES[s]) for s in names), failures)
    )
    return 0 if failures == 0 else 1
