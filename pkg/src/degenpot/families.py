"""Builders for the degenerating families, rotation-number synthesis, and
orbit-closeness diagnostics.

Rotation numbers are stored exactly as continued fractions with an implicit
all-ones tail (so every stored number is irrational); floating evaluations
are derived from convergents at 4x the consumer precision and are never the
source of truth.  The scheduler replaces a Baire-category choice of rotation
number by an explicit constructive one: prescribed return times n_j and gap
exponents g_j are realized by choosing one very large partial quotient.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import mpmath
from mpmath import mp, mpf, mpc, workprec

from .geometry import ProjPoint, affine_embed, chordal
from .numerics import (
    ParamPoly,
    TruncatedSeries,
    binomial_series,
    default_zero_tol,
    to_mpc,
)
from .dynamics import HomogeneousFamily, ParamSeriesPoint
from .roots import poly_roots

__all__ = [
    "InfeasibleScheduleError",
    "ExactOrbitHitError",
    "ContinuedFraction",
    "DipSchedule",
    "DipScheduleEntry",
    "PerturbationSpec",
    "RationalMap",
    "Section",
    "FamilyBundle",
    "construct_theta",
    "closeness_table",
    "build_rotation_family",
    "build_unicritical_family",
    "build_quadratic_critical_family",
    "condition41_partial_sums",
    "prop41_ratio_check",
    "theta_to_json",
    "theta_from_json",
]


class InfeasibleScheduleError(ValueError):
    pass


class ExactOrbitHitError(ValueError):
    pass


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------


class ContinuedFraction:
    """An irrational in (0, 1) as the infinite CF [0; a_1, a_2, ...].

    Only a finite prefix of partial quotients is stored; the tail is
    implicitly all ones, so the represented number is always irrational
    (there is deliberately no way to construct a rational cut-off).
    """

    def __init__(self, prefix=(), label=""):
        prefix = tuple(int(a) for a in prefix)
        if any(a < 1 for a in prefix):
            raise ValueError("partial quotients must be positive integers")
        self.prefix = prefix
        self.label = label

    @classmethod
    def golden(cls) -> "ContinuedFraction":
        """[0; 1, 1, 1, ...]: the worst-approximable rotation number."""
        return cls((), label="golden")

    def quotient(self, k: int) -> int:
        """k-th partial quotient, 1-indexed; the implicit tail is 1."""
        if k < 1:
            raise IndexError("partial quotients are 1-indexed")
        return self.prefix[k - 1] if k <= len(self.prefix) else 1

    def convergents(self, count: int):
        """First ``count`` convergents (p_k, q_k), k = 1..count."""
        p_prev, q_prev = 1, 0
        p_cur, q_cur = 0, 1
        out = []
        for k in range(1, count + 1):
            a = self.quotient(k)
            p_cur, p_prev = a * p_cur + p_prev, p_cur
            q_cur, q_prev = a * q_cur + q_prev, q_cur
            out.append((p_cur, q_cur))
        return out

    def convergent_for_precision(self, prec: int):
        """Convergent (p, q) with q_k * q_{k+1} > 2**(prec+32), so the
        absolute error of p/q is below 2**-(prec+32)."""
        bound = 1 << (prec + 32)
        p_prev, q_prev = 1, 0
        p_cur, q_cur = 0, 1
        k = 0
        while True:
            k += 1
            a = self.quotient(k)
            p_cur, p_prev = a * p_cur + p_prev, p_cur
            q_cur, q_prev = a * q_cur + q_prev, q_cur
            a_next = self.quotient(k + 1)
            q_next = a_next * q_cur + q_prev
            if q_cur * q_next > bound:
                return p_cur, q_cur

    def theta(self, prec: int) -> mpf:
        """The number itself at the given binary precision."""
        p, q = self.convergent_for_precision(prec)
        with workprec(prec + 32):
            val = mpf(p) / q
        with workprec(prec):
            return val + 0

    def unit_root(self, consumer_prec: int) -> mpc:
        """exp(2*pi*i*theta) at 4x the consumer precision, rounded down."""
        with workprec(4 * consumer_prec):
            th = self.theta(4 * consumer_prec)
            val = mpmath.exp(2j * mpmath.pi * th)
        with workprec(consumer_prec):
            return mpc(val.real + 0, val.imag + 0)

    def __repr__(self):
        shown = ",".join(
            str(a) if a < 10**8 else "~10^%d" % len(str(a)) for a in self.prefix[:6]
        )
        return "ContinuedFraction([0;%s,1...]%s)" % (
            shown,
            " " + self.label if self.label else "",
        )


# ---------------------------------------------------------------------------
# dip schedules and theta construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DipScheduleEntry:
    n: int
    gap_exponent: mpf

    def __post_init__(self):
        if self.n < 1:
            raise InfeasibleScheduleError("return time must be >= 1")
        if not self.gap_exponent > 0:
            raise InfeasibleScheduleError("gap exponent must be positive")


@dataclass(frozen=True)
class DipSchedule:
    entries: tuple
    gap_budget: float = 1e6   # largest representable gap exponent

    def __init__(self, entries, gap_budget=1e6):
        ents = tuple(
            e if isinstance(e, DipScheduleEntry) else DipScheduleEntry(int(e[0]), mpf(e[1]))
            for e in entries
        )
        ns = [e.n for e in ents]
        if ns != sorted(ns) or len(set(ns)) != len(ns):
            raise InfeasibleScheduleError("return times must be strictly increasing")
        for e in ents:
            if e.gap_exponent > gap_budget:
                raise InfeasibleScheduleError(
                    "gap exponent %s exceeds the configured budget" % e.gap_exponent
                )
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "gap_budget", gap_budget)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @staticmethod
    def parse(text: str) -> "DipSchedule":
        """Parse "n:g,n:g" (empty string -> empty schedule)."""
        text = text.strip()
        if not text:
            return DipSchedule(())
        entries = []
        for part in text.split(","):
            n_str, g_str = part.split(":")
            entries.append((int(n_str), mpf(g_str)))
        return DipSchedule(entries)


def construct_theta(schedule: DipSchedule, precision: int = 256) -> ContinuedFraction:
    """Rotation number whose orbit returns within exp(-g_j) of 1 at time n_j.

    The first return time n_1 becomes a convergent denominator (a_1 = n_1);
    one large partial quotient then pins every scheduled gap at once, which
    requires each later n_j to be a multiple of n_1.  The closeness
    postcondition is re-verified numerically at 4x the requested precision.
    """
    if len(schedule) == 0:
        return ContinuedFraction.golden()
    entries = list(schedule)
    n1 = entries[0].n
    for e in entries[1:]:
        if e.n % n1 != 0:
            raise InfeasibleScheduleError(
                "return time %d is not reachable: it must be a multiple of %d"
                % (e.n, n1)
            )
    # a_2 >= ceil(2*pi*exp(g)*n/n1^2) for every scheduled (n, g)
    big = 0
    for e in entries:
        gbits = int(float(e.gap_exponent) / 0.693) + 64
        with workprec(max(128, gbits)):
            val = mpmath.ceil(2 * mpmath.pi * mpmath.exp(e.gap_exponent) * e.n / n1**2)
            big = max(big, int(val))
    cf = ContinuedFraction((n1, big), label="scheduled")

    with workprec(4 * precision):
        th = cf.theta(4 * precision)
        for e in entries:
            gap = 2 * abs(mpmath.sin(mpmath.pi * e.n * th))
            if not (0 < gap < mpmath.exp(-e.gap_exponent)):
                raise InfeasibleScheduleError(
                    "postcondition failed at n = %d (gap %s)" % (e.n, mpmath.nstr(gap, 8))
                )
    return cf


def closeness_table(theta: ContinuedFraction, N: int, precision: int = 256):
    """Chordal gaps [1, e^(2 pi i n theta)] for n = 1..N, all strictly positive.

    The chordal distance between unit-circle points 1 and e^(i alpha) is
    |e^(i alpha) - 1| / 2 = |sin(alpha/2)|.
    """
    out = []
    with workprec(4 * precision):
        th = theta.theta(4 * precision)
        for n in range(1, N + 1):
            gap = abs(mpmath.sin(mpmath.pi * n * th))
            if gap == 0:
                raise ExactOrbitHitError("exact return at n = %d" % n)
            with workprec(precision):
                out.append((n, gap + 0))
    return out


# ---------------------------------------------------------------------------
# rational maps in one variable (for perturbation specs and diagnostics)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """phi = num/den with leading-first univariate coefficient lists."""

    num: tuple
    den: tuple

    def __init__(self, num, den=(1,)):
        object.__setattr__(self, "num", tuple(to_mpc(c) for c in num))
        object.__setattr__(self, "den", tuple(to_mpc(c) for c in den))

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def _eval_poly(self, coeffs, z):
        acc = mpc(0)
        for c in coeffs:
            acc = acc * z + c
        return acc

    def __call__(self, z):
        if z == mpmath.inf:
            dn, dd = len(self.num) - 1, len(self.den) - 1
            if dn > dd:
                return mpmath.inf
            if dn < dd:
                return mpc(0)
            return self.num[0] / self.den[0]
        num = self._eval_poly(self.num, z)
        den = self._eval_poly(self.den, z)
        if den == 0:
            return mpmath.inf
        return num / den

    def derivative_at(self, z) -> mpc:
        dnum = [c * (len(self.num) - 1 - i) for i, c in enumerate(self.num[:-1])]
        dden = [c * (len(self.den) - 1 - i) for i, c in enumerate(self.den[:-1])]
        n = self._eval_poly(self.num, z)
        d = self._eval_poly(self.den, z)
        np_ = self._eval_poly(dnum, z) if dnum else mpc(0)
        dp = self._eval_poly(dden, z) if dden else mpc(0)
        if d == 0:
            raise ZeroDivisionError("derivative at a pole")
        return (np_ * d - n * dp) / (d * d)


@dataclass(frozen=True)
class PerturbationSpec:
    """The data (phi, h, epsilon, m) of the perturbed family
    f_t = phi(z) (z - h - eps t^m) / (z - h + eps t^m)."""

    phi: RationalMap
    h: mpc
    epsilon: mpf
    t_exponent: int = 1

    def __init__(self, phi, h, epsilon, t_exponent=1):
        if t_exponent not in (1, 2):
            raise ValueError("t exponent must be 1 or 2")
        epsilon = mpf(epsilon)
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "h", mpc(h))
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "t_exponent", t_exponent)

    def validate(self):
        """phi must have no zero or pole at distance in (0, epsilon) from h,
        and numerator/denominator must share no root at working precision."""
        tol = default_zero_tol()
        zeros = poly_roots(list(self.phi.num)) if len(self.phi.num) > 1 else []
        poles = poly_roots(list(self.phi.den)) if len(self.phi.den) > 1 else []
        for rz in zeros:
            for rp in poles:
                if abs(rz - rp) < tol:
                    raise ValueError("phi has a common numerator/denominator root")
        for r in zeros + poles:
            dist = abs(r - self.h)
            if tol < dist < self.epsilon:
                raise ValueError(
                    "phi has a zero or pole at distance %s from h, inside the "
                    "perturbation annulus" % mpmath.nstr(dist, 8)
                )


# ---------------------------------------------------------------------------
# family bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """A marked point of the family: closed-form evaluation plus (optionally)
    a truncated-series model of its homogeneous lift near t = 0."""

    name: str
    at: Callable          # t -> ProjPoint
    eta: Fraction
    series_at: Optional[Callable] = None   # truncation -> ParamSeriesPoint


@dataclass(frozen=True)
class FamilyBundle:
    """A built family together with its marked sections and dip metadata."""

    family: HomogeneousFamily
    sections: dict
    theta: Optional[ContinuedFraction]
    h: mpc
    epsilon: mpf
    dip_index_offset: int      # orbit index of closest approach is n - offset
    metric_constant: mpf       # max-norm vs chordal comparison, see dip module
    t_exponent: int = 1        # perturbation enters as t**t_exponent
    label: str = ""

    @property
    def degree(self):
        return self.family.degree

    def section(self, name: str) -> Section:
        if name not in self.sections:
            raise KeyError(
                "family %r has no section %r (have: %s)"
                % (self.label, name, ", ".join(sorted(self.sections)))
            )
        return self.sections[name]


def _metric_constant(h, epsilon) -> mpf:
    # |z - h w| / ||(z,w)||_max vs the chordal gap: Euclidean lift norms cost
    # a factor sqrt(2), the h-lift a factor sqrt(1+|h|^2), the perturbation
    # scale a factor epsilon
    return (
        mpmath.log(2)
        + abs(mpmath.log(mpf(epsilon)))
        + mpmath.log(mpmath.sqrt(1 + abs(mpc(h)) ** 2))
    )


def _mul_linear(coeffs, lin1: ParamPoly):
    """Multiply a homogeneous form (coefficient list, z-descending) by the
    linear form z + lin1 * w."""
    coeffs = [c if isinstance(c, ParamPoly) else ParamPoly([c]) for c in coeffs]
    out = [ParamPoly.zero() for _ in range(len(coeffs) + 1)]
    for i, c in enumerate(coeffs):
        out[i] = out[i].add(c)
        out[i + 1] = out[i + 1].add(c.mul(lin1))
    return out


def _perturbed_family(spec: PerturbationSpec, prec: int, name: str) -> HomogeneousFamily:
    """Homogenize f_t = phi(z) (z - h - eps t^m)/(z - h + eps t^m)."""
    with workprec(prec):
        e = spec.phi.degree
        num = list(spec.phi.num)
        den = list(spec.phi.den)
        # pad to formal degree e (homogenization keeps total degree d = e+1)
        num = [mpc(0)] * (e + 1 - len(num)) + num
        den = [mpc(0)] * (e + 1 - len(den)) + den
        m = spec.t_exponent
        lin_minus = ParamPoly([-spec.h] + [0] * (m - 1) + [-spec.epsilon])
        lin_plus = ParamPoly([-spec.h] + [0] * (m - 1) + [spec.epsilon])
        coord_p = _mul_linear(num, lin_minus)
        coord_q = _mul_linear(den, lin_plus)
        return HomogeneousFamily(e + 1, coord_p, coord_q, name=name)


def build_rotation_family(
    theta: ContinuedFraction,
    h,
    epsilon=1,
    t_exponent: int = 1,
    prec: int = 128,
) -> FamilyBundle:
    """Degree-2 family perturbing the rotation z -> e^(2 pi i theta) z near h.

    The marked section is the constant lift (1, 1) of the recurrent point 1.
    """
    with workprec(prec):
        h = mpc(h)
        if abs(abs(h) - 1) > mpf(2) ** (-prec + 8):
            raise ValueError("h must lie on the unit circle")
        lam = theta.unit_root(prec)
        spec = PerturbationSpec(RationalMap([lam, 0]), h, epsilon, t_exponent)
        spec.validate()
        fam = _perturbed_family(spec, prec, name="rotation")
        one = ProjPoint(1, 1)
        sections = {
            "a": Section(
                "a",
                lambda t: one,
                Fraction(0),
                lambda T: ParamSeriesPoint(
                    TruncatedSeries.constant(1, T), TruncatedSeries.constant(1, T)
                ),
            )
        }
        return FamilyBundle(
            family=fam,
            sections=sections,
            theta=theta,
            h=h,
            epsilon=mpf(epsilon),
            dip_index_offset=0,
            metric_constant=_metric_constant(h, epsilon),
            t_exponent=t_exponent,
            label="rotation",
        )


@dataclass(frozen=True)
class UnicriticalBlueprint:
    """phi(z) = lam (z - a0)^(d-1) with critical value 0 and an indifferent
    fixed point of multiplier lam; the degenerating family still needs a
    caller-supplied h (no constructive recurrence schedule exists here)."""

    d: int
    lam: mpc
    a0: mpc
    phi: RationalMap
    theta: ContinuedFraction
    prec: int

    def multiplier_residual(self) -> mpf:
        """min over fixed points z* of |phi'(z*) - lam|."""
        with workprec(self.prec):
            coeffs = list(self.phi.num)
            coeffs[-2] -= 1  # phi(z) - z
            best = None
            for z in poly_roots(coeffs):
                r = abs(self.phi.derivative_at(z) - self.lam)
                best = r if best is None else min(best, r)
            return best

    def build(self, h, epsilon) -> FamilyBundle:
        with workprec(self.prec):
            spec = PerturbationSpec(self.phi, h, epsilon, 1)
            spec.validate()
            fam = _perturbed_family(spec, self.prec, name="unicritical")
            a0 = self.a0
            pt = ProjPoint(a0, 1)
            sections = {
                "a": Section(
                    "a",
                    lambda t: pt,
                    Fraction(0),
                    lambda T: ParamSeriesPoint(
                        TruncatedSeries.constant(a0, T), TruncatedSeries.constant(1, T)
                    ),
                )
            }
            return FamilyBundle(
                family=fam,
                sections=sections,
                theta=self.theta,
                h=mpc(h),
                epsilon=mpf(epsilon),
                dip_index_offset=0,
                metric_constant=_metric_constant(h, epsilon),
                t_exponent=1,
                label="unicritical",
            )


def build_unicritical_family(d: int, theta: ContinuedFraction, prec: int = 128) -> UnicriticalBlueprint:
    """Degree d-1 polynomial with multiplier e^(2 pi i theta) at a fixed point
    and unique finite critical value 0; its critical point a0 is the marked
    orbit start."""
    if d <= 2:
        raise ValueError("this construction needs degree d > 2")
    with workprec(prec):
        lam = theta.unit_root(prec)
        denom = mpf(d - 1) ** (mpf(d - 1) / (d - 2))
        a0 = (lam - (d - 1)) / denom
        # lam * (z - a0)^(d-1), leading-first
        e = d - 1
        coeffs = []
        binom = mpf(1)
        for k in range(e + 1):
            coeffs.append(lam * binom * (-a0) ** k)
            binom = binom * (e - k) / (k + 1)
        phi = RationalMap(coeffs)
        return UnicriticalBlueprint(d, lam, a0, phi, theta, prec)


def build_quadratic_critical_family(
    theta0: ContinuedFraction, prec: int = 256
) -> FamilyBundle:
    """The quadratic family with holomorphically marked critical points:
    f~_t(z, w) = (lam z (z - (1+t^2) w), (z - (1-t^2) w) w), lam = e^(2 pi i theta0).

    Sections: the critical points c+ and c- (eta = 1/2), their shared-image
    critical value v = f_t(c+) (eta = 0), and "a" as an alias for c+.
    """
    with workprec(prec):
        lam = theta0.unit_root(prec)
        fam = HomogeneousFamily(
            2,
            [ParamPoly([lam]), ParamPoly([-lam, 0, -lam]), ParamPoly.zero()],
            [ParamPoly.zero(), ParamPoly([1]), ParamPoly([-1, 0, 1])],
            name="quadratic-critical",
        )

        sq2 = mpmath.sqrt(mpf(2))

        def crit(t, sign):
            t = mpc(t)
            b = mpmath.sqrt(1 - t * t)
            return ProjPoint(1 - t * t + sign * 1j * sq2 * t * b, 1)

        def critval(t, sign):
            # v = lam (1 - t^2 + s i sqrt2 t B)(1 + s i sqrt2 t / B); this
            # form avoids the 1 - c(t) cancellation of the naive quotient
            t = mpc(t)
            b = mpmath.sqrt(1 - t * t)
            s = sign * 1j * sq2 * t
            return ProjPoint(lam * (1 - t * t + s * b) * (1 + s / b), 1)

        def crit_series(T, sign):
            b = binomial_series(mpf(1) / 2, -1, 2, T)
            s = TruncatedSeries.from_coeffs([0, sign * 1j * sq2], T)
            base = TruncatedSeries.from_coeffs([1, 0, -1], T)
            return ParamSeriesPoint(base.add(s.mul(b)), TruncatedSeries.constant(1, T))

        def critval_series(T, sign):
            b = binomial_series(mpf(1) / 2, -1, 2, T)
            s = TruncatedSeries.from_coeffs([0, sign * 1j * sq2], T)
            base = TruncatedSeries.from_coeffs([1, 0, -1], T)
            first = base.add(s.mul(b))
            second = TruncatedSeries.constant(1, T).add(s.mul(b.inverse()))
            return ParamSeriesPoint(
                first.mul(second).scale(lam), TruncatedSeries.constant(1, T)
            )

        sections = {}
        for name, sign in (("c_plus", 1), ("c_minus", -1)):
            sections[name] = Section(
                name,
                lambda t, s=sign: crit(t, s),
                Fraction(1, 2),
                lambda T, s=sign: crit_series(T, s),
            )
        sections["a"] = Section(
            "a", sections["c_plus"].at, Fraction(1, 2), sections["c_plus"].series_at
        )
        sections["v"] = Section(
            "v",
            lambda t: critval(t, 1),
            Fraction(0),
            lambda T: critval_series(T, 1),
        )

        return FamilyBundle(
            family=fam,
            sections=sections,
            theta=theta0,
            h=mpc(1),
            epsilon=mpf(1),
            dip_index_offset=1,
            metric_constant=_metric_constant(1, 1),
            t_exponent=2,
            label="quadratic-critical",
        )


def quadratic_critical_derivative_residual(bundle: FamilyBundle, t, prec: int = 256) -> mpf:
    """|f_t'(c(t))| for both critical sections (returns the max)."""
    with workprec(prec):
        lam = bundle.family.coord_p[0].eval(0)
        t = mpc(t)
        num = [lam, lam * (-1 - t * t), 0]       # lam z (z - (1+t^2))
        den = [1, -(1 - t * t)]                  # z - (1-t^2)
        f = RationalMap(num, den)
        worst = mpf(0)
        for name in ("c_plus", "c_minus"):
            c = bundle.section(name).at(t)
            worst = max(worst, abs(f.derivative_at(c.z / c.w)))
        return worst


# ---------------------------------------------------------------------------
# condition (4.1) and the boundedness diagnostic
# ---------------------------------------------------------------------------


def _orbit_gaps(phi: RationalMap, a0, h, N: int):
    """log chordal gaps log [phi^n(a0), h], n = 0..N, at the active precision."""
    hp = affine_embed(h)
    z = mpc(a0) if a0 != mpmath.inf else mpmath.inf
    gaps = []
    for n in range(N + 1):
        gap = chordal(affine_embed(z), hp)
        if gap == 0:
            raise ExactOrbitHitError("orbit hits h exactly at n = %d" % n)
        gaps.append(mpmath.log(gap))
        z = phi(z)
    return gaps


def condition41_partial_sums(phi: RationalMap, a0, h, d: int, N: int, p_bits: int = 128):
    """Partial sums S_k = sum_{n<=k} d^-n log [phi^n(a0), h], k = 0..N.

    A sequence diverging to -infinity is the divergence condition driving the
    escape-rate dips; convergence signals the obstructed regime.
    """
    with workprec(p_bits):
        gaps = _orbit_gaps(phi, a0, h, N)
        sums = []
        acc = mpf(0)
        w = mpf(1)
        for g in gaps:
            acc += g * w
            w /= d
            sums.append(acc + 0)
        return sums


def prop41_ratio_check(phi: RationalMap, a0, h, d: int, N: int, p_bits: int = 128):
    """Normalized closest-approach minima: (min_n log-gap/(d-1)^n, min_n log-gap/n).

    Values bounded as N grows indicate the polynomial-like (obstructed)
    regime; strongly negative n-normalized values signal the divergent one.
    """
    with workprec(p_bits):
        gaps = _orbit_gaps(phi, a0, h, N)
        min_geom = None
        min_lin = None
        for n in range(1, N + 1):
            geom = gaps[n] / (mpf(d - 1) ** n)
            lin = gaps[n] / n
            min_geom = geom if min_geom is None else min(min_geom, geom)
            min_lin = lin if min_lin is None else min(min_lin, lin)
        return min_geom, min_lin


# ---------------------------------------------------------------------------
# theta exchange files
# ---------------------------------------------------------------------------


def theta_to_json(
    theta: ContinuedFraction,
    schedule: DipSchedule,
    precision_bits: int,
    closeness_rows: int = 10,
) -> str:
    """Serialize a rotation number with its schedule and a closeness log.

    All numerics are decimal strings so files round-trip across precisions.
    """
    rows = max(closeness_rows, max((e.n for e in schedule), default=0))
    table = closeness_table(theta, rows, precision_bits)
    with workprec(precision_bits):
        payload = {
            "partial_quotients": [str(a) for a in theta.prefix],
            "schedule": [
                [e.n, mpmath.nstr(e.gap_exponent, 20, min_fixed=1, max_fixed=0)]
                for e in schedule
            ],
            "closeness_log": [
                [n, mpmath.nstr(mpmath.log(gap), 25, min_fixed=1, max_fixed=0)]
                for n, gap in table
            ],
            "precision_bits": precision_bits,
        }
    return json.dumps(payload, indent=2)


def theta_from_json(text: str):
    """Inverse of theta_to_json; returns (ContinuedFraction, DipSchedule, bits)."""
    payload = json.loads(text)
    cf = ContinuedFraction(
        tuple(int(a) for a in payload["partial_quotients"]), label="loaded"
    )
    schedule = DipSchedule([(int(n), mpf(g)) for n, g in payload["schedule"]])
    return cf, schedule, int(payload["precision_bits"])
