"""Homogeneous dynamics core: families, resultants, rescaled iteration,
escape rates with certified tails, and orbit valuations.

Iteration never stores the raw orbit: after every step the point is
rescaled to max-norm 1 and the removed log-scale is accumulated with weight
d**-(k+1), which is exactly the telescoping of the escape-rate series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mp, mpf, mpc, workprec

from .geometry import ProjPoint, NormalizedPoint, normalize
from .numerics import (
    ParamPoly,
    TruncatedSeries,
    VALUATION_ABOVE_TRUNCATION,
    default_zero_tol,
    log_max_norm,
    to_mpc,
)

__all__ = [
    "DegenerateParameterError",
    "IndeterminateImageError",
    "TruncationError",
    "HomogeneousFamily",
    "FamilyAtParameter",
    "ParamSeriesPoint",
    "EscapeRateResult",
    "ValuationProfile",
    "Lemma22Bound",
    "evaluate",
    "resultant_at",
    "step_ratio",
    "escape_rate",
    "orbit_valuations",
    "potential",
    "iteration_identity_check",
    "lemma22_constant",
]


class DegenerateParameterError(ValueError):
    """The map degenerates (resultant numerically zero) at this parameter."""


class IndeterminateImageError(ValueError):
    """The image of a point is (0, 0): the point lies in the exceptional set."""


class TruncationError(ValueError):
    """A valuation hit the truncation sentinel; re-run with larger order."""


@dataclass(frozen=True)
class HomogeneousFamily:
    """Pair of degree-d homogeneous forms in (z, w) with ParamPoly coefficients.

    coord_p[i] (resp. coord_q[i]) is the coefficient of z**(d-i) * w**i, so
    both coordinates are homogeneous of the same degree by construction.
    """

    degree: int
    coord_p: tuple
    coord_q: tuple
    name: str = "family"

    def __init__(self, degree, coord_p, coord_q, name="family"):
        if degree < 2:
            raise ValueError("family degree must be >= 2")
        cp = tuple(c if isinstance(c, ParamPoly) else ParamPoly([c]) for c in coord_p)
        cq = tuple(c if isinstance(c, ParamPoly) else ParamPoly([c]) for c in coord_q)
        if len(cp) != degree + 1 or len(cq) != degree + 1:
            raise ValueError("need degree+1 monomial coefficients per coordinate")
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coord_p", cp)
        object.__setattr__(self, "coord_q", cq)
        object.__setattr__(self, "name", name)

    def at(self, t) -> "FamilyAtParameter":
        t = mpc(t)
        return FamilyAtParameter(
            self.degree,
            [c.eval(t) for c in self.coord_p],
            [c.eval(t) for c in self.coord_q],
            t,
        )

    def monomial_count(self) -> int:
        np = sum(1 for c in self.coord_p if not c.is_zero())
        nq = sum(1 for c in self.coord_q if not c.is_zero())
        return max(np, nq)

    def coefficient_bound(self, r) -> mpf:
        return max(
            [c.bound_on_disk(r) for c in self.coord_p + self.coord_q if not c.is_zero()]
        )


class FamilyAtParameter:
    """The family with coefficients evaluated at one parameter value."""

    def __init__(self, degree, cp, cq, t):
        self.degree = degree
        self.cp = [to_mpc(c) for c in cp]
        self.cq = [to_mpc(c) for c in cq]
        self.t = t
        self._res = None
        self._min_sphere_log = None

    def apply(self, z, w):
        d = self.degree
        # powers z^(d-i) w^i accumulated incrementally
        zp = [mpc(1)]
        wp = [mpc(1)]
        for _ in range(d):
            zp.append(zp[-1] * z)
            wp.append(wp[-1] * w)
        pz = mpc(0)
        qz = mpc(0)
        for i in range(d + 1):
            m = zp[d - i] * wp[i]
            if self.cp[i] != 0:
                pz += self.cp[i] * m
            if self.cq[i] != 0:
                qz += self.cq[i] * m
        return pz, qz

    # -- resultant and sphere bounds

    def sylvester(self):
        d = self.degree
        n = 2 * d
        rows = []
        for s in range(d):
            rows.append([mpc(0)] * s + self.cp + [mpc(0)] * (n - d - 1 - s))
        for s in range(d):
            rows.append([mpc(0)] * s + self.cq + [mpc(0)] * (n - d - 1 - s))
        return mp.matrix(rows)

    def resultant(self) -> mpc:
        if self._res is None:
            self._res = mpmath.det(self.sylvester())
        return self._res

    def sylvester_scale(self) -> mpf:
        """Hadamard bound on the Sylvester determinant (product of row norms)."""
        row_norm = mpmath.sqrt(sum(abs(c) ** 2 for c in self.cp))
        row_norm_q = mpmath.sqrt(sum(abs(c) ** 2 for c in self.cq))
        d = self.degree
        return max(mpf(1), row_norm) ** d * max(mpf(1), row_norm_q) ** d

    def check_nondegenerate(self):
        if abs(self.resultant()) < default_zero_tol() * self.sylvester_scale():
            raise DegenerateParameterError(
                "map degenerates at t = %s (resultant numerically zero)" % self.t
            )

    def min_sphere_log(self, certified=True, samples=64) -> tuple:
        """(log lower bound for ||F|| on the max-norm unit sphere, heuristic?).

        Certified route: solve the two cofactor identities A P + B Q =
        Res * w**(2d-1) and (reversed) = Res * z**(2d-1); at a sphere point
        the coordinate of modulus one gives 1 <= ||u||_1 * max(|P|, |Q|).
        """
        if self._min_sphere_log is not None:
            return self._min_sphere_log
        if certified:
            S = self.sylvester()
            n = 2 * self.degree
            e_last = mp.matrix([mpf(0)] * (n - 1) + [mpf(1)])
            try:
                u = mpmath.lu_solve(S.T, e_last)
                Srev = FamilyAtParameter(
                    self.degree, list(reversed(self.cp)), list(reversed(self.cq)), self.t
                ).sylvester()
                v = mpmath.lu_solve(Srev.T, e_last)
                norm = max(
                    sum(abs(x) for x in u), sum(abs(x) for x in v)
                )
                # factor 2 absorbs rounding in the solves
                self._min_sphere_log = (-mpmath.log(2 * norm), False)
                return self._min_sphere_log
            except (ZeroDivisionError, ValueError):
                raise DegenerateParameterError(
                    "singular Sylvester system at t = %s" % self.t
                )
        best = None
        for z, w in _sphere_points(samples):
            pz, qz = self.apply(z, w)
            m = max(abs(pz), abs(qz))
            if m == 0:
                continue
            val = mpmath.log(m)
            best = val if best is None else min(best, val)
        self._min_sphere_log = (best, True)
        return self._min_sphere_log


def _sphere_points(samples):
    """Deterministic points with max-norm 1 covering both charts."""
    half = max(1, samples // 2)
    pts = []
    for k in range(half):
        beta = 2 * mpmath.pi * (k + mpf(1) / 3) / half
        rho = mpf(k % 7 + 1) / 7
        pts.append((rho * mpmath.exp(mpc(0, 1) * beta), mpc(1)))
        pts.append((mpc(1), rho * mpmath.exp(mpc(0, 1) * beta * 2)))
    return pts


@dataclass(frozen=True)
class ParamSeriesPoint:
    """A point of C^2 whose coordinates are truncated series in t."""

    first: TruncatedSeries
    second: TruncatedSeries

    def __post_init__(self):
        if self.first.truncation != self.second.truncation:
            raise ValueError("coordinate truncation orders differ")


@dataclass(frozen=True)
class EscapeRateResult:
    value: mpf
    depth: int
    tail_bound: mpf
    precision: int
    heuristic_tail: bool = False


@dataclass(frozen=True)
class ValuationProfile:
    orders: tuple          # o_1..o_n
    eta_estimates: tuple   # o_k / d^k as Fractions

    @property
    def eta(self) -> Fraction:
        return self.eta_estimates[-1]


@dataclass(frozen=True)
class Lemma22Bound:
    rigorous: mpf
    empirical: mpf


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def evaluate(fam: HomogeneousFamily, t, p: ProjPoint) -> ProjPoint:
    """Coordinatewise evaluation of the family at (t, p)."""
    pz, qz = fam.at(t).apply(p.z, p.w)
    if pz == 0 and qz == 0:
        raise IndeterminateImageError(
            "image of point is (0,0) at t = %s (exceptional set)" % mpc(t)
        )
    return ProjPoint(pz, qz)


def resultant_at(fam: HomogeneousFamily, t) -> mpc:
    """Determinant of the 2d x 2d Sylvester matrix of the two coordinates."""
    return fam.at(t).resultant()


def step_ratio(fam_at_t: FamilyAtParameter, p: NormalizedPoint) -> mpf:
    """log ||F(p)|| for max-norm-1 p, i.e. the summand of the escape-rate series."""
    pz, qz = fam_at_t.apply(p.point.z, p.point.w)
    if pz == 0 and qz == 0:
        raise IndeterminateImageError("indeterminate image on orbit")
    return log_max_norm((pz, qz))


def lemma22_constant(fam: HomogeneousFamily, t_radius=mpf(1) / 2, samples=64) -> Lemma22Bound:
    """Upper bound C+ for log(||F_t(p)|| / ||p||^d) over |t| <= r and all p.

    Rigorous value: log(monomial count x max coefficient bound on the disk);
    the empirical sphere-sampled maximum is returned for diagnostics and is
    always <= the rigorous bound.
    """
    rig = mpmath.log(fam.monomial_count() * fam.coefficient_bound(t_radius))
    emp = None
    for j in range(4):
        t = t_radius * mpmath.exp(mpc(0, 1) * (2 * mpmath.pi * j / 4 + mpf(1) / 7))
        fat = fam.at(t)
        for z, w in _sphere_points(samples):
            m = max(abs(z), abs(w))
            pz, qz = fat.apply(z / m, w / m)
            mm = max(abs(pz), abs(qz))
            if mm == 0:
                continue
            val = mpmath.log(mm)
            emp = val if emp is None else max(emp, val)
    return Lemma22Bound(rig, emp)


def escape_rate(
    fam: HomogeneousFamily,
    t,
    p: ProjPoint,
    depth: int,
    p_bits: int,
    certified_tail: bool = True,
    sphere_samples: int = 64,
) -> EscapeRateResult:
    """Escape-rate value at (t, p) with a certified (or heuristic) tail bound.

    value = log||p|| + sum_{k<N} d**-(k+1) log||F(orbit_k)|| on the
    renormalized orbit; the dropped tail is bounded by
    (C+ + |log min-sphere|) * d**-N / (d-1).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    d = fam.degree
    with workprec(p_bits):
        t = mpc(t)
        fat = fam.at(t)
        fat.check_nondegenerate()
        cur = normalize(p)
        value = cur.log_scale
        dpow = mpf(d)
        for _ in range(depth):
            pz, qz = fat.apply(cur.point.z, cur.point.w)
            if pz == 0 and qz == 0:
                raise IndeterminateImageError(
                    "orbit hits the exceptional set at t = %s" % t
                )
            cur = normalize(ProjPoint(pz, qz))
            value += cur.log_scale / dpow
            dpow *= d
        r = max(abs(t), mpf(1) / 2)
        c_plus = mpmath.log(fam.monomial_count() * fam.coefficient_bound(r))
        ms_log, heuristic = fat.min_sphere_log(
            certified=certified_tail, samples=sphere_samples
        )
        tail = (c_plus + abs(ms_log)) * (mpf(d) ** (-depth)) / (d - 1)
        return EscapeRateResult(value, depth, tail, p_bits, heuristic)


def potential(
    fam: HomogeneousFamily,
    section,
    t,
    eta,
    depth: int,
    p_bits: int,
    certified_tail: bool = True,
) -> EscapeRateResult:
    """Degeneration potential: escape rate along the section minus eta*log|t|.

    ``section`` is either a ProjPoint or a callable t -> ProjPoint; ``eta``
    is an exact rational (or 0).
    """
    with workprec(p_bits):
        t = mpc(t)
        if t == 0:
            raise DegenerateParameterError("potential is defined on the punctured disk")
        pt = section(t) if callable(section) else section
        res = escape_rate(fam, t, pt, depth, p_bits, certified_tail)
        eta_f = mpf(eta.numerator) / eta.denominator if isinstance(eta, Fraction) else mpf(eta)
        val = res.value - eta_f * mpmath.log(abs(t))
        return EscapeRateResult(val, res.depth, res.tail_bound, p_bits, res.heuristic_tail)


# ---------------------------------------------------------------------------
# series orbit and valuations
# ---------------------------------------------------------------------------


def _apply_series(fam: HomogeneousFamily, point: ParamSeriesPoint) -> ParamSeriesPoint:
    d = fam.degree
    T = point.first.truncation
    zs, ws = point.first, point.second
    zp = [TruncatedSeries.constant(1, T)]
    wp = [TruncatedSeries.constant(1, T)]
    for _ in range(d):
        zp.append(zp[-1].mul(zs))
        wp.append(wp[-1].mul(ws))
    out_p = TruncatedSeries.constant(0, T)
    out_q = TruncatedSeries.constant(0, T)
    for i in range(d + 1):
        mono = zp[d - i].mul(wp[i])
        if not fam.coord_p[i].is_zero():
            out_p = out_p.add(mono.mul(fam.coord_p[i].to_series(T)))
        if not fam.coord_q[i].is_zero():
            out_q = out_q.add(mono.mul(fam.coord_q[i].to_series(T)))
    return ParamSeriesPoint(out_p, out_q)


def orbit_valuations(
    fam: HomogeneousFamily,
    section: ParamSeriesPoint,
    n_max: int,
    truncation: Optional[int] = None,
    p_bits: int = 128,
) -> ValuationProfile:
    """t-adic valuations o_n of the homogeneous orbit and the eta estimates.

    Follows the recursion o_{n+1} = d*o_n + v_{n+1}, where v_{n+1} is the
    valuation extracted from the rescaled orbit at step n+1; after each step
    both coordinates are divided by t**v so the series never accumulates a
    common power of t.

    Coefficient magnitudes of the orbit series spread doubly exponentially
    in n (the escape-rate mechanism itself), so zero-versus-nonzero
    classification is audited: a coefficient accepted as nonzero must exceed
    the zero threshold by a factor 2**(p/4), and one dismissed as zero must
    sit below it by 2**32.  An ambiguous classification raises
    TruncationError asking for more precision bits; the margin analysis
    guarantees the doubling spread cannot jump over the audit window, so a
    run that completes is trustworthy at its stated precision.
    """
    d = fam.degree
    with workprec(p_bits):
        point = section
        if truncation is not None and truncation != point.first.truncation:
            raise ValueError("section truncation does not match requested order")
        orders = []
        etas = []
        o = 0
        accept_factor = mpf(2) ** (p_bits // 4)
        dismiss_factor = mpf(2) ** 32
        for n in range(1, n_max + 1):
            point = _apply_series(fam, point)
            coeffs = list(point.first.coefficients) + list(point.second.coefficients)
            scale = max(abs(c) for c in coeffs)
            if scale == 0:
                raise TruncationError("orbit series vanished; increase truncation order")
            tol = default_zero_tol() * scale
            v1 = point.first.valuation(tol)
            v2 = point.second.valuation(tol)
            if v1 is VALUATION_ABOVE_TRUNCATION and v2 is VALUATION_ABOVE_TRUNCATION:
                raise TruncationError("increase truncation order")
            vals = [x for x in (v1, v2) if x is not VALUATION_ABOVE_TRUNCATION]
            v = min(vals)
            for series, vv in ((point.first, v1), (point.second, v2)):
                cut = (
                    len(series.coefficients)
                    if vv is VALUATION_ABOVE_TRUNCATION
                    else vv
                )
                low = [abs(c) for c in series.coefficients[:cut] if c != 0]
                if low and max(low) * dismiss_factor > tol:
                    raise TruncationError(
                        "ambiguous zero classification at step %d; "
                        "increase precision beyond %d bits" % (n, p_bits)
                    )
                if cut < len(series.coefficients):
                    lead = abs(series.coefficients[cut])
                    if lead < tol * accept_factor:
                        raise TruncationError(
                            "ambiguous leading coefficient at step %d; "
                            "increase precision beyond %d bits" % (n, p_bits)
                        )
            if v > 0:
                point = ParamSeriesPoint(
                    point.first.shift_down(v, tol), point.second.shift_down(v, tol)
                )
            # renormalize magnitudes so coefficients stay O(1)
            point = ParamSeriesPoint(
                point.first.scale(1 / scale), point.second.scale(1 / scale)
            )
            o = d * o + v
            orders.append(o)
            etas.append(Fraction(o, d ** n))
        return ValuationProfile(tuple(orders), tuple(etas))


# ---------------------------------------------------------------------------
# the degenerate-limit iteration identity
# ---------------------------------------------------------------------------


def iteration_identity_check(
    phi_coords: tuple,
    h,
    n: int,
    p: ProjPoint,
    p_bits: int,
) -> mpf:
    """Residual of the product formula for the degenerate map (H*P, H*Q).

    phi_coords is the pair (P, Q) of degree-e homogeneous coefficient lists
    (constants, z-descending as in HomogeneousFamily rows), H(z, w) = z - h*w.
    Both sides are evaluated on renormalized orbits at max norm.
    """
    cp, cq = [list(map(to_mpc, c)) for c in phi_coords]
    e = len(cp) - 1
    h = mpc(h)
    with workprec(p_bits):
        # f0 = (H*P, H*Q), homogeneous of degree e+1
        f0p = [mpc(0)] * (e + 2)
        f0q = [mpc(0)] * (e + 2)
        for i in range(e + 1):
            f0p[i] += cp[i]
            f0p[i + 1] -= h * cp[i]
            f0q[i] += cq[i]
            f0q[i + 1] -= h * cq[i]
        f0 = FamilyAtParameter(e + 1, f0p, f0q, mpc(0))
        phi = FamilyAtParameter(e, cp, cq, mpc(0))
        phi_apply = phi.apply

        # left side: orbit under f0
        cur = normalize(p).point
        for _ in range(n):
            pz, qz = f0.apply(cur.z, cur.w)
            if pz == 0 and qz == 0:
                raise IndeterminateImageError("orbit of p hits (0,0) under f0")
            cur = normalize(ProjPoint(pz, qz)).point
        pz, qz = f0.apply(cur.z, cur.w)
        if pz == 0 and qz == 0:
            raise IndeterminateImageError("orbit of p hits (0,0) under f0")
        lhs = log_max_norm((pz, qz))

        # right side: orbit under Phi
        cur2 = normalize(p).point
        for _ in range(n):
            pz, qz = phi_apply(cur2.z, cur2.w)
            if pz == 0 and qz == 0:
                raise IndeterminateImageError("orbit of p hits (0,0) under Phi")
            cur2 = normalize(ProjPoint(pz, qz)).point
        hval = cur2.z - h * cur2.w
        if hval == 0:
            raise IndeterminateImageError("H vanishes on the Phi-orbit (log singularity)")
        pz, qz = phi_apply(cur2.z, cur2.w)
        rhs = mpmath.log(abs(hval)) + log_max_norm((pz, qz))
        return abs(lhs - rhs)
