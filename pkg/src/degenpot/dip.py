"""Quantitative detection of potential dips near the degenerate parameter.

Pipeline: dip_predict turns a schedule entry into an expected drop depth,
find_dip_radius walks a geometric radius ladder down from 1/4 measuring ring
minima of the potential until the predicted drop (minus slack) is observed.
Every search emits a report whether or not the dip is found, including the
near-miss margin, so a negative result is auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mpf, mpc, workprec

from .dynamics import (
    DegenerateParameterError,
    lemma22_constant,
    potential,
)
from .families import DipScheduleEntry, FamilyBundle

__all__ = [
    "PrecisionBudgetError",
    "DipReport",
    "dip_predict",
    "find_dip_radius",
]


class PrecisionBudgetError(RuntimeError):
    """The requested search needs more precision bits than were granted."""


@dataclass(frozen=True)
class DipReport:
    """Outcome of one dip search.

    status is one of "confirmed", "not found", "no dip predicted".  When
    confirmed, measured_min <= reference_level - predicted_drop + slack at
    located_radius.  near_miss_margin is the smallest excess of any ring
    minimum over the confirmation threshold (<= 0 exactly when confirmed);
    it quantifies how close a negative search came.
    """

    j: int
    n: int
    gap_exponent: mpf
    predicted_drop: mpf
    reference_level: Optional[mpf]
    located_radius: Optional[mpf]
    measured_min: Optional[mpf]
    slack: mpf
    status: str
    metric_constant: mpf
    near_miss_margin: Optional[mpf]
    rings_scanned: int
    precision_bits: int
    depth: int
    reason: str = ""

    @property
    def measured_drop(self):
        """Drop of the ring minimum below the reference level."""
        if self.reference_level is None or self.measured_min is None:
            return None
        return self.reference_level - self.measured_min


def dip_predict(bundle: FamilyBundle, entry: DipScheduleEntry, j: int = 1):
    """Predicted potential drop for schedule entry j.

    Delta_j = g_j / d**(k_j + 1) - C_corr with k_j = n_j - offset (the orbit
    index of the close return; the offset is a family property) and
    C_corr = C_plus/(d - 1) + metric comparison constant.  Delta <= 0 means
    the scheduled gap is too shallow to beat the a-priori constants and no
    dip is predicted.
    """
    d = bundle.family.degree
    k = entry.n - bundle.dip_index_offset
    if k < 0:
        raise ValueError("return time %d is below the family's orbit offset" % entry.n)
    c_plus = lemma22_constant(bundle.family, samples=0).rigorous
    c_corr = c_plus / (d - 1) + bundle.metric_constant
    return entry.gap_exponent / mpf(d) ** (k + 1) - c_corr


def _ring_min(bundle, section_at, eta, rho, phase0, angles, depth, p_bits):
    best = None
    for a in range(angles):
        ang = phase0 + 2 * mpmath.pi * a / angles
        t = rho * mpmath.exp(mpc(0, 1) * ang)
        res = potential(bundle.family, section_at, t, eta, depth, p_bits)
        if best is None or res.value < best:
            best = res.value
    return best


def find_dip_radius(
    bundle: FamilyBundle,
    section_name: str,
    entry: DipScheduleEntry,
    slack=3,
    p_bits: int = 512,
    j: int = 1,
    depth: int = 48,
    angles: int = 8,
    shrink=None,
    reference_radius=None,
) -> DipReport:
    """Search a geometric radius ladder for the dip promised by one entry.

    The reference level is the ring maximum of the potential on
    |t| = reference_radius (default 1/2).  Radii then descend from 1/4 by
    the shrink factor; at each ring the minimum over ``angles`` equally
    spaced angles is measured and compared to reference - Delta + slack.
    The search stops on confirmation, when rho < exp(-4 g), or when rho
    reaches the representability floor of the working precision (recorded
    in the report's reason field).
    """
    g = mpf(entry.gap_exponent)
    needed = int(4 * g / math.log(2)) + 1
    if p_bits < needed:
        raise PrecisionBudgetError(
            "gap exponent %s needs %d precision bits, only %d granted"
            % (mpmath.nstr(g), needed, p_bits)
        )

    delta = dip_predict(bundle, entry, j)
    common = dict(
        j=j,
        n=entry.n,
        gap_exponent=g,
        predicted_drop=delta,
        slack=mpf(slack),
        metric_constant=bundle.metric_constant,
        precision_bits=p_bits,
        depth=depth,
    )
    if delta <= 0:
        return DipReport(
            reference_level=None,
            located_radius=None,
            measured_min=None,
            status="no dip predicted",
            near_miss_margin=None,
            rings_scanned=0,
            reason="predicted drop %s is not positive" % mpmath.nstr(delta),
            **common,
        )

    section = bundle.section(section_name)
    with workprec(p_bits):
        slack = mpf(slack)
        if shrink is None:
            # default ladder: about 32 rings per factor exp(-g) of depth, but
            # never coarser-grained than halving
            shrink = min(mpf(1) / 2, mpmath.exp(-g / 32))
        else:
            shrink = mpf(shrink)
        if not 0 < shrink < 1:
            raise ValueError("shrink factor must lie in (0, 1)")
        if reference_radius is None:
            reference_radius = mpf(1) / 2
        # reference: ring maximum at the outer radius
        m_ref = None
        for a in range(angles):
            ang = 2 * mpmath.pi * a / angles + mpf(1) / 7
            t = reference_radius * mpmath.exp(mpc(0, 1) * ang)
            res = potential(bundle.family, section.at, t, section.eta, depth, p_bits)
            if m_ref is None or res.value > m_ref:
                m_ref = res.value
        threshold = m_ref - delta + slack

        # stop radii: scheduled search floor and representability floor.
        # The resultant of the family vanishes to order t_exponent at t = 0,
        # so below 2**(-p/(2 t_exp)) the nondegeneracy refusal would fire on
        # rounding noise rather than genuine degeneracy.
        log_stop = -4 * g
        floor_bits = p_bits // (2 * bundle.t_exponent) - 16
        log_floor = -mpf(floor_bits) * mpmath.log(2)

        rho = mpf(1) / 4
        best_margin = None
        best_min = None
        best_rho = None
        rings = 0
        log_shrink = mpmath.log(shrink)
        reason = ""
        while True:
            ring_min = _ring_min(
                bundle, section.at, section.eta, rho, mpf(1) / 7, angles, depth, p_bits
            )
            rings += 1
            margin = ring_min - threshold
            if best_margin is None or margin < best_margin:
                best_margin = margin
                best_min = ring_min
                best_rho = rho
            if margin <= 0:
                return DipReport(
                    reference_level=m_ref,
                    located_radius=rho,
                    measured_min=ring_min,
                    status="confirmed",
                    near_miss_margin=margin,
                    rings_scanned=rings,
                    **common,
                )
            log_next = mpmath.log(rho) + log_shrink
            if log_next < log_stop:
                reason = "radius ladder exhausted at exp(-4 g)"
                break
            if log_next < log_floor:
                reason = (
                    "radius ladder stopped at the representability floor "
                    "of %d bits" % p_bits
                )
                break
            rho = rho * shrink
        return DipReport(
            reference_level=m_ref,
            located_radius=best_rho,
            measured_min=best_min,
            status="not found",
            near_miss_margin=best_margin,
            rings_scanned=rings,
            reason=reason,
            **common,
        )
