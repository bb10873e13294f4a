"""Points of the projective line, normalization, and the chordal metric.

Two norms coexist deliberately: the chordal metric uses Euclidean norms of
the lifts (matching the identity [z, infinity] = 1/sqrt(1+|z|^2)), while the
dynamics modules measure potentials in the max norm.  They are never mixed
inside one formula; cross-metric comparisons only ever enter additive
constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf, mpc

from .numerics import log_max_norm, to_mpc

__all__ = [
    "ProjPoint",
    "NormalizedPoint",
    "chordal",
    "normalize",
    "affine_embed",
    "affine_chart",
]


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^1 as a lift (z, w) in C^2 minus the origin."""

    z: mpc
    w: mpc

    def __init__(self, z, w):
        z, w = to_mpc(z), to_mpc(w)
        if z == 0 and w == 0:
            raise ValueError("(0, 0) does not lift a projective point")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)

    @property
    def coords(self):
        return (self.z, self.w)


@dataclass(frozen=True)
class NormalizedPoint:
    """A ProjPoint rescaled to max-norm 1, with the removed scale kept as
    log_scale, so log_max_norm(original) = log_scale."""

    point: ProjPoint
    log_scale: mpf


def normalize(p: ProjPoint) -> NormalizedPoint:
    """Rescale the lift to max-norm 1 (to rounding) and record the log scale."""
    az, aw = abs(p.z), abs(p.w)
    m = az if az >= aw else aw
    return NormalizedPoint(ProjPoint(p.z / m, p.w / m), mpmath.log(m))


def chordal(p: ProjPoint, q: ProjPoint) -> mpf:
    """Chordal distance |z1 w2 - z2 w1| / (||p||_2 ||q||_2), in [0, 1].

    Lift-scaling invariant to rounding; both lifts are pre-normalized in the
    max norm so intermediate magnitudes stay near 1 even for doubly
    exponential inputs.
    """
    p = normalize(p).point
    q = normalize(q).point
    cross = abs(p.z * q.w - q.z * p.w)
    np2 = mpmath.sqrt(abs(p.z) ** 2 + abs(p.w) ** 2)
    nq2 = mpmath.sqrt(abs(q.z) ** 2 + abs(q.w) ** 2)
    return cross / (np2 * nq2)


def affine_embed(z) -> ProjPoint:
    """z in C -> (z, 1); the point at infinity -> (1, 0)."""
    if z == mpmath.inf:
        return ProjPoint(1, 0)
    return ProjPoint(z, 1)


def affine_chart(p: ProjPoint):
    """Inverse of affine_embed: (z, w) -> z/w, (z, 0) -> infinity."""
    if p.w == 0:
        return mpmath.inf
    return p.z / p.w
