"""Ring scans of degeneration potentials: configuration, sampling, CSV.

A scan walks a geometric ladder of radii, samples the potential of one
marked section at equally spaced angles on each ring, and emits one CSV row
per sample.  All numeric fields are decimal strings with explicit exponents
(binary floats cannot carry the exponent range of the dip experiments), and
identical configurations produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mpf, mpc, workprec

from .dynamics import HomogeneousFamily, potential
from .families import (
    ContinuedFraction,
    DipSchedule,
    FamilyBundle,
    Section,
    build_quadratic_critical_family,
    build_rotation_family,
    build_unicritical_family,
    construct_theta,
)
from .geometry import ProjPoint
from .numerics import ParamPoly

__all__ = [
    "ConfigError",
    "RunConfig",
    "CSV_COLUMNS",
    "FAMILY_NAMES",
    "build_family",
    "run_scan",
    "format_number",
    "write_csv",
    "read_csv",
]

CSV_COLUMNS = (
    "t_re",
    "t_im",
    "abs_t",
    "potential",
    "depth",
    "tail_bound",
    "precision_bits",
)

FAMILY_NAMES = ("power", "rotation", "unicritical", "quadratic-critical")


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one scan deterministically."""

    family: str
    schedule: DipSchedule = field(default_factory=lambda: DipSchedule(()))
    section: str = "a"
    radius_start: float = 0.4
    radius_end: float = 0.01
    radius_count: int = 10
    angles: int = 8
    depth: int = 48
    prec: int = 256
    seed: int = 0
    h: complex = -1
    epsilon: float = 1.0
    degree: int = 3          # unicritical only
    theta: Optional[ContinuedFraction] = None

    def __post_init__(self):
        if self.family not in FAMILY_NAMES:
            raise ConfigError(
                "unknown family %r (choose from %s)" % (self.family, ", ".join(FAMILY_NAMES))
            )
        if not self.radius_start > self.radius_end > 0:
            raise ConfigError("radii must decrease: need start > end > 0")
        if self.radius_count < 1:
            raise ConfigError("need at least one radius")
        if self.prec < 64:
            raise ConfigError("precision below 64 bits is not supported")
        if self.depth < 8:
            raise ConfigError("depth below 8 gives useless tail bounds")
        if self.angles < 1:
            raise ConfigError("need at least one angle per ring")

    def radii(self):
        """The geometric ladder from radius_start down to radius_end."""
        with workprec(self.prec):
            a = mpf(self.radius_start)
            b = mpf(self.radius_end)
            n = self.radius_count
            if n == 1:
                return [a]
            ratio = (b / a) ** (mpf(1) / (n - 1))
            return [a * ratio ** i for i in range(n)]


def _power_bundle(degree: int, prec: int) -> FamilyBundle:
    zero = ParamPoly.zero()
    coord_p = [zero] * (degree + 1)
    coord_q = [zero] * (degree + 1)
    coord_p[0] = ParamPoly([1])
    coord_q[degree] = ParamPoly([1])
    fam = HomogeneousFamily(degree, tuple(coord_p), tuple(coord_q), name="power")
    pt = ProjPoint(1, 1)
    sections = {"a": Section("a", lambda t: pt, Fraction(0))}
    return FamilyBundle(
        family=fam,
        sections=sections,
        theta=None,
        h=mpc(0),
        epsilon=mpf(1),
        dip_index_offset=0,
        metric_constant=mpmath.log(2),
        t_exponent=1,
        label="power",
    )


def build_family(config: RunConfig) -> FamilyBundle:
    """Instantiate the configured family at the configured precision."""
    with workprec(config.prec):
        theta = config.theta
        if theta is None:
            theta = construct_theta(config.schedule, max(4 * config.prec, 1024))
        if config.family == "power":
            return _power_bundle(2, config.prec)
        if config.family == "rotation":
            return build_rotation_family(
                theta, config.h, config.epsilon, prec=config.prec
            )
        if config.family == "unicritical":
            blueprint = build_unicritical_family(config.degree, theta, config.prec)
            return blueprint.build(config.h, config.epsilon)
        return build_quadratic_critical_family(theta, config.prec)


def format_number(x, digits: int = 20) -> str:
    """Decimal string with explicit exponent, stable across ambient precision."""
    return mpmath.nstr(mpf(x) + 0, digits, min_fixed=1, max_fixed=0)


def run_scan(config: RunConfig, bundle: Optional[FamilyBundle] = None):
    """Sample the configured section on the radius ladder.

    Returns a list of row dicts keyed by CSV_COLUMNS, every value already a
    string.  Ordering is (ring, angle), outermost ring first.
    """
    if bundle is None:
        bundle = build_family(config)
    section = bundle.section(config.section)
    rows = []
    with workprec(config.prec):
        phase0 = mpf(config.seed % 997) / 997
        for r in config.radii():
            for a in range(config.angles):
                ang = 2 * mpmath.pi * (mpf(a) / config.angles + phase0) + mpf(1) / 7
                t = r * mpmath.exp(mpc(0, 1) * ang)
                res = potential(
                    bundle.family, section.at, t, section.eta, config.depth, config.prec
                )
                rows.append(
                    {
                        "t_re": format_number(t.real),
                        "t_im": format_number(t.imag),
                        "abs_t": format_number(abs(t)),
                        "potential": format_number(res.value),
                        "depth": str(res.depth),
                        "tail_bound": format_number(res.tail_bound),
                        "precision_bits": str(res.precision),
                    }
                )
    return rows


def write_csv(rows, out) -> str:
    """Write rows (dicts of strings) in the fixed column order.

    ``out`` is a path or None; the rendered text is returned either way, so
    round-trip tests can compare bytes without touching the filesystem.
    """
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    text = buf.getvalue()
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def read_csv(source) -> list:
    """Parse a scan CSV back to row dicts, keeping every field a string."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ConfigError("unexpected CSV columns: %s" % (reader.fieldnames,))
    return [dict(row) for row in reader]
