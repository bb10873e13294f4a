"""Numerical laboratory for degenerating families of rational maps.

Arbitrary-precision escape rates with certified tail bounds, degeneration
potentials of marked sections, local heights from orbit valuations of
parameter series, rotation-number synthesis by continued fractions, and
quantitative detection of potential dips near the degenerate parameter.
"""

from .numerics import ParamPoly, TruncatedSeries, binomial_series
from .geometry import ProjPoint, NormalizedPoint, chordal, normalize
from .dynamics import (
    DegenerateParameterError,
    EscapeRateResult,
    HomogeneousFamily,
    ValuationProfile,
    escape_rate,
    lemma22_constant,
    orbit_valuations,
    potential,
)
from .families import (
    ContinuedFraction,
    DipSchedule,
    FamilyBundle,
    RationalMap,
    build_quadratic_critical_family,
    build_rotation_family,
    build_unicritical_family,
    construct_theta,
)
from .bifurcation import lyapunov, potential_grid, laplacian_stencil
from .dip import DipReport, dip_predict, find_dip_radius

__version__ = "0.1.0"
