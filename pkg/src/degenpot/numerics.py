"""Arbitrary-precision scalars, polynomials in the parameter, and truncated series.

All heavy arithmetic is delegated to mpmath (gmpy backend when available),
whose floats carry a binary mantissa at the active working precision and an
unbounded exponent, so magnitudes like exp(-n * 2**(n+1)) are representable
without underflow.  Precision is always passed explicitly by the caller and
applied with ``mpmath.workprec``; values are immutable once produced, so
results computed at precision p stay exact regardless of later context
changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpf, mpc, workprec

__all__ = [
    "mpf",
    "mpc",
    "workprec",
    "to_mpc",
    "default_zero_tol",
    "unit_root",
    "log_max_norm",
    "ParamPoly",
    "TruncatedSeries",
    "VALUATION_ABOVE_TRUNCATION",
    "binomial_series",
]


def to_mpc(x) -> mpc:
    """Coerce a scalar to mpc without degrading precision it already carries.

    mpc(x) rounds to the ambient precision, which silently truncates values
    produced under a wider workprec; constructors route through here so a
    coefficient computed at 512 bits survives being stored at 53.  Strings
    are still parsed at the ambient precision (the caller controls that).
    """
    if isinstance(x, mpc):
        return x
    if isinstance(x, mpf):
        bits = max(mp.prec, x._mpf_[1].bit_length() + 8)
        with workprec(bits):
            return mpc(x)
    if isinstance(x, int):
        with workprec(max(mp.prec, x.bit_length() + 8)):
            return mpc(x)
    return mpc(x)


def default_zero_tol(prec: int | None = None) -> mpf:
    """Threshold separating true zeros from rounding noise: 2**(-p/2).

    Coefficient noise from rounded arithmetic sits around 2**(-p + O(log T)),
    so half the working precision leaves a wide margin on both sides.
    """
    p = mp.prec if prec is None else prec
    return mpf(2) ** (-(p // 2))


def unit_root(theta: mpf, consumer_prec: int | None = None) -> mpc:
    """exp(2*pi*i*theta) evaluated at 4x the consumer precision, then rounded.

    ``theta`` should itself carry at least 4x precision; see
    ContinuedFraction.theta for how rotation numbers are evaluated.
    """
    p = mp.prec if consumer_prec is None else consumer_prec
    with workprec(4 * p):
        val = mpmath.exp(2j * mpmath.pi * theta)
    with workprec(p):
        return mpc(val.real + 0, val.imag + 0)


def log_max_norm(v: Sequence) -> mpf:
    """log max(|v1|, |v2|) for a point of C^2, exact through huge exponents.

    Raises ZeroDivisionError-style ValueError on the zero vector.
    """
    z, w = v
    az, aw = abs(mpc(z)), abs(mpc(w))
    m = az if az >= aw else aw
    if m == 0:
        raise ValueError("log_max_norm of the zero vector is undefined")
    return mpmath.log(m)


# ---------------------------------------------------------------------------
# polynomials in the parameter t
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamPoly:
    """Polynomial in the parameter t with complex coefficients.

    coefficients[k] multiplies t**k.  The highest stored coefficient is
    nonzero unless the polynomial is the single zero coefficient.
    """

    coefficients: tuple

    def __init__(self, coefficients: Iterable):
        coeffs = [to_mpc(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            coeffs = [mpc(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coefficients[0] == 0

    def __call__(self, t) -> mpc:
        return self.eval(t)

    def eval(self, t) -> mpc:
        """Horner evaluation; relative error <= 2*deg ulp."""
        t = mpc(t)
        acc = mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def add(self, other: "ParamPoly") -> "ParamPoly":
        n = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [mpc(0)] * (n - len(self.coefficients))
        b = list(other.coefficients) + [mpc(0)] * (n - len(other.coefficients))
        return ParamPoly([x + y for x, y in zip(a, b)])

    def mul(self, other: "ParamPoly") -> "ParamPoly":
        out = [mpc(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return ParamPoly(out)

    def scale(self, s) -> "ParamPoly":
        s = mpc(s)
        return ParamPoly([s * c for c in self.coefficients])

    def bound_on_disk(self, r) -> mpf:
        """Rigorous upper bound for |p(t)| on |t| <= r: sum |c_k| r^k."""
        r = mpf(r)
        total = mpf(0)
        rk = mpf(1)
        for c in self.coefficients:
            total += abs(c) * rk
            rk *= r
        return total

    def to_series(self, truncation: int) -> "TruncatedSeries":
        coeffs = list(self.coefficients[: truncation + 1])
        coeffs += [mpc(0)] * (truncation + 1 - len(coeffs))
        return TruncatedSeries(coeffs, truncation)

    @staticmethod
    def constant(c) -> "ParamPoly":
        return ParamPoly([c])

    @staticmethod
    def zero() -> "ParamPoly":
        return ParamPoly([0])


def poly_eval(f: ParamPoly, t) -> mpc:
    return f.eval(t)


# ---------------------------------------------------------------------------
# truncated power series in t
# ---------------------------------------------------------------------------

#: Sentinel returned by valuation when every stored coefficient vanishes.
VALUATION_ABOVE_TRUNCATION = "above-truncation"


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in t truncated at order T (coefficients c_0..c_T)."""

    coefficients: tuple
    truncation: int

    def __init__(self, coefficients: Iterable, truncation: int):
        coeffs = [to_mpc(c) for c in coefficients]
        if len(coeffs) != truncation + 1:
            raise ValueError(
                "expected %d coefficients, got %d" % (truncation + 1, len(coeffs))
            )
        object.__setattr__(self, "coefficients", tuple(coeffs))
        object.__setattr__(self, "truncation", truncation)

    # -- construction helpers

    @staticmethod
    def from_coeffs(coeffs: Iterable, truncation: int) -> "TruncatedSeries":
        c = [to_mpc(x) for x in coeffs][: truncation + 1]
        c += [mpc(0)] * (truncation + 1 - len(c))
        return TruncatedSeries(c, truncation)

    @staticmethod
    def constant(value, truncation: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs([value], truncation)

    @staticmethod
    def identity(truncation: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs([0, 1], truncation)

    # -- ring operations

    def _check_match(self, other: "TruncatedSeries"):
        if self.truncation != other.truncation:
            raise ValueError("truncation orders differ")

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        return TruncatedSeries(
            [a + b for a, b in zip(self.coefficients, other.coefficients)],
            self.truncation,
        )

    def sub(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_match(other)
        return TruncatedSeries(
            [a - b for a, b in zip(self.coefficients, other.coefficients)],
            self.truncation,
        )

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Schoolbook product modulo t**(T+1)."""
        self._check_match(other)
        T = self.truncation
        a, b = self.coefficients, other.coefficients
        out = [mpc(0)] * (T + 1)
        for i in range(T + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(T + 1 - i):
                bj = b[j]
                if bj == 0:
                    continue
                out[i + j] += ai * bj
        return TruncatedSeries(out, T)

    def scale(self, s) -> "TruncatedSeries":
        s = mpc(s)
        return TruncatedSeries([s * c for c in self.coefficients], self.truncation)

    def shift_down(self, k: int, zero_tol=None) -> "TruncatedSeries":
        """Divide by t**k.  The dropped low-order coefficients must vanish
        (within zero_tol); the top k coefficients of the result are unknown
        and set to zero, so the effective truncation degrades by k."""
        if k == 0:
            return self
        tol = default_zero_tol() if zero_tol is None else mpf(zero_tol)
        scale = max([abs(c) for c in self.coefficients] + [mpf(1)])
        for c in self.coefficients[:k]:
            if abs(c) > tol * scale:
                raise ValueError("shift_down drops a nonzero coefficient")
        out = list(self.coefficients[k:]) + [mpc(0)] * k
        return TruncatedSeries(out, self.truncation)

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        c0 = self.coefficients[0]
        if c0 == 0:
            raise ZeroDivisionError("series has zero constant term")
        T = self.truncation
        inv0 = 1 / c0
        out = [inv0] + [mpc(0)] * T
        for n in range(1, T + 1):
            acc = mpc(0)
            for k in range(1, n + 1):
                acc += self.coefficients[k] * out[n - k]
            out[n] = -inv0 * acc
        return TruncatedSeries(out, T)

    def eval(self, t) -> mpc:
        t = mpc(t)
        acc = mpc(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def valuation(self, zero_tol=None):
        """Smallest k with |c_k| > zero_tol, or the sentinel if none.

        zero_tol defaults to 2**(-p/2) at the active precision.
        """
        tol = default_zero_tol() if zero_tol is None else mpf(zero_tol)
        for k, c in enumerate(self.coefficients):
            if abs(c) > tol:
                return k
        return VALUATION_ABOVE_TRUNCATION


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.mul(b)


def series_valuation(s: TruncatedSeries, zero_tol=None):
    return s.valuation(zero_tol)


def binomial_series(alpha, inner_coeff, inner_power: int, truncation: int) -> TruncatedSeries:
    """Series of (1 + inner_coeff * t**inner_power)**alpha to order T.

    Uses the binomial recurrence b_{k} = b_{k-1} (alpha - k + 1) / k on the
    substituted variable, so each coefficient is exact to rounding.
    """
    alpha = mpf(alpha)
    inner_coeff = mpc(inner_coeff)
    T = truncation
    out = [mpc(0)] * (T + 1)
    b = mpc(1)
    k = 0
    while k * inner_power <= T:
        out[k * inner_power] = b
        k += 1
        b = b * (alpha - k + 1) / k * inner_coeff
    return TruncatedSeries(out, T)
