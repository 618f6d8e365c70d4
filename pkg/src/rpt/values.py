"""Exact-rational and log-scale numeric plumbing.

All run-time thresholds in this package are exact ``fractions.Fraction``
values; floats never enter a comparison that decides a verification
outcome.  Constant recursions whose values are towers of exponentials
cannot be materialised as rationals, so they are tracked on a base-2
logarithmic scale with high-precision mpmath floats instead.  A
:class:`LogValue` carries such a quantity; the few decisions that must be
made about one (is ``v * k`` below 1, what is ``ceil(v * k)``) are only
answered when the log-scale bound makes the answer unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

# Enough head-room that the ledger's 1e-12 relative-error acceptance
# check is nowhere near the working precision.
mpmath.mp.prec = 240


class UndecidableAtScale(Exception):
    """A log-scale bound was too coarse to decide an exact comparison."""


def parse_fraction(text: str) -> Fraction:
    """Parse 'p/q', an integer, or a decimal string into an exact Fraction.

    Decimal strings are expanded in base 10 (Fraction('0.3') == 3/10),
    never routed through binary floats.
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def log2_fraction(x: Fraction) -> mpmath.mpf:
    if x <= 0:
        raise ValueError("log2 of a nonpositive rational")
    # Split into exponent + mantissa so huge numerators/denominators
    # (tens of thousands of bits) do not overflow the mpf conversion.
    num, den = x.numerator, x.denominator
    shift = num.bit_length() - den.bit_length()
    if shift > 0:
        den <<= shift
    else:
        num <<= -shift
    return mpmath.mpf(shift) + mpmath.log(mpmath.mpf(num) / mpmath.mpf(den), 2)


@dataclass(frozen=True)
class LogValue:
    """A positive real represented by its base-2 logarithm."""

    log2: mpmath.mpf

    @staticmethod
    def of(x: "Fraction | int | LogValue") -> "LogValue":
        if isinstance(x, LogValue):
            return x
        return LogValue(log2_fraction(Fraction(x)))

    def __mul__(self, other: "Fraction | int | LogValue") -> "LogValue":
        return LogValue(self.log2 + LogValue.of(other).log2)

    __rmul__ = __mul__

    def __truediv__(self, other: "Fraction | int | LogValue") -> "LogValue":
        return LogValue(self.log2 - LogValue.of(other).log2)

    def __pow__(self, k: int) -> "LogValue":
        return LogValue(self.log2 * k)

    # Comparisons against exact rationals go through the log scale with a
    # small guard band; refusing to answer beats answering wrongly.
    _GUARD = mpmath.mpf("1e-30")

    def _cmp(self, other: "Fraction | int | LogValue") -> int:
        o = LogValue.of(other).log2
        if self.log2 < o - self._GUARD:
            return -1
        if self.log2 > o + self._GUARD:
            return 1
        raise UndecidableAtScale(
            f"log-scale values too close to compare: {self.log2} vs {o}"
        )

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) < 0  # equality is undecidable on this scale

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) > 0

    def __str__(self) -> str:
        return f"2^{mpmath.nstr(self.log2, 17)}"


Scalar = Fraction | LogValue


def scalar_log2(x: Scalar) -> mpmath.mpf:
    return x.log2 if isinstance(x, LogValue) else log2_fraction(x)


def scalar_min(*xs: Scalar) -> Scalar:
    best = xs[0]
    for x in xs[1:]:
        if scalar_log2(x) < scalar_log2(best):
            best = x
    return best


def scalar_mul(a: Scalar, b: "Scalar | int") -> Scalar:
    if isinstance(a, Fraction) and isinstance(b, (Fraction, int)):
        return a * b
    return LogValue.of(a) * b


def scalar_ceil_mul(x: Scalar, k: int) -> int:
    """ceil(x * k) for positive x and k >= 1, decided exactly.

    For a LogValue the answer is only returned when the bound pins it to 1
    (x * k <= 1/2 suffices since the product is positive).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if isinstance(x, Fraction):
        return ceil_frac(x * k)
    if x.log2 + mpmath.log(k, 2) < -1:
        return 1
    raise UndecidableAtScale(f"cannot take ceil of {x} * {k} from logs alone")


def scalar_lt_int(x: Scalar, k: int) -> bool:
    """Decide x < k exactly, or via an unambiguous log bound."""
    if isinstance(x, Fraction):
        return x < k
    return x < Fraction(k)
