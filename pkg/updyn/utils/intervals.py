import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

DEFAULT_PRECISION_BITS = 64
"""
Square roots are enclosed to width 2^-64 and oversized endpoints are rounded outward to this grid.
"""

Number = Union[int, Fraction, str]


class PrecisionError(Exception):
    """
    Raised when an enclosure narrower than the working precision allows is requested.

    :param message: Description
    :param achieved_width: Width actually achieved
    """

    def __init__(self, message: str, achieved_width: Fraction):
        super().__init__(message)
        self.achieved_width = achieved_width


def _fraction(x: Number) -> Fraction:
    if isinstance(x, float):
        raise TypeError("Floats are not accepted by exact interval arithmetic")
    return Fraction(x)


@dataclass(frozen=True)
class Interval:
    """
    Closed interval ``[lo, hi]`` with exact rational endpoints.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _fraction(self.lo), _fraction(self.hi)
        if lo > hi:
            raise ValueError(f"Invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Union[Number, "Interval"]) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = _fraction(x)
        return self.lo <= x <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        return self + (-other)

    def __rsub__(self, other):
        return Interval.point(other) - self

    def __mul__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = other if isinstance(other, Interval) else Interval.point(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError(f"Division by interval {other} containing zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def square(self) -> "Interval":
        """
        Tight enclosure of ``{x^2 : x in self}``.
        """
        lo2, hi2 = self.lo * self.lo, self.hi * self.hi
        if self.lo <= 0 <= self.hi:
            return Interval(0, max(lo2, hi2))
        return Interval(min(lo2, hi2), max(lo2, hi2))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class IntervalBox:
    """
    Product of closed rational intervals (1-D for the logistic map, 2-D for planar maps).
    """

    intervals: Tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        if not self.intervals:
            raise ValueError("IntervalBox needs at least one dimension")

    @classmethod
    def from_bounds(cls, *bounds: Tuple[Number, Number]) -> "IntervalBox":
        """
        Build a box from ``(lo, hi)`` pairs, one per dimension.
        """
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @classmethod
    def point(cls, *coordinates: Number) -> "IntervalBox":
        return cls(tuple(Interval.point(x) for x in coordinates))

    @property
    def dims(self) -> int:
        return len(self.intervals)

    @property
    def lo(self) -> Fraction:
        return self.intervals[0].lo

    @property
    def hi(self) -> Fraction:
        return self.intervals[0].hi

    @property
    def width(self) -> Fraction:
        """
        Largest side length.
        """
        return max(iv.width for iv in self.intervals)

    @property
    def center(self) -> Tuple[Fraction, ...]:
        return tuple(iv.midpoint for iv in self.intervals)

    def contains(self, other: Union["IntervalBox", Sequence[Number]]) -> bool:
        if isinstance(other, IntervalBox):
            return all(a.contains(b) for a, b in zip(self.intervals, other.intervals))
        return all(a.contains(x) for a, x in zip(self.intervals, other))

    def __getitem__(self, item: int) -> Interval:
        return self.intervals[item]

    def __iter__(self):
        return iter(self.intervals)

    def __str__(self) -> str:
        return " x ".join(str(iv) for iv in self.intervals)


def round_outward(interval: Interval, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """
    Replace endpoints whose denominators exceed ``2 * precision_bits`` bits by the enclosing points
    of the dyadic grid of spacing ``2^-(2 * precision_bits)``. Small exact endpoints are kept as they are.

    :param interval: Input interval
    :param precision_bits: Working precision
    :return: Interval containing `interval`
    """
    limit = 2 * precision_bits
    scale = 1 << limit

    def down(x: Fraction) -> Fraction:
        if x.denominator.bit_length() <= limit:
            return x
        return Fraction(math.floor(x * scale), scale)

    def up(x: Fraction) -> Fraction:
        if x.denominator.bit_length() <= limit:
            return x
        return Fraction(math.ceil(x * scale), scale)

    return Interval(down(interval.lo), up(interval.hi))


def _exact_sqrt(x: Fraction):
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def sqrt_bounds(x: Fraction, precision_bits: int = DEFAULT_PRECISION_BITS) -> Tuple[Fraction, Fraction]:
    """
    Rational ``(lower, upper)`` with ``lower <= sqrt(x) <= upper`` and ``upper - lower <= 2^-precision_bits``.
    Exact square roots of rational squares are returned exactly.

    :param x: Non-negative rational
    :param precision_bits: Working precision
    :return: Bounds
    """
    x = _fraction(x)
    if x < 0:
        raise ValueError(f"Square root of negative number {x}")
    exact = _exact_sqrt(x)
    if exact is not None:
        return exact, exact
    scale = 1 << precision_bits
    # floor(sqrt(x) * scale) = isqrt(floor(x * scale^2))
    root = math.isqrt(math.floor(x * scale * scale))
    return Fraction(root, scale), Fraction(root + 1, scale)


def interval_sqrt(interval: Interval, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """
    Outward-rounded enclosure of ``sqrt`` over a non-negative interval.
    """
    if interval.lo < 0:
        raise ValueError(f"Square root of interval {interval} with negative part")
    return Interval(
        sqrt_bounds(interval.lo, precision_bits)[0], sqrt_bounds(interval.hi, precision_bits)[1]
    )


def hull(intervals: Iterable[Interval]) -> Interval:
    intervals = list(intervals)
    return Interval(min(iv.lo for iv in intervals), max(iv.hi for iv in intervals))
