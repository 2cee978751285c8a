import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Union

import mpmath

from updyn.symbolic.core import DomainError
from updyn.utils.intervals import (
    DEFAULT_PRECISION_BITS,
    Interval,
    IntervalBox,
    Number,
    round_outward,
    sqrt_bounds,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

MARGIN_PRECISION_BITS = 200
"""
Binary precision of the floating evaluation of the parameter-region margin.
"""


def _exact(x: Number, name: str) -> Fraction:
    if isinstance(x, float):
        raise TypeError(f"{name} must be an exact rational, not a float")
    return Fraction(x)


@dataclass(frozen=True)
class HenonSystem:
    """
    The map ``(x, y) -> (alpha - beta y - x^2, x)``.

    :param alpha: Exact rational
    :param beta: Exact non-zero rational
    :param precision_bits: Outward rounding precision
    """

    alpha: Fraction
    beta: Fraction
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        object.__setattr__(self, "alpha", _exact(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _exact(self.beta, "beta"))
        if self.beta == 0:
            raise DomainError("The Henon map needs beta != 0")

    @property
    def in_region(self) -> bool:
        return henon_region_check(self.alpha, self.beta)


def henon_step(sys: HenonSystem, p: IntervalBox) -> IntervalBox:
    """
    Outward-rounded image of a 2-D box.

    :param sys: Henon system
    :param p: Box ``X x Y``
    :return: Box ``(alpha - beta Y - X^2) x X``
    """
    if p.dims != 2:
        raise DomainError(f"The Henon map acts on 2-D boxes, got {p.dims} dimensions")
    x, y = p[0], p[1]
    new_x = sys.alpha - sys.beta * y - x.square()
    return IntervalBox(
        (round_outward(new_x, sys.precision_bits), round_outward(x, sys.precision_bits))
    )


def henon_orbit(sys: HenonSystem, p: IntervalBox, steps: int) -> List[IntervalBox]:
    """
    Enclosures of the first `steps` iterates of `p`, starting with `p` itself.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    boxes = [p]
    for _ in range(steps):
        boxes.append(henon_step(sys, boxes[-1]))
    return boxes


def henon_region_check(alpha: Number, beta: Number) -> bool:
    """
    Decide ``alpha >= (5 + 2 sqrt(5)) (1 + |beta|)^2 / 4`` exactly.

    With ``c = 4 alpha / (1 + |beta|)^2 - 5`` the inequality reads ``c >= 2 sqrt(5)``, which holds
    iff ``c >= 0`` and ``c^2 >= 20``.

    :param alpha: Exact rational
    :param beta: Exact non-zero rational
    :return: Whether (alpha, beta) lies in the region
    """
    alpha, beta = _exact(alpha, "alpha"), _exact(beta, "beta")
    if beta == 0:
        raise DomainError("The Henon parameter region needs beta != 0")
    c = 4 * alpha / (1 + abs(beta)) ** 2 - 5
    return c >= 0 and c * c >= 20


def henon_threshold(beta: Number, precision_bits: int = DEFAULT_PRECISION_BITS) -> Interval:
    """
    Rational enclosure of ``(5 + 2 sqrt(5)) (1 + |beta|)^2 / 4``.
    """
    beta = _exact(beta, "beta")
    lo, hi = sqrt_bounds(5, precision_bits)
    scale = (1 + abs(beta)) ** 2 / 4
    return Interval((5 + 2 * lo) * scale, (5 + 2 * hi) * scale)


def henon_region_margin(alpha: Number, beta: Number) -> mpmath.mpf:
    """
    ``alpha - (5 + 2 sqrt(5)) (1 + |beta|)^2 / 4`` evaluated in 200-bit floating point.
    """
    alpha, beta = _exact(alpha, "alpha"), _exact(beta, "beta")
    with mpmath.workprec(MARGIN_PRECISION_BITS):
        a = mpmath.mpf(alpha.numerator) / alpha.denominator
        b = abs(mpmath.mpf(beta.numerator) / beta.denominator)
        return a - (5 + 2 * mpmath.sqrt(5)) * (1 + b) ** 2 / 4


def henon_region_report(alpha: Number, beta: Number) -> dict:
    """
    Region decision with the threshold enclosure and the floating margin, for reports.
    """
    region_ok = henon_region_check(alpha, beta)
    threshold = henon_threshold(beta)
    margin = henon_region_margin(alpha, beta)
    if not region_ok:
        logger.warning(f"(alpha, beta) = ({alpha}, {beta}) lies outside the Henon parameter region")
    return {
        "region_ok": region_ok,
        "threshold": threshold,
        "margin": mpmath.nstr(margin, 30),
    }


def as_box(x: Union[IntervalBox, tuple]) -> IntervalBox:
    """
    Accept a box or a pair of exact coordinates.
    """
    if isinstance(x, IntervalBox):
        return x
    return IntervalBox.point(*x)
