import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Union

from updyn.conjugacy.logistic import Undecided
from updyn.symbolic.core import DomainError, DottedWord, FiniteWord
from updyn.symbolic.star import BI_INFINITE_STAR, central_window
from updyn.utils.intervals import Interval, IntervalBox

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

DEFAULT_HORSESHOE_CONTRACTION = Fraction(1, 3)
"""
Horizontal contraction of the affine horseshoe.
"""

DEFAULT_HORSESHOE_EXPANSION = Fraction(3)
"""
Vertical expansion of the affine horseshoe.
"""

_UNIT = Interval(0, 1)


@dataclass(frozen=True)
class HorseshoeSystem:
    """
    Affine horseshoe on the unit square.

    The horizontal strips ``H0 = [0,1] x [0, 1/mu]`` and ``H1 = [0,1] x [1 - 1/mu, 1]`` are mapped
    onto the vertical strips ``V0 = [0, lam] x [0,1]`` and ``V1 = [1 - lam, 1] x [0,1]`` by
    ``(x, y) -> (lam x, mu y)`` on H0 and ``(x, y) -> (1 - lam x, mu (1 - y))`` on H1. The symbol
    at time k of a point p is j when ``f^k(p)`` lies in V_j.

    :param contraction: lam in (0, 1/2)
    :param expansion: mu > 2
    """

    contraction: Fraction = DEFAULT_HORSESHOE_CONTRACTION
    expansion: Fraction = DEFAULT_HORSESHOE_EXPANSION

    def __post_init__(self):
        for name in ("contraction", "expansion"):
            if isinstance(getattr(self, name), float):
                raise TypeError(f"{name} must be an exact rational, not a float")
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not 0 < self.contraction < Fraction(1, 2):
            raise DomainError(f"Contraction must lie in (0, 1/2), got {self.contraction}")
        if self.expansion <= 2:
            raise DomainError(f"Expansion must exceed 2, got {self.expansion}")

    def horizontal(self, j: int) -> IntervalBox:
        band = Interval(0, 1 / self.expansion) if j == 0 else Interval(1 - 1 / self.expansion, 1)
        return IntervalBox((_UNIT, band))

    def vertical(self, j: int) -> IntervalBox:
        band = Interval(0, self.contraction) if j == 0 else Interval(1 - self.contraction, 1)
        return IntervalBox((band, _UNIT))


def _strip_symbol(sys: HorseshoeSystem, p: IntervalBox, vertical: bool) -> Optional[int]:
    for j in (0, 1):
        strip = sys.vertical(j) if vertical else sys.horizontal(j)
        if strip.contains(p):
            return j
    return None


def horseshoe_forward(sys: HorseshoeSystem, j: int, p: IntervalBox) -> IntervalBox:
    """
    Image of a box contained in H_j.
    """
    x, y = p[0], p[1]
    if j == 0:
        return IntervalBox((sys.contraction * x, sys.expansion * y))
    return IntervalBox((1 - sys.contraction * x, sys.expansion * (1 - y)))


def horseshoe_backward(sys: HorseshoeSystem, j: int, p: IntervalBox) -> IntervalBox:
    """
    Preimage of a box contained in V_j.
    """
    x, y = p[0], p[1]
    if j == 0:
        return IntervalBox((x / sys.contraction, y / sys.expansion))
    return IntervalBox(((1 - x) / sys.contraction, 1 - y / sys.expansion))


def horseshoe_itinerary(
    sys: HorseshoeSystem, p: Union[IntervalBox, tuple], length: int, backward: Optional[int] = None
) -> Union[DottedWord, Undecided]:
    """
    Two-sided symbols of `p` on indices ``-backward .. length - 1``.

    Symbol 0 comes from V-strip membership of p. Forward symbol k + 1 is the H strip holding
    ``f^k(p)``, which is where ``f^(k+1)(p)`` lands in V. Backward symbols are the V strips of the
    preimages.

    :param sys: Horseshoe
    :param p: 2-D box or exact point
    :param length: Number of forward symbols (indices 0..length-1), >= 1
    :param backward: Number of backward symbols (defaults to ``length - 1``)
    :return: DottedWord with the dot before index 0, or Undecided
    """
    if length < 1:
        raise ValueError(f"length must be positive, got {length}")
    backward = length - 1 if backward is None else backward
    p = p if isinstance(p, IntervalBox) else IntervalBox.point(*p)

    first = _strip_symbol(sys, p, vertical=True)
    if first is None:
        return Undecided(0, FiniteWord(), p)

    forward: List[int] = [first]
    q = p
    for k in range(1, length):
        j = _strip_symbol(sys, q, vertical=False)
        if j is None:
            return Undecided(k, FiniteWord(tuple(forward)), q)
        q = horseshoe_forward(sys, j, q)
        forward.append(j)

    past: List[int] = []
    q, j = p, first
    for k in range(1, backward + 1):
        q = horseshoe_backward(sys, j, q)
        j = _strip_symbol(sys, q, vertical=True)
        if j is None:
            return Undecided(-k, FiniteWord(tuple(forward)), q)
        past.append(j)

    word = FiniteWord(tuple(reversed(past)) + tuple(forward))
    return DottedWord(word, backward)


def horseshoe_box_for(sys: HorseshoeSystem, w: Union[DottedWord, str]) -> IntervalBox:
    """
    Box of points whose symbols on the indices of `w` are those of `w`.

    The x-interval is ``phi_s0(phi_s-1(... [0,1]))`` with ``phi_0(x) = lam x`` and
    ``phi_1(x) = 1 - lam x``; the y-interval is ``psi_s1(psi_s2(... [0,1]))`` with
    ``psi_0(y) = y / mu`` and ``psi_1(y) = 1 - y / mu``.

    :param sys: Horseshoe
    :param w: Window containing index 0 (or ending at index -1)
    :return: 2-D box
    """
    w = DottedWord.from_string(w) if isinstance(w, str) else w
    if not 0 <= w.dot <= len(w.word):
        raise DomainError(f"Window {w} must reach the origin to define a box")
    past = list(w.left) + ([] if w.dot == len(w.word) else [w.word[w.dot]])
    future = list(w.right)[1:]

    x = _UNIT
    for s in past:
        x = sys.contraction * x if s == 0 else 1 - sys.contraction * x
    y = _UNIT
    for s in reversed(future):
        y = y / sys.expansion if s == 0 else 1 - y / sys.expansion
    return IntervalBox((x, y))


def horseshoe_transport_unpredictable_point(sys: HorseshoeSystem, radius: int) -> IntervalBox:
    """
    Box of the horseshoe point coded by the central window of the bi-infinite star sequence.

    :param sys: Horseshoe
    :param radius: Window radius, >= 0
    :return: 2-D box with sides lam^(radius + 1) and mu^-radius
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    box = horseshoe_box_for(sys, central_window(BI_INFINITE_STAR, radius))
    logger.info(f"Horseshoe point of s* at radius {radius}: box {box}")
    return box


def box_center(box: IntervalBox) -> IntervalBox:
    return IntervalBox.point(*box.center)


def expected_widths(sys: HorseshoeSystem, radius: int) -> tuple:
    """
    Side lengths ``(lam^(radius + 1), mu^-radius)`` of boxes of central windows.
    """
    return sys.contraction ** (radius + 1), 1 / sys.expansion ** radius

