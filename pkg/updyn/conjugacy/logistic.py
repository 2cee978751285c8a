import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

from updyn.certification.systems import CertificationError
from updyn.certification.unpredictability import UnpredictabilityCertificate
from updyn.symbolic.core import ONE_SIDED, DomainError, FiniteWord, Stream
from updyn.symbolic.star import ONE_SIDED_STAR
from updyn.utils.intervals import (
    DEFAULT_PRECISION_BITS,
    Interval,
    IntervalBox,
    Number,
    PrecisionError,
    round_outward,
    sqrt_bounds,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

DEFAULT_LOGISTIC_MU = Fraction(9, 2)
"""
Growth parameter used by default. At 9/2 the branch intervals are exactly [0, 1/3] and [2/3, 1].
"""

HALF = Fraction(1, 2)

_UNIT = Interval(0, 1)


@dataclass(frozen=True)
class LogisticSystem:
    """
    The logistic map ``x -> mu x (1 - x)`` for mu > 4, whose non-escaping points form an invariant
    Cantor set split between the branch intervals I0 = [0, x-] and I1 = [x+, 1].

    :param mu: Growth parameter, exact rational > 4
    :param precision_bits: Working precision of square roots and outward rounding
    """

    mu: Fraction = DEFAULT_LOGISTIC_MU
    precision_bits: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        if isinstance(self.mu, float):
            raise TypeError("mu must be an exact rational, not a float")
        mu = Fraction(self.mu)
        if mu <= 4:
            raise DomainError(f"The logistic conjugacy needs mu > 4, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def _root_gap(self) -> Tuple[Fraction, Fraction]:
        # enclosure of sqrt(1 - 4/mu) = x+ - x-
        return sqrt_bounds(1 - 4 / self.mu, self.precision_bits)

    @property
    def left_branch(self) -> Interval:
        """
        Outer enclosure of I0.
        """
        return Interval(0, (1 - self._root_gap[0]) / 2)

    @property
    def right_branch(self) -> Interval:
        """
        Outer enclosure of I1.
        """
        return Interval((1 + self._root_gap[0]) / 2, 1)

    @property
    def gap(self) -> Fraction:
        """
        Certified lower bound of the distance between I0 and I1.
        """
        return self.right_branch.lo - self.left_branch.hi

    def branch(self, symbol: int) -> Interval:
        return self.left_branch if symbol == 0 else self.right_branch


@dataclass(frozen=True)
class Undecided:
    """
    Itinerary outcome when a box cannot be assigned a symbol.

    :param step: Iterate at which the decision failed
    :param prefix: Symbols decided before `step`
    :param box: Enclosure of the iterate at `step`
    """

    step: int
    prefix: FiniteWord
    box: IntervalBox


Itinerary = Union[FiniteWord, Undecided]


def _as_interval(x: Union[IntervalBox, Interval, Number]) -> Interval:
    if isinstance(x, IntervalBox):
        if x.dims != 1:
            raise DomainError(f"The logistic map acts on 1-D boxes, got {x.dims} dimensions")
        return x[0]
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


def logistic_step(sys: LogisticSystem, x: Union[IntervalBox, Interval, Number]) -> IntervalBox:
    """
    Enclosure of ``mu x (1 - x)`` over the box `x`.

    The range is computed exactly from the endpoints and the vertex at 1/2, then endpoints with
    oversized denominators are rounded outward.

    :param sys: Logistic system
    :param x: 1-D box (escaping points are allowed)
    :return: 1-D box
    """
    iv = _as_interval(x)

    def f(v: Fraction) -> Fraction:
        return sys.mu * v * (1 - v)

    ends = (f(iv.lo), f(iv.hi))
    hi = sys.mu / 4 if iv.contains(HALF) else max(ends)
    image = round_outward(Interval(min(ends), hi), sys.precision_bits)
    return IntervalBox((image,))


def _symbol(sys: LogisticSystem, iv: Interval) -> Optional[int]:
    for symbol in (0, 1):
        if sys.branch(symbol).contains(iv):
            return symbol
    return None


def _surviving(sys: LogisticSystem, iv: Interval) -> Optional[Interval]:
    """
    Part of a forward iterate that can still lie on the invariant set, or None when the iterate
    reaches both sides of 1/2.

    Points of an iterate beyond [0, 1] or inside the gap escape at the next step and are dropped.
    """
    if iv.hi < HALF:
        branch = sys.left_branch
    elif iv.lo > HALF:
        branch = sys.right_branch
    else:
        return None
    lo, hi = max(iv.lo, branch.lo), min(iv.hi, branch.hi)
    return Interval(lo, hi) if lo <= hi else None


def _follow(sys: LogisticSystem, iv: Interval, length: int, strict_start: bool) -> Itinerary:
    symbols: List[int] = []
    for k in range(length):
        kept = iv if strict_start and k == 0 else _surviving(sys, iv)
        symbol = None if kept is None else _symbol(sys, kept)
        if symbol is None:
            logger.debug(f"Itinerary undecided at step {k} for box {iv}")
            return Undecided(k, FiniteWord(tuple(symbols)), IntervalBox((iv,)))
        symbols.append(symbol)
        if k + 1 < length:
            iv = logistic_step(sys, kept)[0]
    return FiniteWord(tuple(symbols))


def itinerary(sys: LogisticSystem, x: Union[IntervalBox, Interval], length: int) -> Itinerary:
    """
    The first `length` symbols shared by every point of `x` that never leaves [0, 1].

    Symbol k is 0 when the k-th iterate enclosure lies in I0 and 1 when it lies in I1. The box `x`
    itself must lie wholly inside one branch enclosure: a box that straddles 1/2, enters the
    escape gap or leaves [0, 1] gives an :class:`Undecided` outcome at step 0. Later iterates
    first drop the points already shown to escape and are then held to the same test.

    :param sys: Logistic system
    :param x: 1-D box
    :param length: Number of symbols, >= 1
    :return: FiniteWord or Undecided
    """
    if length < 1:
        raise ValueError(f"Itinerary length must be positive, got {length}")
    return _follow(sys, _as_interval(x), length, strict_start=True)


def _inverse_branch(sys: LogisticSystem, symbol: int, y: Interval) -> Interval:
    """
    Outward enclosure of ``g_symbol(y) = (1 -/+ sqrt(1 - 4y/mu)) / 2``; g0 increases and g1
    decreases in y.
    """
    y = Interval(max(y.lo, 0), min(y.hi, 1))
    at_lo = sqrt_bounds(1 - 4 * y.lo / sys.mu, sys.precision_bits)
    at_hi = sqrt_bounds(1 - 4 * y.hi / sys.mu, sys.precision_bits)
    # g_symbol maps into I_symbol, so the enclosure is clipped to the branch
    if symbol == 0:
        return Interval((1 - at_lo[1]) / 2, min((1 - at_hi[0]) / 2, sys.left_branch.hi))
    return Interval(max((1 + at_hi[0]) / 2, sys.right_branch.lo), (1 + at_lo[1]) / 2)


def point_for(
    sys: LogisticSystem, w: Union[FiniteWord, str], max_width: Optional[Fraction] = None
) -> IntervalBox:
    """
    Enclosure of the points whose itinerary begins with `w`:
    ``g_w0(g_w1(... g_w(L-1)([0, 1]) ...))``.

    :param sys: Logistic system
    :param w: Non-empty word
    :param max_width: Optional largest acceptable width
    :return: 1-D box
    """
    w = FiniteWord.from_string(w) if isinstance(w, str) else w
    if not len(w):
        raise DomainError("point_for needs a non-empty word")
    y = _UNIT
    for symbol in reversed(w.bits):
        y = _inverse_branch(sys, symbol, y)
    if max_width is not None and y.width > max_width:
        raise PrecisionError(
            f"Enclosure of width {y.width} for '{w}' exceeds requested {max_width} "
            f"at {sys.precision_bits} bits",
            achieved_width=y.width,
        )
    return IntervalBox((y,))


def transport_unpredictable_point(
    sys: LogisticSystem, depth: int, max_width: Optional[Fraction] = None
) -> IntervalBox:
    """
    Enclosure of the logistic point coded by the one-sided star sequence, from its first `depth`
    symbols.

    :param sys: Logistic system
    :param depth: Number of symbols used, >= 1
    :param max_width: Optional largest acceptable width
    :return: 1-D box
    """
    if depth < 1:
        raise ValueError(f"depth must be positive, got {depth}")
    prefix = FiniteWord.from_string(ONE_SIDED_STAR.render(0, depth))
    box = point_for(sys, prefix, max_width=max_width)
    logger.info(f"Unpredictable logistic point at depth {depth}: width {float(box.width):.3e}")
    return box


@dataclass(frozen=True)
class CommutationReport:
    """
    Outcome of checking ``itinerary(f(point_for(w))) = sigma(w)`` on sampled words.
    """

    checked: int
    failures: Tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def _commutes(sys: LogisticSystem, w: FiniteWord) -> bool:
    image = logistic_step(sys, point_for(sys, w))[0]
    return _follow(sys, image, len(w) - 1, strict_start=False) == w[1:]


def conjugacy_commutation_check(
    sys: LogisticSystem,
    w_length: int = 12,
    samples: int = 100,
    seed: int = 0,
    words: Optional[Iterable[Union[FiniteWord, str]]] = None,
) -> CommutationReport:
    """
    Finite-depth check of ``h o f = sigma o h`` on random words (or on the given `words`).

    :param sys: Logistic system
    :param w_length: Length of random words, >= 2
    :param samples: Number of random words
    :param seed: Seed of the word sampler
    :param words: Explicit words to check instead of random ones
    :return: CommutationReport
    """
    if words is None:
        if w_length < 2:
            raise ValueError(f"w_length must be at least 2, got {w_length}")
        rng = random.Random(seed)
        words = [FiniteWord.from_value(rng.getrandbits(w_length), w_length) for _ in range(samples)]
    words = [FiniteWord.from_string(w) if isinstance(w, str) else w for w in words]
    failures = tuple(str(w) for w in words if len(w) > 1 and not _commutes(sys, w))
    if failures:
        logger.warning(f"Found {len(failures)} failures in commutation check: {failures[:5]}")
    else:
        logger.info(f"PASSED commutation check on {len(words)} words (mu = {sys.mu})")
    return CommutationReport(len(words), failures)


@dataclass(frozen=True)
class LogisticEntry:
    """
    A certificate level carried to the logistic map.

    :param n: Depth
    :param t: Return time
    :param tau: Separation time
    :param proximity_bound: Upper bound of ``|f^t(x*) - x*|``
    :param separation_lower_bound: Lower bound of ``|f^(t + tau)(x*) - f^tau(x*)|``
    """

    n: int
    t: int
    tau: int
    proximity_bound: Fraction
    separation_lower_bound: Fraction


@dataclass(frozen=True)
class LogisticCertificate:
    """
    Unpredictability certificate of the logistic point coded by a shift certificate's subject.
    """

    mu: Fraction
    epsilon0: Fraction
    entries: Tuple[LogisticEntry, ...]


def _separation(a: Interval, b: Interval) -> Fraction:
    return max(a.lo - b.hi, b.lo - a.hi, Fraction(0))


def transport_certificate_to_logistic(
    cert: UnpredictabilityCertificate,
    sys: LogisticSystem,
    depth: int = 12,
    stream: Optional[Stream] = None,
) -> LogisticCertificate:
    """
    Carry a one-sided shift certificate to the logistic map through the itinerary coding.

    Agreement of ``sigma^t(s)`` and `s` on indices 0..n puts both coded points in the box of that
    common word, whose width bounds the proximity. A mismatch at index 0 puts the two separated
    points in different branches, at least the gap apart.

    :param cert: One-sided certificate
    :param sys: Logistic system
    :param depth: Symbols used for the separation boxes
    :param stream: The certified sequence (defaults to ``cert.stream``)
    :return: LogisticCertificate with epsilon0 the certified gap
    """
    s = stream if stream is not None else cert.stream
    if s is None:
        raise ValueError("transport_certificate_to_logistic needs the certified stream")
    if cert.kind != ONE_SIDED:
        raise DomainError("The logistic coding uses one-sided sequences")

    def box(start: int, length: int) -> Interval:
        return point_for(sys, FiniteWord.from_string(s.render(start, length)))[0]

    epsilon0 = sys.gap
    entries = []
    for e in cert.entries:
        radius = max(e.n - cert.shift, 0) + 1
        if s.render(e.t, radius) != s.render(0, radius):
            raise CertificationError(f"Entry n={e.n} does not agree on its window", n=e.n)
        proximity = box(0, radius).width
        separation = _separation(box(e.t + e.tau, depth), box(e.tau, depth))
        if separation < epsilon0:
            raise CertificationError(
                f"Entry n={e.n} separates by {separation}, below the gap {epsilon0}", n=e.n
            )
        entries.append(LogisticEntry(e.n, e.t, e.tau, proximity, separation))
    logger.info(f"Transported {len(entries)} entries to the logistic map with mu = {sys.mu}")
    return LogisticCertificate(sys.mu, epsilon0, tuple(entries))
