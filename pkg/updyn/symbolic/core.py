import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Tuple, Union

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

ONE_SIDED = "one_sided"
"""
Kind of a sequence indexed by the non-negative integers (elements of the one-sided space).
"""

BI_INFINITE = "bi_infinite"
"""
Kind of a sequence indexed by all integers (elements of the bi-infinite space).
"""

STREAM_KINDS = (ONE_SIDED, BI_INFINITE)

DEFAULT_RADIUS_CAP = 4096
"""
Largest window radius examined by `metric_at_least` and `agreement_radius` before giving up.
"""

DIFFERS_AT_ORIGIN = -1
"""
`agreement_radius` result for streams that already differ at index 0.
"""

EXCEEDS_CAP = None
"""
`agreement_radius` result for streams that agree on the whole window of radius `cap`.
"""

_FIRST_CHUNK = 64


class DomainError(ValueError):
    pass


class Decision(Enum):
    """
    Outcome of a metric comparison on infinite sequences.

    ``UNKNOWN`` means the comparison could not be decided within the radius cap; it is never
    interchangeable with ``NO``.
    """

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class FiniteWord:
    """
    A finite block of binary symbols.

    :param bits: Symbols of the word, each 0 or 1
    """

    bits: Tuple[int, ...] = ()

    def __post_init__(self):
        bits = tuple(self.bits)
        for b in bits:
            if b not in (0, 1) or isinstance(b, bool):
                raise DomainError(f"FiniteWord symbols must be 0 or 1, got {b!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> "FiniteWord":
        """
        Build a word from a string over {0,1}, e.g. ``"0110"``.

        :param text: Word as a string
        :return: FiniteWord
        """
        if any(c not in "01" for c in text):
            raise DomainError(f"Words are strings over {{0,1}}, got '{text}'")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_value(cls, value: int, length: int) -> "FiniteWord":
        """
        Binary representation of `value` padded with leading zeros to `length` symbols.

        :param value: Non-negative integer below 2**length
        :param length: Number of symbols
        :return: FiniteWord
        """
        if length < 0 or value < 0 or value >> length:
            raise DomainError(f"{value} does not fit in {length} binary symbols")
        if length == 0:
            return cls(())
        return cls.from_string(format(value, f"0{length}b"))

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        """
        The word read as a binary number (most significant symbol first).
        """
        return int(str(self), 2) if self.bits else 0

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return FiniteWord(self.bits[item])
        return self.bits[item]

    def __add__(self, other: "FiniteWord") -> "FiniteWord":
        return FiniteWord(self.bits + other.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class DottedWord:
    """
    A finite two-sided window of a sequence.

    `dot` is the position inside `word` of the symbol with index 0, so the symbol at index ``i``
    is ``word[dot + i]``. It may fall outside the word when the window does not cover the origin.

    :param word: Symbols of the window, left to right
    :param dot: Position of index 0 within `word`
    """

    word: FiniteWord
    dot: int = 0

    @classmethod
    def from_string(cls, text: str) -> "DottedWord":
        """
        Parse ``"01.000"`` style strings. Without a dot, the origin is the first symbol.

        :param text: Window as a string
        :return: DottedWord
        """
        if text.count(".") > 1:
            raise DomainError(f"At most one dot allowed in '{text}'")
        dot = text.index(".") if "." in text else 0
        return cls(FiniteWord.from_string(text.replace(".", "")), dot)

    @property
    def offset(self) -> int:
        """
        Index of the first symbol of the window.
        """
        return -self.dot

    @property
    def left(self) -> FiniteWord:
        return self.word[: max(self.dot, 0)]

    @property
    def right(self) -> FiniteWord:
        return self.word[max(self.dot, 0) :]

    def symbol(self, i: int) -> int:
        pos = self.dot + i
        if not 0 <= pos < len(self.word):
            raise IndexError(f"Index {i} outside window [{self.offset}, {self.offset + len(self.word) - 1}]")
        return self.word[pos]

    def indices(self) -> range:
        return range(self.offset, self.offset + len(self.word))

    def __str__(self) -> str:
        text = str(self.word)
        if 0 <= self.dot <= len(text):
            return f"{text[: self.dot]}.{text[self.dot :]}"
        return text


@dataclass(frozen=True)
class SymbolStream:
    """
    An infinite binary sequence defined by an index rule.

    :param kind: ``one_sided`` or ``bi_infinite``
    :param rule: Total, deterministic map from index to symbol
    :param description: Human-readable provenance
    :param renderer: Optional bulk renderer ``(start, count) -> str`` agreeing with `rule`
    """

    kind: str
    rule: Callable[[int], int] = field(compare=False)
    description: str = ""
    renderer: Optional[Callable[[int, int], str]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in STREAM_KINDS:
            raise DomainError(f"Unknown stream kind '{self.kind}'")

    def symbol(self, i: int) -> int:
        """
        Symbol at index `i`.

        :param i: Index (non-negative for one-sided streams)
        :return: 0 or 1
        """
        if self.kind == ONE_SIDED and i < 0:
            raise DomainError(f"One-sided stream queried at negative index {i}")
        value = self.rule(i)
        if value not in (0, 1):
            raise DomainError(f"Rule of {self.description or 'stream'} returned {value!r} at {i}")
        return value

    def render(self, start: int, count: int) -> str:
        """
        Symbols at indices ``start, ..., start + count - 1`` as a string.

        :param start: First index
        :param count: Number of symbols
        :return: String over {0,1}
        """
        if count < 0:
            raise ValueError(f"count must be non-negative, got {count}")
        if self.kind == ONE_SIDED and start < 0:
            raise DomainError(f"One-sided stream rendered from negative index {start}")
        if self.renderer is not None:
            return self.renderer(start, count)
        return "".join(str(self.symbol(i)) for i in range(start, start + count))

    def __getitem__(self, i: int) -> int:
        return self.symbol(i)

    def __str__(self) -> str:
        return self.description or f"{self.kind} stream"


@dataclass(frozen=True)
class ShiftedStream:
    """
    The view ``sigma^offset(base)``: symbol ``i`` is the symbol of `base` at ``i + offset``.

    :param base: Underlying stream
    :param offset: Shift amount (non-negative when `base` is one-sided)
    """

    base: SymbolStream
    offset: int = 0

    def __post_init__(self):
        if self.base.kind == ONE_SIDED and self.offset < 0:
            raise DomainError(
                f"Negative offset {self.offset} on one-sided stream {self.base}"
            )

    @property
    def kind(self) -> str:
        return self.base.kind

    @property
    def description(self) -> str:
        return f"sigma^{self.offset}({self.base})"

    def symbol(self, i: int) -> int:
        if self.kind == ONE_SIDED and i < 0:
            raise DomainError(f"One-sided stream queried at negative index {i}")
        return self.base.symbol(i + self.offset)

    def render(self, start: int, count: int) -> str:
        if self.kind == ONE_SIDED and start < 0:
            raise DomainError(f"One-sided stream rendered from negative index {start}")
        return self.base.render(start + self.offset, count)

    def __getitem__(self, i: int) -> int:
        return self.symbol(i)

    def __str__(self) -> str:
        return self.description


Stream = Union[SymbolStream, ShiftedStream]


@dataclass(frozen=True)
class DyadicEnclosure:
    """
    Exact two-sided bound on a metric value.

    The true distance lies in ``[partial_sum, partial_sum + tail_bound]``.

    :param partial_sum: Exact sum over the window
    :param tail_bound: Exact mass of all terms outside the window
    :param window: First and last index summed
    """

    partial_sum: Fraction
    tail_bound: Fraction
    window: Tuple[int, int]

    @property
    def upper(self) -> Fraction:
        return self.partial_sum + self.tail_bound

    @property
    def lower(self) -> Fraction:
        return self.partial_sum

    def contains(self, value: Fraction) -> bool:
        return self.partial_sum <= value <= self.upper

    def within(self, other: "DyadicEnclosure") -> bool:
        """
        Check whether this enclosure is contained in `other`.
        """
        return other.partial_sum <= self.partial_sum and self.upper <= other.upper


def stream_base(s: Stream) -> Tuple[SymbolStream, int]:
    """
    Split a stream into its underlying rule-defined stream and the accumulated shift.

    :param s: Stream
    :return: (base stream, offset)
    """
    if isinstance(s, ShiftedStream):
        return s.base, s.offset
    return s, 0


def shift(s: Stream, t: int) -> ShiftedStream:
    """
    Apply ``sigma^t``. Shifting an already shifted view composes the offsets.

    :param s: Stream or shifted view
    :param t: Shift amount
    :return: Shifted view sharing the same base
    """
    base, offset = stream_base(s)
    if base.kind == ONE_SIDED and offset + t < 0:
        raise DomainError(
            f"Shift by {t} gives negative offset {offset + t} on one-sided stream {base}"
        )
    return ShiftedStream(base, offset + t)


def window(s: Stream, start: int, count: int) -> DottedWord:
    """
    Extract the symbols at indices ``start .. start + count - 1`` together with the origin position.

    :param s: Stream
    :param start: First index
    :param count: Number of symbols
    :return: DottedWord
    """
    return DottedWord(FiniteWord.from_string(s.render(start, count)), -start)


def constant_stream(symbol: int, kind: str = ONE_SIDED) -> SymbolStream:
    """
    The fixed point of the shift with every symbol equal to `symbol`.
    """
    return SymbolStream(
        kind,
        lambda i: symbol,
        f"constant {symbol}",
        renderer=lambda start, count: str(symbol) * count,
    )


def periodic_stream(period: Union[str, FiniteWord], kind: str = ONE_SIDED) -> SymbolStream:
    """
    Stream repeating `period` forever (in both directions for bi-infinite kind).

    :param period: Non-empty word repeated with its first symbol at index 0
    :param kind: Stream kind
    :return: SymbolStream
    """
    period = FiniteWord.from_string(period) if isinstance(period, str) else period
    if not len(period):
        raise DomainError("Period must be non-empty")
    text = str(period)
    q = len(text)

    def render(start: int, count: int) -> str:
        reps = count // q + 2
        rotated = text[start % q :] + text[: start % q]
        return (rotated * reps)[:count]

    return SymbolStream(kind, lambda i: period[i % q], f"periodic ({text})", renderer=render)


def _check_same_kind(s: Stream, r: Stream) -> str:
    if s.kind != r.kind:
        raise DomainError(f"Cannot compare {s.kind} stream {s} with {r.kind} stream {r}")
    return s.kind


def metric(s: Stream, r: Stream, window_radius: int) -> DyadicEnclosure:
    """
    Enclose ``d[s, r] = sum |s_k - r_k| / 2^|k|`` by its exact partial sum over the window
    ``|k| <= window_radius`` (``0 <= k <= window_radius`` for one-sided streams) and the exact
    geometric mass of the remaining terms.

    :param s: First stream
    :param r: Second stream
    :param window_radius: Window radius R >= 0
    :return: DyadicEnclosure
    """
    kind = _check_same_kind(s, r)
    if window_radius < 0:
        raise ValueError(f"window_radius must be non-negative, got {window_radius}")
    R = window_radius
    if kind == ONE_SIDED:
        a, b = s.render(0, R + 1), r.render(0, R + 1)
        numerator = sum(1 << (R - k) for k in range(R + 1) if a[k] != b[k])
        return DyadicEnclosure(
            Fraction(numerator, 1 << R), Fraction(1, 1 << R), (0, R)
        )

    a, b = s.render(-R, 2 * R + 1), r.render(-R, 2 * R + 1)
    numerator = sum(
        1 << (R - abs(k)) for k in range(-R, R + 1) if a[k + R] != b[k + R]
    )
    return DyadicEnclosure(Fraction(numerator, 1 << R), Fraction(2, 1 << R), (-R, R))


def refine_metric(s: Stream, r: Stream, digits: int) -> DyadicEnclosure:
    """
    Enclosure of ``d[s, r]`` whose width (tail bound) is at most ``2^-digits``.

    :param s: First stream
    :param r: Second stream
    :param digits: Number of binary digits of accuracy
    :return: DyadicEnclosure
    """
    if digits < 0:
        raise ValueError(f"digits must be non-negative, got {digits}")
    radius = digits if _check_same_kind(s, r) == ONE_SIDED else digits + 1
    return metric(s, r, radius)


def _mismatch_chunks(
    s: Stream, r: Stream, cap: int
) -> Iterable[Tuple[int, str, str, str, str]]:
    """
    Yield ``(first_radius, s_right, r_right, s_left, r_left)`` chunks covering radii up to `cap`.

    Left chunks are read outward from the origin (index -first_radius first) and are empty for
    one-sided streams.
    """
    lo, size = 0, _FIRST_CHUNK
    while lo <= cap:
        hi = min(cap, lo + size - 1)
        count = hi - lo + 1
        s_right, r_right = s.render(lo, count), r.render(lo, count)
        s_left = r_left = ""
        if s.kind == BI_INFINITE:
            first = max(lo, 1)
            if first <= hi:
                n_left = hi - first + 1
                s_left = s.render(-hi, n_left)[::-1]
                r_left = r.render(-hi, n_left)[::-1]
                if lo == 0:
                    s_left, r_left = "=" + s_left, "=" + r_left
        yield lo, s_right, r_right, s_left, r_left
        lo, size = hi + 1, size * 2


def agreement_radius(s: Stream, r: Stream, cap: int = DEFAULT_RADIUS_CAP) -> Optional[int]:
    """
    Largest n <= `cap` such that `s` and `r` agree on every index of the central window of radius n.

    Returns :data:`DIFFERS_AT_ORIGIN` when the streams already differ at index 0 and
    :data:`EXCEEDS_CAP` when they agree through `cap`.

    :param s: First stream
    :param r: Second stream
    :param cap: Largest radius examined
    :return: Agreement radius, DIFFERS_AT_ORIGIN or EXCEEDS_CAP
    """
    _check_same_kind(s, r)
    if cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    for lo, s_right, r_right, s_left, r_left in _mismatch_chunks(s, r, cap):
        for k in range(len(s_right)):
            left_differs = bool(s_left) and s_left[k] != r_left[k]
            if s_right[k] != r_right[k] or left_differs:
                return DIFFERS_AT_ORIGIN if lo + k == 0 else lo + k - 1
    return EXCEEDS_CAP


def metric_at_least(
    s: Stream, r: Stream, threshold: Fraction, radius_cap: int = DEFAULT_RADIUS_CAP
) -> Decision:
    """
    Decide ``d[s, r] >= threshold`` by widening the window one radius at a time.

    ``YES`` is returned only when the exact partial sum reaches the threshold, ``NO`` only when the
    partial sum plus the tail bound stays below it. Otherwise ``UNKNOWN`` once `radius_cap` is hit.

    :param s: First stream
    :param r: Second stream
    :param threshold: Positive dyadic (or any rational) threshold
    :param radius_cap: Largest window radius examined
    :return: Decision
    """
    kind = _check_same_kind(s, r)
    threshold = Fraction(threshold)
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    tail_mass = 1 if kind == ONE_SIDED else 2
    p, q = threshold.numerator, threshold.denominator
    # partial sum at radius R is numerator / 2^R
    numerator = 0
    for lo, s_right, r_right, s_left, r_left in _mismatch_chunks(s, r, radius_cap):
        for k in range(len(s_right)):
            R = lo + k
            numerator = 2 * numerator + (s_right[k] != r_right[k])
            if s_left and R > 0:
                numerator += s_left[k] != r_left[k]
            if numerator * q >= p << R:
                logger.debug(f"d[{s}, {r}] >= {threshold} decided at radius {R}")
                return Decision.YES
            if (numerator + tail_mass) * q < p << R:
                logger.debug(f"d[{s}, {r}] < {threshold} decided at radius {R}")
                return Decision.NO
    logger.warning(
        f"Could not decide d[{s}, {r}] >= {threshold} within radius cap {radius_cap}"
    )
    return Decision.UNKNOWN
