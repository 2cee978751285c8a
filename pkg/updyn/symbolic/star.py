import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

from updyn.symbolic.core import (
    BI_INFINITE,
    ONE_SIDED,
    DomainError,
    DottedWord,
    FiniteWord,
    Stream,
    SymbolStream,
    stream_base,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

SEGMENT_TABLE_MAX = 12
"""
Segment starts for block lengths up to this value are served from tables built by cumulative
summation rather than from the closed forms.
"""


@dataclass(frozen=True, order=True)
class OrderedWordIndex:
    """
    Position of a word in the ordering of all finite binary words: shorter words first, then
    lexicographic with 0 < 1. Rank `j` is 1-based within length `m`.

    :param m: Word length
    :param j: Rank among the 2**m words of length m
    """

    m: int
    j: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"Word length must be positive, got {self.m}")
        if not 1 <= self.j <= 1 << self.m:
            raise DomainError(f"Rank {self.j} out of range [1, {1 << self.m}] for length {self.m}")


def word_of(index: OrderedWordIndex) -> FiniteWord:
    """
    The word with the given length and rank: binary ``j - 1`` padded to `m` symbols.

    :param index: Ordered word index
    :return: FiniteWord
    """
    return FiniteWord.from_value(index.j - 1, index.m)


def rank_of(w: FiniteWord) -> OrderedWordIndex:
    """
    Inverse of `word_of`.

    :param w: Non-empty word
    :return: OrderedWordIndex
    """
    if not len(w):
        raise DomainError("The empty word has no rank")
    return OrderedWordIndex(len(w), w.value + 1)


def _cumulative_starts(weight, first: int, last: int) -> Dict[int, int]:
    starts, total = {}, 0
    for m in range(first, last + 1):
        starts[m] = total
        total += weight(m)
    return starts


_ONE_SIDED_TABLE = _cumulative_starts(lambda m: m << m, 1, SEGMENT_TABLE_MAX)
_RIGHT_TABLE = _cumulative_starts(lambda m: m << (m - 1), 1, SEGMENT_TABLE_MAX)
_LEFT_TABLE = {
    m: -(start + (m << (m - 1)))
    for m, start in _cumulative_starts(lambda m: m << (m - 1), 2, SEGMENT_TABLE_MAX).items()
}


def one_sided_segment_start(m: int) -> int:
    """
    Index of the first symbol of the length-`m` segment of the one-sided sequence,
    ``sum_{j<m} j 2^j = (m - 2) 2^m + 2``.

    :param m: Block length, m >= 1
    :return: Index
    """
    if m < 1:
        raise DomainError(f"Segment length must be positive, got {m}")
    if m <= SEGMENT_TABLE_MAX:
        return _ONE_SIDED_TABLE[m]
    return ((m - 2) << m) + 2


def bi_segment_start_right(m: int) -> int:
    """
    First index of the length-`m` odd-rank segment on the right of the dot,
    ``sum_{k<m} k 2^(k-1) = (m - 2) 2^(m-1) + 1``.

    :param m: Block length, m >= 1
    :return: Index
    """
    if m < 1:
        raise DomainError(f"Segment length must be positive, got {m}")
    if m <= SEGMENT_TABLE_MAX:
        return _RIGHT_TABLE[m]
    return ((m - 2) << (m - 1)) + 1


def bi_segment_start_left(m: int) -> int:
    """
    Index of the leftmost symbol of the length-`m` even-rank segment on the left of the dot,
    ``-(m - 1) 2^m``. There is no length-1 segment on the left.

    :param m: Block length, m >= 2
    :return: Negative index
    """
    if m < 2:
        raise DomainError(f"Left segments start at length 2, got {m}")
    if m <= SEGMENT_TABLE_MAX:
        return _LEFT_TABLE[m]
    return -((m - 1) << m)


def _locate(i: int, start, first: int) -> int:
    """
    Largest m >= first with ``start(m) <= i`` for an increasing segment-start function.
    """
    b = i.bit_length()
    m = max(first, b - b.bit_length())
    while m > first and start(m) > i:
        m -= 1
    while start(m + 1) <= i:
        m += 1
    return m


def _left_depth(m: int) -> int:
    # number of left-side symbols before the length-m segment, counted outward from the dot
    return -bi_segment_start_left(m) - (m << (m - 1))


def symbol_at_one_sided(i: int) -> int:
    """
    Symbol `i` of the one-sided sequence listing all words of length 1, then 2, and so on.

    :param i: Index, i >= 0
    :return: 0 or 1
    """
    if i < 0:
        raise DomainError(f"One-sided sequence queried at negative index {i}")
    m = _locate(i, one_sided_segment_start, 1)
    o = i - one_sided_segment_start(m)
    value, p = divmod(o, m)
    return (value >> (m - 1 - p)) & 1


def symbol_at_bi_infinite(i: int) -> int:
    """
    Symbol `i` of the bi-infinite sequence: odd-rank blocks of each length to the right of the dot,
    even-rank blocks to the left in outward order, each block read left to right.

    :param i: Any integer index
    :return: 0 or 1
    """
    if i >= 0:
        m = _locate(i, bi_segment_start_right, 1)
        u, p = divmod(i - bi_segment_start_right(m), m)
        value = 2 * u
    else:
        d = -i - 1
        m = _locate(d, _left_depth, 2)
        u, o = divmod(d - _left_depth(m), m)
        value, p = 2 * u + 1, m - 1 - o
    return (value >> (m - 1 - p)) & 1


def _render_one_sided(start: int, count: int) -> str:
    if start < 0:
        raise DomainError(f"One-sided sequence rendered from negative index {start}")
    if count <= 0:
        return ""
    pieces: List[str] = []
    m = _locate(start, one_sided_segment_start, 1)
    value, p = divmod(start - one_sided_segment_start(m), m)
    remaining = count + p
    while remaining > 0:
        while value < 1 << m and remaining > 0:
            pieces.append(format(value, f"0{m}b"))
            remaining -= m
            value += 1
        m, value = m + 1, 0
    return "".join(pieces)[p : p + count]


def _render_right(start: int, count: int) -> str:
    pieces: List[str] = []
    m = _locate(start, bi_segment_start_right, 1)
    u, p = divmod(start - bi_segment_start_right(m), m)
    remaining = count + p
    while remaining > 0:
        while u < 1 << (m - 1) and remaining > 0:
            pieces.append(format(2 * u, f"0{m}b"))
            remaining -= m
            u += 1
        m, u = m + 1, 0
    return "".join(pieces)[p : p + count]


def _render_left_outward(depth: int, count: int) -> str:
    """
    Left-side symbols at indices ``-depth-1, -depth-2, ...`` (read outward from the dot).
    """
    pieces: List[str] = []
    m = _locate(depth, _left_depth, 2)
    u, o = divmod(depth - _left_depth(m), m)
    remaining = count + o
    while remaining > 0:
        while u < 1 << (m - 1) and remaining > 0:
            pieces.append(format(2 * u + 1, f"0{m}b")[::-1])
            remaining -= m
            u += 1
        m, u = m + 1, 0
    return "".join(pieces)[o : o + count]


def _render_bi_infinite(start: int, count: int) -> str:
    if count <= 0:
        return ""
    end = start + count
    left = right = ""
    if start < 0:
        n_left = min(end, 0) - start
        # outward reading from index min(end, 0) - 1 down to start, then reversed
        left = _render_left_outward(-min(end, 0), n_left)[::-1]
    if end > 0:
        first = max(start, 0)
        right = _render_right(first, end - first)
    return left + right


ONE_SIDED_STAR = SymbolStream(
    ONE_SIDED,
    symbol_at_one_sided,
    "s* (one-sided)",
    renderer=_render_one_sided,
)
"""
The one-sided unpredictable point ``0 1 | 00 01 10 11 | 000 001 ...``.
"""

BI_INFINITE_STAR = SymbolStream(
    BI_INFINITE,
    symbol_at_bi_infinite,
    "s* (bi-infinite)",
    renderer=_render_bi_infinite,
)
"""
The bi-infinite unpredictable point ``... s_4^2 s_2^2 . s_1^1 s_1^2 s_3^2 ...``.
"""


def star_sequence(kind: str) -> SymbolStream:
    """
    The star sequence of the given kind.

    :param kind: ``one_sided`` or ``bi_infinite``
    :return: SymbolStream
    """
    if kind == ONE_SIDED:
        return ONE_SIDED_STAR
    if kind == BI_INFINITE:
        return BI_INFINITE_STAR
    raise DomainError(f"Unknown stream kind '{kind}'")


def is_star(s: Stream) -> bool:
    """
    Check whether `s` is one of the star sequences itself (not a shifted view of one).
    """
    base, offset = stream_base(s)
    return offset == 0 and base in (ONE_SIDED_STAR, BI_INFINITE_STAR) and base.rule in (
        symbol_at_one_sided,
        symbol_at_bi_infinite,
    )


def canonical_one_sided_occurrence(w: FiniteWord) -> int:
    """
    Index of `w` inside its own length segment of the one-sided sequence.

    :param w: Non-empty word
    :return: Index of the first symbol of `w`
    """
    index = rank_of(w)
    return one_sided_segment_start(index.m) + index.m * (index.j - 1)


def canonical_right_occurrence(w: FiniteWord) -> int:
    """
    Index of the first symbol of the odd-rank block ``w + "0"`` on the right side.

    :param w: Word (may be empty)
    :return: Index of the first symbol of `w`
    """
    m = len(w) + 1
    return bi_segment_start_right(m) + m * w.value


def canonical_left_occurrence(w: FiniteWord) -> int:
    """
    Index of the first symbol of the even-rank block ``w + "1"`` on the left side.

    :param w: Non-empty word
    :return: Index (negative) of the first symbol of `w`
    """
    if not len(w):
        raise DomainError("Left occurrences need a non-empty word")
    m = len(w) + 1
    rightmost = -_left_depth(m) - 1
    return rightmost - m * w.value - (m - 1)


def block_start(kind: str, i: int) -> Tuple[bool, bool]:
    """
    Whether index `i` of the star sequence of the given kind opens a block, and whether it opens
    a whole length segment.

    :param kind: ``one_sided`` or ``bi_infinite``
    :param i: Index
    :return: (block start, segment start)
    """
    if kind == ONE_SIDED:
        m = _locate(i, one_sided_segment_start, 1)
        first = one_sided_segment_start(m)
    elif i >= 0:
        m = _locate(i, bi_segment_start_right, 1)
        first = bi_segment_start_right(m)
    else:
        m = _locate(-i - 1, _left_depth, 2)
        first = bi_segment_start_left(m)
    return (i - first) % m == 0, i == first


def central_window(s: Stream, radius: int) -> DottedWord:
    """
    Symbols at indices ``-radius .. radius`` of a bi-infinite stream.
    """
    if s.kind != BI_INFINITE:
        raise DomainError("Central windows need a bi-infinite stream")
    return DottedWord(FiniteWord.from_string(s.render(-radius, 2 * radius + 1)), radius)


def displayed_blocks(max_length: int) -> Tuple[List[FiniteWord], List[FiniteWord]]:
    """
    The block lists of the bi-infinite sequence up to `max_length`, as written around the dot:
    left blocks in left-to-right order ending next to the dot, right blocks starting at the dot.

    :param max_length: Largest block length
    :return: (left blocks, right blocks)
    """
    right = [
        word_of(OrderedWordIndex(m, j))
        for m in range(1, max_length + 1)
        for j in range(1, (1 << m) + 1, 2)
    ]
    left = [
        word_of(OrderedWordIndex(m, j))
        for m in range(max_length, 1, -1)
        for j in range((1 << m), 0, -2)
    ]
    return left, right
