import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from updyn.certification.systems import DEFAULT_HORIZON, CertificationError
from updyn.symbolic.core import ONE_SIDED, DomainError, FiniteWord, Stream
from updyn.symbolic.star import (
    canonical_one_sided_occurrence,
    canonical_right_occurrence,
    is_star,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

FIRST = "first"
"""
Report the visit time of smallest magnitude found by scanning.
"""

CANONICAL = "canonical"
"""
Report the occurrence of each word inside its own block segment.
"""

DENSITY_MODES = (FIRST, CANONICAL)

_FIRST_SPAN = 4096


@dataclass(frozen=True)
class DensityHit:
    """
    A shift t such that ``sigma^t(s)`` shows `word` on the tested window.
    """

    word: str
    t: int


@dataclass(frozen=True)
class DensityReport:
    """
    Outcome of a density check at one resolution.

    :param kind: Stream kind
    :param length: Number of symbols per tested word
    :param mode: ``first`` or ``canonical``
    :param hits: Located words, in binary counting order
    :param missing: Words with no visit within the horizon
    """

    kind: str
    length: int
    mode: str
    hits: Tuple[DensityHit, ...]
    missing: Tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.missing

    @property
    def radius(self) -> int:
        return (self.length - 1) // 2 if self.kind != ONE_SIDED else 0


def _words(length: int) -> List[str]:
    return [format(v, f"0{length}b") for v in range(1 << length)]


def _first_one_sided(s: Stream, words: List[str], horizon: int) -> Dict[str, int]:
    found: Dict[str, int] = {}
    length = len(words[0])
    span = _FIRST_SPAN
    while True:
        count = min(span, horizon + 1)
        text = s.render(0, count + length - 1)
        for w in words:
            if w not in found:
                k = text.find(w)
                if k >= 0:
                    found[w] = k
        if len(found) == len(words) or count > horizon:
            return found
        span *= 2


def _first_bi_infinite(s: Stream, words: List[str], horizon: int) -> Dict[str, int]:
    # t ranges over [-h, h]; text index k holds the window start of t = k - h
    found: Dict[str, int] = {}
    radius = (len(words[0]) - 1) // 2
    h = _FIRST_SPAN
    while True:
        h = min(h, horizon)
        text = s.render(-h - radius, 2 * h + 2 * radius + 1)
        for w in words:
            if w in found:
                continue
            candidates = []
            k = text.find(w, h)
            if k >= 0:
                candidates.append(k - h)
            k = text.rfind(w, 0, h - 1 + len(w))
            if k >= 0:
                candidates.append(k - h)
            if candidates:
                found[w] = min(candidates, key=lambda t: (abs(t), t < 0))
        if len(found) == len(words) or h >= horizon:
            return found
        h *= 2


def _canonical(s: Stream, words: List[str]) -> Dict[str, int]:
    if not is_star(s):
        raise DomainError(f"Canonical occurrences are only defined for the star sequences, not {s}")
    if s.kind == ONE_SIDED:
        return {w: canonical_one_sided_occurrence(FiniteWord.from_string(w)) for w in words}
    radius = (len(words[0]) - 1) // 2
    return {w: canonical_right_occurrence(FiniteWord.from_string(w)) + radius for w in words}


def density_check(
    s: Stream, length: int, horizon: int = DEFAULT_HORIZON, mode: str = FIRST
) -> DensityReport:
    """
    Check that the orbit of `s` visits every cylinder of a given resolution.

    One-sided streams are tested on all 2^length words at indices 0..length-1. Bi-infinite streams
    are tested on all central patterns of radius ``(length - 1) // 2`` (indices -radius..radius),
    with shifts of either sign allowed in ``first`` mode.

    :param s: Stream
    :param length: Word length, >= 1
    :param horizon: Largest |t| scanned in ``first`` mode
    :param mode: ``first`` or ``canonical``
    :return: DensityReport
    """
    if length < 1:
        raise ValueError(f"Word length must be positive, got {length}")
    if mode not in DENSITY_MODES:
        raise ValueError(f"Unknown mode '{mode}', expected one of {DENSITY_MODES}")
    if s.kind != ONE_SIDED:
        length = 2 * ((length - 1) // 2) + 1
    words = _words(length)

    if mode == CANONICAL:
        found = _canonical(s, words)
    elif s.kind == ONE_SIDED:
        found = _first_one_sided(s, words, horizon)
    else:
        found = _first_bi_infinite(s, words, horizon)

    first_index = 0 if s.kind == ONE_SIDED else -((length - 1) // 2)
    hits, missing = [], []
    for w in words:
        t: Optional[int] = found.get(w)
        if t is None:
            missing.append(w)
            continue
        if s.render(t + first_index, length) != w:
            raise CertificationError(f"Visit of {w} at t={t} does not verify")
        hits.append(DensityHit(w, t))

    if missing:
        logger.warning(
            f"Found {len(missing)} unvisited words of length {length} for {s}: {missing[:8]}"
        )
    else:
        logger.info(f"PASSED density check for {s} at length {length} ({mode})")
    return DensityReport(s.kind, length, mode, tuple(hits), tuple(missing))
