import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from updyn.certification.systems import DEFAULT_HORIZON, CertificationError
from updyn.symbolic.core import (
    BI_INFINITE,
    EXCEEDS_CAP,
    ONE_SIDED,
    DomainError,
    FiniteWord,
    Stream,
    agreement_radius,
    metric,
    shift,
)
from updyn.symbolic.star import (
    bi_segment_start_right,
    canonical_left_occurrence,
    canonical_one_sided_occurrence,
    canonical_right_occurrence,
    is_star,
    one_sided_segment_start,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

MINIMAL = "minimal"
"""
Least return time found by scanning.
"""

CANONICAL = "canonical"
"""
Return time given by the occurrence of the central window inside its own block segment.
"""

RETURN_MODES = (MINIMAL, CANONICAL)

_CHUNK = 4096


@dataclass(frozen=True)
class PoissonReturn:
    """
    A certified return of a sequence close to itself.

    :param n: Depth: agreement on indices 0..n (one-sided) or -n..n (bi-infinite)
    :param t: Return time
    :param proximity_bound: Verified upper bound of ``d[sigma^t(s), s]``
    """

    n: int
    t: int
    proximity_bound: Fraction


def proximity_requirement(kind: str, n: int) -> Fraction:
    """
    Distance bound implied by agreement at depth `n`: ``2^-n`` one-sided, ``2^-(n-1)`` bi-infinite.
    """
    exponent = n if kind == ONE_SIDED else n - 1
    return Fraction(1, 1 << exponent) if exponent >= 0 else Fraction(1 << -exponent)


def canonical_lower_bound(kind: str, n: int) -> int:
    """
    Lower bound on canonical return times: ``sum_{j=1}^n j 2^j`` one-sided and
    ``n + sum_{k=1}^{2n+1} k 2^(k-1)`` bi-infinite.
    """
    if kind == ONE_SIDED:
        return one_sided_segment_start(n + 1)
    return n + bi_segment_start_right(2 * n + 2)


def central_pattern(s: Stream, n: int) -> Tuple[str, int]:
    """
    Symbols of `s` on the depth-`n` window (0..n one-sided, -n..n bi-infinite) and the index of
    the first of them.
    """
    if s.kind == ONE_SIDED:
        return s.render(0, n + 1), 0
    return s.render(-n, 2 * n + 1), -n


def _find_forward(s: Stream, pattern: str, first: int, last: int) -> Optional[int]:
    """
    Least o in [first, last] with ``s[o : o + len(pattern)] == pattern``.
    """
    pos, size = first, _CHUNK
    while pos <= last:
        end = min(last, pos + size - 1)
        text = s.render(pos, end - pos + len(pattern))
        k = text.find(pattern)
        if k >= 0:
            return pos + k
        pos, size = end + 1, size * 2
    return None


def _find_backward(s: Stream, pattern: str, last: int, first: int) -> Optional[int]:
    """
    Largest o in [first, last] with ``s[o : o + len(pattern)] == pattern``.
    """
    hi, size = last, _CHUNK
    while hi >= first:
        lo = max(first, hi - size + 1)
        text = s.render(lo, hi - lo + len(pattern))
        k = text.rfind(pattern)
        if k >= 0:
            return lo + k
        hi, size = lo - 1, size * 2
    return None


def _agrees(s: Stream, t: int, n: int, target: Optional[Stream] = None) -> bool:
    radius = agreement_radius(shift(s, t), s if target is None else target, cap=n)
    return radius is EXCEEDS_CAP


def find_visit_time(
    s: Stream,
    target: Stream,
    n: int,
    horizon: int = DEFAULT_HORIZON,
    start: int = 0,
    skip: Iterable[int] = (),
) -> Optional[int]:
    """
    Least t in [`start`, `horizon`] outside `skip` such that ``sigma^t(s)`` agrees with `target`
    on the depth-`n` window, i.e. the first visit of the orbit of `s` to that cylinder.

    :param s: Stream whose orbit is scanned
    :param target: Stream of the same kind
    :param n: Depth, n >= 0
    :param horizon: Largest time examined
    :param start: Smallest admissible time
    :param skip: Times to pass over
    :return: Visit time, or None
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if s.kind == ONE_SIDED and start < 0:
        raise DomainError(f"One-sided orbits start at time 0, got {start}")
    skip = set(skip)
    pattern, first_index = central_pattern(target, n)
    lo = start
    while lo <= horizon:
        o = _find_forward(s, pattern, lo + first_index, horizon + first_index)
        if o is None:
            return None
        t = o - first_index
        if t not in skip:
            return t
        lo = t + 1
    return None


def canonical_visit_time(s: Stream, target: Stream, n: int) -> int:
    """
    Time at which the orbit of a star sequence `s` visits the depth-`n` window of `target`,
    given by the occurrence of that window in its own block segment.

    :param s: One of the star sequences
    :param target: Stream of the same kind
    :param n: Depth, n >= 0
    :return: Visit time
    """
    if not is_star(s):
        raise DomainError(f"Canonical occurrences are only defined for the star sequences, not {s}")
    pattern, _ = central_pattern(target, n)
    word = FiniteWord.from_string(pattern)
    if s.kind == ONE_SIDED:
        return canonical_one_sided_occurrence(word)
    return canonical_right_occurrence(word) + n


def find_return_time(
    s: Stream,
    n: int,
    mode: str = MINIMAL,
    horizon: int = DEFAULT_HORIZON,
    start: int = 1,
) -> Optional[int]:
    """
    Time t >= `start` after which `s` agrees with itself on indices 0..n (one-sided) or -n..n
    (bi-infinite).

    Minimal mode scans for the least such t <= `horizon`. Canonical mode computes the occurrence
    of the window inside its own block segment of the star sequence and checks that it is at least
    `start` and the lower bound of `canonical_lower_bound`. Both modes verify agreement.

    :param s: Stream (canonical mode needs a star sequence)
    :param n: Depth, n >= 0
    :param mode: ``minimal`` or ``canonical``
    :param horizon: Largest time examined in minimal mode
    :param start: Smallest admissible time
    :return: Return time, or None when no return exists within the horizon
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if mode not in RETURN_MODES:
        raise ValueError(f"Unknown mode '{mode}', expected one of {RETURN_MODES}")
    start = max(start, 1)

    if mode == CANONICAL:
        t = canonical_visit_time(s, s, n)
        if t < canonical_lower_bound(s.kind, n):
            raise CertificationError(
                f"Canonical return {t} of {s} violates the lower bound {canonical_lower_bound(s.kind, n)}",
                n=n,
            )
        if t < start:
            logger.warning(f"Canonical return {t} at depth {n} is below requested start {start}")
            return None
    else:
        t = find_visit_time(s, s, n, horizon=horizon, start=start)
        if t is None:
            logger.warning(f"No return of {s} at depth {n} within horizon {horizon}")
            return None

    if not _agrees(s, t, n):
        raise CertificationError(f"Return time {t} of {s} does not verify at depth {n}", n=n)
    logger.debug(f"{mode} return of {s} at depth {n}: t = {t}")
    return t


def find_negative_return_time(
    s: Stream,
    n: int,
    mode: str = MINIMAL,
    horizon: int = DEFAULT_HORIZON,
    start: int = -1,
) -> Optional[int]:
    """
    Time t <= `start` < 0 with ``sigma^t(s)`` agreeing with `s` on indices -n..n.

    Minimal mode returns the t of smallest magnitude down to ``-horizon``; canonical mode uses the
    even-rank block ``window + "1"`` on the left side of the bi-infinite star sequence.

    :param s: Bi-infinite stream
    :param n: Depth, n >= 0
    :param mode: ``minimal`` or ``canonical``
    :param horizon: Largest |t| examined in minimal mode
    :param start: Largest admissible time (negative)
    :return: Return time, or None when none exists within the horizon
    """
    if s.kind != BI_INFINITE:
        raise DomainError(f"Negative times need a bi-infinite stream, got {s.kind}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if mode not in RETURN_MODES:
        raise ValueError(f"Unknown mode '{mode}', expected one of {RETURN_MODES}")
    start = min(start, -1)
    pattern, first_index = central_pattern(s, n)

    if mode == CANONICAL:
        if not is_star(s):
            raise DomainError(f"Canonical return times are only defined for the star sequences, not {s}")
        t = canonical_left_occurrence(FiniteWord.from_string(pattern)) + n
        if t > start:
            logger.warning(f"Canonical negative return {t} at depth {n} is above requested start {start}")
            return None
    else:
        o = _find_backward(s, pattern, start + first_index, -horizon + first_index)
        if o is None:
            logger.warning(f"No negative return of {s} at depth {n} within horizon {horizon}")
            return None
        t = o - first_index

    if not _agrees(s, t, n):
        raise CertificationError(f"Return time {t} of {s} does not verify at depth {n}", n=n)
    logger.debug(f"{mode} negative return of {s} at depth {n}: t = {t}")
    return t


def find_separation_time(
    s: Stream, t: int, min_tau: int = 1, horizon: int = DEFAULT_HORIZON
) -> Optional[int]:
    """
    Least tau in [`min_tau`, `horizon`] with ``s[t + tau] != s[tau]``, i.e. with
    ``sigma^(t + tau)(s)`` and ``sigma^tau(s)`` differing at index 0, which puts them at distance
    at least 1.

    :param s: Stream
    :param t: Return time
    :param min_tau: Smallest admissible tau, >= 1
    :param horizon: Largest tau examined
    :return: Separation time, or None when the horizon is exhausted
    """
    if min_tau < 1:
        raise ValueError(f"min_tau must be at least 1, got {min_tau}")
    tau = find_divergence_time(shift(s, t), s, min_tau=min_tau, horizon=horizon)
    if tau is None:
        logger.warning(f"No separation for {s} after return {t} within horizon {horizon}")
    return tau


def find_divergence_time(
    a: Stream, b: Stream, min_tau: int = 0, horizon: int = DEFAULT_HORIZON
) -> Optional[int]:
    """
    Least tau in [`min_tau`, `horizon`] with ``a[tau] != b[tau]``: the first time the orbits of `a`
    and `b` are at distance at least 1.

    :param a: First stream
    :param b: Second stream
    :param min_tau: Smallest time examined
    :param horizon: Largest time examined
    :return: Divergence time, or None
    """
    pos, size = min_tau, _CHUNK
    while pos <= horizon:
        count = min(horizon, pos + size - 1) - pos + 1
        left, right = a.render(pos, count), b.render(pos, count)
        if left != right:
            return pos + next(k for k, (x, y) in enumerate(zip(left, right)) if x != y)
        pos, size = pos + count, size * 2
    return None


def certify_poisson_positive(
    s: Stream, n_max: int, mode: str = MINIMAL, horizon: int = DEFAULT_HORIZON
) -> List[PoissonReturn]:
    """
    Strictly increasing return times t_1 < t_2 < ... < t_{n_max} with verified proximity
    ``d[sigma^t_n(s), s] <= 2^-n`` (``2^-(n-1)`` bi-infinite).

    :param s: Stream
    :param n_max: Deepest level
    :param mode: ``minimal`` or ``canonical``
    :param horizon: Search horizon
    :return: Returns, one per depth
    """
    returns, previous = [], 0
    for n in range(1, n_max + 1):
        t = find_return_time(s, n, mode=mode, horizon=horizon, start=previous + 1)
        if t is None:
            raise CertificationError(f"No positive return of {s} at depth {n}", n=n)
        returns.append(PoissonReturn(n, t, _proximity(s, t, n)))
        previous = t
    logger.info(f"Certified {len(returns)} positive returns of {s}")
    return returns


def certify_poisson_negative(
    s: Stream, n_max: int, mode: str = MINIMAL, horizon: int = DEFAULT_HORIZON
) -> List[PoissonReturn]:
    """
    Strictly decreasing negative return times ``-1 >= t_1 > t_2 > ...`` with verified proximity
    ``d[sigma^t_n(s), s] <= 2^-(n-1)``.

    :param s: Bi-infinite stream
    :param n_max: Deepest level
    :param mode: ``minimal`` or ``canonical``
    :param horizon: Search horizon
    :return: Returns, one per depth
    """
    returns, previous = [], 0
    for n in range(1, n_max + 1):
        t = find_negative_return_time(s, n, mode=mode, horizon=horizon, start=previous - 1)
        if t is None:
            raise CertificationError(f"No negative return of {s} at depth {n}", n=n)
        returns.append(PoissonReturn(n, t, _proximity(s, t, n)))
        previous = t
    logger.info(f"Certified {len(returns)} negative returns of {s}")
    return returns


def _proximity(s: Stream, t: int, n: int) -> Fraction:
    bound = metric(shift(s, t), s, n).upper
    if bound > proximity_requirement(s.kind, n):
        raise CertificationError(f"Proximity {bound} of return {t} exceeds requirement at depth {n}", n=n)
    return bound


def find_period_mismatch(s: Stream, q: int, start: int = 0, span: int = 4096) -> Optional[int]:
    """
    First i in [start, start + span] with ``s[i + q] != s[i]``.

    :param s: Stream
    :param q: Candidate period, q >= 1
    :param start: First index examined
    :param span: Length of the examined range
    :return: Index of a mismatch, or None if `s` looks q-periodic on the range
    """
    if q < 1:
        raise ValueError(f"Period must be positive, got {q}")
    text = s.render(start, span + 1 + q)
    for k in range(span + 1):
        if text[k] != text[k + q]:
            return start + k
    return None


def aperiodicity_scan(s: Stream, max_period: int = 64, span: int = 4096) -> List[int]:
    """
    Periods q <= `max_period` for which ``s[i + q] = s[i]`` holds for every i in [0, span].
    An empty list means `s` is neither a rest point nor a cycle at this resolution.

    :param s: Stream
    :param max_period: Largest period examined
    :param span: Examined index range
    :return: Periods without mismatch
    """
    periodic = [q for q in range(1, max_period + 1) if find_period_mismatch(s, q, 0, span) is None]
    if periodic:
        logger.warning(f"{s} repeats with period(s) {periodic} on [0, {span}]")
    else:
        logger.info(f"PASSED aperiodicity check for {s} (periods <= {max_period})")
    return periodic


def eventual_periodicity_failures(
    s: Stream, max_period: int = 64, max_start: int = 1024, gap_factor: int = 128
) -> List[Tuple[int, int]]:
    """
    Pairs (q, b) with ``s[i + q] = s[i]`` for every i in [b, b + gap_factor * q]: places where
    `s` looks eventually q-periodic over a window that grows with the period.

    :param s: Stream
    :param max_period: Largest period examined
    :param max_start: Largest start index examined
    :param gap_factor: Window length per unit of period
    :return: Failing pairs (empty when every window contains a mismatch)
    """
    failures = []
    for q in range(1, max_period + 1):
        length = max_start + gap_factor * q + 1
        text = s.render(0, length + q)
        next_mismatch = [None] * (length + 1)
        for i in range(length - 1, -1, -1):
            next_mismatch[i] = i if text[i] != text[i + q] else next_mismatch[i + 1]
        for b in range(max_start + 1):
            nm = next_mismatch[b]
            if nm is None or nm > b + gap_factor * q:
                failures.append((q, b))
    return failures
