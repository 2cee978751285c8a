import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional

from updyn.symbolic.core import (
    BI_INFINITE,
    ONE_SIDED,
    Decision,
    DomainError,
    DyadicEnclosure,
    Stream,
    metric,
    metric_at_least,
    shift,
)
from updyn.symbolic.star import star_sequence

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

EPSILON0 = Fraction(1)
"""
Sensitivity constant of the shift systems: a mismatch at index 0 puts two sequences at distance >= 1.
"""

DEFAULT_HORIZON = 2 ** 20
"""
Largest time examined by return, separation and density searches.
"""

DEFAULT_DISTANCE_RADIUS = 64
"""
Window radius used by the `distance` of shift systems.
"""


class CertificationError(Exception):
    """
    A certificate could not be built or did not re-verify.

    :param message: Reason
    :param n: Depth of the failing entry, if any
    :param detail: Extra information (e.g. deepest separation reached)
    """

    def __init__(
        self, message: str, n: Optional[int] = None, detail: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message)
        self.n = n
        self.detail = detail or {}


@dataclass(frozen=True)
class DiscreteSystem:
    """
    A discrete semi-flow (or flow, when `inverse_step` is given) on a metric space.

    :param description: State-space descriptor
    :param kind: ``one_sided`` or ``bi_infinite`` for shift systems
    :param step: Unit-time map
    :param distance: Rigorous enclosure of the distance between two states
    :param at_least: Three-valued decision of ``distance >= threshold``
    :param advance: Optional fast ``(state, t) -> state`` for t >= 0
    :param inverse_step: Inverse of `step` for flows
    :param point: Designated unpredictable point, if known
    :param epsilon0: Sensitivity constant of `point`
    """

    description: str
    kind: str
    step: Callable[[Any], Any] = field(compare=False)
    distance: Callable[[Any, Any], DyadicEnclosure] = field(compare=False)
    at_least: Callable[[Any, Any, Fraction], Decision] = field(compare=False)
    advance: Optional[Callable[[Any, int], Any]] = field(default=None, compare=False)
    inverse_step: Optional[Callable[[Any], Any]] = field(default=None, compare=False)
    point: Optional[Any] = field(default=None, compare=False)
    epsilon0: Fraction = EPSILON0

    @property
    def is_flow(self) -> bool:
        return self.inverse_step is not None or (self.advance is not None and self.kind == BI_INFINITE)

    def iterate(self, state: Any, t: int) -> Any:
        """
        ``f(t, state)``. Negative times need a flow.

        :param state: Initial state
        :param t: Time
        :return: State at time t
        """
        if self.advance is not None and (t >= 0 or self.kind == BI_INFINITE):
            return self.advance(state, t)
        if t < 0:
            if self.inverse_step is None:
                raise DomainError(f"{self.description} is a semi-flow; cannot iterate to time {t}")
            for _ in range(-t):
                state = self.inverse_step(state)
            return state
        for _ in range(t):
            state = self.step(state)
        return state

    def same(self, a: Any, b: Any) -> bool:
        """
        Whether `a` and `b` are indistinguishable at the resolution of `distance`.
        """
        return self.distance(a, b).partial_sum == 0


def shift_system(
    kind: str = ONE_SIDED, distance_radius: int = DEFAULT_DISTANCE_RADIUS
) -> DiscreteSystem:
    """
    The shift map on the one-sided or bi-infinite sequence space, with the star sequence as
    designated unpredictable point.

    :param kind: ``one_sided`` (semi-flow) or ``bi_infinite`` (flow)
    :param distance_radius: Window radius of the distance enclosure
    :return: DiscreteSystem
    """
    return DiscreteSystem(
        description=f"shift on {kind} binary sequences",
        kind=kind,
        step=lambda s: shift(s, 1),
        distance=lambda a, b: metric(a, b, distance_radius),
        at_least=metric_at_least,
        advance=shift,
        inverse_step=(lambda s: shift(s, -1)) if kind == BI_INFINITE else None,
        point=star_sequence(kind),
        epsilon0=EPSILON0,
    )


def check_flow_axioms(
    sys: DiscreteSystem, states: Iterable[Any], times: Iterable[int]
) -> List[str]:
    """
    Check on samples that ``f(0, p) = p``, ``f(t1, f(t2, p)) = f(t1 + t2, p)``, and that the distance is
    symmetric and vanishes on identical states. Negative times are skipped for semi-flows.

    :param sys: System under test
    :param states: Sample states
    :param times: Sample times
    :return: Descriptions of failed checks (empty when all pass)
    """
    failures = []
    times = [t for t in times if t >= 0 or sys.is_flow]
    for p in states:
        if not sys.same(sys.iterate(p, 0), p):
            failures.append(f"identity fails at {p}")
        if sys.distance(p, p).partial_sum != 0:
            failures.append(f"distance of {p} to itself is not zero")
        for t1 in times:
            q = sys.iterate(p, t1)
            if sys.distance(p, q) != sys.distance(q, p):
                failures.append(f"distance not symmetric between {p} and {q}")
            for t2 in times:
                if t1 + t2 < 0 and not sys.is_flow:
                    continue
                if not sys.same(sys.iterate(sys.iterate(p, t2), t1), sys.iterate(p, t1 + t2)):
                    failures.append(f"composition fails at {p} for times {t1}, {t2}")
    if failures:
        logger.warning(f"Found {len(failures)} flow axiom failures for {sys.description}")
    else:
        logger.info(f"PASSED flow axiom check for {sys.description}")
    return failures
