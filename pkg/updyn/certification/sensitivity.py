import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from updyn.certification.density import density_check
from updyn.certification.returns import (
    aperiodicity_scan,
    canonical_visit_time,
    certify_poisson_negative,
    certify_poisson_positive,
    find_divergence_time,
    find_visit_time,
    proximity_requirement,
)
from updyn.certification.systems import DEFAULT_HORIZON, CertificationError, DiscreteSystem
from updyn.certification.unpredictability import (
    UnpredictabilityCertificate,
    first_entry_within,
    transport_certificate,
)
from updyn.symbolic.core import (
    BI_INFINITE,
    Decision,
    DomainError,
    Stream,
    metric,
    stream_base,
    shift,
)
from updyn.symbolic.star import is_star

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)

TRAJECTORY = "trajectory"
"""
Witness for a point on the forward trajectory of the designated point, separation >= epsilon0.
"""

LIMIT_POINT = "limit_point"
"""
Witness for a point only approximated by the trajectory, separation >= epsilon0 / 2.
"""


@dataclass(frozen=True)
class SensitivityWitness:
    """
    A point within `delta` of `base` whose orbit separates from the orbit of `base`.

    :param base: The point r
    :param perturbed: The nearby point u
    :param delta: Neighbourhood radius
    :param time: Time at which the orbits are apart
    :param separation_lower_bound: Verified lower bound of ``d[f(time, u), f(time, r)]``
    :param distance_upper: Verified upper bound of ``d[u, r]``, below `delta`
    :param branch: ``trajectory`` or ``limit_point``
    """

    base: Stream
    perturbed: Stream
    delta: Fraction
    time: int
    separation_lower_bound: Fraction
    distance_upper: Fraction
    branch: str


def depth_for(kind: str, delta: Fraction) -> int:
    """
    Least depth n whose agreement bound is strictly below `delta`.
    """
    n = 0
    while proximity_requirement(kind, n) >= delta:
        n += 1
    return n


def trajectory_offset(point: Stream, r: Stream) -> Optional[int]:
    """
    k >= 0 with ``r = sigma^k(point)`` when both are views of the same rule-defined stream.
    """
    point_base, point_offset = stream_base(point)
    base, offset = stream_base(r)
    if base.kind != point_base.kind or base.rule is not point_base.rule:
        return None
    k = offset - point_offset
    return k if k >= 0 else None


def _from_certificate(
    r: Stream, k: int, delta: Fraction, cert: UnpredictabilityCertificate, point: Stream
) -> Optional[SensitivityWitness]:
    transported = transport_certificate(cert, k, stream=point)
    entry = first_entry_within(transported, delta)
    if entry is None:
        return None
    return SensitivityWitness(
        base=r,
        perturbed=shift(r, entry.t),
        delta=delta,
        time=entry.tau,
        separation_lower_bound=entry.separation_lower_bound,
        distance_upper=entry.proximity_bound,
        branch=TRAJECTORY,
    )


def _approach(
    point: Stream, r: Stream, n: int, horizon: int, avoid: Optional[int] = None
) -> Optional[int]:
    """
    A time eta != `avoid` with ``sigma^eta(point)`` agreeing with `r` at depth `n`: scanned first,
    then taken from the canonical occurrence when `point` is a star sequence.
    """
    skip = () if avoid is None else (avoid,)
    eta = find_visit_time(point, r, n, horizon=horizon, skip=skip)
    if eta is None and is_star(point):
        eta = canonical_visit_time(point, r, n)
        if eta == avoid:
            eta = None
    return eta


def _from_scan(
    point: Stream, r: Stream, k: int, delta: Fraction, epsilon0: Fraction, horizon: int
) -> Optional[SensitivityWitness]:
    n = depth_for(r.kind, delta)
    eta = _approach(point, r, n, horizon, avoid=k)
    if eta is None:
        return None
    u = shift(point, eta)
    time = find_divergence_time(u, r, min_tau=1, horizon=horizon)
    if time is None:
        return None
    distance_upper = metric(u, r, n).upper
    separation = metric(shift(u, time), shift(r, time), 0).lower
    if distance_upper >= delta or separation < epsilon0:
        raise CertificationError(f"Scanned witness for {r} at delta {delta} failed verification")
    return SensitivityWitness(r, u, delta, time, separation, distance_upper, TRAJECTORY)


def _limit_point_witness(
    sys: DiscreteSystem, r: Stream, delta: Fraction, horizon: int
) -> Optional[SensitivityWitness]:
    """
    Two-case argument for a point r approximated by the trajectory point ``r_m = sigma^eta(p)``
    within delta/2. With (u, xi) a witness for r_m at delta/2, either r_m itself already separates
    from r by epsilon0/2 at time xi, or u does.
    """
    half = delta / 2
    m = depth_for(r.kind, half)
    eta = _approach(sys.point, r, m, horizon)
    if eta is None:
        return None
    r_m = shift(sys.point, eta)
    near = metric(r_m, r, m).upper
    inner = _from_scan(sys.point, r_m, eta, half, sys.epsilon0, horizon)
    if inner is None:
        return None
    xi, u = inner.time, inner.perturbed
    threshold = sys.epsilon0 / 2

    if sys.at_least(shift(r_m, xi), shift(r, xi), threshold) == Decision.YES:
        logger.debug(f"Limit-point witness for {r}: approximating point separates at {xi}")
        return SensitivityWitness(r, r_m, delta, xi, threshold, near, LIMIT_POINT)
    if sys.at_least(shift(u, xi), shift(r, xi), threshold) == Decision.YES:
        logger.debug(f"Limit-point witness for {r}: perturbed point separates at {xi}")
        return SensitivityWitness(r, u, delta, xi, threshold, inner.distance_upper + near, LIMIT_POINT)
    return None


def sensitivity_witness(
    sys: DiscreteSystem,
    r: Stream,
    delta: Fraction,
    horizon: int = DEFAULT_HORIZON,
    certificate: Optional[UnpredictabilityCertificate] = None,
) -> SensitivityWitness:
    """
    Find a point of the orbit of the designated point of `sys` within `delta` of `r` whose orbit
    separates from the orbit of `r`.

    When r is ``sigma^k(p)`` for the designated point p, the certificate of p (if given) is
    transported to r and its first entry with proximity below `delta` is used; otherwise the orbit
    of p is scanned for a return near r. Any other r is treated as a limit point of the trajectory.

    :param sys: Shift system with a designated point
    :param r: Base point
    :param delta: Neighbourhood radius, > 0
    :param horizon: Search horizon
    :param certificate: Unpredictability certificate of the designated point
    :return: SensitivityWitness
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if sys.point is None:
        raise DomainError(f"{sys.description} has no designated unpredictable point")
    if r.kind != sys.kind:
        raise DomainError(f"State {r} is not in the space of {sys.description}")

    k = trajectory_offset(sys.point, r)
    witness = None
    if k is not None:
        if certificate is not None:
            witness = _from_certificate(r, k, delta, certificate, sys.point)
        if witness is None:
            witness = _from_scan(sys.point, r, k, delta, sys.epsilon0, horizon)
    else:
        witness = _limit_point_witness(sys, r, delta, horizon)

    if witness is None:
        raise CertificationError(
            f"No sensitivity witness for {r} at delta {delta} within horizon {horizon}",
            detail={"best_separation": Fraction(0), "depth": depth_for(r.kind, delta)},
        )
    logger.debug(
        f"Witness for {r} at delta {delta}: {witness.perturbed} apart at time {witness.time}"
    )
    return witness


def sensitivity_table(
    sys: DiscreteSystem,
    points: List[Stream],
    deltas: List[Fraction],
    horizon: int = DEFAULT_HORIZON,
    certificate: Optional[UnpredictabilityCertificate] = None,
) -> List[SensitivityWitness]:
    """
    Witnesses for every (point, delta) pair, ordered by point then delta.
    """
    witnesses = [
        sensitivity_witness(sys, r, delta, horizon=horizon, certificate=certificate)
        for r in points
        for delta in deltas
    ]
    weakest = min(w.separation_lower_bound for w in witnesses) if witnesses else None
    logger.info(
        f"Found {len(witnesses)} sensitivity witnesses; weakest separation {weakest}"
    )
    return witnesses


@dataclass(frozen=True)
class ChaosSummary:
    """
    Finite-resolution evidence for chaotic dynamics on the orbit closure of the designated point.

    :param sensitive: Every sampled witness reached epsilon0
    :param transitive: Every word or central pattern of the tested length was visited
    :param poisson_stable: Returns were certified in every available time direction
    :param aperiodic: No period up to the scanned bound
    :param details: Per-check counts
    """

    sensitive: bool
    transitive: bool
    poisson_stable: bool
    aperiodic: bool
    details: Dict[str, Any]

    @property
    def passed(self) -> bool:
        return self.sensitive and self.transitive and self.poisson_stable and self.aperiodic


def chaos_summary(
    sys: DiscreteSystem,
    samples: int = 10,
    deltas: Tuple[Fraction, ...] = tuple(Fraction(1, 2 ** e) for e in range(1, 6)),
    word_length: int = 6,
    n_max: int = 6,
    horizon: int = DEFAULT_HORIZON,
) -> ChaosSummary:
    """
    Combine sensitivity, transitivity and Poisson stability checks on the shift system `sys`.

    :param sys: Shift system with a designated point
    :param samples: Number of trajectory points sampled for sensitivity
    :param deltas: Neighbourhood radii
    :param word_length: Density resolution
    :param n_max: Poisson stability depth
    :param horizon: Search horizon
    :return: ChaosSummary
    """
    p = sys.point
    points = [shift(p, k) for k in range(samples)]
    witnesses = sensitivity_table(sys, points, list(deltas), horizon=horizon)
    sensitive = all(w.separation_lower_bound >= sys.epsilon0 for w in witnesses)

    density = density_check(p, word_length, horizon=horizon)

    positive = certify_poisson_positive(p, n_max, horizon=horizon)
    negative = certify_poisson_negative(p, n_max, horizon=horizon) if sys.kind == BI_INFINITE else []

    periods = aperiodicity_scan(p)
    summary = ChaosSummary(
        sensitive=sensitive,
        transitive=density.passed,
        poisson_stable=len(positive) == n_max and (sys.kind != BI_INFINITE or len(negative) == n_max),
        aperiodic=not periods,
        details={
            "witnesses": len(witnesses),
            "words_located": len(density.hits),
            "positive_returns": [r.t for r in positive],
            "negative_returns": [r.t for r in negative],
            "periods": periods,
        },
    )
    if summary.passed:
        logger.info(f"PASSED chaos check for {sys.description}")
    else:
        logger.warning(f"Chaos check for {sys.description} failed: {summary}")
    return summary
