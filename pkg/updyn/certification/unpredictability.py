import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Tuple

from updyn.certification.returns import (
    MINIMAL,
    find_return_time,
    find_separation_time,
    proximity_requirement,
)
from updyn.certification.systems import DEFAULT_HORIZON, EPSILON0, CertificationError
from updyn.symbolic.core import (
    Decision,
    Stream,
    metric,
    metric_at_least,
    shift,
)

logging.basicConfig(format="%(levelname)s (%(name)s %(lineno)s): %(message)s")
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)


@dataclass(frozen=True)
class CertificateEntry:
    """
    One verified level of an unpredictability certificate.

    :param n: Depth
    :param t: Return time t_n
    :param tau: Separation time tau_n (zeta_n after transport)
    :param proximity_bound: Verified upper bound of ``d[sigma^t(p), p]``
    :param separation_lower_bound: Verified lower bound of ``d[sigma^(t + tau)(p), sigma^tau(p)]``
    :param separation_verified: Whether the separation reached epsilon0
    """

    n: int
    t: int
    tau: int
    proximity_bound: Fraction
    separation_lower_bound: Fraction
    separation_verified: bool


@dataclass(frozen=True)
class UnpredictabilityCertificate:
    """
    Finite prefix of the sequences {t_n} and {tau_n} for a point p, with the sensitivity constant.

    `shift` is the accumulated transport along the trajectory: the entries were found for a point
    q and this certificate is about ``p = sigma^shift(q)``, so proximity is certified at depth
    ``n - shift``.

    :param subject: Description of p
    :param kind: Stream kind of p
    :param epsilon0: Sensitivity constant
    :param entries: Verified levels in increasing n
    :param shift: Accumulated transport
    :param mode: Return-time mode used to build the entries
    :param stream: The point p itself, when available
    """

    subject: str
    kind: str
    epsilon0: Fraction
    entries: Tuple[CertificateEntry, ...]
    shift: int = 0
    mode: str = MINIMAL
    stream: Optional[Stream] = field(default=None, compare=False, repr=False)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def required_proximity(self, n: int) -> Fraction:
        """
        Proximity bound an entry of depth `n` must meet.
        """
        return proximity_requirement(self.kind, n - self.shift)

    def time_table(self) -> List[Tuple[int, int, int]]:
        """
        ``(n, t_n, tau_n)`` rows.
        """
        return [(e.n, e.t, e.tau) for e in self.entries]


def _proximity_radius(n: int, total_shift: int) -> int:
    return max(n - total_shift, 0)


def _separation(s: Stream, t: int, tau: int, epsilon0: Fraction) -> Tuple[Fraction, bool]:
    later, earlier = shift(s, t + tau), shift(s, tau)
    lower = metric(later, earlier, 0).lower
    verified = metric_at_least(later, earlier, epsilon0) == Decision.YES
    return lower, verified


def certify_unpredictable(
    s: Stream,
    n_max: int,
    mode: str = MINIMAL,
    horizon: int = DEFAULT_HORIZON,
    epsilon0: Fraction = EPSILON0,
) -> UnpredictabilityCertificate:
    """
    Build a certificate that `s` is unpredictable up to depth `n_max`.

    For each n, t_n is a return time with agreement at depth n, searched from ``t_{n-1} + 1`` so
    that the recorded times increase, and tau_n >= max(n + 1, tau_{n-1} + 1) is the least time at
    which ``sigma^(t_n + tau_n)(s)`` and ``sigma^tau_n(s)`` differ at index 0.

    :param s: Stream
    :param n_max: Deepest level, >= 1
    :param mode: ``minimal`` or ``canonical`` return times
    :param horizon: Search horizon
    :param epsilon0: Sensitivity constant to verify
    :return: UnpredictabilityCertificate
    """
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    logger.info(f"Certifying unpredictability of {s} to depth {n_max} ({mode} returns)")
    entries: List[CertificateEntry] = []
    previous_t = previous_tau = 0
    for n in range(1, n_max + 1):
        t = find_return_time(s, n, mode=mode, horizon=horizon, start=previous_t + 1)
        if t is None:
            raise CertificationError(f"No return of {s} at depth {n} within horizon {horizon}", n=n)
        tau = find_separation_time(s, t, min_tau=max(n + 1, previous_tau + 1), horizon=horizon)
        if tau is None:
            raise CertificationError(
                f"No separation after return {t} of {s} within horizon {horizon}; "
                "the stream looks eventually periodic",
                n=n,
                detail={"t": t},
            )
        proximity = metric(shift(s, t), s, n).upper
        if proximity > proximity_requirement(s.kind, n):
            raise CertificationError(f"Proximity {proximity} at depth {n} exceeds requirement", n=n)
        lower, verified = _separation(s, t, tau, epsilon0)
        if not verified:
            raise CertificationError(f"Separation at depth {n} below {epsilon0}", n=n)
        entries.append(CertificateEntry(n, t, tau, proximity, lower, verified))
        logger.debug(f"n={n}: t={t}, tau={tau}, proximity <= {proximity}")
        previous_t, previous_tau = t, tau

    logger.info(f"Certified {len(entries)} levels for {s}")
    return UnpredictabilityCertificate(
        subject=str(s),
        kind=s.kind,
        epsilon0=Fraction(epsilon0),
        entries=tuple(entries),
        mode=mode,
        stream=s,
    )


def verify_certificate(
    cert: UnpredictabilityCertificate, stream: Optional[Stream] = None
) -> List[str]:
    """
    Re-run every entry of `cert` through the metric oracle.

    :param cert: Certificate to check
    :param stream: The point the certificate is about (defaults to ``cert.stream``)
    :return: Descriptions of failed checks (empty when the certificate verifies)
    """
    s = stream if stream is not None else cert.stream
    if s is None:
        raise ValueError("verify_certificate needs the certified stream")
    failures = []
    for previous, entry in zip((None,) + cert.entries[:-1], cert.entries):
        if previous is not None and not (previous.t < entry.t and previous.tau < entry.tau):
            failures.append(f"n={entry.n}: times do not increase")
        if cert.shift == 0 and entry.tau < entry.n + 1:
            failures.append(f"n={entry.n}: tau {entry.tau} below n + 1")
        bound = metric(shift(s, entry.t), s, _proximity_radius(entry.n, cert.shift)).upper
        if bound != entry.proximity_bound:
            failures.append(f"n={entry.n}: proximity {bound} does not reproduce {entry.proximity_bound}")
        if bound > cert.required_proximity(entry.n):
            failures.append(f"n={entry.n}: proximity {bound} exceeds {cert.required_proximity(entry.n)}")
        lower, verified = _separation(s, entry.t, entry.tau, cert.epsilon0)
        if not verified or lower < entry.separation_lower_bound:
            failures.append(f"n={entry.n}: separation below {cert.epsilon0}")

    if failures:
        logger.warning(f"Found {len(failures)} failures in certificate check for {cert.subject}")
    else:
        logger.info(f"PASSED certificate check for {cert.subject} ({len(cert.entries)} entries)")
    return failures


def transport_certificate(
    cert: UnpredictabilityCertificate, k: int, stream: Optional[Stream] = None
) -> UnpredictabilityCertificate:
    """
    Move a certificate along the trajectory to ``sigma^k(p)``.

    The return times and epsilon0 are kept, separation times become ``zeta_n = tau_n - k`` and
    entries with ``tau_n <= k`` are dropped. Every kept entry is re-verified on the new point;
    proximity is certified at depth ``n - shift``.

    :param cert: Certificate for p
    :param k: Shift amount, k >= 0
    :param stream: The point p (defaults to ``cert.stream``)
    :return: Certificate for ``sigma^k(p)``, possibly empty
    """
    if k < 0:
        raise ValueError(f"Transport amount must be non-negative, got {k}")
    s = stream if stream is not None else cert.stream
    if s is None:
        raise ValueError("transport_certificate needs the certified stream")
    if k == 0:
        return replace(cert, stream=s)

    q = shift(s, k)
    total_shift = cert.shift + k
    entries = []
    for entry in cert.entries:
        if entry.tau <= k:
            continue
        zeta = entry.tau - k
        bound = metric(shift(q, entry.t), q, _proximity_radius(entry.n, total_shift)).upper
        if bound > proximity_requirement(cert.kind, entry.n - total_shift):
            raise CertificationError(
                f"Transported proximity {bound} at depth {entry.n} fails re-verification", n=entry.n
            )
        lower, verified = _separation(q, entry.t, zeta, cert.epsilon0)
        if not verified:
            raise CertificationError(
                f"Transported separation at depth {entry.n} fails re-verification", n=entry.n
            )
        entries.append(CertificateEntry(entry.n, entry.t, zeta, bound, lower, verified))

    dropped = len(cert.entries) - len(entries)
    if not entries:
        logger.warning(f"Transport by {k} dropped every entry of the certificate for {cert.subject}")
    elif dropped:
        logger.info(f"Transport by {k} dropped {dropped} entries with tau <= {k}")
    return UnpredictabilityCertificate(
        subject=str(q),
        kind=cert.kind,
        epsilon0=cert.epsilon0,
        entries=tuple(entries),
        shift=total_shift,
        mode=cert.mode,
        stream=q,
    )


def first_entry_within(
    cert: UnpredictabilityCertificate, delta: Fraction
) -> Optional[CertificateEntry]:
    """
    First entry whose proximity bound is strictly below `delta`.
    """
    return next((e for e in cert.entries if e.proximity_bound < delta), None)


def separation_times_increase(cert: UnpredictabilityCertificate) -> bool:
    """
    Finite shadow of t_n and tau_n diverging: both strictly increase along the certificate.
    """
    pairs = list(zip(cert.entries, cert.entries[1:]))
    return all(a.t < b.t and a.tau < b.tau for a, b in pairs)
