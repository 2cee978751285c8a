from dataclasses import replace
from fractions import Fraction

import pytest

from updyn.certification.returns import CANONICAL, canonical_lower_bound
from updyn.certification.systems import CertificationError
from updyn.certification.unpredictability import (
    certify_unpredictable,
    first_entry_within,
    separation_times_increase,
    transport_certificate,
    verify_certificate,
)
from updyn.symbolic.core import BI_INFINITE, ONE_SIDED, periodic_stream, shift
from updyn.symbolic.star import ONE_SIDED_STAR


@pytest.fixture(scope="module")
def one_sided_certificate():
    return certify_unpredictable(ONE_SIDED_STAR, 12)


class TestCertify:
    def test_one_sided_minimal(self, one_sided_certificate):
        cert = one_sided_certificate
        assert [e.n for e in cert.entries] == list(range(1, 13))
        assert cert.entries[0].t == 4
        assert separation_times_increase(cert)
        for e in cert.entries:
            assert e.tau >= e.n + 1
            assert e.proximity_bound <= Fraction(1, 2 ** e.n)
            assert e.separation_verified
            assert e.separation_lower_bound >= cert.epsilon0
        assert verify_certificate(cert) == []

    def test_one_sided_canonical(self, one_sided_star):
        cert = certify_unpredictable(one_sided_star, 6, mode=CANONICAL)
        assert cert.mode == CANONICAL
        for e in cert.entries:
            assert e.t >= canonical_lower_bound(ONE_SIDED, e.n)
        assert verify_certificate(cert) == []

    def test_bi_infinite(self, bi_infinite_star):
        cert = certify_unpredictable(bi_infinite_star, 6)
        assert cert.kind == BI_INFINITE
        assert cert.entries[0].t == 4
        for e in cert.entries:
            assert e.proximity_bound <= Fraction(1, 2 ** (e.n - 1))
        assert verify_certificate(cert) == []

    def test_bi_infinite_canonical(self, bi_infinite_star):
        cert = certify_unpredictable(bi_infinite_star, 10, mode=CANONICAL)
        assert len(cert.entries) == 10
        assert verify_certificate(cert) == []

    def test_time_table(self, one_sided_certificate):
        rows = one_sided_certificate.time_table()
        assert rows[0][:2] == (1, 4)
        assert len(rows) == 12

    def test_alternating_stream_is_not_unpredictable(self):
        with pytest.raises(CertificationError) as e:
            certify_unpredictable(periodic_stream("01"), 3, horizon=2000)
        assert e.value.n == 1
        assert "t" in e.value.detail

    def test_n_max_must_be_positive(self, one_sided_star):
        with pytest.raises(ValueError):
            certify_unpredictable(one_sided_star, 0)


class TestVerify:
    def test_tampered_return_time_is_caught(self, one_sided_certificate):
        entries = list(one_sided_certificate.entries)
        entries[0] = replace(entries[0], t=entries[0].t + 1)
        tampered = replace(one_sided_certificate, entries=tuple(entries))
        assert verify_certificate(tampered) != []

    def test_tampered_separation_is_caught(self, one_sided_certificate):
        entries = list(one_sided_certificate.entries)
        entries[2] = replace(entries[2], tau=entries[1].tau)
        tampered = replace(one_sided_certificate, entries=tuple(entries))
        assert verify_certificate(tampered) != []

    def test_needs_a_stream(self, one_sided_certificate):
        with pytest.raises(ValueError):
            verify_certificate(replace(one_sided_certificate, stream=None))


class TestTransport:
    @pytest.mark.parametrize("k", [1, 2, 5, 10])
    def test_transported_certificate_verifies(self, one_sided_certificate, k):
        moved = transport_certificate(one_sided_certificate, k)
        assert moved.shift == k
        assert moved.epsilon0 == one_sided_certificate.epsilon0
        kept = [e for e in one_sided_certificate.entries if e.tau > k]
        assert [e.t for e in moved.entries] == [e.t for e in kept]
        assert [e.tau for e in moved.entries] == [e.tau - k for e in kept]
        assert verify_certificate(moved) == []
        assert verify_certificate(moved, stream=shift(one_sided_certificate.stream, k)) == []

    def test_transports_compose(self, one_sided_certificate):
        twice = transport_certificate(transport_certificate(one_sided_certificate, 2), 3)
        once = transport_certificate(one_sided_certificate, 5)
        assert twice.time_table() == once.time_table()
        assert twice.shift == once.shift == 5

    def test_zero_transport_is_identity(self, one_sided_certificate):
        assert transport_certificate(one_sided_certificate, 0) == one_sided_certificate

    def test_far_transport_drops_everything(self, one_sided_certificate):
        k = max(e.tau for e in one_sided_certificate.entries)
        assert transport_certificate(one_sided_certificate, k).is_empty

    def test_negative_transport_rejected(self, one_sided_certificate):
        with pytest.raises(ValueError):
            transport_certificate(one_sided_certificate, -1)


def test_first_entry_within(one_sided_certificate):
    entry = first_entry_within(one_sided_certificate, Fraction(1, 100))
    assert entry is not None
    assert entry.proximity_bound < Fraction(1, 100)
    assert first_entry_within(one_sided_certificate, Fraction(0)) is None
