from fractions import Fraction

import pytest

from updyn.certification.sensitivity import (
    LIMIT_POINT,
    TRAJECTORY,
    chaos_summary,
    depth_for,
    sensitivity_table,
    sensitivity_witness,
    trajectory_offset,
)
from updyn.certification.systems import shift_system
from updyn.certification.unpredictability import certify_unpredictable
from updyn.symbolic.core import BI_INFINITE, ONE_SIDED, DomainError, constant_stream, shift

DELTAS = [Fraction(1, 2 ** e) for e in range(1, 9)]


@pytest.fixture(scope="module")
def one_sided_system():
    return shift_system(ONE_SIDED)


def assert_witness(w, delta):
    assert w.distance_upper < delta
    assert w.separation_lower_bound >= 1
    assert w.perturbed[w.time] != w.base[w.time]


class TestDepth:
    def test_depth_for(self):
        assert depth_for(ONE_SIDED, Fraction(1, 4)) == 3
        assert depth_for(BI_INFINITE, Fraction(1, 4)) == 4
        assert depth_for(ONE_SIDED, Fraction(3)) == 0

    def test_trajectory_offset(self, one_sided_star):
        assert trajectory_offset(one_sided_star, shift(one_sided_star, 5)) == 5
        assert trajectory_offset(shift(one_sided_star, 5), one_sided_star) is None
        assert trajectory_offset(one_sided_star, constant_stream(0)) is None


class TestTrajectoryWitnesses:
    def test_twenty_points_by_scanning(self, one_sided_system):
        p = one_sided_system.point
        witnesses = sensitivity_table(one_sided_system, [shift(p, k) for k in range(20)], DELTAS)
        assert len(witnesses) == 160
        for w, (k, delta) in zip(witnesses, [(k, d) for k in range(20) for d in DELTAS]):
            assert w.base == shift(p, k)
            assert w.delta == delta
            assert w.branch == TRAJECTORY
            assert_witness(w, delta)

    def test_with_certificate(self, one_sided_system):
        p = one_sided_system.point
        cert = certify_unpredictable(p, 10)
        points = [shift(p, k) for k in range(5)]
        witnesses = sensitivity_table(one_sided_system, points, DELTAS[:4], certificate=cert)
        for w in witnesses:
            assert w.branch == TRAJECTORY
            assert_witness(w, w.delta)

    def test_bi_infinite(self):
        sys = shift_system(BI_INFINITE)
        p = sys.point
        for k in (0, 3, 7):
            for delta in DELTAS:
                w = sensitivity_witness(sys, shift(p, k), delta)
                assert w.distance_upper < delta
                assert w.perturbed[w.time] != w.base[w.time]


class TestLimitPoints:
    def test_constant_sequence(self, one_sided_system):
        w = sensitivity_witness(one_sided_system, constant_stream(0), Fraction(1, 4))
        assert w.branch == LIMIT_POINT
        assert w.distance_upper < Fraction(1, 4)
        assert w.separation_lower_bound >= Fraction(1, 2)


class TestArguments:
    def test_delta_must_be_positive(self, one_sided_system, one_sided_star):
        with pytest.raises(ValueError):
            sensitivity_witness(one_sided_system, one_sided_star, Fraction(0))

    def test_state_must_match_space(self, one_sided_system, bi_infinite_star):
        with pytest.raises(DomainError):
            sensitivity_witness(one_sided_system, bi_infinite_star, Fraction(1, 2))


def test_chaos_summary(one_sided_system):
    summary = chaos_summary(one_sided_system, samples=3, word_length=5, n_max=5)
    assert summary.passed
    assert summary.details["witnesses"] == 15
    assert summary.details["words_located"] == 32
    assert summary.details["negative_returns"] == []
