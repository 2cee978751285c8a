import pytest

from updyn.certification.density import CANONICAL, FIRST, density_check
from updyn.symbolic.core import DomainError, FiniteWord, periodic_stream
from updyn.symbolic.star import canonical_one_sided_occurrence


class TestOneSided:
    @pytest.mark.parametrize("length", range(1, 11))
    def test_every_word_is_visited(self, one_sided_star, length):
        report = density_check(one_sided_star, length)
        assert report.passed
        assert len(report.hits) == 2 ** length
        for hit in report.hits:
            assert one_sided_star.render(hit.t, length) == hit.word

    def test_hits_in_counting_order(self, one_sided_star):
        report = density_check(one_sided_star, 3)
        assert [h.word for h in report.hits] == ["000", "001", "010", "011", "100", "101", "110", "111"]
        assert report.hits[2].t == 0
        assert report.radius == 0

    def test_canonical_mode(self, one_sided_star):
        report = density_check(one_sided_star, 4, mode=CANONICAL)
        assert report.mode == CANONICAL
        for hit in report.hits:
            assert hit.t == canonical_one_sided_occurrence(FiniteWord.from_string(hit.word))

    def test_first_visits_come_no_later_than_canonical(self, one_sided_star):
        first = density_check(one_sided_star, 5, mode=FIRST)
        canonical = density_check(one_sided_star, 5, mode=CANONICAL)
        assert all(a.t <= b.t for a, b in zip(first.hits, canonical.hits))

    def test_periodic_stream_misses_words(self):
        report = density_check(periodic_stream("01"), 2, horizon=1000)
        assert not report.passed
        assert set(report.missing) == {"00", "11"}


class TestBiInfinite:
    @pytest.mark.parametrize("radius", range(0, 5))
    def test_every_central_pattern_is_visited(self, bi_infinite_star, radius):
        length = 2 * radius + 1
        report = density_check(bi_infinite_star, length)
        assert report.passed
        assert report.radius == radius
        for hit in report.hits:
            assert bi_infinite_star.render(hit.t - radius, length) == hit.word

    def test_even_lengths_round_down(self, bi_infinite_star):
        assert density_check(bi_infinite_star, 4).length == 3

    def test_canonical_mode(self, bi_infinite_star):
        report = density_check(bi_infinite_star, 5, mode=CANONICAL)
        assert report.passed
        assert all(h.t > 0 for h in report.hits)


class TestArguments:
    def test_canonical_needs_star(self):
        with pytest.raises(DomainError):
            density_check(periodic_stream("011"), 2, mode=CANONICAL)

    def test_length_must_be_positive(self, one_sided_star):
        with pytest.raises(ValueError):
            density_check(one_sided_star, 0)

    def test_unknown_mode(self, one_sided_star):
        with pytest.raises(ValueError):
            density_check(one_sided_star, 2, mode="last")
