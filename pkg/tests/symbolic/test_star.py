import pytest
from hypothesis import given, strategies as st

from updyn.symbolic.core import BI_INFINITE, ONE_SIDED, DomainError, DottedWord, FiniteWord, shift
from updyn.symbolic.star import (
    SEGMENT_TABLE_MAX,
    OrderedWordIndex,
    bi_segment_start_left,
    bi_segment_start_right,
    block_start,
    canonical_left_occurrence,
    canonical_one_sided_occurrence,
    canonical_right_occurrence,
    central_window,
    displayed_blocks,
    is_star,
    one_sided_segment_start,
    rank_of,
    star_sequence,
    symbol_at_bi_infinite,
    symbol_at_one_sided,
    word_of,
)

PREFIX_22 = "0100011011" + "000001010011"

nonempty_words = st.text(alphabet="01", min_size=1, max_size=16)


class TestOrdering:
    def test_word_of(self):
        assert str(word_of(OrderedWordIndex(3, 1))) == "000"
        assert str(word_of(OrderedWordIndex(3, 8))) == "111"
        assert str(word_of(OrderedWordIndex(2, 3))) == "10"

    @given(nonempty_words)
    def test_rank_round_trip(self, text):
        w = FiniteWord.from_string(text)
        assert word_of(rank_of(w)) == w

    @pytest.mark.parametrize("m, j", [(0, 1), (2, 0), (2, 5)])
    def test_index_bounds(self, m, j):
        with pytest.raises(DomainError):
            OrderedWordIndex(m, j)


class TestSegmentStarts:
    @pytest.mark.parametrize("m", range(1, SEGMENT_TABLE_MAX + 4))
    def test_one_sided_closed_form(self, m):
        assert one_sided_segment_start(m) == (m - 2) * 2 ** m + 2

    @pytest.mark.parametrize("m", range(1, SEGMENT_TABLE_MAX + 4))
    def test_right_closed_form(self, m):
        assert bi_segment_start_right(m) == (m - 2) * 2 ** (m - 1) + 1

    @pytest.mark.parametrize("m", range(2, SEGMENT_TABLE_MAX + 4))
    def test_left_closed_form(self, m):
        assert bi_segment_start_left(m) == -(m - 1) * 2 ** m

    def test_no_left_segment_of_length_one(self):
        with pytest.raises(DomainError):
            bi_segment_start_left(1)


class TestOneSidedStar:
    def test_prefix(self, one_sided_star):
        assert one_sided_star.render(0, 22) == PREFIX_22
        assert "".join(str(symbol_at_one_sided(i)) for i in range(22)) == PREFIX_22

    def test_far_segment_boundaries(self):
        start = one_sided_segment_start(60)
        assert symbol_at_one_sided(start) == 0
        assert symbol_at_one_sided(one_sided_segment_start(61) - 1) == 1
        assert star_sequence(ONE_SIDED).render(start - 3, 6) == "111000"

    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=0, max_value=200))
    def test_render_agrees_with_rule(self, start, count):
        s = star_sequence(ONE_SIDED)
        assert s.render(start, count) == "".join(str(s.symbol(i)) for i in range(start, start + count))

    @given(nonempty_words)
    def test_canonical_occurrence(self, text):
        i = canonical_one_sided_occurrence(FiniteWord.from_string(text))
        assert star_sequence(ONE_SIDED).render(i, len(text)) == text
        assert i >= one_sided_segment_start(len(text))

    def test_negative_index_rejected(self):
        with pytest.raises(DomainError):
            symbol_at_one_sided(-1)


class TestBiInfiniteStar:
    def test_central_window(self, bi_infinite_star):
        w = central_window(bi_infinite_star, 8)
        assert w == DottedWord.from_string("10011101.000100000")
        assert [w.symbol(i) for i in range(-8, 0)] == [1, 0, 0, 1, 1, 1, 0, 1]
        assert [w.symbol(i) for i in range(0, 9)] == [0, 0, 0, 1, 0, 0, 0, 0, 0]

    def test_displayed_blocks_concatenate_to_the_sequence(self, bi_infinite_star):
        left, right = displayed_blocks(4)
        left_text = "".join(str(b) for b in left)
        right_text = "".join(str(b) for b in right)
        assert [str(b) for b in left[-2:]] == ["11", "01"]
        assert [str(b) for b in right[:3]] == ["0", "00", "10"]
        assert bi_infinite_star.render(-len(left_text), len(left_text)) == left_text
        assert bi_infinite_star.render(0, len(right_text)) == right_text

    @given(st.integers(min_value=-10 ** 6, max_value=10 ** 6), st.integers(min_value=0, max_value=200))
    def test_render_agrees_with_rule(self, start, count):
        s = star_sequence(BI_INFINITE)
        expected = "".join(str(symbol_at_bi_infinite(i)) for i in range(start, start + count))
        assert s.render(start, count) == expected

    @given(st.text(alphabet="01", max_size=16))
    def test_right_occurrence(self, text):
        i = canonical_right_occurrence(FiniteWord.from_string(text))
        assert i >= 0
        assert star_sequence(BI_INFINITE).render(i, len(text) + 1) == text + "0"

    @given(nonempty_words)
    def test_left_occurrence(self, text):
        i = canonical_left_occurrence(FiniteWord.from_string(text))
        assert i + len(text) < 0
        assert star_sequence(BI_INFINITE).render(i, len(text) + 1) == text + "1"

    def test_central_window_needs_bi_infinite(self, one_sided_star):
        with pytest.raises(DomainError):
            central_window(one_sided_star, 2)


class TestBlocks:
    @pytest.mark.parametrize(
        "kind, i, expected",
        [
            (ONE_SIDED, 0, (True, True)),
            (ONE_SIDED, 1, (True, False)),
            (ONE_SIDED, 2, (True, True)),
            (ONE_SIDED, 3, (False, False)),
            (ONE_SIDED, 10, (True, True)),
            (BI_INFINITE, 0, (True, True)),
            (BI_INFINITE, 1, (True, True)),
            (BI_INFINITE, 2, (False, False)),
            (BI_INFINITE, 3, (True, False)),
            (BI_INFINITE, -1, (False, False)),
            (BI_INFINITE, -2, (True, False)),
            (BI_INFINITE, -4, (True, True)),
            (BI_INFINITE, -5, (False, False)),
            (BI_INFINITE, -7, (True, False)),
            (BI_INFINITE, -16, (True, True)),
        ],
    )
    def test_block_start(self, kind, i, expected):
        assert block_start(kind, i) == expected


def test_is_star(one_sided_star, bi_infinite_star):
    assert is_star(one_sided_star)
    assert is_star(bi_infinite_star)
    assert not is_star(shift(one_sided_star, 3))
