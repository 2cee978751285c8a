from fractions import Fraction

import pytest

from updyn.conjugacy.horseshoe import (
    HorseshoeSystem,
    box_center,
    expected_widths,
    horseshoe_backward,
    horseshoe_box_for,
    horseshoe_forward,
    horseshoe_itinerary,
    horseshoe_transport_unpredictable_point,
)
from updyn.conjugacy.logistic import Undecided
from updyn.symbolic.core import DomainError, DottedWord, FiniteWord
from updyn.symbolic.star import BI_INFINITE_STAR, central_window
from updyn.utils.intervals import Interval, IntervalBox


@pytest.fixture(scope="module")
def horseshoe():
    return HorseshoeSystem()


class TestStrips:
    def test_defaults(self, horseshoe):
        assert horseshoe.contraction == Fraction(1, 3)
        assert horseshoe.expansion == 3
        assert horseshoe.vertical(1) == IntervalBox.from_bounds((Fraction(2, 3), 1), (0, 1))
        assert horseshoe.horizontal(0) == IntervalBox.from_bounds((0, 1), (0, Fraction(1, 3)))

    @pytest.mark.parametrize("j", [0, 1])
    def test_horizontal_strips_map_onto_vertical_strips(self, horseshoe, j):
        assert horseshoe_forward(horseshoe, j, horseshoe.horizontal(j)) == horseshoe.vertical(j)
        assert horseshoe_backward(horseshoe, j, horseshoe.vertical(j)) == horseshoe.horizontal(j)

    @pytest.mark.parametrize(
        "contraction, expansion", [(Fraction(1, 2), 3), (0, 3), (Fraction(1, 4), 2)]
    )
    def test_invalid_parameters(self, contraction, expansion):
        with pytest.raises(DomainError):
            HorseshoeSystem(contraction, expansion)


class TestBoxes:
    def test_origin_symbol_box(self, horseshoe):
        assert horseshoe_box_for(horseshoe, ".0") == horseshoe.vertical(0)
        assert horseshoe_box_for(horseshoe, ".1") == horseshoe.vertical(1)

    def test_future_symbol_fixes_height(self, horseshoe):
        box = horseshoe_box_for(horseshoe, ".01")
        assert box[1] == Interval(Fraction(2, 3), 1)

    @pytest.mark.parametrize("radius", range(0, 7))
    def test_widths(self, horseshoe, radius):
        box = horseshoe_transport_unpredictable_point(horseshoe, radius)
        assert (box[0].width, box[1].width) == expected_widths(horseshoe, radius)

    @pytest.mark.parametrize("radius", range(0, 6))
    def test_boxes_nest(self, horseshoe, radius):
        outer = horseshoe_transport_unpredictable_point(horseshoe, radius)
        inner = horseshoe_transport_unpredictable_point(horseshoe, radius + 1)
        assert outer.contains(inner)

    @pytest.mark.parametrize("radius", range(0, 7))
    def test_center_reproduces_central_window(self, horseshoe, radius):
        box = horseshoe_transport_unpredictable_point(horseshoe, radius)
        word = horseshoe_itinerary(horseshoe, box_center(box), radius + 1, backward=radius)
        assert word == central_window(BI_INFINITE_STAR, radius)

    def test_window_must_reach_origin(self, horseshoe):
        with pytest.raises(DomainError):
            horseshoe_box_for(horseshoe, DottedWord(FiniteWord.from_string("01"), 5))

    def test_negative_radius(self, horseshoe):
        with pytest.raises(ValueError):
            horseshoe_transport_unpredictable_point(horseshoe, -1)


class TestItinerary:
    def test_fixed_point(self, horseshoe):
        # (0, 0) is fixed by the H0 branch
        assert horseshoe_itinerary(horseshoe, (0, 0), 4) == DottedWord.from_string("000.0000")

    def test_gap_point_is_undecided(self, horseshoe):
        outcome = horseshoe_itinerary(horseshoe, (Fraction(1, 2), Fraction(1, 2)), 3)
        assert isinstance(outcome, Undecided)
        assert outcome.step == 0

    def test_escaping_forward(self, horseshoe):
        outcome = horseshoe_itinerary(horseshoe, (0, Fraction(1, 2)), 3)
        assert isinstance(outcome, Undecided)
        assert outcome.step == 1
