"""
链引理数值校验的测试
"""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.geometry.chain_calculus import (calibrate_constants, chain_bound, chain_from_turns, close_chain,
                                         close_right_angle_chain, exact_length, inefficiency,
                                         projection_excursion, right_angle_bound,
                                         terminal_angle_bound, three_arc_inefficiency)
from src.utils.errors import (ChainBoundViolated, Degenerate, DegenerateChord, NotRightAngle, ShortArc,
                              TooShortTail, WideBend)


class TestPath:
    def test_rejects_empty_and_nonpositive(self):
        with pytest.raises(Degenerate):
            chain_from_turns([], [])
        with pytest.raises(Degenerate):
            chain_from_turns([1.0, 0.0], [0.0])

    def test_turn_count_must_match(self):
        with pytest.raises(Degenerate):
            chain_from_turns([1.0, 2.0], [])

    def test_bends_are_unsigned(self):
        p = chain_from_turns([5.0, 5.0, 5.0], [0.3, -0.4])
        assert p.bends() == pytest.approx([0.3, 0.4])
        assert p.max_bend() == pytest.approx(0.4)

    def test_closed_path_counts_wrap_turn(self):
        p = chain_from_turns([5.0, 5.0], [0.1], closed=True, wrap_turn=-0.2)
        assert p.bends() == pytest.approx([0.1, 0.2])

    def test_reversed_keeps_length(self):
        p = chain_from_turns([4.0, 6.0, 5.0], [0.2, -0.5])
        assert p.reversed().total == pytest.approx(p.total)
        assert exact_length(p.reversed()) == pytest.approx(exact_length(p), rel=1e-9)


class TestChainLemma:
    def test_straight_open_path(self):
        est = close_chain(chain_from_turns([5.0, 5.0], [0.0]))
        assert est.exact == pytest.approx(10.0)
        assert est.residual == pytest.approx(0.0, abs=1e-9)

    def test_straight_closed_path(self):
        p = chain_from_turns([5.0, 5.0], [0.0], closed=True)
        assert exact_length(p) == pytest.approx(10.0)

    @given(st.lists(st.floats(4.0, 8.0), min_size=2, max_size=5), st.floats(0.0, 0.3))
    def test_residual_within_bound(self, lengths, bend):
        turns = [bend if i % 2 == 0 else -bend for i in range(len(lengths) - 1)]
        p = chain_from_turns(lengths, turns)
        est = close_chain(p)
        assert est.exact <= est.predicted + 1e-9
        assert abs(est.residual) <= chain_bound(p) + 1e-9

    def test_short_arc(self):
        with pytest.raises(ShortArc):
            close_chain(chain_from_turns([1.0, 5.0], [0.0]))

    def test_wide_bend(self):
        with pytest.raises(WideBend):
            close_chain(chain_from_turns([5.0, 5.0], [1.5]))

    def test_bound_violation_raises(self):
        p = chain_from_turns([5.0, 5.0], [0.5])
        with pytest.raises(ChainBoundViolated):
            close_chain(p, C_chain=1e-3)
        est = close_chain(p, C_chain=None)
        assert abs(est.residual) > chain_bound(p, 1e-3)


class TestRightAngleChain:
    def test_two_legs(self):
        p = chain_from_turns([5.0, 5.0], [math.pi / 2.0])
        est = close_right_angle_chain(p)
        assert est.predicted == pytest.approx(10.0 - math.log(2.0))
        assert est.exact == pytest.approx(math.acosh(math.cosh(5.0) ** 2))
        assert abs(est.residual) <= right_angle_bound(p)

    def test_not_right_angle(self):
        with pytest.raises(NotRightAngle):
            close_right_angle_chain(chain_from_turns([5.0, 5.0], [math.pi / 2.0 + 0.1]))

    def test_short_arc(self):
        with pytest.raises(ShortArc):
            close_right_angle_chain(chain_from_turns([2.0, 5.0], [math.pi / 2.0]))

    def test_bound_violation_raises(self):
        p = chain_from_turns([5.0, 5.0], [math.pi / 2.0])
        with pytest.raises(ChainBoundViolated):
            close_right_angle_chain(p, C_ra=1e-6)
        assert close_right_angle_chain(p, C_ra=None).residual > right_angle_bound(p, 1e-6)


class TestInefficiency:
    def test_straight_path_is_efficient(self):
        assert inefficiency(chain_from_turns([3.0, 4.0], [0.0])) == pytest.approx(0.0, abs=1e-9)

    @given(st.floats(0.05, 2.5))
    def test_bent_path_is_inefficient(self, turn):
        assert inefficiency(chain_from_turns([3.0, 4.0], [turn])) > 0.0

    def test_three_arcs_requires_three(self):
        with pytest.raises(Degenerate):
            three_arc_inefficiency(chain_from_turns([3.0, 4.0], [0.1]))

    def test_three_arcs_wide_bend(self):
        with pytest.raises(WideBend):
            three_arc_inefficiency(chain_from_turns([3.0, 4.0, 3.0], [1.5, 0.0]))

    def test_three_arcs_small_bend(self):
        value = three_arc_inefficiency(chain_from_turns([3.0, 4.0, 3.0], [0.5, -0.5]))
        assert 0.0 < value <= 4.0

    def test_three_arcs_over_D1(self):
        p = chain_from_turns([3.0, 4.0, 3.0], [1.0, -1.0])
        with pytest.raises(ChainBoundViolated):
            three_arc_inefficiency(p, D1=0.01)
        assert three_arc_inefficiency(p) == pytest.approx(inefficiency(p))


class TestExcursion:
    def test_straight_path_stays_on_chord(self):
        assert projection_excursion(chain_from_turns([2.0, 3.0], [0.0]), step=0.05) == pytest.approx(0.0, abs=1e-7)

    def test_bent_path_leaves_chord(self):
        assert projection_excursion(chain_from_turns([2.0, 3.0], [1.0]), step=0.05) > 0.1

    def test_returning_path_has_no_chord(self):
        with pytest.raises(DegenerateChord):
            projection_excursion(chain_from_turns([1.0, 1.0], [math.pi]))


class TestTerminalAngle:
    def test_straight_tail(self):
        est = terminal_angle_bound(chain_from_turns([5.0], []), 6.0)
        assert est.measured == pytest.approx(0.0, abs=1e-9)

    def test_bent_tail_within_bound(self):
        est = terminal_angle_bound(chain_from_turns([5.0, 5.0], [0.3]), 6.0, beta_turn=-0.2)
        assert est.measured <= est.bound

    def test_tail_too_short(self):
        with pytest.raises(TooShortTail):
            terminal_angle_bound(chain_from_turns([5.0], []), 0.5)


class TestCalibration:
    def test_small_grid(self):
        constants = calibrate_constants(lengths=(4.0, 6.0), bends=(0.05, 0.1))
        assert set(constants) == {'C_chain', 'C_ra', 'C_ang', 'D1'}
        assert all(v >= 0.0 for v in constants.values())
        assert constants['D1'] > 0.0

    def test_safety_factor_scales(self):
        one = calibrate_constants(lengths=(4.0,), bends=(0.1,), safety=1.0)
        two = calibrate_constants(lengths=(4.0,), bends=(0.1,), safety=2.0)
        for k in one:
            assert two[k] == pytest.approx(2.0 * one[k])
