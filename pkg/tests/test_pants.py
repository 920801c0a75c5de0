"""
裤子、多裤子边界与好裤子枚举的测试
"""

import math
from collections import Counter
from fractions import Fraction

import pytest

from src.algebra.formal_algebra import FormalSum
from src.geometry.connections import cuff_segment, make_arc, third_connections
from src.geometry.fuchsian import closed_geodesics, reverse_class, word_class
from src.geometry.hyperbolic_core import ORIGIN, PointH, axis, common_perpendicular, h_func
from src.geometry.pants import (K_gamma, boundary, calibrate_R, class_sum, cuff_curves, curve_sum,
                                cyclic_order, enumerate_good_pants, good_pants_from_curve,
                                feet_boundary, foot, free_boundary, is_good, pants_from_words,
                                region_volume, theta_pants, third_of, twist, w_max)
from src.utils.errors import BaseMismatch, Degenerate, NegativeCoefficient, NotACuff


class TestCurves:
    def test_reverse_curve_cancels(self, G):
        assert (curve_sum(G, (1,)) + curve_sum(G, (-1,))).is_zero()

    def test_trivial_curve_is_zero(self, G):
        assert curve_sum(G, (1, -1)).is_zero()
        assert curve_sum(G, ()).is_zero()

    def test_conjugate_words_agree(self, G):
        assert curve_sum(G, (1, 2)) == curve_sum(G, (2, 1))
        assert curve_sum(G, (3, 1, 2, -3)) == curve_sum(G, (1, 2))

    def test_coefficients(self, G):
        s = curve_sum(G, (1, 2), coeff=Fraction(1, 3))
        assert s.total() in (Fraction(1, 3), Fraction(-1, 3))

    def test_class_sum_of_free_class(self, G):
        gamma = word_class(G, (2, 1))
        assert class_sum(G, gamma) == curve_sum(G, (1, 2))

    def test_class_sum_of_enumerated_class(self, G):
        gamma = closed_geodesics(G, 0.0, 3.2)[0]
        assert (class_sum(G, gamma) + class_sum(G, reverse_class(G, gamma))).is_zero()


class TestWordPants:
    def test_third_word_defaults_to_inverse_product(self, G):
        p = pants_from_words(G, (1,), (2,))
        assert p.words == ((1,), (2,), (-2, -1))

    def test_product_must_be_trivial(self, G):
        with pytest.raises(Degenerate):
            pants_from_words(G, (1,), (2,), (3,))

    def test_key_ignores_rotation(self, G):
        a, b, c = (1,), (2,), (-2, -1)
        assert pants_from_words(G, a, b, c) == pants_from_words(G, b, c, a)

    def test_boundary_of_single_pants(self, G):
        p = pants_from_words(G, (1,), (2,))
        expected = curve_sum(G, (1,)) + curve_sum(G, (2,)) + curve_sum(G, (-2, -1))
        assert boundary(G, FormalSum.single(p)) == expected
        assert free_boundary(G, FormalSum.single(p)) == expected

    def test_boundary_is_linear(self, G):
        p = pants_from_words(G, (1,), (2,))
        q = pants_from_words(G, (3,), (4,))
        mu = FormalSum({p: 2, q: Fraction(-1, 2)})
        assert boundary(G, mu) == (boundary(G, FormalSum.single(p)).scale(2)
                                   - boundary(G, FormalSum.single(q)).scale(Fraction(1, 2)))

    def test_pants_and_its_mirror_cancel(self, G):
        p = pants_from_words(G, (1,), (2,))
        mirror = pants_from_words(G, (-1,), (1, 2), (-2,))
        assert (boundary(G, FormalSum.single(p)) + boundary(G, FormalSum.single(mirror))).is_zero()

    def test_cuff_curves_deduplicates(self, G):
        p = pants_from_words(G, (1,), (2,))
        assert len(cuff_curves([p, p])) == 3

    def test_goodness(self, G):
        p = pants_from_words(G, (1,), (2,))
        assert not is_good(p, 0.1, 5.0)
        R = p.cuffs[0].halflength
        spread = max(abs(c.halflength - R) for c in p.cuffs)
        assert is_good(p, spread + 1e-6, R)
        assert not is_good(p, 1e-3, R + 1.0)

    def test_feet_need_geometry(self, G):
        p = pants_from_words(G, (1,), (2,))
        with pytest.raises(NotACuff):
            feet_boundary(FormalSum.single(p), p.cuffs[0])
        with pytest.raises(NotACuff):
            foot(p, p.cuffs[0])

    def test_feet_reject_negative_mass(self, G):
        p = pants_from_words(G, (1,), (2,))
        with pytest.raises(NegativeCoefficient):
            feet_boundary(FormalSum({p: -1}), p.cuffs[0])


class TestTheta:
    def test_cyclic_order(self):
        assert cyclic_order(0.0, 1.0, 2.0) == 1
        assert cyclic_order(0.0, 2.0, 1.0) == -1
        assert cyclic_order(0.0, 0.0, 1.0) == 0

    def test_theta_words(self, G):
        arcs = [make_arc(G, w, ORIGIN, ORIGIN) for w in ((1,), (2,), (3,))]
        p = theta_pants(G, *arcs, check=False)
        assert p.words == ((1, -2), (2, -3), (3, -1))

    def test_theta_requires_common_ends(self, G):
        a = make_arc(G, (1,), ORIGIN, ORIGIN)
        b = make_arc(G, (2,), PointH(0.1, 1.1), ORIGIN)
        with pytest.raises(BaseMismatch):
            theta_pants(G, a, b, a)


class TestRegionVolume:
    def test_linear_in_interval(self):
        one = region_volume(10.0, 0.8, 5.0, 1.0)
        assert one > 0.0
        assert region_volume(10.0, 0.8, 5.0, 2.0) == pytest.approx(2.0 * one)

    def test_weighted_dominates(self):
        assert region_volume(10.0, 0.8, 5.0, 1.0, weighted=True) >= region_volume(10.0, 0.8, 5.0, 1.0)

    def test_interval_longer_than_halflength(self):
        with pytest.raises(Degenerate):
            region_volume(10.0, 0.8, 5.0, 6.0)

    def test_w_max_decreases_with_cuff_length(self):
        assert w_max(12.0, 0.8, 5.0) < w_max(8.0, 0.8, 5.0)
        assert w_max(10.0, 0.8, 5.0) == pytest.approx(
            2.0 * math.asinh(math.cosh(5.8) / math.sinh(2.5)))


@pytest.mark.slow
class TestGoodPants:
    EPS, R = 0.5, 3.0

    @pytest.fixture(scope="class")
    def curve_and_pants(self, G):
        curves = closed_geodesics(G, 2.0 * (self.R - self.EPS), 2.0 * (self.R + self.EPS))
        gamma = curves[0]
        return gamma, good_pants_from_curve(G, gamma, self.EPS, self.R)

    def test_all_good_and_bounded_by_gamma(self, curve_and_pants):
        gamma, found = curve_and_pants
        for p in found:
            assert is_good(p, self.EPS, self.R)
            assert p.slots(gamma)

    def test_feet_lie_in_one_period(self, curve_and_pants):
        _, found = curve_and_pants
        for p in found:
            for foot, cuff in zip(p.feet, p.cuffs):
                assert 0.0 <= foot.position < cuff.halflength + 1e-12

    def test_K_gamma_counts_pants(self, G, curve_and_pants):
        gamma, found = curve_and_pants
        assert K_gamma(G, gamma, self.EPS, self.R) == len(found)

    def test_calibration_rows(self, G):
        rows = calibrate_R(G, self.EPS, [self.R], max_curves=1)
        assert rows[0]['R'] == self.R
        assert rows[0]['K_min'] <= rows[0]['K_max']


def _wrap(x: float, period: float) -> float:
    """x 到 period·Z 的有符号距离"""
    return (x + period / 2.0) % period - period / 2.0


@pytest.mark.slow
class TestThirdConnections:
    EPS, R = 0.5, 3.0

    @pytest.fixture(scope="class")
    def gamma(self, G):
        return closed_geodesics(G, 2.0 * (self.R - self.EPS), 2.0 * (self.R + self.EPS))[0]

    @pytest.fixture(scope="class")
    def found(self, G, gamma):
        return good_pants_from_curve(G, gamma, self.EPS, self.R)

    def test_good_pants_exist(self, gamma, found):
        assert found
        for p in found:
            assert p.cuffs[0] == gamma
            assert 0.0 <= foot(p, gamma).position < gamma.halflength

    def test_third_of_inverts_third_pants(self, G, gamma, found):
        seg = cuff_segment(G, gamma)
        ell = gamma.length
        for p in found:
            eta = p.third
            back = third_of(G, p, 0)
            assert back.length == pytest.approx(eta.length, abs=1e-6)
            for a, b in ((back.start, eta.start), (back.end, eta.end)):
                assert abs(_wrap(seg.geo.param(a) - seg.geo.param(b), ell)) < 1e-6

    def test_connections_match_cuff_slots(self, gamma, found):
        counts = Counter(p.key for p in found)
        for p in found:
            assert counts[p.key] == len(p.slots(gamma))

    def test_new_cuffs_follow_h(self, G, gamma, found):
        seg = cuff_segment(G, gamma)
        ell = gamma.length
        for p in found:
            eta = p.third
            s1 = (seg.geo.param(eta.end) - seg.geo.param(eta.start)) % ell
            expected = sorted([h_func(s1, eta.length), h_func(ell - s1, eta.length)])
            got = sorted(c.length for c in p.cuffs[1:])
            assert got == pytest.approx(expected, rel=1e-6)

    def test_seam_feet_are_antipodal(self, G, gamma, found):
        for p in found:
            axes = [axis(G.evaluate(w)) for w in p.words]
            to_b = common_perpendicular(axes[0], axes[1])
            to_c = common_perpendicular(axes[0], axes[2])
            gap = abs(axes[0].param(to_c.foot1) - axes[0].param(to_b.foot1))
            assert gap == pytest.approx(gamma.halflength, abs=1e-6)

    def test_twist_from_either_side(self, G, gamma, found):
        bar = reverse_class(G, gamma)
        found_bar = good_pants_from_curve(G, bar, self.EPS, self.R)
        assert found_bar
        hl = gamma.halflength
        for p1 in found[:3]:
            for p2 in found_bar[:3]:
                s = twist(G, p1, p2, gamma)
                s_bar = twist(G, p2, p1, bar)
                assert 0.0 <= s <= hl
                assert abs(_wrap(s - s_bar, hl)) < 1e-6

    def test_K_gamma_is_feet_mass(self, G, gamma, found):
        mu = enumerate_good_pants(G, self.EPS, self.R, curves=[gamma])
        assert K_gamma(G, gamma, self.EPS, self.R) == len(found)
        assert feet_boundary(mu, gamma).total() == len(found)

    def test_each_connection_counted_once(self, G, gamma):
        Lmax = w_max(gamma.length, self.EPS, self.R)
        canonical = third_connections(G, gamma, Lmax)
        both = third_connections(G, gamma, Lmax, both_orientations=True)
        assert len(both) == 2 * len(canonical)
