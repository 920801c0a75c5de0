"""
测地弧、连接枚举与计数拟合的测试
"""

import math

import pytest

from src.geometry.connections import (L_of, Side, arcs_to_path, check_narrow, concat_arcs,
                                      count_fit, counting_density_ratios, cuff_segment,
                                      enumerate_conn, enumerate_conn_below, make_arc, narrow_band,
                                      narrow_set, ortho_defects, reverse_arc, split_midpoint,
                                      third_connections)
from src.geometry.fuchsian import closed_geodesics, concat
from src.geometry.hyperbolic_core import ORIGIN, PointH, UnitTangent, angle_gap, dist
from src.utils.errors import BaseMismatch, CapExceeded, Degenerate, EmptyBand, InsufficientData

SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


class TestThreshold:
    def test_explicit_constants(self):
        assert L_of(0.1, q0=0.5, L0=2.0) == pytest.approx(-math.log(0.1) / 0.5)

    def test_floor(self):
        assert L_of(0.5) == pytest.approx(2.0)

    def test_reads_group_constants(self, G):
        assert L_of(0.8, G) == pytest.approx(G.L0)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.3])
    def test_domain(self, eps):
        with pytest.raises(Degenerate):
            L_of(eps)


class TestArcs:
    def test_generator_arc(self, G):
        arc = make_arc(G, (1,), ORIGIN, ORIGIN)
        assert arc.length == pytest.approx(SYSTOLE)
        assert dist(arc.lifted_end, G.generator(1).apply_point(ORIGIN)) < 1e-12

    def test_zero_length_arc(self, G):
        with pytest.raises(Degenerate):
            make_arc(G, (), ORIGIN, ORIGIN)

    def test_reverse_is_involution(self, G):
        arc = make_arc(G, (1, 2), ORIGIN, ORIGIN)
        back = reverse_arc(arc)
        assert back.word == (-2, -1)
        assert back.length == pytest.approx(arc.length)
        assert reverse_arc(back) == arc

    def test_concat(self, G):
        a, b = make_arc(G, (1,), ORIGIN, ORIGIN), make_arc(G, (2,), ORIGIN, ORIGIN)
        ab = concat_arcs(G, a, b)
        assert ab.word == (1, 2)
        assert ab.length <= a.length + b.length + 1e-9

    def test_concat_requires_matching_ends(self, G):
        a = make_arc(G, (1,), ORIGIN, ORIGIN)
        b = make_arc(G, (2,), PointH(0.0, 1.2), ORIGIN)
        with pytest.raises(BaseMismatch):
            concat_arcs(G, a, b)

    def test_split_midpoint(self, G):
        arc = make_arc(G, (1, 2), ORIGIN, ORIGIN)
        first, second = split_midpoint(G, arc)
        assert first.length == pytest.approx(arc.length / 2.0)
        assert second.length == pytest.approx(arc.length / 2.0)
        assert concat(first.word, second.word) == arc.word

    def test_path_of_arcs(self, G):
        a, b = make_arc(G, (1,), ORIGIN, ORIGIN), make_arc(G, (2,), ORIGIN, ORIGIN)
        p = arcs_to_path([a, b])
        assert p.total == pytest.approx(a.length + b.length)


class TestEnumeration:
    def test_window_contract(self, G):
        u, v = UnitTangent(ORIGIN, 0.3), UnitTangent(ORIGIN, 1.0)
        arcs = enumerate_conn(G, u, v, 0.5, 5.0)
        for a in arcs:
            assert abs(a.length - 5.0) <= 0.5 + 1e-9
            assert float(angle_gap(a.init_dir.dir, u.dir)) <= 0.5 + 1e-7
            assert float(angle_gap(a.term_dir.dir, v.dir)) <= 0.5 + 1e-7
            assert dist(a.start, u.base) < 1e-12

    def test_below_is_strict(self, G):
        u, v = UnitTangent(ORIGIN, 0.3), UnitTangent(ORIGIN, 1.0)
        assert all(a.length < 4.0 for a in enumerate_conn_below(G, u, v, 0.8, 4.0))

    def test_cap(self, G):
        u = UnitTangent(ORIGIN, 0.0)
        with pytest.raises(CapExceeded):
            enumerate_conn(G, u, u, 0.1, G.hard_cap + 1.0)

    def test_narrow_band(self, G):
        assert narrow_band(G, 0.8, 5.0) == pytest.approx((2.0, 8.0))
        with pytest.raises(EmptyBand):
            narrow_band(G, 0.8, 1.0)

    @pytest.mark.slow
    def test_narrow_arcs_satisfy_invariant(self, G):
        u = UnitTangent(ORIGIN, 0.3)
        narrow = narrow_set(G, u, Side.LEFT, 0.8, 4.0)
        assert all(check_narrow(n, G) for n in narrow)


class TestOrthogeodesics:
    @pytest.mark.slow
    def test_third_connections_are_orthogonal(self, G):
        gamma = closed_geodesics(G, 0.0, 3.2)[0]
        seg = cuff_segment(G, gamma)
        arcs = third_connections(G, gamma, 4.0)
        for a in arcs:
            assert a.length <= 4.0 + 1e-9
            assert max(ortho_defects(a, seg, seg)) <= 1e-6

    def test_cuff_segment_covers_one_period(self, G):
        gamma = closed_geodesics(G, 0.0, 3.2)[0]
        seg = cuff_segment(G, gamma)
        assert seg.periodic
        assert seg.length == pytest.approx(gamma.length)
        assert seg.contains(seg.t1)
        assert not seg.contains(seg.t2)


class TestCountFit:
    def test_exact_exponential(self):
        slope, intercept, rel = count_fit([(L, 3.0 * math.exp(L)) for L in (1.0, 2.0, 3.0, 4.0)])
        assert slope == pytest.approx(1.0)
        assert intercept == pytest.approx(math.log(3.0))
        assert rel == pytest.approx(0.0, abs=1e-9)

    def test_needs_three_samples(self):
        with pytest.raises(InsufficientData):
            count_fit([(1.0, 2.0), (2.0, 5.0)])

    def test_counts_must_be_positive(self):
        with pytest.raises(InsufficientData):
            count_fit([(1.0, 2.0), (2.0, 0.0), (3.0, 8.0)])

    def test_density_ratios(self):
        rows = [{'L': 6.0, 'count': 100}, {'L': 7.0, 'count': 270}, {'L': 8.0, 'count': 40}]
        assert counting_density_ratios(rows) == pytest.approx([2.7])
