"""
曲面群、字运算与闭测地线枚举的测试
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.algebra.formal_algebra import WeightFn, weight
from src.geometry.fuchsian import (BOLZA_RELATOR, OrbitIndex, abelianize, are_conjugate, bfs_elements,
                                   classify, classify_element, closed_geodesics, concat, element,
                                   enumerate_elements, cyclic_key, cyclic_reduce_with_conjugator,
                                   element_table, export_geodesics, free_reduce, invert_word,
                                   load_surface, max_listing_length, minimal_period, oriented,
                                   reverse_class, systole, word_class, word_key, word_length)
from src.geometry.hyperbolic_core import (MoebiusTransform, PointH, dist, dist_many, rotation_about_i,
                                          trace_length)
from src.utils.errors import BadRelator, CapExceeded, NonHyperbolicGenerator

SYSTOLE = 2.0 * math.acosh(1.0 + math.sqrt(2.0))

letters = st.sampled_from([1, -1, 2, -2, 3, -3, 4, -4])
words = st.lists(letters, max_size=10).map(tuple)
short_words = st.lists(letters, min_size=1, max_size=6).map(free_reduce).filter(bool)


class TestWords:
    def test_free_reduce(self):
        assert free_reduce((1, -1, 2)) == (2,)
        assert free_reduce((1, 2, -2, -1)) == ()

    def test_invert_and_concat(self):
        assert invert_word((1, 2)) == (-2, -1)
        assert concat((1, 2), (-2, 3)) == (1, 3)

    def test_cyclic_reduce_returns_conjugator(self):
        assert cyclic_reduce_with_conjugator((3, 1, 2, -3)) == ((1, 2), (3,))

    def test_letter_order(self):
        assert sorted([(-1,), (2,), (1,)], key=word_key) == [(1,), (-1,), (2,)]

    def test_conjugacy(self):
        assert are_conjugate((1, 2), (2, 1))
        assert are_conjugate((3, 1, 2, -3), (2, 1))
        assert not are_conjugate((1, 2), (2, -1))

    def test_abelianize(self):
        assert abelianize((1, 1, -2), 4) == (2, -1, 0, 0)

    @given(words, words)
    def test_abelianize_is_a_homomorphism(self, a, b):
        ha, hb = abelianize(a, 4), abelianize(b, 4)
        assert abelianize(concat(a, b), 4) == tuple(x + y for x, y in zip(ha, hb))

    @given(words)
    def test_inverse_cancels(self, w):
        assert concat(w, invert_word(w)) == ()
        assert word_length(invert_word(w)) == word_length(w)

    @given(words, st.integers(0, 9))
    def test_cyclic_key_ignores_rotation(self, w, k):
        w = free_reduce(w)
        if not w:
            return
        k %= len(w)
        assert cyclic_key(w[k:] + w[:k]) == cyclic_key(w)

    def test_minimal_period(self):
        assert minimal_period((1, 2, 1, 2)) == 2
        assert minimal_period((1, 3, 2, -4) * 2) == 4
        assert minimal_period((1, 2, 3)) == 3
        assert minimal_period((4, 4, 4)) == 1

    @given(short_words, st.integers(1, 3))
    def test_minimal_period_divides_repetition(self, w, k):
        p = minimal_period(w)
        assert minimal_period(w * k) == p
        assert w[:p] * (len(w) // p) == w


class TestSurface:
    def test_builtin_surface(self, G):
        assert G.genus == 2
        assert G.rank == 4
        assert G.evaluate(BOLZA_RELATOR).close_to(MoebiusTransform.identity(), 1e-7)

    def test_generators_are_hyperbolic(self, G):
        for g in G.generators:
            assert abs(g.trace) == pytest.approx(2.0 * (1.0 + math.sqrt(2.0)))

    def test_bad_relator(self):
        with pytest.raises(BadRelator):
            load_surface({'builtin': 'bolza', 'relator': [1, 2, 3, 4]})

    def test_non_hyperbolic_generator(self):
        identity = [[1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(NonHyperbolicGenerator):
            load_surface({'generators': [identity] * 4, 'genus': 2, 'relator': [1, 2, -1, -2]})

    def test_overrides_reach_the_group(self):
        G = load_surface(hard_cap=9.0)
        assert G.hard_cap == 9.0

    def test_yaml_surface_file(self, tmp_path):
        path = tmp_path / "surface.yaml"
        path.write_text("builtin: bolza\nq0: 0.5\nL0: 3.0\n", encoding="utf-8")
        G = load_surface(path)
        assert G.q0 == 0.5
        assert G.L0 == 3.0

    def test_reduce_point(self, G):
        z = G.evaluate((1, 2)).apply(0.1 + 0.3j)
        w, k, z_red = G.reduce_point(z)
        assert abs(k.apply(z_red) - z) < 1e-9
        assert dist(PointH.from_complex(z_red), G.basepoint) <= G.circumradius + 1e-9

    def test_element_table_respects_cap(self, G):
        with pytest.raises(CapExceeded):
            element_table(G, G.hard_cap + 1.0)

    def test_element_table_displacements(self, G):
        table = element_table(G, 4.0)
        o = G.basepoint
        for w, m in table.items():
            assert dist(o, m.apply_point(o)) <= 4.0 + 1e-9
            assert G.evaluate(w).close_to(m, 1e-6)


class TestClosedGeodesics:
    def test_systole(self, G):
        assert systole(G) == pytest.approx(SYSTOLE, abs=1e-6)

    def test_word_class_of_generator(self, G):
        gamma = word_class(G, (1,))
        assert gamma.length == pytest.approx(SYSTOLE)
        assert gamma.halflength == pytest.approx(SYSTOLE / 2.0)
        assert gamma.homology == (1, 0, 0, 0)

    def test_reverse_class_and_orientation(self, G):
        gamma = word_class(G, (1,))
        bar = reverse_class(G, gamma)
        assert bar.rep == (-1,)
        assert bar.length == pytest.approx(gamma.length)
        assert oriented(G, gamma) == (gamma, 1)
        canon, sign = oriented(G, bar)
        assert canon.key == gamma.key
        assert sign == -1

    def test_shortest_curves(self, G):
        curves = closed_geodesics(G, 0.0, 3.2)
        assert curves
        for c in curves:
            assert c.length == pytest.approx(SYSTOLE, abs=1e-6)
        keys = [c.key for c in curves]
        assert len(set(keys)) == len(keys)

    def test_listing_is_sorted(self, G):
        curves = closed_geodesics(G, 3.0, 5.0)
        lengths = [c.length for c in curves]
        order = [(round(c.length, 9), c.key) for c in curves]
        assert order == sorted(order)
        assert all(3.0 - 1e-9 <= x <= 5.0 + 1e-9 for x in lengths)

    def test_both_orientations_listed(self, G):
        curves = closed_geodesics(G, 0.0, 3.2)
        keys = {c.key for c in curves}
        for c in curves:
            assert reverse_class(G, c).key in keys

    def test_export(self, G):
        rows = export_geodesics(closed_geodesics(G, 0.0, 3.2))
        assert set(rows[0]) == {'word', 'length', 'homology', 'free'}

    def test_cap(self, G):
        with pytest.raises(CapExceeded):
            closed_geodesics(G, 0.0, 30.0)

    def test_listing_bound(self):
        G8 = load_surface(hard_cap=8.0)
        bound = max_listing_length(G8)
        assert bound == pytest.approx(2.0 * (8.0 - 2.0 * G8.circumradius))
        with pytest.raises(CapExceeded, match="最多列出长度"):
            closed_geodesics(G8, 0.0, bound + 0.01)
        curves = closed_geodesics(G8, 0.0, bound - 1e-6)
        assert curves
        assert all(c.length <= bound for c in curves)

    def test_nothing_below_systole(self, G):
        assert closed_geodesics(G, 0.0, SYSTOLE - 0.01) == []
        assert closed_geodesics(G, 0.0, 1.0) == []

    @pytest.mark.slow
    def test_window_beyond_twice_systole(self, G):
        curves = closed_geodesics(G, 8.4, 9.4)
        assert curves
        assert all(8.4 - 1e-9 <= c.length <= 9.4 + 1e-9 for c in curves)
        keys = {c.key for c in curves}
        assert len(keys) == len(curves)
        for c in curves:
            assert reverse_class(G, c).key in keys


class TestClassification:
    def test_primitive_word(self, G):
        w = (1, 3, 2, -4)
        g = G.evaluate(w)
        cl = classify_element(G, g)
        assert cl.klass.length == pytest.approx(trace_length(g.trace))
        assert G.evaluate(cl.klass.rep).translation_length() == pytest.approx(cl.klass.length)
        assert cl.klass.homology == abelianize(w, 4)
        conj = G.evaluate(cl.conj)
        assert (conj.inverse() @ g @ conj).close_to(G.evaluate(cl.klass.rep), 1e-6)

    def test_proper_power(self, G):
        h = classify(G, (1, 2))
        h2 = classify(G, (1, 2, 1, 2))
        assert h2.length == pytest.approx(2.0 * h.length)
        assert h2.rep == h.rep * 2

    @given(short_words)
    def test_random_words(self, G, w):
        g = G.evaluate(w)
        cl = classify_element(G, g)
        assert cl.klass.length == pytest.approx(trace_length(g.trace), rel=1e-9)
        assert cl.klass.homology == abelianize(w, 4)

    @given(short_words, letters)
    def test_conjugation_invariance(self, G, w, x):
        assert classify(G, concat((x,), w, (-x,))).key == classify(G, w).key

    @given(short_words)
    def test_representative_is_canonical(self, G, w):
        gamma = classify(G, w)
        assert classify(G, gamma.rep) == gamma

    def test_listed_classes_are_fixed(self, G):
        for c in closed_geodesics(G, 3.0, 5.0):
            assert classify(G, c.rep) == c


class TestElementOracles:
    def test_enumerate_elements_matches_table(self, G):
        pairs = enumerate_elements(G, 4.0)
        assert len(pairs) == len(element_table(G, 4.0))
        assert pairs[0][0] == ()

    def test_pruned_enumeration_agrees_with_bfs(self, G):
        o = G.basepoint.z
        table = element_table(G, 4.0)
        brute = bfs_elements(G, 2)
        near = brute.points[dist_many(o, brute.points) <= 4.0 - 1e-6]
        for p in near:
            assert np.min(np.abs(table.points - p)) < 1e-8

    def test_group_element(self, G):
        g = element(G, (1, -1, 2))
        assert g.word == (2,)
        assert g.length >= SYSTOLE - 1e-9
        assert weight(WeightFn("G"), g) == pytest.approx(math.exp(-g.length))

    def test_table_points_are_separated(self, G):
        table = element_table(G, 6.0)
        pts = table.points
        for i, p in enumerate(pts):
            others = np.delete(pts, i)
            assert dist_many(complex(p), others).min() > 2.0 * G.inradius - 1e-6

    @pytest.mark.slow
    def test_table_size_matches_area(self, G):
        D = 10.0
        n = len(element_table(G, D))
        r, ri = G.circumradius, G.inradius
        # 瓦片覆盖 B(o, D − r)，内切圆两两不交且含于 B(o, D + ri)；曲面面积 4π
        assert n >= (math.cosh(D - r) - 1.0) / 2.0
        assert n <= (math.cosh(D + ri) - 1.0) / (math.cosh(ri) - 1.0)


def _at_distance(z: complex, d: float, theta: float) -> complex:
    """与 z 相距 d、方向 theta 的点"""
    p = rotation_about_i(theta).apply(1j * math.exp(d))
    return z.real + z.imag * p


class TestOrbitIndex:
    def test_duplicate_is_rejected(self):
        index = OrbitIndex(0.1)
        assert index.add(1j)
        assert not index.add(0.01 + 1j)
        assert index.add(3j)
        assert len(index) == 2

    def test_row_boundary(self):
        index = OrbitIndex(0.1)
        index.add(complex(0.0, math.exp(0.5) * 0.99))
        assert complex(0.001, math.exp(0.5) * 1.01) in index

    @given(st.floats(-3.0, 3.0), st.floats(-12.0, 3.0), st.floats(0.0, 0.09), st.floats(0.0, 2 * math.pi))
    def test_close_points_are_found(self, x, log_y, d, theta):
        z = complex(x, math.exp(log_y))
        index = OrbitIndex(0.1)
        index.add(z)
        assert _at_distance(z, d, theta) in index

    @given(st.floats(-3.0, 3.0), st.floats(-12.0, 3.0), st.floats(0.11, 4.0), st.floats(0.0, 2 * math.pi))
    def test_far_points_are_new(self, x, log_y, d, theta):
        z = complex(x, math.exp(log_y))
        index = OrbitIndex(0.1)
        index.add(z)
        assert _at_distance(z, d, theta) not in index
