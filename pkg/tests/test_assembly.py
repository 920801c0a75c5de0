"""
粘合、覆叠复形与好性检验的测试
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.algebra.formal_algebra import FormalSum
from src.assembly.cover import (AbstractPants, CoverComplex, Pairing, _bottleneck, cover_components,
                                cover_degree, equidistribution_statistic, export_cover, fn_coords,
                                glue, instances_of, is_evenly_distributed, model_surface,
                                twist_deviation, verify_good)
from src.geometry.fuchsian import closed_geodesics
from src.geometry.pants import good_pants_from_curve, pants_from_words
from src.utils.errors import NegativeCoefficient, NotEven
from src.utils.helpers import read_json

EPS, R = 0.8, 5.0


def _two_pants(twist):
    pants = [AbstractPants((R, R, R), 'a'), AbstractPants((R, R, R), 'b')]
    return CoverComplex(pants, [Pairing((0, i), (1, i), R, twist) for i in range(3)])


class TestModelSurface:
    def test_genus_two(self, G):
        c = model_surface(R)
        assert c.euler == -2
        assert cover_degree(c, G) == 1
        assert cover_components(c) == [[0, 1]]

    def test_is_good(self):
        report = verify_good(model_surface(R), EPS, R)
        assert report['ok']
        assert report['cuffs'] == 3
        assert report['max_twist_dev'] == pytest.approx(0.0)

    def test_every_slot_glued_once(self):
        slots = model_surface(R).slots()
        assert len(slots) == len(set(slots)) == 6


class TestGoodness:
    def test_twist_inside_tolerance(self):
        assert verify_good(_two_pants(1.0 + EPS / (2 * R)), EPS, R)['ok']

    def test_twist_outside_tolerance(self):
        report = verify_good(_two_pants(1.0 + 2 * EPS / R), EPS, R)
        assert not report['ok']
        assert {v['kind'] for v in report['violations']} == {'twist'}

    def test_halflength_outside_tolerance(self):
        pants = [AbstractPants((R, R, R)), AbstractPants((R, R, R))]
        c = CoverComplex(pants, [Pairing((0, 0), (1, 0), R + 1.0, 1.0)])
        assert [v['kind'] for v in verify_good(c, EPS, R)['violations']] == ['hl']

    def test_twist_deviation_wraps(self):
        assert twist_deviation(1.0, 5.0) == pytest.approx(0.0)
        assert twist_deviation(5.9, 5.0) == pytest.approx(0.1)
        assert twist_deviation(0.0, 5.0) == pytest.approx(1.0)

    def test_fn_coords_reduced(self):
        coords = fn_coords(_two_pants(6.0))
        assert all(0.0 <= fn.s < fn.hl for fn in coords)
        assert coords[0].s == pytest.approx(1.0)


class TestBottleneck:
    def test_diagonal(self):
        value, match = _bottleneck(np.array([[0.1, 0.5], [0.4, 0.2]]))
        assert value == pytest.approx(0.2)
        assert list(match) == [0, 1]

    def test_crossed(self):
        value, match = _bottleneck(np.array([[0.5, 0.1], [0.1, 0.5]]))
        assert value == pytest.approx(0.1)
        assert list(match) == [1, 0]

    def test_bottleneck_is_not_the_sum(self):
        dev = np.array([[0.0, 0.3], [0.9, 0.3]])
        value, match = _bottleneck(dev)
        assert value == pytest.approx(0.3)
        assert max(dev[i, j] for i, j in enumerate(match)) == pytest.approx(value)


class TestMultipants:
    def test_instances_expand_coefficients(self, G):
        p = pants_from_words(G, (1,), (2,))
        assert instances_of(FormalSum({p: 3})) == [p, p, p]

    def test_instances_reject_negative(self, G):
        p = pants_from_words(G, (1,), (2,))
        with pytest.raises(NegativeCoefficient):
            instances_of(FormalSum({p: -1}))
        with pytest.raises(NegativeCoefficient):
            instances_of(FormalSum({p: Fraction(1, 2)}))

    def test_evenly_distributed(self, G):
        p = pants_from_words(G, (1,), (2,))
        mirror = pants_from_words(G, (-1,), (1, 2), (-2,))
        assert not is_evenly_distributed(G, FormalSum.single(p))
        assert is_evenly_distributed(G, FormalSum({p: 1, mirror: 1}))

    def test_glue_requires_zero_boundary(self, G):
        p = pants_from_words(G, (1,), (2,))
        with pytest.raises(NotEven):
            glue(G, FormalSum.single(p), EPS, R)


class TestExport:
    def test_export_model(self, G, tmp_path):
        path = export_cover(model_surface(R), G, tmp_path / "cover.json", EPS, R)
        data = read_json(path)
        assert data['euler'] == -2
        assert data['degree'] == '1'
        assert data['components'] == [[0, 1]]
        assert data['goodness']['ok']
        assert len(data['fn_coords']) == 3


@pytest.mark.slow
class TestFeetStatistic:
    def test_statistic_is_finite(self, G):
        eps, r = 0.5, 3.0
        gamma = closed_geodesics(G, 2.0 * (r - eps), 2.0 * (r + eps))[0]
        found = good_pants_from_curve(G, gamma, eps, r)
        if not found:
            pytest.skip("该尺度下没有好裤子")
        value = equidistribution_statistic(FormalSum({p: 1 for p in found}), gamma)
        assert 0.0 <= value <= gamma.halflength
        assert not math.isinf(value)
