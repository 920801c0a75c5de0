"""
同调构造的测试

群链层面的恒等式直接验证；依赖连接枚举的构造放在 slow 标记下。
"""

from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.algebra.formal_algebra import FormalSum
from src.config.settings import HomologyConfig
from src.geometry.fuchsian import closed_geodesics, free_reduce
from src.homology.context import HomologyContext, as_sum, pair_key
from src.homology.dichotomy import (depth, group_boundary, homology_sum, pair_boundary, phi2,
                                    replace_group_sum, short_element_table,
                                    stretch)
from src.homology.omega import _rank, _snf_diagonal, phi_report
from src.homology.square import theta_words
from src.homology.triangles import rotation_lengths, triangle_defect
from src.utils.errors import IdentityElement, NotNarrow

letters = st.sampled_from([1, -1, 2, -2, 3, -3, 4, -4])
words = st.lists(letters, max_size=12).map(lambda w: free_reduce(tuple(w)))


class TestContext:
    def test_denominator(self, ctx):
        assert ctx.N == 22026

    def test_anchor_arc(self, ctx):
        assert ctx.e.length == pytest.approx(ctx.L3)
        assert ctx.L3 == pytest.approx(2.0)
        assert ctx.y == ctx.u.base

    def test_strict_check_raises(self, strict_ctx):
        with pytest.raises(NotNarrow):
            strict_ctx.check(False, NotNarrow, "垂足不在边上")
        assert strict_ctx.ledger == []

    def test_relaxed_check_records(self, G):
        relaxed = HomologyContext.build(G, HomologyConfig())
        relaxed.check(True, NotNarrow, "不会记录")
        relaxed.check(False, NotNarrow, "垂足不在边上", word=(1,))
        assert [row['kind'] for row in relaxed.ledger] == ['not_narrow']

    def test_memo_builds_once(self, G):
        fresh = HomologyContext.build(G, HomologyConfig())
        calls = []
        for _ in range(3):
            fresh.memo(('k',), lambda: calls.append(1) or len(calls))
        assert calls == [1]

    def test_loops_are_shared(self, ctx):
        assert ctx.loop((1,), (2,)) is ctx.loop((1, 2))

    def test_pair_key(self):
        assert pair_key((-2, -1)) == (1, 2)
        assert pair_key((1, 2)) == (1, 2)

    def test_as_sum(self):
        s = FormalSum.single('a')
        assert as_sum(s) is s
        assert as_sum('a') == s


class TestGroupChains:
    def test_group_boundary(self):
        assert group_boundary((1,), (-1,)) == FormalSum({(1,): 1, (-1,): 1, (): -1})

    def test_homology_sum(self, G):
        assert homology_sum(G, (1, 1, -3)) == FormalSum({(1,): 2, (3,): -1})

    def test_identity_has_no_stretch(self, ctx):
        with pytest.raises(IdentityElement):
            stretch(ctx, (1, -1))

    def test_stretch_conjugates_by_anchor(self, ctx):
        k = ctx.e.word
        A = stretch(ctx, (2,))
        assert A.word == free_reduce(tuple(-x for x in reversed(k)) + (2,) + k)

    @pytest.mark.parametrize("length,expected", [(1.0, 0), (3.9, 0), (4.0, 1), (8.0, 2), (17.0, 3)])
    def test_depth(self, length, expected):
        assert depth(length) == expected

    def test_phi2_of_identity(self):
        assert phi2(()) == FormalSum.single(((), ()))

    def test_phi2_of_inverse_letter(self):
        chain = phi2((-1,))
        assert chain == FormalSum({((1,), (-1,)): 1, ((), ()): 1})
        assert pair_boundary(chain) == FormalSum({(1,): 1, (-1,): 1})

    @given(words)
    def test_phi2_boundary(self, G, w):
        expected = FormalSum.single(w) - homology_sum(G, w)
        assert pair_boundary(phi2(w)) == expected


class TestTriangles:
    def test_defect(self):
        assert triangle_defect(3.0, 4.0, 5.0) == pytest.approx(6.0)
        assert triangle_defect(1.0, 1.0, 2.0) == pytest.approx(2.0)

    def test_rotation_lengths_solve_pairwise_sums(self):
        side = lambda x: SimpleNamespace(length=x)
        T = SimpleNamespace(A1=side(3.0), A2=side(3.5), A3=side(4.0))
        Tp = SimpleNamespace(A1=side(3.2), A2=side(2.9), A3=side(3.6))
        R = 5.0
        r1, r2, r3 = rotation_lengths(T, Tp, R)
        assert r1 + r2 == pytest.approx(2 * R - 4.0 - 3.6)
        assert r2 + r3 == pytest.approx(2 * R - 3.0 - 3.2)
        assert r1 + r3 == pytest.approx(2 * R - 3.5 - 2.9)

    def test_theta_words(self, ctx):
        p = theta_words(ctx, (1,), (2,), (3,))
        assert p.words == ((1, -2), (2, -3), (3, -1))


class TestOmega:
    def test_smith_diagonal(self):
        assert _snf_diagonal([[2, 0], [0, 3]], 2) == [1, 6]
        assert _snf_diagonal([], 3) == []

    def test_rank(self):
        assert _rank([[1, 1], [2, 2]]) == 1
        assert _rank([]) == 0

    @pytest.mark.slow
    def test_phi_rows_are_consistent(self, ctx):
        curves = closed_geodesics(ctx.G, 2.0 * (ctx.R - ctx.eps), 2.0 * (ctx.R + ctx.eps))[:1]
        for row in phi_report(ctx, curves):
            if 'error' not in row:
                assert row['ok']
                assert row['denominator'] > 0
                assert Fraction(row['l1']) > 0


class TestShortElements:
    def test_table_radius(self, G):
        table, N = short_element_table(G, 1.2)
        assert len(table) > 1
        assert N == max(len(w) for w in table.words)
        assert N >= 1

    def test_identity_is_dropped_from_linear_extension(self, ctx):
        assert replace_group_sum(ctx, FormalSum({(): 3})).is_zero()
