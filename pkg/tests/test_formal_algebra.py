"""
形式和、权函数、半随机映射与脚测度的测试
"""

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from src.algebra.formal_algebra import (FeetMeasure, FiniteMap, FormalSum, WeightFn, boxtimes_check,
                                        delta_equivalent, floor_exp_2R, linear_sum, pushforward_abs,
                                        random_element, semirandom_norm, weight)
from src.utils.errors import EmptyDomain, KindMismatch, MassMismatch

fractions_ = st.fractions(min_value=-5, max_value=5, max_denominator=12)
sums = st.dictionaries(st.sampled_from("abcdef"), fractions_, max_size=6).map(FormalSum)


class TestFormalSum:
    def test_zero_coefficients_dropped(self):
        s = FormalSum({'a': 0, 'b': Fraction(1, 2)})
        assert s.support() == ['b']
        assert not FormalSum({'a': 0})

    def test_denominator_bound_must_divide(self):
        with pytest.raises(ValueError):
            FormalSum({'a': Fraction(1, 3)}, denom_bound=4)
        assert FormalSum({'a': Fraction(1, 3)}, denom_bound=6).denom_bound == 6

    def test_from_pairs_accumulates(self):
        s = FormalSum.from_pairs([('a', 1), ('b', Fraction(1, 2)), ('a', 2), ('b', Fraction(-1, 2))])
        assert s == FormalSum({'a': 3})
        assert s.is_nonnegative()
        assert not FormalSum({'a': 1, 'b': -1}).is_nonnegative()

    def test_arithmetic(self):
        a = FormalSum({'x': 1, 'y': Fraction(1, 2)})
        b = FormalSum({'y': Fraction(1, 2), 'z': -2})
        assert a - b == FormalSum({'x': 1, 'z': 2})
        assert (a + b).total() == Fraction(0)
        assert a.scale(Fraction(2, 3)) == FormalSum({'x': Fraction(2, 3), 'y': Fraction(1, 3)})
        assert 2 * a == a + a

    def test_l1_and_denominator(self):
        s = FormalSum({'x': Fraction(-1, 4), 'y': Fraction(1, 6)})
        assert s.l1() == Fraction(5, 12)
        assert s.denominator() == 12

    def test_map_keys_merges(self):
        s = FormalSum({'ab': 1, 'AB': 2})
        assert s.map_keys(str.lower) == FormalSum({'ab': 3})

    def test_apply_linear(self):
        s = FormalSum({1: 2, 2: -1})
        f = lambda k: FormalSum({k: 1, k + 1: 1})
        assert s.apply_linear(f) == FormalSum({1: 2, 2: 1, 3: -1})

    def test_sum_starts_at_zero(self):
        parts = [FormalSum.single('a'), FormalSum.single('b')]
        assert sum(parts) == linear_sum(parts)

    @given(sums, sums, sums)
    def test_addition_is_associative_and_commutative(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a - a).is_zero()

    @given(sums, fractions_)
    def test_scaling_keeps_denominator_bound(self, a, q):
        scaled = a.scale(q)
        assert scaled.denom_bound % scaled.denominator() == 0

    @given(st.lists(sums, max_size=5))
    def test_linear_sum_agrees_with_repeated_addition(self, parts):
        acc = FormalSum()
        for p in parts:
            acc = acc + p
        assert linear_sum(parts) == acc


class _Arc:
    def __init__(self, length):
        self.length = length
        self.init_dir = None


class TestWeights:
    def test_arc_weight(self):
        assert weight(WeightFn("C"), _Arc(2.0)) == pytest.approx(math.exp(-2.0))

    def test_table_weight(self):
        sigma = WeightFn("table", table={'a': Fraction(1, 3)})
        assert weight(sigma, 'a') == Fraction(1, 3)
        with pytest.raises(KindMismatch):
            weight(sigma, 'b')

    def test_kind_mismatch(self):
        with pytest.raises(KindMismatch):
            weight(WeightFn("Π", R=5.0), _Arc(1.0))

    def test_point_weight(self):
        assert weight(WeightFn("1"), 1) == 1


class TestFiniteMaps:
    def setup_method(self):
        self.sigma = WeightFn("table", table={'x': 1, 'y': 2, 'u': 1, 'v': 1})
        self.f = FiniteMap([('x', FormalSum({'u': 1, 'v': -2})), ('y', FormalSum({'u': Fraction(1, 2)}))])

    def test_pushforward(self):
        push = pushforward_abs(self.f, self.sigma)
        assert push == {'u': 2, 'v': 2}

    def test_norm(self):
        assert semirandom_norm(self.f, self.sigma, self.sigma) == 2

    def test_zero_map_has_zero_norm(self):
        assert semirandom_norm(FiniteMap(), self.sigma, self.sigma) == 0

    def test_compose(self):
        g = FiniteMap([('u', FormalSum({'p': 1})), ('v', FormalSum({'p': 1, 'q': 1}))])
        h = self.f.compose(g)
        assert h('x') == FormalSum({'p': -1, 'q': -2})
        assert h('y') == FormalSum({'p': Fraction(1, 2)})

    def test_compose_outside_domain(self):
        with pytest.raises(EmptyDomain):
            self.f.compose(FiniteMap([('u', FormalSum({'p': 1}))]))

    def test_linear_combination(self):
        g = FiniteMap([('z', FormalSum({'u': 1}))])
        h = self.f.linear_combination(2, g, -1)
        assert h.domain() == ['x', 'y', 'z']
        assert h('z') == FormalSum({'u': -1})
        assert h('y') == FormalSum({'u': 1})

    def test_coupling(self):
        coupling = {('a', 'p'): Fraction(1, 2), ('a', 'q'): Fraction(1, 2)}
        assert boxtimes_check(coupling, {'a': 1}, {'p': 1, 'q': 1})
        assert not boxtimes_check(coupling, {'a': Fraction(1, 3)}, {'p': 1, 'q': 1})


class TestFeetMeasure:
    def test_positions_wrap(self):
        m = FeetMeasure.build('γ', 2.0, [(2.5, 1), (-0.5, 1)])
        assert [p for p, _ in m.atoms] == pytest.approx([0.5, 1.5])

    def test_mass_in_wraps(self):
        m = FeetMeasure.build('γ', 2.0, [(0.1, 1), (1.9, 2)])
        assert m.mass_in(1.8, 0.4) == 3
        assert m.mass_in(0.5, 1.0) == 0
        assert m.mass_in(0.0, 5.0) == 3

    def test_equivalence_needs_equal_mass(self):
        a = FeetMeasure.build('γ', 2.0, [(0.0, 1)])
        b = FeetMeasure.build('γ', 2.0, [(0.0, 2)])
        with pytest.raises(MassMismatch):
            delta_equivalent(a, b, 0.1)

    def test_shifted_atoms(self):
        a = FeetMeasure.build('γ', 4.0, [(0.0, 1), (2.0, 1)])
        b = FeetMeasure.build('γ', 4.0, [(0.1, 1), (2.1, 1)])
        assert delta_equivalent(a, b, 0.1 + 1e-9)
        assert not delta_equivalent(a, b, 0.05)

    @given(st.lists(st.tuples(st.floats(0.0, 3.9), st.integers(1, 3)), min_size=1, max_size=5),
           st.lists(st.tuples(st.floats(0.0, 3.9), st.integers(1, 3)), min_size=1, max_size=5),
           st.floats(0.0, 2.0))
    def test_equivalence_is_symmetric(self, xs, ys, delta):
        a = FeetMeasure.build('γ', 4.0, xs)
        total = sum(m for _, m in xs)
        b = FeetMeasure.build('γ', 4.0, [(p, Fraction(total, len(ys))) for p, _ in ys])
        assert delta_equivalent(a, b, delta) == delta_equivalent(b, a, delta)

    def test_measure_is_equivalent_to_itself(self):
        a = FeetMeasure.build('γ', 4.0, [(0.3, 1), (1.7, 2), (3.2, 1)])
        assert delta_equivalent(a, a, 0.0)


class TestRandomElement:
    def test_floor_exp(self):
        assert floor_exp_2R(5) == 22026
        assert floor_exp_2R(Fraction(1, 2)) == 2

    def test_floor_exp_small_and_exact_values(self):
        assert floor_exp_2R(0) == 1
        assert floor_exp_2R(3) == 403
        assert floor_exp_2R(Fraction(5)) == floor_exp_2R(5.0) == 22026

    @given(st.floats(min_value=0.05, max_value=10.0))
    def test_floor_exp_agrees_with_float(self, R):
        x = math.exp(2.0 * R)
        assume(abs(x - round(x)) > 1e-6 * x)
        assert floor_exp_2R(R) == math.floor(x)

    def test_denominator_at_default_radius(self):
        x = random_element(['a', 'b', 'c'], 0.8, 5, seed=3)
        assert x.denom_bound == 22026
        assert x.total() == 1
        assert all((22026 * c).denominator == 1 for _, c in x.items())

    def test_empty_domain(self):
        with pytest.raises(EmptyDomain):
            random_element([], 0.1, 1.0)

    @given(st.lists(st.integers(), min_size=1, max_size=30, unique=True),
           st.integers(1, 500), st.integers(0, 2 ** 32))
    def test_contract(self, X, N, seed):
        x = random_element(X, 0.1, 1.0, seed=seed, N=N)
        assert x.total() == 1
        assert x.denom_bound == N
        assert all(k in X for k in x.support())
        values = [x[k] for k in X]
        assert max(values) - min(values) <= Fraction(1, N)

    def test_seed_determines_rounding(self):
        X = list(range(7))
        a = random_element(X, 0.1, 1.0, seed=3, N=10)
        b = random_element(X, 0.1, 1.0, seed=3, N=10)
        assert a == b

    def test_default_denominator(self):
        x = random_element(['a', 'b', 'c'], 0.1, 1.0)
        assert x.denom_bound == floor_exp_2R(1.0)
