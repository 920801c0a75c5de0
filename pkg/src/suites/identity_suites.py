"""
边界恒等式套件

方块、二项分解、交换、四项分解、窄三角形替换、R_{G×G}、RC、φ 与 Φ 的边界恒等式，
全部在形式和层面以零容差验证。实例由上下文的种子确定性地选取。
"""

from typing import Any, List, Sequence, Tuple

import numpy as np

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..geometry.connections import GeodesicArc, Side, narrow_set
from ..geometry.fuchsian import ConjClass, closed_geodesics, concat, word_key
from ..geometry.pants import curve_sum
from ..homology.context import HomologyContext
from ..homology.dichotomy import (curve_dichotomy, curve_to_group, group_to_pants, homology_sum,
                                  pair_boundary, phi_bounded, replace_group, short_elements)
from ..homology.omega import Phi, Psi, homology_vector
from ..homology.replacement import replace_left, replace_right
from ..homology.square import exchange, item2, item4, square
from ..homology.triangles import narrow_triangle, replace_triangle
from ..utils.helpers import derive_seed
from .base_suite import IdentitySuite, SuiteRegistry


# ---------------------------------------------------------------- 实例来源


def _sorted_arcs(arcs: Sequence[GeodesicArc]) -> List[GeodesicArc]:
    return sorted(arcs, key=lambda a: (round(a.length, 9), word_key(a.word)))


def left_arcs(ctx: HomologyContext) -> List[GeodesicArc]:
    """y 处的左窄闭弧 LN_{ε,R}(u)"""
    return ctx.memo(('suite', 'LN'), lambda: _sorted_arcs(
        [n.arc for n in narrow_set(ctx.G, ctx.u, Side.LEFT, ctx.eps, ctx.R)]))


def right_arcs(ctx: HomologyContext) -> List[GeodesicArc]:
    """y 处的右窄闭弧 RN_{ε,R}(u)"""
    return ctx.memo(('suite', 'RN'), lambda: _sorted_arcs(
        [n.arc for n in narrow_set(ctx.G, ctx.u, Side.RIGHT, ctx.eps, ctx.R)]))


def good_curves(ctx: HomologyContext) -> List[ConjClass]:
    return ctx.memo(('suite', 'curves'), lambda: closed_geodesics(
        ctx.G, 2.0 * (ctx.R - ctx.eps), 2.0 * (ctx.R + ctx.eps)))


def pick(ctx: HomologyContext, name: str, pools: Sequence[Sequence[Any]], count: int,
         accept=lambda t: True) -> List[Tuple]:
    """
    从若干实例池的笛卡尔积中确定性地抽取至多 count 个互不相同的元组

    Args:
        name: 套件名称，参与种子派生
        pools: 各分量的候选
        accept: 过滤条件
    """
    if any(len(p) == 0 for p in pools):
        return []
    rng = np.random.default_rng(derive_seed(ctx.config.seed, 'suite', name))
    sizes = [len(p) for p in pools]
    total = int(np.prod(sizes, dtype=np.int64))
    chosen, seen = [], set()
    attempts = 0
    while len(chosen) < count and len(seen) < total and attempts < 50 * count:
        attempts += 1
        idx = tuple(int(rng.integers(n)) for n in sizes)
        if idx in seen:
            continue
        seen.add(idx)
        inst = tuple(p[i] for p, i in zip(pools, idx))
        if accept(inst):
            chosen.append(inst)
    return chosen


def _words(inst: Sequence[Any]) -> str:
    out = []
    for x in inst:
        out.append(list(x.word) if isinstance(x, GeodesicArc) else list(x))
    return repr(out)


# ---------------------------------------------------------------- 方块层


class SquareSuite(IdentitySuite):
    """∂Sq(A₁, A₂, B₁, B₂) = Σ(−1)^{i+j}[A_iB_j]"""

    default_count = 20

    def __init__(self):
        super().__init__("square", "方块的边界")

    def instances(self, ctx, count):
        L, R = left_arcs(ctx), right_arcs(ctx)
        return pick(ctx, self.name, (L, L, R, R), count, lambda t: t[0] != t[1] and t[2] != t[3])

    def construct(self, ctx, inst):
        return square(ctx, *inst)

    def expected(self, ctx, inst):
        A1, A2, B1, B2 = inst
        return linear_sum(ctx.curve(a.word, b.word, coeff=1 if (i + j) % 2 == 0 else -1)
                          for i, a in enumerate((A1, A2)) for j, b in enumerate((B1, B2)))

    def label(self, inst):
        return _words(inst)


class Item2Suite(IdentitySuite):
    """∂Item₂(A, B) = [AB] − R(A) − R(B)"""

    default_count = 20

    def __init__(self):
        super().__init__("item2", "二项分解的边界")

    def instances(self, ctx, count):
        return pick(ctx, self.name, (left_arcs(ctx), right_arcs(ctx)), count)

    def construct(self, ctx, inst):
        return item2(ctx, *inst)

    def expected(self, ctx, inst):
        A, B = inst
        return ctx.curve(A.word, B.word) - replace_left(ctx, A) - replace_right(ctx, B)

    def label(self, inst):
        return _words(inst)


class ExchangeSuite(IdentitySuite):
    """∂Exch(A₁, A₂, B₁, B₂) = [A₁B₁A₂B₂] − [A₁B₂A₂B₁]"""

    default_count = 10

    def __init__(self):
        super().__init__("exchange", "交换的边界")

    def instances(self, ctx, count):
        L, R = left_arcs(ctx), right_arcs(ctx)
        return pick(ctx, self.name, (L, L, R, R), count, lambda t: t[2] != t[3])

    def construct(self, ctx, inst):
        return exchange(ctx, *inst)

    def expected(self, ctx, inst):
        A1, A2, B1, B2 = inst
        return (ctx.curve(A1.word, B1.word, A2.word, B2.word)
                - ctx.curve(A1.word, B2.word, A2.word, B1.word))

    def label(self, inst):
        return _words(inst)


class Item4Suite(IdentitySuite):
    """∂Item₄(A₁, A₂, B₁, B₂) = [A₁B₁A₂B₂] − R(A₁) − R(A₂) − R(B₁) − R(B₂)"""

    default_count = 10

    def __init__(self):
        super().__init__("item4", "四项分解的边界")

    def instances(self, ctx, count):
        L, R = left_arcs(ctx), right_arcs(ctx)
        return pick(ctx, self.name, (L, L, R, R), count)

    def construct(self, ctx, inst):
        return item4(ctx, *inst)

    def expected(self, ctx, inst):
        A1, A2, B1, B2 = inst
        return (ctx.curve(A1.word, B1.word, A2.word, B2.word)
                - replace_left(ctx, A1) - replace_left(ctx, A2)
                - replace_right(ctx, B1) - replace_right(ctx, B2))

    def label(self, inst):
        return _words(inst)


# ---------------------------------------------------------------- 三角形与群层


class TriangleSuite(IdentitySuite):
    """∂RT(A₁, A₂) = R(A₁) + R(A₂) + R(A₃)"""

    default_count = 5

    def __init__(self):
        super().__init__("triangle", "窄三角形替换的边界")

    def instances(self, ctx, count):
        L = left_arcs(ctx)
        return pick(ctx, self.name, (L, L), count, lambda t: bool(concat(t[0].word, t[1].word)))

    def construct(self, ctx, inst):
        return replace_triangle(ctx, *inst)

    def expected(self, ctx, inst):
        T = narrow_triangle(ctx, *inst)
        return linear_sum(replace_left(ctx, a) for a in T.sides)

    def label(self, inst):
        return _words(inst)


class GroupPairSuite(IdentitySuite):
    """∂R_{G×G}(X, Y) = R_G(X) + R_G(Y) − R_G(XY)"""

    default_count = 5

    def __init__(self):
        super().__init__("group_pair", "有界群对的边界")

    def instances(self, ctx, count):
        S = ctx.memo(('suite', 'short', ctx.R / 2.0), lambda: short_elements(ctx.G, ctx.R / 2.0))
        return pick(ctx, self.name, (S, S), count, lambda t: bool(concat(t[0], t[1])))

    def construct(self, ctx, inst):
        return group_to_pants(ctx, *inst)

    def expected(self, ctx, inst):
        X, Y = inst
        return replace_group(ctx, X) + replace_group(ctx, Y) - replace_group(ctx, concat(X, Y))

    def label(self, inst):
        return _words(inst)


class CurveSuite(IdentitySuite):
    """∂RC(γ) = R_G(X(γ)) + R_G(Y(γ)) − γ"""

    default_count = 10

    def __init__(self):
        super().__init__("curve", "曲线替换的边界")

    def instances(self, ctx, count):
        return good_curves(ctx)[:count]

    def construct(self, ctx, gamma):
        return curve_to_group(ctx, gamma)

    def expected(self, ctx, gamma):
        D = curve_dichotomy(ctx, gamma)
        return replace_group(ctx, D.X) + replace_group(ctx, D.Y) - curve_sum(ctx.G, gamma.rep)

    def label(self, gamma):
        return repr(list(gamma.rep))


class PhiBoundedSuite(IdentitySuite):
    """∂φ(A) = A − H(A)，群链层面"""

    default_count = 50

    def __init__(self):
        super().__init__("phi", "有界元素的 φ")

    def instances(self, ctx, count):
        bound = 1.25 * ctx.R
        S = ctx.memo(('suite', 'short', bound), lambda: short_elements(ctx.G, bound))
        return [t[0] for t in pick(ctx, self.name, (S,), count)]

    def construct(self, ctx, word):
        return phi_bounded(ctx, word)

    def boundary_of(self, ctx, chain):
        return pair_boundary(chain)

    def expected(self, ctx, word):
        return FormalSum.single(tuple(word)) - homology_sum(ctx.G, word)

    def label(self, word):
        return repr(list(word))


class PhiSuite(IdentitySuite):
    """∂Φ(γ) = γ − Ψ(H(γ))"""

    default_count = 5

    def __init__(self):
        super().__init__("Phi", "Φ 的同调条件")

    def instances(self, ctx, count):
        return good_curves(ctx)[:count]

    def construct(self, ctx, gamma):
        return Phi(ctx, gamma)

    def expected(self, ctx, gamma):
        return curve_sum(ctx.G, gamma.rep) - Psi(ctx, homology_vector(ctx.G, gamma))

    def label(self, gamma):
        return repr(list(gamma.rep))


SUITES = (SquareSuite, Item2Suite, ExchangeSuite, Item4Suite, TriangleSuite, GroupPairSuite,
          CurveSuite, PhiBoundedSuite, PhiSuite)


def default_registry() -> SuiteRegistry:
    """按依赖顺序注册全部套件"""
    registry = SuiteRegistry()
    for cls in SUITES:
        registry.register(cls())
    return registry
