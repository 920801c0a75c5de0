"""
拉伸、有界群同调与二分

群元素以自由约化字表示；Str(A) 是 y 处的闭弧 [ē·A·e]。
R_G = R∘Str、R_{G×G} = RT∘Str 满足 ∂R_{G×G}(X, Y) = R_G(X) + R_G(Y) − R_G(XY)。
曲线的二分把 γ 写成 [X(γ)·Y(γ)]，群元素的二分把 A 写成 X(A)·Y(A)，
φ 把 A 化为生成元之和：∂φ(A) = A − H(A)。
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..config.settings import HomologyConfig
from ..geometry.chain_calculus import chain_from_turns, inefficiency
from ..geometry.connections import GeodesicArc, make_arc, signed_turn
from ..geometry.fuchsian import (ConjClass, ElementTable, SurfaceGroup, Word, abelianize,
                                 concat, cyclic_key, element_table, free_reduce, invert_word)
from ..geometry.hyperbolic_core import (Geodesic, UnitTangent, axis, dist, reverse, rotate,
                                        tangent_towards, trace_length)
from ..utils.errors import (CrossCheckFailed, EmptyConnection, EmptyF, EmptyMidArc, IdentityElement,
                            NotBoundedTriangle, NotSaturated, TooLong)
from ..utils.logger import get_logger, log_performance
from .context import HomologyContext, bar
from .replacement import replace_left
from .square import item2, theta_words
from .triangles import replace_triangle

logger = get_logger(__name__)

LOG2 = math.log(2.0)
SATURATION_LENGTH = 18.0
SATURATION_TOL = 1e-6

Pair = Tuple[Word, Word]
IDENTITY: Word = ()


# ---------------------------------------------------------------- 拉伸


def stretch(ctx: HomologyContext, word: Sequence[int]) -> GeodesicArc:
    """
    Str(A) = [ē·A·e]，字为 k⁻¹·A·k（k 是 e 的字）

    Raises:
        IdentityElement: A 为单位元
    """
    w = free_reduce(word)
    if not w:
        raise IdentityElement("单位元没有拉伸")
    k = ctx.e.word
    return ctx.loop(invert_word(k), w, k)


def _ineff_at(A: GeodesicArc, v: UnitTangent, l: float) -> float:
    path = chain_from_turns((l, A.length, l), (signed_turn(v, A.init_dir), signed_turn(A.term_dir, reverse(v))))
    return inefficiency(path)


def ineff_v(G: SurfaceGroup, word: Sequence[int], v: UnitTangent,
            l_sat: float = SATURATION_LENGTH) -> float:
    """
    I_v(A)：路径 e^{−lv}⁻¹·A·e^{−lv} 的低效度在 l → ∞ 时的极限

    取 l = l_sat 与 l_sat + 1 两处的值，二者之差必须小于 1e−6。

    Raises:
        IdentityElement: A 为单位元
        NotSaturated: 尚未饱和
    """
    w = free_reduce(word)
    if not w:
        raise IdentityElement("单位元没有 I_v")
    o = G.basepoint
    A = make_arc(G, w, o, o)
    first, second = _ineff_at(A, v, l_sat), _ineff_at(A, v, l_sat + 1.0)
    if abs(second - first) >= SATURATION_TOL:
        raise NotSaturated(f"I_v 在 l = {l_sat} 处未饱和（变化 {abs(second - first):.3g}）", word=w)
    return second


def short_elements(G: SurfaceGroup, max_disp: float) -> List[Word]:
    """位移不超过 max_disp 的非单位元素"""
    return [w for w in element_table(G, max_disp).words if w]


@log_performance
def choose_v(G: SurfaceGroup, config: Optional[HomologyConfig] = None) -> UnitTangent:
    """
    在 v_directions 个等分方向中选取使 max I_v 最小的 v，元素取位移 ≤ K 者

    Returns:
        基点处的单位切向量
    """
    config = config or HomologyConfig()
    words = short_elements(G, config.K)
    o = G.basepoint
    best: Optional[Tuple[float, float]] = None
    for j in range(config.v_directions):
        theta = 2.0 * math.pi * j / config.v_directions
        v = UnitTangent(o, theta)
        worst = max((ineff_v(G, w, v) for w in words), default=0.0)
        if best is None or worst < best[0] - 1e-12:
            best = (worst, theta)
    logger.info(f"选定 v 方向 {best[1]:.4f}：{len(words)} 个短元素上 max I_v = {best[0]:.4f}")
    return UnitTangent(o, best[1])


@log_performance
def short_element_table(G: SurfaceGroup, K: float) -> Tuple[ElementTable, int]:
    """
    φ₂ 使用的有限短元素表 G(N)：位移 ≤ 3K 的元素，N 为其中的最大字长

    Raises:
        CapExceeded: 3K 超过枚举上限
    """
    table = element_table(G, 3.0 * K)
    N = max((len(w) for w in table.words), default=0)
    logger.info(f"短元素表: {len(table)} 个元素，N = {N}")
    return table, N


# ---------------------------------------------------------------- 群链


def group_boundary(X: Sequence[int], Y: Sequence[int]) -> FormalSum:
    """∂(X, Y) = X + Y − XY"""
    x, y = free_reduce(X), free_reduce(Y)
    return FormalSum.single(x) + FormalSum.single(y) - FormalSum.single(concat(x, y))


def pair_boundary(pairs: FormalSum) -> FormalSum:
    """群对形式和的边界"""
    return pairs.apply_linear(lambda p: group_boundary(*p))


def homology_sum(G: SurfaceGroup, word: Sequence[int]) -> FormalSum:
    """H(A)：生成元的带符号计数，作为生成元的形式和"""
    return FormalSum({(i + 1,): h for i, h in enumerate(abelianize(word, G.rank)) if h})


def _is_bounded(ctx: HomologyContext, w: Word) -> bool:
    o = ctx.G.basepoint
    return dist(o, ctx.G.evaluate(w).apply_point(o)) <= 1.5 * ctx.R + 1e-9


def replace_group(ctx: HomologyContext, X: Sequence[int]) -> FormalSum:
    """
    R_G(X) = R(Str X)

    Raises:
        IdentityElement: X 为单位元
    """
    return replace_left(ctx, stretch(ctx, X))


def group_to_pants(ctx: HomologyContext, X: Sequence[int], Y: Sequence[int]) -> FormalSum:
    """
    R_{G×G}(X, Y) = RT(Str X, Str Y)，满足 ∂R_{G×G}(X, Y) = R_G(X) + R_G(Y) − R_G(XY)

    Raises:
        IdentityElement: X、Y 或 XY 为单位元
        NotBoundedTriangle: 某个元素的位移超过 1.5R（严格模式）
    """
    x, y = free_reduce(X), free_reduce(Y)
    xy = concat(x, y)
    if not (x and y and xy):
        raise IdentityElement("有界三角形的三个元素都不能是单位元", pair=(x, y))
    for w in (x, y, xy):
        ctx.check(_is_bounded(ctx, w), NotBoundedTriangle, "元素位移超过 1.5R", word=w)
    return replace_triangle(ctx, stretch(ctx, x), stretch(ctx, y))


def replace_group_sum(ctx: HomologyContext, elements: FormalSum) -> FormalSum:
    """R_G 对群元素形式和的线性延拓；单位元映为 0"""
    return linear_sum(replace_group(ctx, w).scale(c) for w, c in elements.items() if w)


def pairs_to_pants(ctx: HomologyContext, pairs: FormalSum) -> FormalSum:
    """
    R_{G×G} 对群对形式和的线性延拓

    含单位元的退化对（X、Y 或 XY 为单位元）映为 0；此时 R_G(∂(X, Y)) = 0 同样成立。
    """
    parts = []
    for (x, y), c in pairs.items():
        if x and y and concat(x, y):
            parts.append(group_to_pants(ctx, x, y).scale(c))
    return linear_sum(parts)


# ---------------------------------------------------------------- 曲线的二分


@dataclass(frozen=True)
class CurveDichotomy:
    """
    γ 的二分：轴上对径点 a、b，连接 S_a、S_b，以及 X(γ)、Y(γ)

    a = k_a·a_red，b = k_b·b_red；γ_ab 的字为 k_a⁻¹k_b，γ_ba 的字为 k_b⁻¹·g·k_a。
    """
    gamma: ConjClass
    g: Word
    ka: Word
    kb: Word
    S_a: GeodesicArc
    S_b: GeodesicArc
    X: Word
    Y: Word

    def telescopes(self) -> bool:
        """[X·Y] 与 γ 在自由群中共轭"""
        return cyclic_key(concat(self.X, self.Y)) == cyclic_key(self.g)

    def to_dict(self) -> Dict[str, Any]:
        return {'gamma': list(self.g), 'S_a': list(self.S_a.word), 'S_b': list(self.S_b.word),
                'X': list(self.X), 'Y': list(self.Y)}


def _curve_dichotomy(ctx: HomologyContext, gamma: ConjClass) -> CurveDichotomy:
    G = ctx.G
    g = gamma.rep
    m = G.evaluate(g)
    geo = axis(m)
    ell = trace_length(m.trace)
    t0 = geo.param(G.basepoint)
    target = ctx.R / 2.0 - ell / 4.0 + ctx.L3 + LOG2
    ends = []
    for tag, t in (('S_a', t0), ('S_b', t0 + ell / 2.0)):
        k_word, k, p_red = G.reduce_point(geo.point(t))
        normal = k.inverse().act_on_tangent(rotate(geo.tangent(t), math.pi / 2.0))
        S = ctx.connections(tag, ctx.v, normal, ctx.eps ** 3, target, EmptyConnection, 1)[0]
        ends.append((k_word, S))
    (ka, S_a), (kb, S_b) = ends
    sa, sb = S_a.word, S_b.word
    X = concat(sa, invert_word(ka), kb, invert_word(sb))
    Y = concat(sb, invert_word(kb), g, ka, invert_word(sa))
    D = CurveDichotomy(gamma, g, ka, kb, S_a, S_b, X, Y)
    ctx.check(D.telescopes(), CrossCheckFailed, "[X·Y] 与 γ 不共轭", word=g)
    return D


def curve_dichotomy(ctx: HomologyContext, gamma: ConjClass) -> CurveDichotomy:
    """
    曲线 γ 的二分

    S_a ∈ Conn_{ε³, R/2 − l(γ)/4 + L(ε³) + log 2}(v, √−1·γ′(a))，S_b 同理；
    X = S_a·γ_ab·S̄_b，Y = S_b·γ_ba·S̄_a。

    Raises:
        EmptyConnection: S_a 或 S_b 的连接集为空
    """
    return ctx.memo(('curve_D', gamma.key), lambda: _curve_dichotomy(ctx, gamma))


def _curve_to_group(ctx: HomologyContext, gamma: ConjClass) -> FormalSum:
    D = curve_dichotomy(ctx, gamma)
    str_x, str_y = stretch(ctx, D.X), stretch(ctx, D.Y)
    k = ctx.e.word
    k_inv = invert_word(k)
    target = ctx.R - 2.0 * ctx.L3 - 2.0 * ctx.e.length
    u = ctx.u
    F = ctx.random(('F_curve', gamma.key), lambda: ctx.connections(
        'F(γ)', u, reverse(u), ctx.eps ** 2, target, EmptyF, ctx.config.support_cap))
    sa, sb = D.S_a.word, D.S_b.word
    alpha1 = concat(invert_word(D.ka), D.kb)
    alpha3 = concat(invert_word(D.ka), invert_word(D.g), D.kb)
    parts = []
    for B, c in F.items():
        # θ 图 γ_ab、S̄_a·e·B̄·ē·S_b、γ̄_ba：∂P = [Str(X)·B] + [Str(Y)·B̄] − γ
        alpha2 = concat(invert_word(sa), k, invert_word(B.word), k_inv, sb)
        parts.append(FormalSum({theta_words(ctx, alpha1, alpha2, alpha3): c}))
        parts.append(item2(ctx, str_x, B).scale(-c))
        parts.append(item2(ctx, str_y, bar(B)).scale(-c))
    return linear_sum(parts)


def curve_to_group(ctx: HomologyContext, gamma: ConjClass) -> FormalSum:
    """
    RC(γ)，满足 ∂RC(γ) = R_G(X(γ)) + R_G(Y(γ)) − γ

    Raises:
        EmptyConnection: 二分的连接集为空
        EmptyF: Conn_{ε², R − 2L(ε³) − 2l(e)}(u, −u) 为空
        IdentityElement: X(γ) 或 Y(γ) 为单位元
    """
    return ctx.memo(('RC', gamma.key), lambda: _curve_to_group(ctx, gamma))


# ---------------------------------------------------------------- 群元素的二分与 φ


@dataclass(frozen=True)
class GroupDichotomy:
    """A = X·Y，X = [A|₀^{l/2}·L̄_A]，Y = [L_A·A|_{l/2}^{l}]"""
    A: Word
    length: float
    L_A: GeodesicArc
    X: Word
    Y: Word

    def to_dict(self) -> Dict[str, Any]:
        return {'A': list(self.A), 'length': self.length, 'L_A': list(self.L_A.word),
                'X': list(self.X), 'Y': list(self.Y)}


def _group_dichotomy(ctx: HomologyContext, w: Word) -> GroupDichotomy:
    G = ctx.G
    o = G.basepoint
    end = G.evaluate(w).apply_point(o)
    length = dist(o, end)
    geo = Geodesic.through(tangent_towards(o, end))
    t_mid = geo.param(o) + length / 2.0
    km_word, km, _ = G.reduce_point(geo.point(t_mid))
    normal = km.inverse().act_on_tangent(rotate(geo.tangent(t_mid), math.pi / 2.0))
    L_A = ctx.connections('L_A', ctx.v, normal, 1.0, ctx.config.K, EmptyMidArc, 1)[0]
    ell = L_A.word
    X = concat(km_word, invert_word(ell))
    Y = concat(ell, invert_word(km_word), w)
    return GroupDichotomy(w, length, L_A, X, Y)


def group_dichotomy(ctx: HomologyContext, word: Sequence[int]) -> GroupDichotomy:
    """
    群元素 A 的二分，X(A)·Y(A) = A 在自由群中精确成立

    L_A ∈ Conn_{1,K}(v, √−1·A′(l/2)) 从基点连到 A 的中点。

    Raises:
        IdentityElement: A 为单位元
        EmptyMidArc: L_A 的连接集为空
    """
    w = free_reduce(word)
    if not w:
        raise IdentityElement("单位元没有二分")
    return ctx.memo(('group_D', w), lambda: _group_dichotomy(ctx, w))


def depth(length: float) -> int:
    """m(A) = ⌊log₂ l(A)⌋ − 1，不小于 0"""
    if length < 2.0:
        return 0
    return max(0, int(math.floor(math.log2(length))) - 1)


def phi1(ctx: HomologyContext, word: Sequence[int], m: int) -> Tuple[FormalSum, FormalSum]:
    """
    φ₁(A) = −Σ_{i<m}(X, Y)Dⁱ(A)

    Returns:
        (群对形式和, D^m(A))，∂φ₁(A) = A − D^m(A)
    """
    current = FormalSum.single(free_reduce(word))
    pairs: List[FormalSum] = []
    for _ in range(m):
        nxt: List[FormalSum] = []
        for x, c in current.items():
            if not x:
                nxt.append(FormalSum.single(x, c))
                continue
            D = group_dichotomy(ctx, x)
            pairs.append(FormalSum.single((D.X, D.Y), -c))
            nxt.append(FormalSum({D.X: c}) + FormalSum({D.Y: c}))
        current = linear_sum(nxt)
    return linear_sum(pairs), current


def phi2(word: Sequence[int]) -> FormalSum:
    """
    φ₂(a₁⋯a_s) = −Σ_{i<s}(a_i, a_{i+1}⋯a_s) + Σ_{a_i = h⁻¹}[(h, h⁻¹) + (1, 1)]，φ₂(1) = (1, 1)

    满足 ∂φ₂(B) = B − H(B)。
    """
    w = free_reduce(word)
    if not w:
        return FormalSum.single((IDENTITY, IDENTITY))
    terms: Dict[Pair, Fraction] = {}

    def add(p: Pair, c: int) -> None:
        terms[p] = terms.get(p, Fraction(0)) + c

    for i in range(len(w) - 1):
        add(((w[i],), w[i + 1:]), -1)
    for x in w:
        if x < 0:
            add(((-x,), (x,)), 1)
            add((IDENTITY, IDENTITY), 1)
    return FormalSum(terms)


def phi_bounded(ctx: HomologyContext, word: Sequence[int]) -> FormalSum:
    """
    φ(A) = φ₁(A) + φ₂(D^m(A))，满足 ∂φ(A) = A − H(A)

    Raises:
        TooLong: l(A) > 1.25R（严格模式）
        EmptyMidArc: 某个中点连接集为空
    """
    w = free_reduce(word)
    o = ctx.G.basepoint
    length = dist(o, ctx.G.evaluate(w).apply_point(o)) if w else 0.0
    ctx.check(length <= 1.25 * ctx.R + 1e-9, TooLong, f"l(A) = {length:.3f} 超过 1.25R", word=w)
    m = depth(length)
    first, leaves = phi1(ctx, w, m)
    bound = 3.0 * ctx.config.K
    for x in leaves:
        if x:
            lx = dist(o, ctx.G.evaluate(x).apply_point(o))
            if lx > bound:
                ctx.note('deep_element', word=list(x), length=lx, bound=bound)
    second = leaves.apply_linear(phi2)
    return first + second
