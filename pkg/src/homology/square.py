"""
方块、二项分解、交换与四项分解

P*(A, B) 是由三条裤子组成的多裤子，∂P* = [AB] − S_a(A) − S_b(B)，其中 S_a 只依赖 A、
S_b 只依赖 B；方块 Sq = Σ(−1)^{i+j}P*(A_i, B_j) 因此满足 ∂Sq = Σ(−1)^{i+j}[A_iB_j]。
其余构造都是方块的有理组合。
"""

import math
from fractions import Fraction
from itertools import product
from typing import Any, List

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..geometry.connections import GeodesicArc, split_midpoint
from ..geometry.fuchsian import Word, concat, invert_word
from ..geometry.hyperbolic_core import reverse, rotate
from ..geometry.pants import Pants, pants_from_words
from ..utils.errors import EmptyAuxiliary, EmptyInterpolant
from ..utils.logger import get_logger
from .context import HomologyContext, as_sum, bar
from .replacement import partner_for_left, partner_for_right

logger = get_logger(__name__)

HALF = Fraction(1, 2)
LOG2 = math.log(2.0)


def theta_words(ctx: HomologyContext, x1: Word, x2: Word, x3: Word) -> Pants:
    """三条同端点路径（以字给出）的 θ 图裤子：袖口 [x₁x̄₂]、[x₂x̄₃]、[x₃x̄₁]"""
    return pants_from_words(ctx.G, concat(x1, invert_word(x2)), concat(x2, invert_word(x3)),
                            concat(x3, invert_word(x1)))


# ---------------------------------------------------------------- 辅助随机元素


def _z_left(ctx: HomologyContext, A: GeodesicArc, A_minus: GeodesicArc) -> FormalSum:
    """Z̲_a ∈ C(A) = Conn_{ε²,(2R−l(A))/2+log 2}(√−1·t(A⁻), v₀)"""
    target = (2.0 * ctx.R - A.length) / 2.0 + LOG2
    return ctx.random(('Z_a', A.word), lambda: ctx.connections(
        'C(A)', rotate(A_minus.term_dir, math.pi / 2.0), ctx.v0, ctx.eps ** 2, target,
        EmptyAuxiliary, ctx.config.aux_cap))


def _z_right(ctx: HomologyContext, B: GeodesicArc, B_minus: GeodesicArc) -> FormalSum:
    """Z̲_b ∈ C(B) = Conn_{ε²,(2R−l(B))/2+log 2}(√−1·t(B⁻), −v₀)"""
    target = (2.0 * ctx.R - B.length) / 2.0 + LOG2
    return ctx.random(('Z_b', B.word), lambda: ctx.connections(
        'C(B)', rotate(B_minus.term_dir, math.pi / 2.0), reverse(ctx.v0), ctx.eps ** 2, target,
        EmptyAuxiliary, ctx.config.aux_cap))


def _w(ctx: HomologyContext, which: int) -> FormalSum:
    """W̲₁ ∈ Conn(−√−1·u, √−1·v₀)，W̲₂ ∈ Conn(√−1·u, −√−1·v₀)，长度 R + 2·log 2"""
    sign = -1.0 if which == 1 else 1.0
    src = rotate(ctx.u, sign * math.pi / 2.0)
    dst = rotate(ctx.v0, -sign * math.pi / 2.0)
    return ctx.random((f'W{which}',), lambda: ctx.connections(
        f'W{which}', src, dst, ctx.eps ** 2, ctx.R + 2.0 * LOG2, EmptyAuxiliary, ctx.config.aux_cap))


# ---------------------------------------------------------------- P* 与方块


def _pstar(ctx: HomologyContext, A: GeodesicArc, B: GeodesicArc) -> FormalSum:
    G = ctx.G
    A_minus, A_plus = ctx.memo(('split', A.word), lambda: split_midpoint(G, A))
    B_minus, B_plus = ctx.memo(('split', B.word), lambda: split_midpoint(G, B))
    kA, kB = A_minus.word, B_minus.word
    a_plus, b_plus = A_plus.word, B_plus.word
    Za, Zb = _z_left(ctx, A, A_minus), _z_right(ctx, B, B_minus)
    W1, W2 = _w(ctx, 1), _w(ctx, 2)

    terms = {}
    for (za, ca), (zb, cb), (w1, c1), (w2, c2) in product(Za.items(), Zb.items(), W1.items(), W2.items()):
        c = ca * cb * c1 * c2
        z_a, z_b = za.word, zb.word
        # [AB] 与 η₁ = [B⁺A⁻Z_aZ̄_b]、η₂ = [Z_bZ̄_aA⁺B⁻]
        p1 = theta_words(ctx, concat(a_plus, kB), concat(invert_word(kA), invert_word(b_plus)),
                         concat(z_a, invert_word(z_b)))
        # η₁ 与 η₃ = [A⁻Z_aW̄₁]、η₄ = [W₁Z̄_bB⁺]
        p2 = theta_words(ctx, concat(kA, z_a), concat(invert_word(b_plus), z_b), w1.word)
        # η₂ 与 η₅ = [Z̄_aA⁺W₂]、η₆ = [W̄₂B⁻Z_b]
        p3 = theta_words(ctx, concat(invert_word(z_a), a_plus), concat(invert_word(z_b), invert_word(kB)),
                         invert_word(w2.word))
        for p in (p1, p2, p3):
            terms[p] = terms.get(p, Fraction(0)) + c
    return FormalSum(terms, ctx.N ** 4)


def pstar(ctx: HomologyContext, A: GeodesicArc, B: GeodesicArc) -> FormalSum:
    """
    P*(A, B)，满足 ∂P* = [AB] − S_a(A) − S_b(B)

    Raises:
        EmptyAuxiliary: C(A)、C(B)、W₁ 或 W₂ 为空
    """
    return ctx.memo(('P*', A.word, B.word), lambda: _pstar(ctx, A, B))


def square(ctx: HomologyContext, X1: Any, X2: Any, Y1: Any, Y2: Any) -> FormalSum:
    """
    Sq(X₁, X₂, Y₁, Y₂) = Σ(−1)^{i+j}P*(X_i, Y_j)，对每个参数线性

    参数可以是 y 处的闭弧或闭弧的形式和。
    """
    parts: List[FormalSum] = []
    for i, X in enumerate((X1, X2)):
        for j, Y in enumerate((Y1, Y2)):
            sign = 1 if (i + j) % 2 == 0 else -1
            for x, cx in as_sum(X).items():
                for y, cy in as_sum(Y).items():
                    parts.append(pstar(ctx, x, y).scale(sign * cx * cy))
    return linear_sum(parts)


# ---------------------------------------------------------------- 二项分解


def item2(ctx: HomologyContext, A: GeodesicArc, B: GeodesicArc) -> FormalSum:
    """
    Item₂(A, B) = ½Sq(A, Ā, B, B̲_A) + ½Sq(Ā, A̲_B, B, B̄)

    满足 ∂Item₂ = [AB] − R(A) − R(B)。
    """
    first = square(ctx, A, bar(A), B, partner_for_left(ctx, A))
    second = square(ctx, bar(A), partner_for_right(ctx, B), B, bar(B))
    return (first + second).scale(HALF)


# ---------------------------------------------------------------- 交换


def _interpolant(ctx: HomologyContext, L: float) -> GeodesicArc:
    arcs = ctx.memo(('interp', round(L, 9)), lambda: ctx.connections(
        'interp', ctx.u, reverse(ctx.u), ctx.eps ** 2, L, EmptyInterpolant, 1))
    return arcs[0]


def exchange_piece(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc, C1: GeodesicArc,
                   C2: GeodesicArc, D1: GeodesicArc, D2: GeodesicArc) -> FormalSum:
    """
    P = Sq(A₁C₁A₂, A₂C₁A₁, D₁, D₂) + Sq(A₂D₂A₁, A₁D₂A₂, C₁, C₂)

    满足 ∂P = {C₁, D₁} − {C₂, D₂}，其中 {C, D} = [A₁CA₂D] − [A₁DA₂C]。
    """
    first = square(ctx, ctx.loop(A1.word, C1.word, A2.word), ctx.loop(A2.word, C1.word, A1.word), D1, D2)
    second = square(ctx, ctx.loop(A2.word, D2.word, A1.word), ctx.loop(A1.word, D2.word, A2.word), C1, C2)
    return first + second


def exchange(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc, B1: GeodesicArc,
             B2: GeodesicArc) -> FormalSum:
    """
    Exch(A₁, A₂, B₁, B₂)，满足 ∂Exch = [A₁B₁A₂B₂] − [A₁B₂A₂B₁]

    (C₀, D₀) = (B₁, B₂) 经 n 步长度插值走到 (C_n, D_n) = (B₂, B₁)；B₁ = B₂ 时为 0。

    Raises:
        EmptyInterpolant: 某个中间长度的右窄连接集为空
    """
    n = ctx.config.n_desk
    if B1 == B2:
        return FormalSum()
    L1, L2 = B1.length, B2.length
    delta = (L2 - L1) / n
    C = [B1] + [_interpolant(ctx, L1 + k * delta) for k in range(1, n)] + [B2]
    D = [B2] + [_interpolant(ctx, L2 - k * delta) for k in range(1, n)] + [B1]
    pieces = [exchange_piece(ctx, A1, A2, C[k], C[k + 1], D[k], D[k + 1]) for k in range(n)]
    return linear_sum(pieces).scale(HALF)


# ---------------------------------------------------------------- 四项分解


def item4(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc, B1: GeodesicArc,
          B2: GeodesicArc) -> FormalSum:
    """
    Item₄(A₁, A₂, B₁, B₂)，满足 ∂Item₄ = [A₁B₁A₂B₂] − R(A₁) − R(A₂) − R(B₁) − R(B₂)

    2·Item₄ = Sq(A₁, Ā₁, B₁A₂B₂, B̲_{A₁}) + Sq(A₂B₂Ā₁, A̲_{B₁}, B₁, B̄₁)
            + Sq(A₂, Ā₂, B₂Ā₁B̄₁, B̲_{A₂}) + Sq(Ā₁B̄₁Ā₂, A̲_{B₂}, B₂, B̄₂) + Exch
    """
    a1, a2, b1, b2 = A1.word, A2.word, B1.word, B2.word
    a1_inv, b1_inv = invert_word(a1), invert_word(b1)
    parts = [
        square(ctx, A1, bar(A1), ctx.loop(b1, a2, b2), partner_for_left(ctx, A1)),
        square(ctx, ctx.loop(a2, b2, a1_inv), partner_for_right(ctx, B1), B1, bar(B1)),
        square(ctx, A2, bar(A2), ctx.loop(b2, a1_inv, b1_inv), partner_for_left(ctx, A2)),
        square(ctx, ctx.loop(a1_inv, b1_inv, invert_word(a2)), partner_for_right(ctx, B2), B2, bar(B2)),
        exchange(ctx, A1, A2, B1, B2),
    ]
    return linear_sum(parts).scale(HALF)
