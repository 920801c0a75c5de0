"""
替换映射

左窄弧 A 的替换 R(A) = ½([A·B̲_A] − [Ā·B̲_A])，右窄弧 B 的替换 R(B) = ½([A̲_B·B] − [A̲_B·B̄])，
其中 B̲_A、A̲_B 是长度互补的窄连接集上的有效随机元素。A 与 Ā 共享同一个随机元素，
因此 R(Ā) = −R(A) 精确成立。
"""

from fractions import Fraction
from typing import Any

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..geometry.connections import GeodesicArc
from ..geometry.fuchsian import invert_word
from ..geometry.hyperbolic_core import reverse
from ..utils.errors import EmptyF
from .context import HomologyContext, as_sum, pair_key

HALF = Fraction(1, 2)


def partner_for_left(ctx: HomologyContext, A: GeodesicArc) -> FormalSum:
    """B̲_A：F(A) = Conn_{ε²,2R−l(A)}(u, −u) 上的随机元素"""
    key = ('F_left', pair_key(A.word))
    return ctx.random(key, lambda: ctx.connections('F(A)', ctx.u, reverse(ctx.u), ctx.eps ** 2,
                                                   2.0 * ctx.R - A.length, EmptyF, ctx.config.support_cap))


def partner_for_right(ctx: HomologyContext, B: GeodesicArc) -> FormalSum:
    """A̲_B：F(B) = Conn_{ε²,2R−l(B)}(−u, u) 上的随机元素"""
    key = ('F_right', pair_key(B.word))
    return ctx.random(key, lambda: ctx.connections('F(B)', reverse(ctx.u), ctx.u, ctx.eps ** 2,
                                                   2.0 * ctx.R - B.length, EmptyF, ctx.config.support_cap))


def _replace_left_arc(ctx: HomologyContext, A: GeodesicArc) -> FormalSum:
    inv = invert_word(A.word)
    parts = [(ctx.curve(A.word, b.word, coeff=c) - ctx.curve(inv, b.word, coeff=c)).scale(HALF)
             for b, c in partner_for_left(ctx, A).items()]
    return linear_sum(parts)


def _replace_right_arc(ctx: HomologyContext, B: GeodesicArc) -> FormalSum:
    inv = invert_word(B.word)
    parts = [(ctx.curve(a.word, B.word, coeff=c) - ctx.curve(a.word, inv, coeff=c)).scale(HALF)
             for a, c in partner_for_right(ctx, B).items()]
    return linear_sum(parts)


def replace_left(ctx: HomologyContext, A: Any) -> FormalSum:
    """R(A)，对弧的形式和线性延拓"""
    return as_sum(A).apply_linear(lambda a: ctx.memo(('R_left', a.word), lambda: _replace_left_arc(ctx, a)))


def replace_right(ctx: HomologyContext, B: Any) -> FormalSum:
    """R(B)，对弧的形式和线性延拓"""
    return as_sum(B).apply_linear(lambda b: ctx.memo(('R_right', b.word), lambda: _replace_right_arc(ctx, b)))
