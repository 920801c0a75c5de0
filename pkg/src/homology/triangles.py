"""
窄三角形、T 图、旋转与窄三角形替换

窄三角形 (A₁, A₂) 由两条 y 处的左窄闭弧给出，第三边 A₃ = [Ā₂Ā₁]。
三边在上半平面中的提升围成三角形，顶点 a₁ = y、a₂ = g₃·y、a₃ = g₃g₁·y；
a₃ 到边 [a₁a₂] 的垂足 p 给出 T 图 P₁、P₂、P₃（从 p 出发分别到 a₁、a₂、a₃）。
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any, Dict, Tuple

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..geometry.connections import GeodesicArc, make_arc, reverse_arc
from ..geometry.fuchsian import Word, concat, invert_word
from ..geometry.hyperbolic_core import (Geodesic, PointH, reverse, rotate,
                                        tangent_towards)
from ..geometry.pants import cyclic_order
from ..utils.errors import EmptyConnection, EmptyF, NotNarrow, OrientationClash
from ..utils.logger import get_logger
from .context import HomologyContext, bar
from .square import item4, theta_words

logger = get_logger(__name__)

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class TGraph:
    """
    窄三角形的 T 图

    Attributes:
        foot: 垂足的曲面代表
        foot_word: 垂足提升 = foot_word·foot
        P1, P2, P3: 从 foot 到 y 的三条弧
    """
    foot: PointH
    foot_word: Word
    P1: GeodesicArc
    P2: GeodesicArc
    P3: GeodesicArc

    @property
    def words(self) -> Tuple[Word, Word, Word]:
        return (self.P1.word, self.P2.word, self.P3.word)


@dataclass(frozen=True)
class NarrowTriangle:
    A1: GeodesicArc
    A2: GeodesicArc
    A3: GeodesicArc
    defect: float
    orientation: int
    graph: TGraph

    @property
    def sides(self) -> Tuple[GeodesicArc, GeodesicArc, GeodesicArc]:
        return (self.A1, self.A2, self.A3)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'words': [list(a.word) for a in self.sides],
            'lengths': [a.length for a in self.sides],
            'defect': self.defect,
            'orientation': self.orientation,
            'foot_word': list(self.graph.foot_word),
        }


def triangle_defect(l1: float, l2: float, l3: float) -> float:
    """Δ = max{l₁ + l₂ − l₃, l₁ + l₃ − l₂, l₂ + l₃ − l₁}"""
    return max(l1 + l2 - l3, l1 + l3 - l2, l2 + l3 - l1)


def t_graph(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc, A3: GeodesicArc) -> TGraph:
    """
    T 图：[P̄₂P₃] = A₁、[P̄₃P₁] = A₂、[P̄₁P₂] = A₃ 在字层面成立

    Raises:
        NotNarrow: 垂足不在边 [a₁a₂] 内（严格模式）
    """
    G, y = ctx.G, ctx.y
    w1, w3 = A1.word, A3.word
    a1 = y
    a2 = G.evaluate(w3).apply_point(y)
    a3 = G.evaluate(concat(w3, w1)).apply_point(y)
    geo = Geodesic.through(tangent_towards(a1, a2))
    t, t1, t2 = geo.param(a3), geo.param(a1), geo.param(a2)
    ctx.check(min(t1, t2) < t < max(t1, t2), NotNarrow, "垂足不在三角形的边上",
              words=(A1.word, A2.word))
    k_word, k, x_red = G.reduce_point(geo.point(t))
    x = PointH.from_complex(x_red)
    k_inv = invert_word(k_word)
    P1, P2, P3 = (make_arc(G, concat(k_inv, w), x, y) for w in ((), w3, concat(w3, w1)))
    return TGraph(x, k_word, P1, P2, P3)


def orientation(graph: TGraph) -> int:
    """(i(P₁), i(P₂), i(P₃)) 逆时针为 +1"""
    return cyclic_order(graph.P1.init_dir.dir, graph.P2.init_dir.dir, graph.P3.init_dir.dir)


def _narrow_triangle(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc) -> NarrowTriangle:
    A3 = reverse_arc(ctx.loop(A1.word, A2.word))
    defect = triangle_defect(A1.length, A2.length, A3.length)
    ctx.check(defect <= 1.5 * ctx.R, NotNarrow, f"Δ = {defect:.3f} 超过 1.5R",
              words=(A1.word, A2.word))
    lo, hi = ctx.L2, 2.0 * ctx.R - ctx.L2
    ctx.check(lo <= A3.length <= hi, NotNarrow, f"第三边长度 {A3.length:.3f} 不在窄带 [{lo:.3f}, {hi:.3f}] 内",
              words=(A1.word, A2.word))
    graph = t_graph(ctx, A1, A2, A3)
    return NarrowTriangle(A1, A2, A3, defect, orientation(graph), graph)


def narrow_triangle(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc) -> NarrowTriangle:
    """
    由两条左窄闭弧构造窄三角形

    Raises:
        NotNarrow: Δ > 1.5R 或 A₃ 不在窄带内（严格模式）
        Degenerate: A₁A₂ 平凡
    """
    return ctx.memo(('triangle', A1.word, A2.word), lambda: _narrow_triangle(ctx, A1, A2))


def mirror(ctx: HomologyContext, T: NarrowTriangle) -> NarrowTriangle:
    """(Ā₂, Ā₁)，定向与 T 相反"""
    return narrow_triangle(ctx, bar(T.A2), bar(T.A1))


def _small_narrow_triangle(ctx: HomologyContext) -> NarrowTriangle:
    e3, L = ctx.eps ** 3, ctx.L3
    v0, u = ctx.v0, ctx.u
    sources = {'P1': rotate(v0, math.pi / 2.0), 'P2': rotate(v0, -math.pi / 2.0), 'P3': v0}
    p = {tag: ctx.connections(tag, src, u, e3, L, EmptyConnection, 1)[0].word for tag, src in sources.items()}
    A1 = ctx.loop(invert_word(p['P2']), p['P3'])
    A2 = ctx.loop(invert_word(p['P3']), p['P1'])
    T = narrow_triangle(ctx, A1, A2)
    bound = ctx.config.C_small * L
    ctx.check(max(a.length for a in T.sides) <= bound, NotNarrow,
              f"小三角形的边超过 C·L(ε³) = {bound:.3f}", lengths=[a.length for a in T.sides])
    logger.debug(f"小窄三角形: 边长 {[round(a.length, 4) for a in T.sides]}，定向 {T.orientation}")
    return T


def small_narrow_triangle(ctx: HomologyContext) -> NarrowTriangle:
    """
    小窄三角形 T⁰：P₁ ∈ Conn(√−1·v₀, u)、P₂ ∈ Conn(−√−1·v₀, u)、P₃ ∈ Conn(v₀, u)，
    长度 L(ε³)，A₁⁰ = [P̄₂P₃]、A₂⁰ = [P̄₃P₁]

    Raises:
        EmptyConnection: 某个 P 连接集为空
    """
    return ctx.memo(('T0',), lambda: _small_narrow_triangle(ctx))


def rotation_lengths(T: NarrowTriangle, Tp: NarrowTriangle, R: float) -> Tuple[float, float, float]:
    """由 r₁ + r₂ = 2R − l(A₃) − l(A₃′) 等三式解出 (r₁, r₂, r₃)"""
    s12 = 2.0 * R - T.A3.length - Tp.A3.length
    s23 = 2.0 * R - T.A1.length - Tp.A1.length
    s13 = 2.0 * R - T.A2.length - Tp.A2.length
    s = (s12 + s23 + s13) / 2.0
    return s - s23, s - s13, s - s12


def _rotation(ctx: HomologyContext, T: NarrowTriangle, Tp: NarrowTriangle) -> FormalSum:
    ctx.check(T.orientation != Tp.orientation, OrientationClash, "两个窄三角形定向相同",
              orientation=T.orientation)
    ctx.check(T.defect + Tp.defect <= 1.6 * ctx.R, NotNarrow,
              f"Δ + Δ′ = {T.defect + Tp.defect:.3f} 超过 1.6R")
    u = ctx.u
    F = []
    for i, r in enumerate(rotation_lengths(T, Tp, ctx.R), start=1):
        F.append(ctx.random(('F_rot', i, round(r, 9)), lambda i=i, r=r: ctx.connections(
            f'F{i}', u, reverse(u), ctx.eps ** 2, r, EmptyF, ctx.config.aux_cap)))
    pi, pi_p = T.graph.words, Tp.graph.words
    A1, A2, A3 = T.sides
    A1p, A2p, A3p = Tp.sides

    parts = []
    for (B1, c1), (B2, c2), (B3, c3) in product(*(f.items() for f in F)):
        c = c1 * c2 * c3
        alpha = [concat(pi[i], B.word, invert_word(pi_p[i])) for i, B in enumerate((B1, B2, B3))]
        # 袖口 [A₃B₂Ā₃′B̄₁]、[A₂B₁Ā₂′B̄₃]、[A₁B₃Ā₁′B̄₂]
        P = theta_words(ctx, alpha[1], alpha[0], alpha[2])
        parts.append(FormalSum({P: c}))
        parts.append(item4(ctx, A3, bar(A3p), B2, bar(B1)).scale(-c))
        parts.append(item4(ctx, A2, bar(A2p), B1, bar(B3)).scale(-c))
        parts.append(item4(ctx, A1, bar(A1p), B3, bar(B2)).scale(-c))
    return linear_sum(parts)


def rotation(ctx: HomologyContext, T: NarrowTriangle, Tp: NarrowTriangle) -> FormalSum:
    """
    Rot(T, T′)，满足 ∂Rot = R(∂T) − R(∂T′)

    两个 T 图经 B_i ∈ F_i = Conn_{ε²,r_i}(u, −u) 连成 θ 图，再减去三个四项分解。

    Raises:
        OrientationClash: 定向相同（严格模式）
        EmptyF: 某个 F_i 为空
    """
    key = ('Rot',) + tuple(a.word for a in T.sides[:2] + Tp.sides[:2])
    return ctx.memo(key, lambda: _rotation(ctx, T, Tp))


def replace_triangle(ctx: HomologyContext, A1: GeodesicArc, A2: GeodesicArc) -> FormalSum:
    """
    RT(A₁, A₂) = Rot(T, T⁰) + ½Rot(T⁰, T̄⁰)，满足 ∂RT = R(A₁) + R(A₂) + R(A₃)

    T⁰ 与 T 定向相同时先换成其镜像。
    """
    def build() -> FormalSum:
        T = narrow_triangle(ctx, A1, A2)
        T0 = small_narrow_triangle(ctx)
        if T0.orientation == T.orientation:
            T0 = mirror(ctx, T0)
        return rotation(ctx, T, T0) + rotation(ctx, T0, mirror(ctx, T0)).scale(HALF)
    return ctx.memo(('RT', A1.word, A2.word), build)
