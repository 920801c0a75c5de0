"""
连接集

曲面上两个单位切向量之间的几乎测地连接 Conn_{ε,L}(u, v)、两段闭测地线之间的
正交测地线、窄连接集 LN/RN，以及计数律的指数拟合。

约定：曲面上的点用其在上半平面中的某个提升表示；弧 (word, start, end) 的提升
从 start 出发到 g·end，其中 g 是 word 对应的群元素。
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..utils.errors import (BaseMismatch, CapExceeded, Degenerate, EmptyBand,
                            InsufficientData)
from ..utils.helpers import parallel_map
from ..utils.logger import get_logger, log_performance
from .chain_calculus import PiecewisePath
from .fuchsian import (ConjClass, SurfaceGroup, Word, normalize_batch, concat,
                       invert_word, sector_bound, tile_bfs, tube_bound,
                       word_key)
from .hyperbolic_core import (Geodesic, MoebiusTransform, PointH, UnitTangent,
                              angle_gap, arrival_tangent, axis, directions_many,
                              directions_towards, dist, dist_many, reverse,
                              tangent_towards)

logger = get_logger(__name__)

ORTHO_TOL = 1e-6


def L_of(eps: float, G: Optional[SurfaceGroup] = None, q0: Optional[float] = None,
         L0: Optional[float] = None) -> float:
    """
    连接引理中的长度阈值 L(ε) = max{−log(ε)/q₀, −log ε, L₀}

    Args:
        eps: 0 < ε < 1
        G: 曲面群（提供 q0、L0）
        q0: 覆盖 G.q0
        L0: 覆盖 G.L0
    """
    if not 0.0 < eps < 1.0:
        raise Degenerate(f"ε = {eps} 不在 (0, 1) 内")
    q0 = q0 if q0 is not None else (G.q0 if G is not None else 1.0)
    L0 = L0 if L0 is not None else (G.L0 if G is not None else 2.0)
    return max(-math.log(eps) / q0, -math.log(eps), L0)


@dataclass(frozen=True)
class GeodesicArc:
    """
    曲面上的定向测地弧

    Attributes:
        word: 连接两端提升的群元素的字
        matrix: 对应矩阵
        start: 起点提升
        end: 终点的曲面代表（弧的提升终点是 matrix·end）
        length: 弧长
        init_dir: 起点处的切向量 i(·)
        term_dir: 终点处（拉回到 end）的切向量 t(·)
    """
    word: Word
    matrix: MoebiusTransform = field(compare=False, repr=False)
    start: PointH
    end: PointH
    length: float = field(compare=False)
    init_dir: UnitTangent = field(compare=False, repr=False)
    term_dir: UnitTangent = field(compare=False, repr=False)

    @property
    def lifted_end(self) -> PointH:
        return self.matrix.apply_point(self.end)

    def key(self, quantum: float = 1e-6) -> Tuple:
        q = lambda x: int(round(x / quantum))
        return (word_key(self.word), q(self.start.x), q(self.start.y), q(self.end.x), q(self.end.y))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'word': list(self.word),
            'length': self.length,
            'start': [self.start.x, self.start.y],
            'end': [self.end.x, self.end.y],
            'init_dir': self.init_dir.dir,
            'term_dir': self.term_dir.dir,
        }


def make_arc(G: SurfaceGroup, word: Sequence[int], p: PointH, q: PointH,
             g: Optional[MoebiusTransform] = None) -> GeodesicArc:
    """由字与两端点构造弧，切向量与长度由提升计算"""
    word = tuple(word)
    g = g if g is not None else G.evaluate(word)
    gq = g.apply_point(q)
    if dist(p, gq) < 1e-12:
        raise Degenerate("弧长为零")
    term = g.inverse().act_on_tangent(arrival_tangent(p, gq))
    return GeodesicArc(word, g, p, q, dist(p, gq), tangent_towards(p, gq), term)


def reverse_arc(arc: GeodesicArc) -> GeodesicArc:
    """反向弧：交换 i/t 并取逆元"""
    g_inv = arc.matrix.inverse()
    return GeodesicArc(invert_word(arc.word), g_inv, arc.end, arc.start, arc.length,
                       reverse(arc.term_dir), reverse(arc.init_dir))


def concat_arcs(G: SurfaceGroup, a1: GeodesicArc, a2: GeodesicArc) -> GeodesicArc:
    """
    把首尾相接的两条弧拉直为 [·a₁a₂·]

    Raises:
        BaseMismatch: a₁ 的终点与 a₂ 的起点不是同一个曲面点提升
    """
    if dist(a1.end, a2.start) > 1e-9:
        raise BaseMismatch("弧不首尾相接")
    return make_arc(G, concat(a1.word, a2.word), a1.start, a2.end, a1.matrix @ a2.matrix)


def split_midpoint(G: SurfaceGroup, arc: GeodesicArc) -> Tuple[GeodesicArc, GeodesicArc]:
    """在中点处把弧分成两半，中点约化进基本多边形"""
    geo = Geodesic.through(arc.init_dir)
    t0 = geo.param(arc.start)
    mid = geo.point(t0 + arc.length / 2.0)
    k_word, k, m_red = G.reduce_point(mid)
    m = PointH.from_complex(m_red)
    first = make_arc(G, k_word, arc.start, m, k)
    second = make_arc(G, concat(invert_word(k_word), arc.word), m, arc.end, k.inverse() @ arc.matrix)
    return first, second


def signed_turn(u: UnitTangent, v: UnitTangent) -> float:
    """从 u 到 v 的带符号转角（同一基点）"""
    return math.remainder(v.dir - u.dir, 2.0 * math.pi)


def arcs_to_path(arcs: Sequence[GeodesicArc], closed: bool = False) -> PiecewisePath:
    """
    首尾相接的弧序列转为分段路径，供链引理使用

    相邻弧在曲面上同一点相接；转角由 t(αᵢ) 与 i(αᵢ₊₁) 给出。
    """
    for a, b in zip(arcs, arcs[1:]):
        if dist(a.end, b.start) > 1e-9:
            raise BaseMismatch("弧不首尾相接")
    turns = [signed_turn(a.term_dir, b.init_dir) for a, b in zip(arcs, arcs[1:])]
    wrap = signed_turn(arcs[-1].term_dir, arcs[0].init_dir) if closed else 0.0
    return PiecewisePath(tuple(a.length for a in arcs), tuple(turns), closed, wrap, arcs[0].init_dir)


# ---------------------------------------------------------------- Conn_{ε,L}


def _start_tile(G: SurfaceGroup, z: complex):
    w, m, _ = G.reduce_point(z)
    return w, m


@log_performance
def enumerate_window(G: SurfaceGroup, u: UnitTangent, v: UnitTangent, eps: float,
                     lmin: float, lmax: float, strict_upper: bool = False) -> List[GeodesicArc]:
    """
    两端角度缺陷都不超过 eps、长度在 [lmin, lmax] 内的全部连接

    扇形区域的铺砌 BFS 从包含 u 基点的瓦片出发；候选终点为瓦片 h 中 v 基点的代表。

    Raises:
        CapExceeded: lmax 超过枚举上限
    """
    if lmax > G.hard_cap + 1e-12:
        raise CapExceeded(f"连接长度上界 {lmax:.3f} 超过上限 {G.hard_cap}")
    if lmax < lmin:
        return []
    p = u.base.z
    q = v.base.z
    kq_word, kq, q_red = G.reduce_point(q)
    table = tile_bfs(G, sector_bound(p, u.dir, min(eps, math.pi), lmax), start=_start_tile(G, p))

    H = table.mats
    pts = (H[:, 0, 0] * q_red + H[:, 0, 1]) / (H[:, 1, 0] * q_red + H[:, 1, 1])
    d = dist_many(p, pts)
    gm = normalize_batch(H @ kq.inverse().as_array())
    gv_dir = v.dir - 2.0 * np.angle(gm[:, 1, 0] * q + gm[:, 1, 1])
    arrive = directions_towards(pts, p) + math.pi
    ok = (angle_gap(directions_many(p, pts), u.dir) <= eps) & (angle_gap(arrive, gv_dir) <= eps)
    ok &= (d >= lmin) & (d > 1e-9)
    ok &= (d < lmax) if strict_upper else (d <= lmax)

    k_inv = invert_word(kq_word)
    arcs = [make_arc(G, concat(table.words[i], k_inv), u.base, v.base, MoebiusTransform.from_array(gm[i]))
            for i in np.nonzero(ok)[0]]
    arcs.sort(key=lambda a: (round(a.length, 12), word_key(a.word)))
    logger.debug(f"窗口 [{lmin:.3f}, {lmax:.3f}] ε = {eps:.4g}：{len(arcs)} 条连接（候选 {len(table)}）")
    return arcs


def enumerate_conn(G: SurfaceGroup, u: UnitTangent, v: UnitTangent, eps: float, L: float) -> List[GeodesicArc]:
    """
    Conn_{ε,L}(u, v)：角度缺陷 ≤ ε 且 |l − L| ≤ ε

    Raises:
        CapExceeded: L + ε 超过上限
    """
    return enumerate_window(G, u, v, eps, L - eps, L + eps)


def enumerate_conn_below(G: SurfaceGroup, u: UnitTangent, v: UnitTangent, eps: float, L: float) -> List[GeodesicArc]:
    """Conn_{ε,<L}(u, v)：角度缺陷 ≤ ε 且 l < L"""
    return enumerate_window(G, u, v, eps, 0.0, L, strict_upper=True)


# ---------------------------------------------------------------- 窄连接


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class NarrowArc:
    """LN_{ε,R}(u) 或 RN_{ε,R}(u) 中的一条弧"""
    arc: GeodesicArc
    side: Side
    anchor: UnitTangent
    eps: float
    R: float


def narrow_band(G: SurfaceGroup, eps: float, R: float) -> Tuple[float, float]:
    lo = L_of(eps * eps, G)
    hi = 2.0 * R - lo
    if hi < lo:
        raise EmptyBand(f"2R − L(ε²) = {hi:.4f} < L(ε²) = {lo:.4f}")
    return lo, hi


def narrow_set(G: SurfaceGroup, u: UnitTangent, side: Side, eps: float, R: float) -> List[NarrowArc]:
    """
    左窄连接 Conn_{ε²,<∞}(−u, u) 或右窄连接 Conn_{ε²,<∞}(u, −u)，长度在 [L(ε²), 2R − L(ε²)]

    Raises:
        EmptyBand: 长度带为空
        CapExceeded: 2R − L(ε²) 超过上限
    """
    lo, hi = narrow_band(G, eps, R)
    side = Side(side)
    if side is Side.LEFT:
        arcs = enumerate_window(G, reverse(u), u, eps * eps, lo, hi)
    else:
        arcs = enumerate_window(G, u, reverse(u), eps * eps, lo, hi)
    return [NarrowArc(a, side, u, eps, R) for a in arcs]


def check_narrow(n: NarrowArc, G: SurfaceGroup) -> bool:
    """重新校验 NarrowArc 的不变量"""
    e2 = n.eps * n.eps
    lo = L_of(e2, G)
    if not lo - 1e-9 <= n.arc.length <= 2.0 * n.R - lo + 1e-9:
        return False
    src, dst = (reverse(n.anchor), n.anchor) if n.side is Side.LEFT else (n.anchor, reverse(n.anchor))
    gap_i = float(angle_gap(n.arc.init_dir.dir, src.dir))
    gap_t = float(angle_gap(n.arc.term_dir.dir, dst.dir))
    return gap_i <= e2 + 1e-9 and gap_t <= e2 + 1e-9


# ---------------------------------------------------------------- 正交测地线


@dataclass(frozen=True)
class CuffSegment:
    """
    闭测地线提升上的一段 [t1, t2]（弧长参数）

    periodic 为真时表示一个完整周期，按半开区间 [t1, t2) 判定以避免重复计数。
    """
    geo: Geodesic
    t1: float
    t2: float
    periodic: bool = False
    klass: Optional[ConjClass] = None

    @property
    def length(self) -> float:
        return self.t2 - self.t1

    @property
    def midpoint(self) -> PointH:
        return self.geo.point(0.5 * (self.t1 + self.t2))

    def contains(self, t: float, tol: float = 1e-9) -> bool:
        if self.periodic:
            return self.t1 - tol <= t < self.t2 - tol
        return self.t1 - tol <= t <= self.t2 + tol


def cuff_segment(G: SurfaceGroup, gamma: ConjClass, t1: Optional[float] = None,
                 t2: Optional[float] = None) -> CuffSegment:
    """γ 代表元轴线上的段；缺省为从基点投影开始的一个完整周期"""
    geo = axis(G.evaluate(gamma.rep))
    if t1 is None:
        t1 = geo.param(G.basepoint)
        return CuffSegment(geo, t1, t1 + gamma.length, True, gamma)
    return CuffSegment(geo, t1, t2 if t2 is not None else t1 + gamma.length, False, gamma)


def _apply_many(mats: np.ndarray, x: float) -> np.ndarray:
    """批量作用于边界点（x 可为 ∞），分母为零处给出 ∞"""
    if math.isinf(x):
        num, den = mats[:, 0, 0], mats[:, 1, 0]
    else:
        num, den = mats[:, 0, 0] * x + mats[:, 0, 1], mats[:, 1, 0] * x + mats[:, 1, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(den) > 1e-300, num / np.where(den == 0, 1.0, den), np.inf)


def _inverse_many(mats: np.ndarray) -> np.ndarray:
    out = np.empty_like(mats)
    out[:, 0, 0], out[:, 1, 1] = mats[:, 1, 1], mats[:, 0, 0]
    out[:, 0, 1], out[:, 1, 0] = -mats[:, 0, 1], -mats[:, 1, 0]
    return out


@log_performance
def ortho_connections(G: SurfaceGroup, A: CuffSegment, B: CuffSegment, L0: float, L1: float) -> List[GeodesicArc]:
    """
    从 A 的右侧出发、从右侧到达 B 的正交测地线，长度在 [L0, L1]

    在 A 的标准坐标中，g·B 的端点 e₁ > e₂ > 0 恰好对应右进右出的配置；
    公垂线长度 acosh((e₁+e₂)/(e₁−e₂))，A 上垂足参数 ½·log(e₁e₂)。

    Raises:
        CapExceeded: L1 超过上限
    """
    if L1 > G.hard_cap + 1e-12:
        raise CapExceeded(f"正交测地线长度上界 {L1:.3f} 超过上限 {G.hard_cap}")
    kb_word, kb, b_red = G.reduce_point(B.midpoint)
    width = L1 + B.length / 2.0 + 1e-6
    region = tube_bound(A.geo, A.t1, A.t2, width)
    table = tile_bfs(G, region, start=_start_tile(G, A.midpoint.z))

    H = table.mats
    pts = (H[:, 0, 0] * b_red + H[:, 0, 1]) / (H[:, 1, 0] * b_red + H[:, 1, 1])
    cand = np.nonzero(region(pts) <= 1e-9)[0]
    if len(cand) == 0:
        return []
    gm = normalize_batch(H[cand] @ kb.inverse().as_array())
    M = A.geo.standardizer().as_array()
    std = M @ gm
    e1 = _apply_many(std, B.geo.neg)
    e2 = _apply_many(std, B.geo.pos)
    ok = np.isfinite(e1) & np.isfinite(e2) & (e2 > 0) & (e1 > e2)
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.arccosh(np.where(ok, (e1 + e2) / np.where(ok, e1 - e2, 1.0), 1.0))
        t1 = 0.5 * np.log(np.where(ok, e1 * e2, 1.0))
    ok &= (w >= L0 - 1e-12) & (w <= L1 + 1e-12)
    if A.periodic:
        ok &= (t1 >= A.t1 - 1e-9) & (t1 < A.t2 - 1e-9)
    else:
        ok &= (t1 >= A.t1 - 1e-9) & (t1 <= A.t2 + 1e-9)

    # 第二个垂足拉回到 B 的提升上取参数
    ab = np.where(ok, e1 * e2, 1.0)
    x = 2.0 * ab / np.where(ok, e1 + e2, 1.0)
    y = np.sqrt(np.maximum(ab - x * x, 1e-300))
    back = B.geo.standardizer().as_array() @ _inverse_many(gm) @ np.linalg.inv(M)
    z = x + 1j * y
    zb = (back[:, 0, 0] * z + back[:, 0, 1]) / (back[:, 1, 0] * z + back[:, 1, 1])
    t2 = np.log(np.abs(zb))
    if B.periodic:
        ok &= (t2 >= B.t1 - 1e-9) & (t2 < B.t2 - 1e-9)
    else:
        ok &= (t2 >= B.t1 - 1e-9) & (t2 <= B.t2 + 1e-9)

    k_inv = invert_word(kb_word)
    arcs: List[GeodesicArc] = []
    for j in np.nonzero(ok)[0]:
        g = MoebiusTransform.from_array(gm[j])
        foot1 = A.geo.point(float(t1[j]))
        end = B.geo.point(float(t2[j]))
        arcs.append(make_arc(G, concat(table.words[cand[j]], k_inv), foot1, end, g))
    arcs.sort(key=lambda a: (round(a.length, 12), word_key(a.word)))
    logger.debug(f"正交测地线 [{L0:.3f}, {L1:.3f}]：{len(arcs)} 条（候选 {len(cand)}）")
    return arcs


def third_connections(G: SurfaceGroup, gamma: ConjClass, Lmax: float,
                      both_orientations: bool = False) -> List[GeodesicArc]:
    """
    γ 右侧到 γ 右侧、长度 ≤ Lmax 的正交测地线

    η 与 η̄ 给出同一条裤子；缺省只保留起点参数小于终点参数的那个定向。
    """
    seg = cuff_segment(G, gamma)
    arcs = ortho_connections(G, seg, seg, 0.0, Lmax)
    if both_orientations:
        return arcs
    return [a for a in arcs if seg.geo.param(a.start) < seg.geo.param(a.end)]


def ortho_defects(arc: GeodesicArc, A: CuffSegment, B: CuffSegment) -> Tuple[float, float]:
    """弧在两端与 A、B 切向的夹角偏离 π/2 的量"""
    ta = A.geo.tangent(A.geo.param(arc.start))
    tb = B.geo.tangent(B.geo.param(arc.end))
    da = abs(float(angle_gap(arc.init_dir.dir, ta.dir)) - math.pi / 2.0)
    db = abs(float(angle_gap(arc.term_dir.dir, tb.dir)) - math.pi / 2.0)
    return da, db


# ---------------------------------------------------------------- 计数律


def count_fit(samples: Iterable[Tuple[float, float]]) -> Tuple[float, float, float]:
    """
    对 log(count) 关于 L 做最小二乘

    Returns:
        (slope, intercept, max_rel_residual)；e^intercept 即常数估计

    Raises:
        InsufficientData: 少于 3 个样本或有非正计数
    """
    samples = list(samples)
    if len(samples) < 3:
        raise InsufficientData(f"只有 {len(samples)} 个样本")
    L = np.array([s[0] for s in samples], dtype=float)
    c = np.array([s[1] for s in samples], dtype=float)
    if np.any(c <= 0):
        raise InsufficientData("计数必须为正")
    fit = stats.linregress(L, np.log(c))
    predicted = np.exp(fit.intercept + fit.slope * L)
    rel = float(np.max(np.abs(predicted - c) / c))
    logger.info(f"计数拟合：斜率 {fit.slope:.4f}，常数 {math.exp(fit.intercept):.4g}，最大相对残差 {rel:.3g}")
    return float(fit.slope), float(fit.intercept), rel


def conn_count_table(G: SurfaceGroup, u: UnitTangent, v: UnitTangent, eps: float,
                     lengths: Sequence[float], workers: int = 1) -> List[Dict[str, Any]]:
    """每个 L 的 #Conn_{ε,L}(u, v)，按 L 并行"""
    counts = parallel_map(lambda L: len(enumerate_conn(G, u, v, eps, L)), list(lengths), workers)
    return [{'L': float(L), 'eps': eps, 'count': n} for L, n in zip(lengths, counts)]


def counting_density_ratios(rows: Sequence[Dict[str, Any]], min_count: int = 50) -> List[float]:
    """相邻 L（间隔 1）的计数比，只取两端计数都 ≥ min_count 的位置"""
    by_L = {round(r['L'], 9): r['count'] for r in rows}
    out = []
    for L, n in sorted(by_L.items()):
        m = by_L.get(round(L + 1.0, 9))
        if m is not None and n >= min_count and m >= min_count:
            out.append(m / n)
    return out
