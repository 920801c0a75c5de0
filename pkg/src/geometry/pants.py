"""
裤子

由 θ 图或第三连接得到的裤子、脚与扭转、多裤子的边界与脚测度、
好裤枚举、第三连接区域的体积与 K_γ。

裤子以三元字组 (a, b, c)、abc = 1 表示，三条袖口为 [a]、[b]、[c]。
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..algebra.formal_algebra import FeetMeasure, FormalSum, linear_sum
from ..utils.errors import (BaseMismatch, Degenerate, NegativeCoefficient, NotACuff,
                            NotOrthogonal, NotTheta, WrongSide)
from ..utils.helpers import parallel_map
from ..utils.logger import get_logger, log_performance
from .connections import (ORTHO_TOL, CuffSegment, GeodesicArc, cuff_segment, make_arc,
                          ortho_defects, third_connections)
from .fuchsian import (ConjClass, SurfaceGroup, Word, axis_frame, classify_element,
                       closed_geodesics, concat, cyclic_key, free_reduce, invert_word,
                       oriented, reverse_class, word_class, word_key)
from .hyperbolic_core import PointH, axis, common_perpendicular, dist, h_func

logger = get_logger(__name__)

FOOT_QUANTUM = 1e-6


@dataclass(frozen=True)
class Foot:
    """裤子在袖口 γ 上的脚：√γ ≅ R/hl·Z 中的一点（从基点投影起算）"""
    cuff: ConjClass
    position: float
    hl: float

    def to_dict(self) -> Dict[str, Any]:
        return {'cuff': list(self.cuff.rep), 'position': self.position, 'hl': self.hl}


@dataclass(frozen=True, eq=False)
class Pants:
    """
    裤子

    Attributes:
        words: (a, b, c)，自由群中 abc = 1
        cuffs: 三条定向袖口
        key: 规范键（对三元组的循环旋转不变）
        feet: 每个袖口上的脚（仅几何构造的裤子有）
        seams: 每个袖口轴线上的一个缝线垂足
        third: 构造所用的第三连接
    """
    words: Tuple[Word, Word, Word]
    cuffs: Tuple[ConjClass, ConjClass, ConjClass]
    key: Tuple
    feet: Optional[Tuple[Foot, Foot, Foot]] = None
    seams: Optional[Tuple[PointH, PointH, PointH]] = field(default=None, repr=False)
    third: Optional[GeodesicArc] = field(default=None, repr=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pants):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def slots(self, gamma: ConjClass) -> List[int]:
        return [i for i, c in enumerate(self.cuffs) if c.key == gamma.key]

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            'words': [list(w) for w in self.words],
            'cuffs': [c.to_dict() for c in self.cuffs],
        }
        if self.feet is not None:
            out['feet'] = [f.to_dict() for f in self.feet]
        return out


# ---------------------------------------------------------------- 规范键


def _rotations(items: Sequence[Any]) -> List[Tuple[Any, ...]]:
    return [tuple(items[i:]) + tuple(items[:i]) for i in range(len(items))]


def word_pants_key(words: Sequence[Word]) -> Tuple:
    """
    字层面的键：对三种旋转取 (三条袖口的循环键, [a·b⁻¹] 的循环键) 的最小者

    [a·b⁻¹] 在同时共轭下不变，用来区分袖口相同而粘合方式不同的裤子。
    """
    best = None
    for a, b, c in _rotations(words):
        k = (word_key(cyclic_key(a)), word_key(cyclic_key(b)), word_key(cyclic_key(c)),
             word_key(cyclic_key(concat(a, invert_word(b)))))
        if best is None or k < best:
            best = k
    return ('word',) + best


def pants_key(cuffs: Sequence[ConjClass], feet: Sequence[Foot], quantum: float = FOOT_QUANTUM) -> Tuple:
    """几何裤子的键：对旋转取 (袖口键, 量化的脚位置) 序列的最小者"""
    slots = [(c.key, int(round(f.position / quantum))) for c, f in zip(cuffs, feet)]
    return ('geo',) + min(_rotations(slots))


# ---------------------------------------------------------------- 构造


def pants_from_words(G: SurfaceGroup, a: Sequence[int], b: Sequence[int],
                     c: Optional[Sequence[int]] = None) -> Pants:
    """
    字层面的裤子 [a]、[b]、[c]，c 缺省为 (ab)⁻¹

    Raises:
        Degenerate: abc 在自由群中不等于单位
    """
    a, b = free_reduce(a), free_reduce(b)
    c = free_reduce(c) if c is not None else invert_word(concat(a, b))
    if concat(a, b, c):
        raise Degenerate("三元组之积不是单位", words=(a, b, c))
    words = (a, b, c)
    cuffs = tuple(word_class(G, w) for w in words)
    return Pants(words, cuffs, word_pants_key(words))


def cyclic_order(a: float, b: float, c: float) -> int:
    """三个方向角的循环次序：逆时针 a→b→c 为 +1"""
    tb = (b - a) % (2.0 * math.pi)
    tc = (c - a) % (2.0 * math.pi)
    if min(tb, tc, abs(tb - tc)) < 1e-12:
        return 0
    return 1 if tb < tc else -1


def theta_pants(G: SurfaceGroup, a1: GeodesicArc, a2: GeodesicArc, a3: GeodesicArc,
                check: bool = True) -> Pants:
    """
    θ 图 α₁ ∪ α₂ ∪ α₃（三条从 p 到 q 的弧）的正则邻域：袖口 [α₁ᾱ₂]、[α₂ᾱ₃]、[α₃ᾱ₁]

    Args:
        check: 是否校验两端的循环次序相反

    Raises:
        BaseMismatch: 三条弧的端点不一致
        NotTheta: 两端循环次序相同（或有切向重合）
    """
    for arc in (a2, a3):
        if dist(arc.start, a1.start) > 1e-9 or dist(arc.end, a1.end) > 1e-9:
            raise BaseMismatch("θ 图的三条弧端点不一致")
    if check:
        at_p = cyclic_order(a1.init_dir.dir, a2.init_dir.dir, a3.init_dir.dir)
        at_q = cyclic_order(a1.term_dir.dir + math.pi, a2.term_dir.dir + math.pi, a3.term_dir.dir + math.pi)
        if at_p == 0 or at_p == at_q:
            raise NotTheta("两端的循环次序不相反", at_p=at_p, at_q=at_q)
    w1, w2, w3 = a1.word, a2.word, a3.word
    return pants_from_words(G, concat(w1, invert_word(w2)), concat(w2, invert_word(w3)),
                            concat(w3, invert_word(w1)))


def _seam_points(G: SurfaceGroup, words: Sequence[Word]) -> Tuple[PointH, PointH, PointH]:
    """三条袖口轴线两两的公垂线（缝线）在各轴线上的一个垂足"""
    axes = [axis(G.evaluate(w)) for w in words]
    out = []
    for i in range(3):
        cp = common_perpendicular(axes[i], axes[(i + 1) % 3])
        if cp is None:
            raise Degenerate("袖口轴线相交，不构成直角六边形", slot=i)
        out.append(cp.foot1)
    return tuple(out)


def foot_position(G: SurfaceGroup, word: Word, point: PointH, gamma: ConjClass) -> float:
    """
    轴线 axis(word) 上一点在 √γ 中的位置；γ 可以是 [word] 或 [word⁻¹]

    Raises:
        NotACuff: [word] 与 γ、γ̄ 都不同
    """
    for cand in (word, invert_word(word)):
        if cand == gamma.rep:
            conj: Word = ()
        else:
            cl = classify_element(G, G.evaluate(cand))
            if cl.klass.key != gamma.key:
                continue
            conj = cl.conj
        P = G.evaluate(conj).inverse().apply_point(point)
        geo, _, p_o = axis_frame(G, G.evaluate(gamma.rep))
        return math.fmod(geo.param(P) - p_o, gamma.halflength) % gamma.halflength
    raise NotACuff(f"{word} 不是 {gamma.rep} 的袖口")


def geometric_pants(G: SurfaceGroup, words: Sequence[Word], third: Optional[GeodesicArc] = None,
                    cuff0: Optional[ConjClass] = None) -> Pants:
    """带脚与缝线的裤子；袖口按穿越序列规范化"""
    words = tuple(free_reduce(w) for w in words)
    seams = _seam_points(G, words)
    cuffs = []
    for i, w in enumerate(words):
        if i == 0 and cuff0 is not None:
            cuffs.append(cuff0)
        else:
            cuffs.append(classify_element(G, G.evaluate(w)).klass)
    feet = tuple(Foot(c, foot_position(G, w, s, c), c.halflength) for c, w, s in zip(cuffs, words, seams))
    return Pants(words, tuple(cuffs), pants_key(cuffs, feet), feet, seams, third)


def third_pants(G: SurfaceGroup, gamma: ConjClass, eta: GeodesicArc,
                seg: Optional[CuffSegment] = None, tol: float = ORTHO_TOL) -> Pants:
    """
    由 γ 与第三连接 η 构造裤子 (g, g^{−j'}·η⁻¹, η·g^{−j})

    η 在 γ 上的两个端点把 γ 分成 σ₁（正向从起点到终点）与 σ₂；
    j 记录 σ₁ 是否跨过周期起点，j + j' = 1。

    Raises:
        NotOrthogonal: η 与 γ 的夹角偏离直角超过 tol
        WrongSide: η 不是从右侧出发并从右侧到达
    """
    seg = seg or cuff_segment(G, gamma)
    da, db = ortho_defects(eta, seg, seg)
    if max(da, db) > tol:
        raise NotOrthogonal(f"正交缺陷 {max(da, db):.3g} 超过容差 {tol}")
    if seg.geo.side(eta.lifted_end) != 1 or seg.geo.image(eta.matrix).side(eta.start) != 1:
        raise WrongSide("第三连接必须从 γ 的右侧出发并从右侧到达")
    ta = seg.geo.param(eta.start)
    tb = seg.geo.param(eta.end)
    j = 0 if tb > ta + 1e-12 else 1
    g = gamma.rep
    g_inv = invert_word(g)
    b = concat(g_inv if j == 0 else (), invert_word(eta.word))
    c = concat(eta.word, g_inv if j == 1 else ())
    return geometric_pants(G, (g, b, c), third=eta, cuff0=gamma)


def third_of(G: SurfaceGroup, pants: Pants, slot: int = 0) -> GeodesicArc:
    """
    裤子在第 slot 条袖口上的第三连接：axis(a) 与 axis(b⁻¹ab) 的公垂线，端点规范到一个周期内

    Raises:
        Degenerate: 两条轴线不超平行
    """
    a = pants.words[slot]
    b = pants.words[(slot + 1) % 3]
    gamma = pants.cuffs[slot]
    A = G.evaluate(a)
    geo, _, _ = axis_frame(G, A)
    h = invert_word(b)
    cp = common_perpendicular(geo, geo.image(G.evaluate(h)))
    if cp is None:
        raise Degenerate("第三连接不存在")
    p_o = geo.param(G.basepoint)
    ell = A.translation_length()
    start, end = cp.foot1, G.evaluate(b).apply_point(cp.foot2)
    k = math.floor((geo.param(start) - p_o) / ell + 1e-12)
    m = math.floor((geo.param(end) - p_o) / ell + 1e-12)
    a_inv = invert_word(a)
    shift_k = tuple(x for _ in range(abs(k)) for x in (a_inv if k > 0 else a))
    shift_m = tuple(x for _ in range(abs(m)) for x in (a if m > 0 else a_inv))
    word = concat(shift_k, h, shift_m)
    start = G.evaluate(shift_k).apply_point(start)
    end = G.evaluate(invert_word(shift_m)).apply_point(end)
    logger.debug(f"袖口 {gamma.rep} 的第三连接长度 {cp.length:.6f}")
    return make_arc(G, word, start, end)


def foot(p: Pants, gamma: ConjClass) -> Foot:
    """
    裤子在袖口 γ 上的脚（γ 出现多次时取第一个槽位）

    Raises:
        NotACuff: γ 不是 Π 的袖口，或 Π 没有脚数据
    """
    slots = p.slots(gamma)
    if not slots or p.feet is None:
        raise NotACuff(f"{gamma.rep} 不是带脚裤子的袖口")
    return p.feet[slots[0]]


def twist(G: SurfaceGroup, p1: Pants, p2: Pants, gamma: ConjClass) -> float:
    """
    沿 γ 粘合 Π₁（袖口 γ）与 Π₂（袖口 γ̄）时的扭转 s ∈ R/hl·Z

    Raises:
        NotACuff: γ 不是 Π₁ 的袖口或 γ̄ 不是 Π₂ 的袖口
    """
    a = foot(p1, gamma).position
    bar = reverse_class(G, gamma)
    s2 = p2.slots(bar)
    if not s2 or p2.seams is None:
        raise NotACuff("扭转需要 γ ∈ ∂Π₁ 与 γ̄ ∈ ∂Π₂")
    b = foot_position(G, p2.words[s2[0]], p2.seams[s2[0]], gamma)
    return math.fmod(b - a, gamma.halflength) % gamma.halflength


def is_good(p: Pants, eps: float, R: float) -> bool:
    """所有袖口满足 |hl − R| ≤ ε"""
    return all(abs(c.halflength - R) <= eps + 1e-12 for c in p.cuffs)


# ---------------------------------------------------------------- 多裤子


@lru_cache(maxsize=1 << 18)
def _free_orientation(G: SurfaceGroup, key: Word) -> Tuple[ConjClass, int]:
    bar = cyclic_key(invert_word(key))
    if word_key(key) <= word_key(bar):
        return word_class(G, key), 1
    return word_class(G, bar), -1


def curve_sum(G: SurfaceGroup, word: Sequence[int], coeff: Any = 1) -> FormalSum:
    """闭曲线 [word] 在 Q·Γ 中的规范表示；平凡类记为 0"""
    key = cyclic_key(word)
    if not key:
        return FormalSum()
    klass, sign = _free_orientation(G, key)
    return FormalSum({klass: sign * Fraction(coeff)})


def class_sum(G: SurfaceGroup, gamma: ConjClass, coeff: Any = 1) -> FormalSum:
    if gamma.free:
        return curve_sum(G, gamma.rep, coeff)
    if not gamma.rep:
        return FormalSum()
    klass, sign = oriented(G, gamma)
    return FormalSum({klass: sign * Fraction(coeff)})


def boundary(G: SurfaceGroup, mu: FormalSum) -> FormalSum:
    """∂μ = Σ_Π μ(Π)·([a] + [b] + [c])，以规范定向表示"""
    return linear_sum(class_sum(G, c, coeff) for p, coeff in mu.items() for c in p.cuffs)


def free_boundary(G: SurfaceGroup, mu: FormalSum) -> FormalSum:
    """∂μ，所有袖口都按代表字的自由共轭类表示；几何裤子与字层面裤子可以混合"""
    return linear_sum(curve_sum(G, c.rep, coeff) for p, coeff in mu.items() for c in p.cuffs)


def feet_boundary(mu: FormalSum, gamma: ConjClass) -> FeetMeasure:
    """
    ∂̂_γ μ：μ 中每条袖口为 γ 的裤子在 √γ 上的脚，质量为系数

    Raises:
        NegativeCoefficient: μ 有负系数
        NotACuff: 某条相关裤子没有脚数据
    """
    atoms = []
    for p, coeff in mu.items():
        if coeff < 0:
            raise NegativeCoefficient(f"多裤子系数 {coeff} 为负")
        for i in p.slots(gamma):
            if p.feet is None:
                raise NotACuff("字层面的裤子没有脚")
            atoms.append((p.feet[i].position, coeff))
    return FeetMeasure.build(gamma, gamma.halflength, atoms)


def cuff_curves(pants: Iterable[Pants]) -> List[ConjClass]:
    """出现过的全部袖口（去重，按长度排序）"""
    seen: Dict[Tuple, ConjClass] = {}
    for p in pants:
        for c in p.cuffs:
            seen.setdefault(c.key, c)
    return sorted(seen.values(), key=lambda c: (round(c.length, 9), c.key))


# ---------------------------------------------------------------- 好裤枚举


def w_max(ell: float, eps: float, R: float) -> float:
    """第三连接长度上界：两条新袖口都不超过 2(R + ε) 时 η 的最大可能长度"""
    return 2.0 * math.asinh(math.cosh(R + eps) / math.sinh(ell / 4.0))


def _window_ok(s: float, w: float, eps: float, R: float) -> bool:
    try:
        h = h_func(s, w)
    except Degenerate:
        return False
    return abs(h / 2.0 - R) <= eps + 1e-12


def good_pants_from_curve(G: SurfaceGroup, gamma: ConjClass, eps: float, R: float) -> List[Pants]:
    """以 γ 为袖口的全部好裤子，与 γ 的第三连接一一对应"""
    seg = cuff_segment(G, gamma)
    ell = gamma.length
    out = []
    for eta in third_connections(G, gamma, w_max(ell, eps, R)):
        s1 = math.fmod(seg.geo.param(eta.end) - seg.geo.param(eta.start), ell) % ell
        if not (_window_ok(s1, eta.length, eps, R) and _window_ok(ell - s1, eta.length, eps, R)):
            continue
        p = third_pants(G, gamma, eta, seg)
        if is_good(p, eps, R):
            out.append(p)
    return out


def K_gamma(G: SurfaceGroup, gamma: ConjClass, eps: float, R: float) -> int:
    """μ₁ 中以 γ 为袖口的好裤子计数（按袖口槽计）"""
    return len(good_pants_from_curve(G, gamma, eps, R))


@log_performance
def enumerate_good_pants(G: SurfaceGroup, eps: float, R: float,
                         curves: Optional[Sequence[ConjClass]] = None,
                         max_curves: Optional[int] = None, workers: int = 1) -> FormalSum:
    """
    μ₁ = Σ_{Π ∈ Π_{ε,R}} Π（限制在给定的好曲线上）

    Args:
        curves: 只从这些曲线出发枚举，缺省为全部 Γ_{ε,R}
        max_curves: 只取前若干条曲线
        workers: 并行线程数

    Returns:
        系数为 1 的多裤子
    """
    if curves is None:
        curves = closed_geodesics(G, 2.0 * (R - eps), 2.0 * (R + eps))
    curves = list(curves)[:max_curves] if max_curves else list(curves)
    found = parallel_map(lambda g: good_pants_from_curve(G, g, eps, R), curves, workers)
    terms: Dict[Pants, int] = {}
    for plist in found:
        for p in plist:
            terms[p] = 1
    logger.info(f"{len(curves)} 条好曲线上共有 {len(terms)} 条好裤子")
    return FormalSum(terms)


# ---------------------------------------------------------------- 区域体积


def _w_of(h: float, s: float) -> float:
    """h(s, w) = h 时的 w"""
    return 2.0 * math.asinh(math.cosh(h / 2.0) / math.sinh(s / 2.0))


def region_volume(ell: float, eps: float, R: float, I_len: float, weighted: bool = False) -> float:
    """
    第三连接区域 R(γ, I) 在 dλ²dw（weighted 时为 e^w dλ²dw）下的体积

    以 σ₁ 的长度 s 与 η 的长度 w 为坐标；脚的位置沿 γ 平移不变，
    固定 s 时满足中点落在 I 内的起点集合测度为 2·l(I)。

    Raises:
        Degenerate: 参数非正或 l(I) > hl
    """
    if ell <= 0 or eps <= 0 or I_len <= 0 or I_len > ell / 2.0 + 1e-12:
        raise Degenerate("区域体积参数无效", ell=ell, eps=eps, I_len=I_len)
    lo, hi = 2.0 * (R - eps), 2.0 * (R + eps)

    def slice_measure(s: float) -> float:
        if s <= 0 or s >= ell:
            return 0.0
        w0 = max(_w_of(max(lo, 0.0), s), _w_of(max(lo, 0.0), ell - s))
        w1 = min(_w_of(hi, s), _w_of(hi, ell - s))
        if w1 <= w0:
            return 0.0
        return math.exp(w1) - math.exp(w0) if weighted else w1 - w0

    value, _ = integrate.quad(slice_measure, 0.0, ell, limit=200, points=[ell / 2.0])
    return 2.0 * I_len * value


# ---------------------------------------------------------------- 报告


def feet_table(mu: FormalSum, gamma: ConjClass) -> List[Dict[str, Any]]:
    m = feet_boundary(mu, gamma)
    return [{'position': p, 'mass': str(c)} for p, c in m.atoms]


def equidistribution_report(mu: FormalSum, gamma: ConjClass, bins: int = 8) -> Dict[str, Any]:
    """√γ 上等分区间的脚质量与均匀分布的最大相对偏差"""
    m = feet_boundary(mu, gamma)
    total = float(m.total())
    width = m.hl / bins
    masses = [float(m.mass_in(k * width, width - 1e-12)) for k in range(bins)]
    expected = total / bins if bins else 0.0
    dev = max((abs(x - expected) / expected for x in masses), default=0.0) if expected > 0 else 0.0
    return {'cuff': list(gamma.rep), 'hl': m.hl, 'total': total, 'bins': masses, 'max_rel_dev': dev}


def calibrate_R(G: SurfaceGroup, eps: float, R_values: Sequence[float],
                max_curves: Optional[int] = 3, workers: int = 1) -> List[Dict[str, Any]]:
    """对每个 R 统计好曲线数与前 max_curves 条曲线的 K_γ（max_curves 为 None 时取全部）"""
    rows = []
    for R in R_values:
        curves = closed_geodesics(G, 2.0 * (R - eps), 2.0 * (R + eps))
        ks = parallel_map(lambda g: K_gamma(G, g, eps, R), curves[:max_curves] if max_curves else curves, workers)
        rows.append({'R': R, 'eps': eps, 'curves': len(curves),
                     'K_mean': float(np.mean(ks)) if ks else 0.0,
                     'K_min': min(ks) if ks else 0, 'K_max': max(ks) if ks else 0})
        logger.info(f"R = {R}: {len(curves)} 条好曲线，K_γ 样本 {ks}")
    return rows
