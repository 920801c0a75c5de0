"""
链引理数值校验

分段测地路径的闭合长度、直角修正、低效度、投影偏移与终端角估计。
路径以内蕴方式存储（弧长 + 带符号转角），精确值全部在起点标架中由
矩阵乘积计算，长路径也不会因为点靠近边界而损失精度。
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import (ChainBoundViolated, Degenerate, DegenerateChord, NotRightAngle,
                            ShortArc, TooShortTail, WideBend)
from ..utils.logger import get_logger
from .hyperbolic_core import (ORIGIN, MoebiusTransform, UnitTangent, frame,
                              rotation_about_i, trace_length)

logger = get_logger(__name__)

# 链引理要求的弯折上界
MAX_BEND = 1.0

_UP = UnitTangent(ORIGIN, math.pi / 2.0)


def _advance(L: float) -> np.ndarray:
    """沿 i 处竖直测地线前进 L"""
    return np.diag([math.exp(L / 2.0), math.exp(-L / 2.0)])


def _turn(theta: float) -> np.ndarray:
    return rotation_about_i(theta).as_array()


def _wrap(theta: float) -> float:
    return math.remainder(theta, 2.0 * math.pi)


@dataclass(frozen=True)
class PiecewisePath:
    """
    首尾相接的测地线段序列

    Attributes:
        lengths: 各段长度，均为正
        turns: 相邻段之间的带符号转角（逆时针为正，直行为 0）
        closed: 是否闭合
        wrap_turn: 闭合时从最后一段回到第一段的转角
        start: 第一段的起始切向量，只用于嵌入到平面
    """
    lengths: Tuple[float, ...]
    turns: Tuple[float, ...] = ()
    closed: bool = False
    wrap_turn: float = 0.0
    start: UnitTangent = field(default=_UP, compare=False)

    def __post_init__(self):
        if not self.lengths:
            raise Degenerate("路径至少需要一段")
        if any(L <= 0 for L in self.lengths):
            raise Degenerate(f"弧长必须为正: {self.lengths}")
        if len(self.turns) != len(self.lengths) - 1:
            raise Degenerate("转角数量必须比弧数少一")

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> float:
        return float(sum(self.lengths))

    def bends(self) -> List[float]:
        """各接点处 Θ(t(αᵢ), i(αᵢ₊₁))，直行为 0"""
        out = [abs(_wrap(t)) for t in self.turns]
        if self.closed:
            out.append(abs(_wrap(self.wrap_turn)))
        return out

    def max_bend(self) -> float:
        b = self.bends()
        return max(b) if b else 0.0

    def reversed(self) -> "PiecewisePath":
        end = frame(self.start) @ MoebiusTransform.from_array(self.end_frame())
        back = UnitTangent(end.apply_point(ORIGIN), end.act_on_tangent(_UP).dir + math.pi)
        return PiecewisePath(tuple(reversed(self.lengths)), tuple(-t for t in reversed(self.turns)),
                             self.closed, -self.wrap_turn, back)

    def arc_frames(self) -> List[np.ndarray]:
        """每段起点在起始标架中的标架矩阵"""
        out, F = [], np.eye(2)
        for k, L in enumerate(self.lengths):
            out.append(F)
            F = F @ _advance(L)
            if k < len(self.turns):
                F = F @ _turn(self.turns[k])
        return out

    def end_frame(self) -> np.ndarray:
        return self.arc_frames()[-1] @ _advance(self.lengths[-1])

    def holonomy(self) -> MoebiusTransform:
        """闭合路径的提升元素：把 i(α₁) 送到下一圈的起始切向量"""
        return MoebiusTransform.from_array(self.end_frame() @ _turn(self.wrap_turn))

    def joints(self) -> List[UnitTangent]:
        """每段起始切向量嵌入到平面后的位置"""
        base = frame(self.start)
        return [(base @ MoebiusTransform.from_array(F)).act_on_tangent(_UP) for F in self.arc_frames()]


def chain_from_turns(lengths: Sequence[float], turns: Sequence[float],
                     start: Optional[UnitTangent] = None, closed: bool = False,
                     wrap_turn: float = 0.0) -> PiecewisePath:
    """
    由弧长与带符号转角构造路径

    Args:
        lengths: 各段长度
        turns: 相邻段之间的转角，长度为 n−1
        start: 起始切向量，默认 i 处向上
        closed: 是否闭合
        wrap_turn: 闭合时的回绕转角

    Returns:
        PiecewisePath
    """
    return PiecewisePath(tuple(float(L) for L in lengths), tuple(float(t) for t in turns),
                         closed, float(wrap_turn), start or _UP)


class ChainEstimate(NamedTuple):
    exact: float
    predicted: float
    residual: float


class _Chord(NamedTuple):
    length: float
    U: np.ndarray
    V: np.ndarray


def _chord(F: np.ndarray) -> _Chord:
    """F = U·diag(σ₁, σ₂)·Vᵀ，U、V ∈ SO(2)；弦长 = 2·log σ₁"""
    U, s, Vt = np.linalg.svd(F)
    V = Vt.T
    if np.linalg.det(U) < 0:
        flip = np.diag([1.0, -1.0])
        U, V = U @ flip, V @ flip
    return _Chord(2.0 * math.log(max(s[0], 1.0)), U, V)


def _open_length(p: PiecewisePath) -> float:
    F = p.end_frame()
    F = F / math.sqrt(abs(np.linalg.det(F)))
    # cosh d(i, F·i) = ‖F‖²/2
    return math.acosh(max(1.0, float(np.sum(F * F)) / 2.0))


def exact_length(p: PiecewisePath) -> float:
    """开路径：端点距离；闭路径：提升元素的平移长度"""
    if p.closed:
        return trace_length(p.holonomy().trace)
    return _open_length(p)


def _check_bound(what: str, est: ChainEstimate, bound: Optional[float], scale: float) -> ChainEstimate:
    if bound is not None and abs(est.residual) > bound + 1e-9 * max(1.0, scale):
        raise ChainBoundViolated(f"{what}残差 {est.residual:.6g} 超过上界 {bound:.6g}",
                                 exact=est.exact, predicted=est.predicted)
    return est


def close_chain(p: PiecewisePath, Q: float = 4.0, C_chain: Optional[float] = 10.0) -> ChainEstimate:
    """
    链引理：长弧小弯折路径的闭合长度约为弧长之和

    Args:
        p: 路径
        Q: 弧长下界
        C_chain: 残差上界常数；None 时只测量不校验

    Raises:
        ShortArc: 有弧短于 Q
        WideBend: 最大弯折 ≥ 1
        ChainBoundViolated: |残差| 超过 chain_bound(p, C_chain)
    """
    if min(p.lengths) < Q:
        raise ShortArc(f"弧长 {min(p.lengths):.4f} < Q = {Q}")
    if p.max_bend() >= MAX_BEND:
        raise WideBend(f"弯折 {p.max_bend():.4f} ≥ {MAX_BEND}")
    exact = exact_length(p)
    est = ChainEstimate(exact, p.total, exact - p.total)
    bound = chain_bound(p, C_chain) if C_chain is not None else None
    return _check_bound("链引理", est, bound, p.total)


def chain_bound(p: PiecewisePath, C_chain: float = 10.0) -> float:
    return C_chain * p.n * p.max_bend()


def close_right_angle_chain(p: PiecewisePath, Q: float = 4.0, C_ra: Optional[float] = 20.0) -> ChainEstimate:
    """
    直角链引理：每个直角接点损失 log 2

    Raises:
        ShortArc: 有弧短于 Q
        NotRightAngle: 有接点偏离直角超过 e^{−L}
        ChainBoundViolated: |残差| 超过 right_angle_bound(p, C_ra)
    """
    L = min(p.lengths)
    if L < Q:
        raise ShortArc(f"弧长 {L:.4f} < Q = {Q}")
    for b in p.bends():
        if abs(b - math.pi / 2.0) > math.exp(-L):
            raise NotRightAngle(f"接点角 {b:.6f} 偏离 π/2 超过 e^-L")
    joints = p.n if p.closed else p.n - 1
    exact = exact_length(p)
    predicted = p.total - joints * math.log(2.0)
    est = ChainEstimate(exact, predicted, exact - predicted)
    bound = right_angle_bound(p, C_ra) if C_ra is not None else None
    return _check_bound("直角链引理", est, bound, p.total)


def right_angle_bound(p: PiecewisePath, C_ra: float = 20.0) -> float:
    return C_ra * p.n * math.exp(-min(p.lengths))


def inefficiency(p: PiecewisePath) -> float:
    """I(α) = Σ 弧长 − 端点距离"""
    return max(0.0, p.total - _open_length(p))


def projection_excursion(p: PiecewisePath, step: float = 0.01) -> float:
    """
    路径到弦测地线段的最大距离（按 step 密集采样）

    Raises:
        DegenerateChord: 端点重合
    """
    chord = _chord(p.end_frame())
    if chord.length < 1e-9:
        raise DegenerateChord("路径端点重合，弦不存在")
    # 在 U⁻¹ 标架中弦是虚轴上的 [i, e^D·i]
    Uinv = chord.U.T
    best = 0.0
    for F, L in zip(p.arc_frames(), p.lengths):
        m = max(1, int(math.ceil(L / step)))
        G = Uinv @ F
        for k in range(m + 1):
            a, b, c, d = (G @ _advance(L * k / m)).ravel()
            z = (a * 1j + b) / (c * 1j + d)
            h = math.asinh(abs(z.real) / z.imag)
            t = math.log(abs(z))
            out = max(0.0, -t, t - chord.length)
            best = max(best, math.acosh(math.cosh(h) * math.cosh(out)))
    return best


class AngleEstimate(NamedTuple):
    measured: float
    bound: float


def terminal_angle_bound(alpha: PiecewisePath, beta_length: float, beta_turn: float = 0.0,
                         C_ang: float = 10.0) -> AngleEstimate:
    """
    αβ 的弦与 β 在公共终点处的夹角

    Args:
        alpha: 前段路径
        beta_length: 末段 β 的长度
        beta_turn: α 终点到 β 的转角
        C_ang: 估计常数

    Raises:
        TooShortTail: l(β) < I(αβ) + 1
    """
    ab = PiecewisePath(alpha.lengths + (float(beta_length),), alpha.turns + (float(beta_turn),))
    I = inefficiency(ab)
    if beta_length < I + 1.0:
        raise TooShortTail(f"l(β) = {beta_length:.4f} < I(αβ) + 1 = {I + 1.0:.4f}")
    chord = _chord(ab.end_frame())
    # 终点标架中起点位于 V·(e^{-D}·i)，从终点看向起点的方向为 V 作用于向下方向
    back = MoebiusTransform.from_array(chord.V).act_on_tangent(UnitTangent(ORIGIN, -math.pi / 2.0))
    measured = abs(_wrap(back.dir + math.pi - math.pi / 2.0))
    return AngleEstimate(measured, C_ang * math.exp(I - beta_length))


def three_arc_inefficiency(p: PiecewisePath, D1: float = 4.0, max_bend: float = 1.1) -> float:
    """
    三段路径的低效度，弯折不超过 1.1 时应不超过 D₁

    Raises:
        WideBend: 弯折超过 max_bend
        ChainBoundViolated: 低效度超过 D1
    """
    if p.n != 3:
        raise Degenerate("需要恰好三段")
    if p.max_bend() > max_bend + 1e-12:
        raise WideBend(f"弯折 {p.max_bend():.4f} > {max_bend}")
    I = inefficiency(p)
    if I > D1:
        raise ChainBoundViolated(f"三段低效度 {I:.4f} 超过 D1 = {D1}", lengths=p.lengths, turns=p.turns)
    return I


def calibrate_constants(lengths: Sequence[float] = (4.0, 6.0, 8.0, 10.0),
                        bends: Sequence[float] = (0.001, 0.01, 0.05, 0.1, 0.5),
                        safety: float = 2.0) -> Dict[str, float]:
    """
    在网格上最大化各估计的观测比值，乘以安全系数给出常数

    Returns:
        {"C_chain", "C_ra", "C_ang", "D1"} 的校准值
    """
    Q = min(lengths)
    worst = {"C_chain": 0.0, "C_ra": 0.0, "C_ang": 0.0, "D1": 0.0}
    for L, d in itertools.product(lengths, bends):
        for n in (2, 3, 4):
            for signs in ((1,) * (n - 1), tuple((-1) ** k for k in range(n - 1))):
                est = close_chain(chain_from_turns([L] * n, [s * d for s in signs]), Q=Q, C_chain=None)
                worst["C_chain"] = max(worst["C_chain"], abs(est.residual) / (n * d))
                right = chain_from_turns([L] * n, [s * math.pi / 2 for s in signs])
                ra = close_right_angle_chain(right, Q=Q, C_ra=None)
                worst["C_ra"] = max(worst["C_ra"], abs(ra.residual) / (n * math.exp(-L)))
        alpha = chain_from_turns([L, L], [d])
        try:
            ang = terminal_angle_bound(alpha, 2.0 * L, d, C_ang=1.0)
            worst["C_ang"] = max(worst["C_ang"], ang.measured / ang.bound)
        except TooShortTail:
            pass
    for L in lengths:
        for b1, b2 in itertools.product((-1.1, 1.1), repeat=2):
            worst["D1"] = max(worst["D1"], inefficiency(chain_from_turns([L, L, L], [b1, b2])))
    out = {k: safety * v for k, v in worst.items()}
    logger.info(f"链引理常数校准结果: {out}")
    return out
