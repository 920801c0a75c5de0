"""
同调构造的上下文

固定基点处的向量 v、锚向量 u 与辅助向量 v₀，以及各构造共享的有效随机元素备忘、
连接集的放宽枚举和放宽记录。同一上下文中，同一段弧在不同构造里总是得到同一个随机元素，
边界恒等式因此在形式和层面精确成立。
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type

from ..algebra.formal_algebra import FormalSum, floor_exp_2R, random_element
from ..config.settings import HomologyConfig
from ..geometry.connections import L_of, GeodesicArc, enumerate_window, make_arc, reverse_arc
from ..geometry.fuchsian import SurfaceGroup, Word, free_reduce, invert_word, word_key
from ..geometry.hyperbolic_core import PointH, UnitTangent, angle_gap, reverse, rotate, shoot
from ..geometry.pants import curve_sum
from ..utils.errors import CapExceeded, PantsHomologyError
from ..utils.helpers import derive_seed
from ..utils.logger import get_logger, log_function_call

logger = get_logger(__name__)


@dataclass
class HomologyContext:
    """
    构造所需的全部固定数据

    Attributes:
        G: 曲面群
        v: 基点 o 处选定的向量
        e: 从 o 出发、初始方向 −v、长度 L(ε³) 的弧 e^{−L(ε³)v}
        u: e 在终点 y 处的终端切向量（窄连接的锚）
        v0: y 处的辅助向量
        N: ⌊e^{2R}⌋
        ledger: 放宽与越界记录
    """
    G: SurfaceGroup
    config: HomologyConfig
    v: UnitTangent
    e: GeodesicArc
    u: UnitTangent
    v0: UnitTangent
    N: int
    ledger: List[Dict[str, Any]] = field(default_factory=list)
    _memo: Dict[Tuple, Any] = field(default_factory=dict, repr=False)

    @classmethod
    @log_function_call
    def build(cls, G: SurfaceGroup, config: Optional[HomologyConfig] = None,
              v_dir: Optional[float] = None) -> "HomologyContext":
        """
        由配置构造上下文；v_dir 缺省取 config.v_dir，二者都为空时网格搜索 v

        Args:
            G: 曲面群
            config: 构造参数
            v_dir: v 的方向角
        """
        config = config or HomologyConfig()
        if v_dir is None:
            v_dir = config.v_dir
        if v_dir is None:
            from .dichotomy import choose_v
            v_dir = choose_v(G, config).dir
        v = UnitTangent(G.basepoint, v_dir)
        L3 = L_of(config.eps ** 3, G)
        y = shoot(reverse(v), L3).base
        k_word, k, y_red = G.reduce_point(y)
        e = make_arc(G, k_word, G.basepoint, PointH.from_complex(y_red), k)
        u = e.term_dir
        v0 = rotate(u, config.v0_offset)
        ctx = cls(G, config, v, e, u, v0, floor_exp_2R(config.R))
        logger.info(f"同调上下文: ε = {config.eps}，R = {config.R}，v 方向 {v_dir:.4f}，"
                    f"L(ε³) = {L3:.4f}，relaxed = {config.relaxed}")
        return ctx

    # 常用量

    @property
    def eps(self) -> float:
        return self.config.eps

    @property
    def R(self) -> float:
        return self.config.R

    @property
    def relaxed(self) -> bool:
        return self.config.relaxed

    @property
    def y(self) -> PointH:
        return self.u.base

    @property
    def L2(self) -> float:
        return L_of(self.eps ** 2, self.G)

    @property
    def L3(self) -> float:
        return L_of(self.eps ** 3, self.G)

    def note(self, kind: str, **details: Any) -> None:
        """记录一次放宽或越界"""
        self.ledger.append({'kind': kind, **details})
        logger.debug(f"放宽记录 {kind}: {details}")

    def check(self, ok: bool, error: Type[PantsHomologyError], message: str, **details: Any) -> None:
        """严格模式下违反即抛出，放宽模式下记入 ledger"""
        if ok:
            return
        if not self.relaxed:
            raise error(message, **details)
        self.note(error.code, message=message, **details)

    def memo(self, key: Tuple, build: Callable[[], Any]) -> Any:
        if key not in self._memo:
            self._memo[key] = build()
        return self._memo[key]

    # 弧与曲线

    def loop(self, *words: Sequence[int]) -> GeodesicArc:
        """y 处的闭弧 [w₁w₂⋯]"""
        w = free_reduce(tuple(x for part in words for x in part))
        return self.memo(('loop', w), lambda: make_arc(self.G, w, self.y, self.y))

    def curve(self, *words: Sequence[int], coeff: Any = 1) -> FormalSum:
        """闭曲线 [w₁w₂⋯] 的形式和"""
        return curve_sum(self.G, tuple(x for part in words for x in part), coeff)

    # 连接集

    def connections(self, tag: str, src: UnitTangent, dst: UnitTangent, eps: float, L: float,
                    error: Type[PantsHomologyError], cap: int) -> List[GeodesicArc]:
        """
        Conn_{eps,L}(src, dst) 中最接近目标的至多 cap 条弧

        放宽模式下：目标长度低于 L(ε²) 时抬到 L(ε²)，超过上限时压到上限；
        集合为空时把角度与长度容差逐次加倍（角度不超过 π）。

        Raises:
            error: 放宽后仍为空
            CapExceeded: 严格模式下长度超过上限
        """
        G = self.G
        target = L
        if self.relaxed and target < self.L2:
            self.note('clamp_low', tag=tag, target=L, used=self.L2)
            target = self.L2
        ang, tol = eps, eps
        if target + tol > G.hard_cap:
            if not self.relaxed:
                raise CapExceeded(f"{tag} 的目标长度 {target:.3f} 超过上限 {G.hard_cap}")
            self.note('clamp_high', tag=tag, target=target, used=G.hard_cap - tol)
            target = G.hard_cap - tol
        arcs = enumerate_window(G, src, dst, ang, target - tol, target + tol)
        while not arcs and self.relaxed and (ang < math.pi or target + tol < G.hard_cap):
            ang = min(2.0 * ang, math.pi)
            tol = min(2.0 * tol, G.hard_cap - target)
            self.note('widen', tag=tag, angle=ang, length_tol=tol)
            arcs = enumerate_window(G, src, dst, ang, max(0.0, target - tol), target + tol)
        if not arcs:
            raise error(f"{tag}: Conn 为空（目标长度 {target:.3f}）")

        def score(a: GeodesicArc) -> Tuple:
            defect = float(angle_gap(a.init_dir.dir, src.dir)) + float(angle_gap(a.term_dir.dir, dst.dir))
            return (round(abs(a.length - target) + defect, 9), word_key(a.word))

        return sorted(arcs, key=score)[:cap]

    def random(self, key: Tuple, build: Callable[[], List[GeodesicArc]]) -> FormalSum:
        """备忘的有效随机元素；种子由主种子与键派生"""
        def make() -> FormalSum:
            arcs = build()
            return random_element(arcs, self.eps ** 2, self.R, derive_seed(self.config.seed, *_plain(key)),
                                  N=self.N)
        return self.memo(('random',) + key, make)


def _plain(key: Tuple) -> List[Any]:
    out = []
    for x in key:
        if isinstance(x, (tuple, list)):
            out.append(_plain(tuple(x)))
        elif isinstance(x, (int, float, str)) or x is None:
            out.append(x)
        else:
            out.append(repr(x))
    return out


def pair_key(word: Word) -> Word:
    """{w, w⁻¹} 的规范代表，供 R(Ā) = −R(A) 共享随机元素"""
    inv = invert_word(word)
    return word if word_key(word) <= word_key(inv) else inv


def as_sum(x: Any) -> FormalSum:
    """单条弧视为系数 1 的形式和"""
    return x if isinstance(x, FormalSum) else FormalSum({x: 1})


def bar(x: Any) -> Any:
    """弧或弧的形式和的反向"""
    if isinstance(x, FormalSum):
        return x.map_keys(reverse_arc)
    return reverse_arc(x)
