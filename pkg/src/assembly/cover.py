"""
粘合与覆叠

多裤子的边界消去检验、脚的 Hall 配对（扭转目标 1）、粘合为覆叠复形、
约化 Fenchel–Nielsen 坐标与 (ε, R) 好性检验，以及修正 μ = N·(μ₁ − Φ(ν))。
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ..algebra.formal_algebra import FeetMeasure, FormalSum, delta_equivalent, linear_sum
from ..geometry.fuchsian import ConjClass, SurfaceGroup, oriented, reverse_class
from ..geometry.pants import (Pants, boundary, feet_boundary, free_boundary, good_pants_from_curve,
                              twist)
from ..homology.context import HomologyContext
from ..homology.omega import Phi
from ..utils.errors import (CannotCancel, MassMismatch, NegativeCoefficient, NotEven,
                            PairingFailed, PantsHomologyError, PhiUndefined)
from ..utils.helpers import write_json
from ..utils.logger import get_logger, log_performance

logger = get_logger(__name__)

Slot = Tuple[int, int]


@dataclass(frozen=True)
class AbstractPants:
    """不浸入 M 的抽象裤子，只记录三条袖口的半长"""
    halflengths: Tuple[float, float, float]
    label: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'halflengths': list(self.halflengths)}


@dataclass(frozen=True)
class Pairing:
    """两个袖口槽的粘合，twist ∈ [0, hl)"""
    first: Slot
    second: Slot
    hl: float
    twist: float
    cuff: Optional[ConjClass] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'first': list(self.first),
            'second': list(self.second),
            'hl': self.hl,
            'twist': self.twist,
            'cuff': list(self.cuff.rep) if self.cuff is not None else None,
        }


@dataclass
class CoverComplex:
    """
    粘合得到的覆叠复形

    Attributes:
        instances: 裤子实例（下标即实例编号）
        pairings: 每个袖口槽恰好出现一次
    """
    instances: List[Union[Pants, AbstractPants]]
    pairings: List[Pairing] = field(default_factory=list)

    @property
    def euler(self) -> int:
        return -len(self.instances)

    def slots(self) -> List[Slot]:
        return [s for p in self.pairings for s in (p.first, p.second)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'instances': [p.to_dict() for p in self.instances],
            'pairings': [p.to_dict() for p in self.pairings],
            'euler': self.euler,
        }


@dataclass(frozen=True)
class FNCoord:
    """约化 Fenchel–Nielsen 坐标 (hl, s)，s 约化到 [0, hl)"""
    cuff: Optional[Tuple[int, ...]]
    hl: float
    s: float

    def to_dict(self) -> Dict[str, Any]:
        return {'cuff': list(self.cuff) if self.cuff is not None else None, 'hl': self.hl, 's': self.s}


@dataclass
class HallPairing:
    """γ 上的脚与 γ̄ 上的脚的瓶颈匹配"""
    gamma: ConjClass
    pairs: List[Tuple[Slot, Slot, float]]
    max_deviation: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol + 1e-12


# ---------------------------------------------------------------- 多裤子


def instances_of(mu: FormalSum) -> List[Pants]:
    """
    按系数展开为实例列表（按规范键排序）

    Raises:
        NegativeCoefficient: 系数为负或不是整数
    """
    out: List[Pants] = []
    for p, c in sorted(mu.items(), key=lambda pc: repr(pc[0].key)):
        if c < 0 or c.denominator != 1:
            raise NegativeCoefficient(f"多裤子系数 {c} 不是非负整数")
        out.extend([p] * int(c))
    return out


def is_evenly_distributed(G: SurfaceGroup, mu: FormalSum) -> bool:
    """∂μ = 0（γ̄ = −γ）"""
    return boundary(G, mu).is_zero()


def twist_deviation(s: float, hl: float) -> float:
    """|s − 1| 在 R/hl·Z 中的距离"""
    return abs(math.remainder(s - 1.0, hl))


# ---------------------------------------------------------------- Hall 配对


def _bottleneck(dev: np.ndarray) -> Tuple[float, np.ndarray]:
    """最大偏差最小的完美匹配；返回 (瓶颈值, 每行匹配的列)"""
    values = np.unique(dev)
    lo, hi = 0, len(values) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        graph = csr_matrix((dev <= values[mid]).astype(np.int8))
        match = maximum_bipartite_matching(graph, perm_type='column')
        if np.all(match >= 0):
            best = (float(values[mid]), match)
            hi = mid - 1
        else:
            lo = mid + 1
    return best


def hall_pairing(G: SurfaceGroup, mu: FormalSum, gamma: ConjClass, eps: float, R: float,
                 instances: Optional[Sequence[Pants]] = None) -> HallPairing:
    """
    把 γ 上的脚与 γ̄ 上的脚一一配对，使每对的扭转尽量接近 1

    容差为 ε/R；达不到时仍返回瓶颈最优的匹配，由调用方判断。

    Raises:
        MassMismatch: 两侧脚的数目不等
    """
    instances = list(instances) if instances is not None else instances_of(mu)
    bar = reverse_class(G, gamma)
    left = [(i, s) for i, p in enumerate(instances) for s in p.slots(gamma)]
    right = [(i, s) for i, p in enumerate(instances) for s in p.slots(bar)]
    if len(left) != len(right):
        raise MassMismatch(f"γ 上 {len(left)} 只脚，γ̄ 上 {len(right)} 只脚", cuff=gamma.rep)
    tol = eps / R
    if not left:
        return HallPairing(gamma, [], 0.0, tol)
    hl = gamma.halflength
    S = np.array([[twist(G, instances[i], instances[j], gamma) for j, _ in right] for i, _ in left])
    dev = np.abs(np.remainder(S - 1.0 + hl / 2.0, hl) - hl / 2.0)
    value, match = _bottleneck(dev)
    pairs = [(left[a], right[int(b)], float(S[a, int(b)])) for a, b in enumerate(match)]
    result = HallPairing(gamma, pairs, value, tol)
    level = logger.debug if result.ok else logger.warning
    level(f"袖口 {list(gamma.rep)}: {len(pairs)} 对，最大扭转偏差 {value:.3g}（容差 {tol:.3g}）")
    return result


# ---------------------------------------------------------------- 粘合


def _canonical_cuffs(G: SurfaceGroup, instances: Sequence[Pants]) -> List[ConjClass]:
    seen: Dict[Tuple, ConjClass] = {}
    for p in instances:
        for c in p.cuffs:
            klass, _ = oriented(G, c)
            seen.setdefault(klass.key, klass)
    return [seen[k] for k in sorted(seen)]


@log_performance
def glue(G: SurfaceGroup, mu: FormalSum, eps: float, R: float,
         require_tol: bool = True) -> CoverComplex:
    """
    把边界消去的多裤子粘合为覆叠复形（可以不连通）

    Args:
        require_tol: 扭转偏差超过 ε/R 时是否报错

    Raises:
        NotEven: ∂μ ≠ 0
        PairingFailed: 某条袖口的配对偏差超过容差
    """
    if not is_evenly_distributed(G, mu):
        raise NotEven("多裤子的边界不为零")
    instances = instances_of(mu)
    complex_ = CoverComplex(list(instances))
    for gamma in _canonical_cuffs(G, instances):
        hp = hall_pairing(G, mu, gamma, eps, R, instances)
        if require_tol and not hp.ok:
            raise PairingFailed(f"袖口 {list(gamma.rep)} 的扭转偏差 {hp.max_deviation:.3g} 超过 {hp.tol:.3g}")
        for a, b, s in hp.pairs:
            complex_.pairings.append(Pairing(a, b, gamma.halflength, s, gamma))
    logger.info(f"粘合完成: {len(instances)} 条裤子，{len(complex_.pairings)} 次粘合")
    return complex_


def fn_coords(c: CoverComplex) -> List[FNCoord]:
    """每条粘合袖口的 (hl, s)"""
    return [FNCoord(p.cuff.rep if p.cuff is not None else None, p.hl, p.twist % p.hl)
            for p in c.pairings]


def verify_good(c: CoverComplex, eps: float, R: float) -> Dict[str, Any]:
    """
    逐条袖口检验 |hl − R| < ε 与 |s − 1| < ε/R

    Returns:
        {ok, cuffs, violations, max_hl_dev, max_twist_dev}
    """
    violations = []
    hl_devs, s_devs = [0.0], [0.0]
    for i, fn in enumerate(fn_coords(c)):
        dh, ds = abs(fn.hl - R), twist_deviation(fn.s, fn.hl)
        hl_devs.append(dh)
        s_devs.append(ds)
        if dh >= eps:
            violations.append({'pairing': i, 'kind': 'hl', 'deviation': dh})
        if ds >= eps / R:
            violations.append({'pairing': i, 'kind': 'twist', 'deviation': ds})
    return {
        'ok': not violations,
        'cuffs': len(c.pairings),
        'violations': violations,
        'max_hl_dev': max(hl_devs),
        'max_twist_dev': max(s_devs),
    }


def recompute_twists(G: SurfaceGroup, c: CoverComplex) -> float:
    """存储扭转与重新计算的 twist(Π, σΠ, γ) 的最大差"""
    worst = 0.0
    for p in c.pairings:
        a, b = c.instances[p.first[0]], c.instances[p.second[0]]
        s = twist(G, a, b, p.cuff)
        worst = max(worst, abs(math.remainder(s - p.twist, p.hl)))
    return worst


def cover_degree(c: CoverComplex, G: SurfaceGroup) -> Fraction:
    """χ(复形)/χ(M) = 裤子数/(2g − 2)"""
    return Fraction(len(c.instances), 2 * G.genus - 2)


def cover_components(c: CoverComplex) -> List[List[int]]:
    """按粘合关系划分的连通分支"""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(c.instances)))
    graph.add_edges_from((p.first[0], p.second[0]) for p in c.pairings)
    return sorted(sorted(comp) for comp in nx.connected_components(graph))


def model_surface(R: float) -> CoverComplex:
    """两片 hl = (R, R, R) 的裤子以扭转 1 沿三条袖口粘合的亏格 2 曲面"""
    pants = [AbstractPants((R, R, R), 'Π_R'), AbstractPants((R, R, R), 'σΠ_R')]
    pairings = [Pairing((0, i), (1, i), R, 1.0 % R) for i in range(3)]
    return CoverComplex(pants, pairings)


def export_cover(c: CoverComplex, G: SurfaceGroup, path: Union[str, Path],
                 eps: Optional[float] = None, R: Optional[float] = None) -> Path:
    """写出 {instances, pairings, fn_coords, euler, components, degree[, goodness]}"""
    data = c.to_dict()
    data['fn_coords'] = [fn.to_dict() for fn in fn_coords(c)]
    data['components'] = cover_components(c)
    data['degree'] = str(cover_degree(c, G))
    if eps is not None and R is not None:
        data['goodness'] = verify_good(c, eps, R)
    return write_json(data, path)


# ---------------------------------------------------------------- 均匀输入与修正


def doubled_pants(G: SurfaceGroup, pants: Pants, eps: float, R: float, max_steps: int = 16) -> FormalSum:
    """
    从 Π 出发贪心地加入枚举到的好裤子，直到边界完全消去

    每一步取键最小的未消去曲线，从以其反向为袖口的好裤子中选使剩余边界 l¹ 范数最小者。

    Raises:
        CannotCancel: 候选为空或步数用尽
    """
    terms: Dict[Pants, int] = {pants: 1}
    pools: Dict[Tuple, List[Pants]] = {}
    for _ in range(max_steps):
        mu = FormalSum(terms)
        rest = boundary(G, mu)
        if rest.is_zero():
            logger.info(f"边界消去完成: {sum(terms.values())} 条裤子")
            return mu
        klass, c = min(rest.items(), key=lambda kc: kc[0].key)
        target = reverse_class(G, klass) if c > 0 else klass
        if target.key not in pools:
            pools[target.key] = good_pants_from_curve(G, target, eps, R)
        candidates = pools[target.key]
        if not candidates:
            raise CannotCancel(f"没有以 {list(target.rep)} 为袖口的好裤子")
        best = min(candidates, key=lambda p: ((rest + boundary(G, FormalSum.single(p))).l1(), repr(p.key)))
        terms[best] = terms.get(best, 0) + 1
    raise CannotCancel(f"{max_steps} 步内未能消去边界")


@dataclass
class Correction:
    """μ = N·(μ₁ − Φ(ν)) 及其报告"""
    result: FormalSum
    nu: FormalSum
    N: int
    evenly_distributed: bool
    negative: int
    max_phi: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {
            'N': self.N,
            'nu_support': len(self.nu),
            'evenly_distributed': self.evenly_distributed,
            'negative_coefficients': self.negative,
            'max_phi_coefficient': str(self.max_phi),
            'pants': len(self.result),
        }


def correct_multipants(ctx: HomologyContext, mu1: FormalSum, N: Optional[int] = None) -> Correction:
    """
    μ₂ = μ₁ − Φ(ν)，ν = ∂μ₁；μ = N·μ₂，N 缺省为 μ₂ 的最小公分母

    负系数只报告，不截断。

    Raises:
        PhiUndefined: Φ 在 ν 的某条曲线上构造失败
    """
    G = ctx.G
    nu = free_boundary(G, mu1)
    parts = []
    for gamma, c in sorted(nu.items(), key=lambda kc: kc[0].key):
        try:
            parts.append(Phi(ctx, gamma).scale(c))
        except PantsHomologyError as exc:
            raise PhiUndefined(f"Φ 在 {list(gamma.rep)} 上无定义: {exc}", code=exc.code) from exc
    phi_nu = linear_sum(parts)
    mu2 = mu1 - phi_nu
    N = N if N is not None else mu2.denominator()
    result = mu2.scale(N)
    even = free_boundary(G, result).is_zero()
    negative = sum(1 for _, v in result.items() if v < 0)
    max_phi = max((abs(v) for _, v in phi_nu.items()), default=Fraction(0))
    if negative:
        logger.warning(f"修正后有 {negative} 个负系数")
    logger.info(f"修正: |ν| = {len(nu)}，N = {N}，边界为零: {even}，max|Φ(ν)(Π)| = {float(max_phi):.4g}")
    return Correction(result, nu, N, even, negative, max_phi)


def equidistribution_statistic(mu: FormalSum, gamma: ConjClass, iterations: int = 40) -> float:
    """
    使 ∂̂_γμ 与等质量常密度测度 δ 等价的最小 δ（二分）

    常密度测度以与原子数相同个数的等距原子离散化。

    Raises:
        NegativeCoefficient: μ 有负系数
    """
    m = feet_boundary(mu, gamma)
    n = len(m.atoms)
    if n == 0:
        return 0.0
    total = m.total()
    uniform = FeetMeasure.build(m.cuff, m.hl, [(k * m.hl / n, total / n) for k in range(n)])
    lo, hi = 0.0, m.hl
    if not delta_equivalent(m, uniform, hi):
        return math.inf
    for _ in range(iterations):
        mid = (lo + hi) / 2.0
        if delta_equivalent(m, uniform, mid):
            hi = mid
        else:
            lo = mid
    return hi
