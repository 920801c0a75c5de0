"""
曲面群

闭双曲曲面的基本群 G = π₁(M, *)，同时以矩阵和字两种形式表示：
自由约化与循环约化、共轭判定、阿贝尔化、基本多边形中的 Dirichlet 约化、
按区域剪枝的元素枚举，以及通过轴线穿越边序列给闭测地线规范化。
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from ..utils.errors import (BadRelator, CapExceeded, CrossCheckFailed,
                            NonHyperbolicGenerator, NotHyperbolic)
from ..utils.logger import get_logger, log_performance
from .hyperbolic_core import (MINKOWSKI, ORIGIN, Geodesic, MoebiusTransform, dist, dist_many,
                              direction_to, directions_many,
                              PointH, axis, rotation_about_i, to_hyperboloid,
                              trace_length)

logger = get_logger(__name__)

Word = Tuple[int, ...]
IDENTITY_WORD: Word = ()

# 超循环偏移，避免轴线恰好穿过多边形顶点
ETA = 1e-5


# ---------------------------------------------------------------- 字运算


def letter_key(letter: int) -> Tuple[int, int]:
    """字母序：1 < −1 < 2 < −2 < ..."""
    return (abs(letter), 0 if letter > 0 else 1)


def word_key(w: Sequence[int]) -> Tuple[Tuple[int, int], ...]:
    return tuple(letter_key(x) for x in w)


def free_reduce(w: Iterable[int]) -> Word:
    """消去相邻的互逆字母对"""
    out: List[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert_word(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*words: Sequence[int]) -> Word:
    """拼接并自由约化"""
    out: List[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def cyclic_reduce_with_conjugator(w: Sequence[int]) -> Tuple[Word, Word]:
    """
    循环约化

    Returns:
        (c, u)，其中 u 循环约化且 w = u·c·u⁻¹（作为自由群元素）
    """
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1]), tuple(w[:i])


def cyclic_reduce(w: Sequence[int]) -> Word:
    return cyclic_reduce_with_conjugator(w)[0]


def minimal_rotation_index(w: Sequence[int]) -> int:
    n = len(w)
    if n == 0:
        return 0
    keys = word_key(w)
    return min(range(n), key=lambda i: keys[i:] + keys[:i])


def minimal_period(w: Sequence[int]) -> int:
    """最小循环周期：整除 len(w) 且 w 旋转 p 位后不变的最小 p"""
    n = len(w)
    w = tuple(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[p:] + w[:p] == w:
            return p
    return n


def cyclic_key(w: Sequence[int]) -> Word:
    """自由群共轭类的规范代表：循环约化后的最小旋转"""
    c = cyclic_reduce(w)
    r = minimal_rotation_index(c)
    return tuple(c[r:] + c[:r])


def are_conjugate(w1: Sequence[int], w2: Sequence[int]) -> bool:
    """自由群中的共轭判定（循环约化后互为旋转）"""
    return cyclic_key(w1) == cyclic_key(w2)


def abelianize(w: Sequence[int], rank: int) -> Tuple[int, ...]:
    """指数和向量"""
    v = [0] * rank
    for x in w:
        v[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(v)


def word_length(w: Sequence[int]) -> int:
    return len(free_reduce(w))


# ---------------------------------------------------------------- 双曲面作用


def rho(g: MoebiusTransform) -> np.ndarray:
    """PSL(2,R) 在双曲面模型上的 SO⁺(2,1) 表示"""
    m = g.as_array()
    out = np.empty((3, 3))
    for k, e in enumerate(np.eye(3)):
        s = np.array([[e[0] + e[1], e[2]], [e[2], e[0] - e[1]]])
        s2 = m @ s @ m.T
        out[:, k] = ((s2[0, 0] + s2[1, 1]) / 2.0, (s2[0, 0] - s2[1, 1]) / 2.0, s2[0, 1])
    return out


def from_hyperboloid(X: np.ndarray) -> complex:
    y = 1.0 / (X[0] - X[1])
    return complex(X[2] * y, y)


def _boost(t: float) -> np.ndarray:
    c, s = math.cosh(t), math.sinh(t)
    return np.array([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _dilation(t: float) -> MoebiusTransform:
    return MoebiusTransform(math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0))


# ---------------------------------------------------------------- 曲面群


@dataclass(frozen=True)
class SurfaceGroup:
    """
    闭曲面群

    生成元 g₁..g_{2g} 与其逆按顺序给出以基点为中心的 Dirichlet 多边形的边配对：
    边 j < 2g 对应 g_{j+1}，边 j ≥ 2g 对应 g_{j−2g+1}⁻¹。
    """
    genus: int
    generators: Tuple[MoebiusTransform, ...]
    relator: Word
    basepoint: PointH = ORIGIN
    q0: float = 1.0
    L0: float = 2.0
    tol_matrix: float = 1e-9
    tol_cross_check: float = 1e-6
    orbit_tol: float = 0.1
    hard_cap: float = 14.0
    slack: float = 2.5
    max_elements: int = 2_000_000

    @property
    def rank(self) -> int:
        return len(self.generators)

    def generator(self, letter: int) -> MoebiusTransform:
        g = self.generators[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def evaluate(self, w: Sequence[int]) -> MoebiusTransform:
        """字对应的矩阵"""
        m = np.eye(2)
        for x in w:
            m = m @ self._letter_arrays[x]
        return MoebiusTransform.from_array(m)

    @cached_property
    def _letter_arrays(self) -> Dict[int, np.ndarray]:
        out = {}
        for i in range(1, self.rank + 1):
            out[i] = self.generator(i).as_array()
            out[-i] = self.generator(-i).as_array()
        return out

    # 多边形数据

    @cached_property
    def side_letters(self) -> Word:
        n = self.rank
        return tuple(list(range(1, n + 1)) + [-(k + 1) for k in range(n)])

    @cached_property
    def side_arrays(self) -> np.ndarray:
        return np.stack([self._letter_arrays[x] for x in self.side_letters])

    @cached_property
    def origin_vector(self) -> np.ndarray:
        return to_hyperboloid(self.basepoint)

    @cached_property
    def side_normals(self) -> np.ndarray:
        """D_j = W_j − O，使 z 比 o 更接近 s_j(o) 当且仅当 ⟨X(z), D_j⟩ > 0"""
        o = self.basepoint.z
        ws = [to_hyperboloid(self.generator(x).apply(o)) for x in self.side_letters]
        return np.stack([w - self.origin_vector for w in ws])

    @cached_property
    def side_rho_inverse(self) -> List[np.ndarray]:
        return [rho(self.generator(x).inverse()) for x in self.side_letters]

    @cached_property
    def vertices(self) -> List[complex]:
        """Dirichlet 多边形顶点（按相邻边的方向排序）"""
        o = self.basepoint
        order = sorted(range(len(self.side_letters)),
                       key=lambda j: _direction_angle(o, self.generator(self.side_letters[j]).apply(o.z)))
        normals = self.side_normals
        out = []
        for a, b in zip(order, order[1:] + order[:1]):
            X = np.cross(MINKOWSKI @ normals[a], MINKOWSKI @ normals[b])
            q = float(X @ MINKOWSKI @ X)
            if q >= 0:
                continue
            X = X / math.sqrt(-q)
            if X[0] < 0:
                X = -X
            out.append(from_hyperboloid(X))
        return out

    @cached_property
    def circumradius(self) -> float:
        o = to_hyperboloid(self.basepoint)
        return max(math.acosh(max(1.0, -float(to_hyperboloid(v) @ MINKOWSKI @ o))) for v in self.vertices)

    @cached_property
    def inradius(self) -> float:
        o = self.basepoint.z
        return min(dist(o, self.generator(x).apply(o)) for x in self.side_letters) / 2.0

    @property
    def effective_slack(self) -> float:
        return max(self.slack, self.circumradius + 0.05)

    # 约化

    def reduce_point(self, z: Union[PointH, complex], max_steps: int = 10_000) -> Tuple[Word, MoebiusTransform, complex]:
        """
        Dirichlet 约化：z = k·z_red，z_red 位于基本多边形内

        Returns:
            (k 的字, k 的矩阵, z_red)
        """
        z = z.z if isinstance(z, PointH) else z
        X = to_hyperboloid(z)
        letters: List[int] = []
        normals_j = self.side_normals @ MINKOWSKI
        for _ in range(max_steps):
            vals = normals_j @ X
            j = int(np.argmax(vals))
            if vals[j] <= 1e-12 * max(1.0, abs(X[0])):
                break
            X = self.side_rho_inverse[j] @ X
            letters.append(self.side_letters[j])
        else:
            raise CapExceeded("Dirichlet 约化未收敛", z=z)
        w = free_reduce(letters)
        return w, self.evaluate(w), from_hyperboloid(X)


def _direction_angle(p: PointH, q: complex) -> float:
    return direction_to(p, PointH.from_complex(q))


# ---------------------------------------------------------------- 加载


def bolza_generators() -> List[MoebiusTransform]:
    """正八边形曲面的四个生成元 g_k = R(kπ/4)·T·R(kπ/4)⁻¹"""
    a = 1.0 + math.sqrt(2.0)
    b = math.sqrt(2.0 + 2.0 * math.sqrt(2.0))
    T = MoebiusTransform(a, b, b, a)
    gens = []
    for k in range(4):
        r = rotation_about_i(k * math.pi / 4.0)
        gens.append(r @ T @ r.inverse())
    return gens

BOLZA_RELATOR: Word = (1, 4, -3, 2, -1, -4, 3, -2)


def load_surface(config: Union[None, str, Path, Mapping[str, Any]] = None, **overrides: Any) -> SurfaceGroup:
    """
    加载曲面群并校验不变量

    Args:
        config: 曲面 YAML 文件路径或已解析的字典；None 或 builtin: bolza 使用内置曲面
        overrides: 额外的 SurfaceGroup 字段（容差、上限等）

    Returns:
        校验通过的 SurfaceGroup

    Raises:
        BadRelator: 关系子不是 ±单位
        NonHyperbolicGenerator: 生成元 |trace| ≤ 2
    """
    if isinstance(config, (str, Path)):
        with open(config, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f) or {}
    else:
        data = dict(config or {})

    if not data.get("generators") or data.get("builtin") == "bolza":
        gens = bolza_generators()
        relator = tuple(data.get("relator") or BOLZA_RELATOR)
        genus = 2
    else:
        gens = [MoebiusTransform.from_array(m) for m in data["generators"]]
        relator = tuple(int(x) for x in data.get("relator", ()))
        genus = int(data.get("genus", len(gens) // 2))

    basepoint = ORIGIN
    if data.get("basepoint"):
        basepoint = PointH(float(data["basepoint"][0]), float(data["basepoint"][1]))

    kwargs = dict(genus=genus, generators=tuple(gens), relator=relator, basepoint=basepoint,
                  q0=float(data.get("q0", 1.0)), L0=float(data.get("L0", 2.0)))
    kwargs.update(overrides)
    G = SurfaceGroup(**kwargs)

    if len(gens) != 2 * genus:
        raise BadRelator(f"亏格 {genus} 需要 {2 * genus} 个生成元，实际 {len(gens)}")
    for i, g in enumerate(gens, start=1):
        if abs(g.trace) <= 2.0 + G.tol_matrix:
            raise NonHyperbolicGenerator(f"生成元 {i} 的 |trace| = {abs(g.trace):.6f} ≤ 2")
    if not relator or not G.evaluate(relator).close_to(MoebiusTransform.identity(), G.tol_matrix * 100):
        raise BadRelator("关系子在数值上不等于单位元", relator=relator)

    logger.info(f"曲面加载完成: 亏格 {genus}，外接半径 {G.circumradius:.4f}，内切半径 {G.inradius:.4f}")
    return G


# ---------------------------------------------------------------- 枚举


@dataclass
class ElementTable:
    """枚举结果：字、矩阵 (N,2,2)、基点像 (N,)"""
    words: List[Word]
    mats: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.words)

    def items(self) -> List[Tuple[Word, MoebiusTransform]]:
        return [(w, MoebiusTransform.from_array(m)) for w, m in zip(self.words, self.mats)]

    def subset(self, mask: np.ndarray) -> "ElementTable":
        idx = np.nonzero(mask)[0]
        return ElementTable([self.words[i] for i in idx], self.mats[idx], self.points[idx])

    def sorted(self) -> "ElementTable":
        order = sorted(range(len(self.words)), key=lambda i: (len(self.words[i]), word_key(self.words[i])))
        return ElementTable([self.words[i] for i in order], self.mats[order], self.points[order])


def normalize_batch(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1, 4)
    det = flat[:, 0] * flat[:, 3] - flat[:, 1] * flat[:, 2]
    flat = flat / np.sqrt(det)[:, None]
    first = np.argmax(np.abs(flat) > 1e-12, axis=1)
    sign = np.sign(flat[np.arange(len(flat)), first])
    sign[sign == 0] = 1.0
    return (flat * sign[:, None]).reshape(-1, 2, 2)


class OrbitIndex:
    """
    上半平面点集的网格索引，按双曲距离判重

    群无挠，基点轨道一致离散，因此 g·o 唯一决定 g。网格按 log y 分行，
    每行按与高度成比例的宽度分列，距离小于 tol 的两点必落在相邻格子内。
    """

    def __init__(self, tol: float = 0.1, cell: float = 0.5):
        self.tol = tol
        self.cell = cell
        self._bound = 2.0 * (math.cosh(tol) - 1.0)
        self._cells: Dict[Tuple[int, int], List[complex]] = defaultdict(list)
        self.size = 0

    def _row(self, z: complex) -> int:
        return math.floor(math.log(z.imag) / self.cell)

    def _col(self, z: complex, row: int) -> int:
        return math.floor(z.real / (math.exp(row * self.cell) * self.cell))

    def __contains__(self, z: complex) -> bool:
        row = self._row(z)
        for r in (row - 1, row, row + 1):
            col = self._col(z, r)
            for c in (col - 1, col, col + 1):
                for w in self._cells.get((r, c), ()):
                    if abs(z - w) ** 2 < self._bound * z.imag * w.imag:
                        return True
        return False

    def add(self, z: complex) -> bool:
        """加入新点；已有距离小于 tol 的点时返回 False"""
        z = complex(z)
        if z in self:
            return False
        row = self._row(z)
        self._cells[(row, self._col(z, row))].append(z)
        self.size += 1
        return True

    def __len__(self) -> int:
        return self.size


def tile_bfs(G: SurfaceGroup, lower_bound: Callable[[np.ndarray], np.ndarray],
             start: Optional[Tuple[Word, MoebiusTransform]] = None,
             margin: float = 0.05) -> ElementTable:
    """
    按区域剪枝的铺砌广度优先搜索

    区域由 lower_bound(中心点数组) 给出：瓦片中心到区域距离的下界。
    保留并展开下界不超过外接半径 + margin 的瓦片。

    Args:
        G: 曲面群
        lower_bound: 向量化的距离下界函数
        start: 起始瓦片（默认单位元）
        margin: 浮点余量

    Returns:
        所有保留的瓦片
    """
    limit = G.circumradius + margin
    o = G.basepoint.z
    w0, g0 = start if start is not None else (IDENTITY_WORD, MoebiusTransform.identity())
    m0 = g0.as_array()[None]
    p0 = np.array([g0.apply(o)])
    seen = OrbitIndex(G.orbit_tol)
    seen.add(complex(p0[0]))
    words: List[Word] = [w0]
    mats: List[np.ndarray] = [m0]
    points: List[np.ndarray] = [p0]
    frontier_words, frontier_m = [w0], m0
    sides = G.side_arrays
    letters = G.side_letters
    total = 1
    while len(frontier_words):
        cand = np.einsum('nij,sjk->nsik', frontier_m, sides).reshape(-1, 2, 2)
        cand = normalize_batch(cand)
        pts = (cand[:, 0, 0] * o + cand[:, 0, 1]) / (cand[:, 1, 0] * o + cand[:, 1, 1])
        keep = lower_bound(pts) <= limit
        idx = np.nonzero(keep)[0]
        new_words, new_rows = [], []
        nsides = len(letters)
        for i in idx:
            if not seen.add(pts[i]):
                continue
            parent, side = divmod(int(i), nsides)
            pw = frontier_words[parent]
            x = letters[side]
            new_words.append(pw[:-1] if pw and pw[-1] == -x else pw + (x,))
            new_rows.append(i)
        total += len(new_words)
        if total > G.max_elements:
            raise CapExceeded(f"枚举元素数超过上限 {G.max_elements}")
        if not new_words:
            break
        rows = np.array(new_rows)
        frontier_words, frontier_m = new_words, cand[rows]
        words.extend(new_words)
        mats.append(frontier_m)
        points.append(pts[rows])
    return ElementTable(words, np.concatenate(mats), np.concatenate(points))


def ball_bound(center: complex, radius: float) -> Callable[[np.ndarray], np.ndarray]:
    def bound(pts: np.ndarray) -> np.ndarray:
        return dist_many(center, pts) - radius
    return bound


def sector_bound(apex: complex, direction: float, half_angle: float, radius: float) -> Callable[[np.ndarray], np.ndarray]:
    """以 apex 为顶点、方向 direction、半角 half_angle、半径 radius 的测地扇形"""
    def bound(pts: np.ndarray) -> np.ndarray:
        d = dist_many(apex, pts)
        phi = np.abs(np.angle(np.exp(1j * (directions_many(apex, pts) - direction))))
        theta = phi - half_angle
        side = np.where(theta >= math.pi / 2, d,
                        np.where(theta <= 0, 0.0, np.arcsinh(np.sinh(d) * np.sin(np.clip(theta, 0, math.pi / 2)))))
        return np.maximum(d - radius, side)
    return bound


def tube_bound(geo: Geodesic, t1: float, t2: float, width: float) -> Callable[[np.ndarray], np.ndarray]:
    """测地线段 [t1, t2] 的 width 邻域"""
    m = geo.standardizer()

    def bound(pts: np.ndarray) -> np.ndarray:
        w = (m.a * pts + m.b) / (m.c * pts + m.d)
        h = np.arcsinh(np.abs(w.real) / w.imag)
        s = np.log(np.abs(w))
        out = np.maximum(0.0, np.maximum(t1 - s, s - t2))
        return np.arccosh(np.cosh(h) * np.cosh(out)) - width
    return bound


def cross_check(G: SurfaceGroup, table: ElementTable, sample: int = 2000, seed: int = 0) -> None:
    """
    用字重新计算矩阵，与枚举矩阵比较

    Raises:
        CrossCheckFailed: 相对误差超过 tol_cross_check
    """
    n = len(table)
    if n == 0:
        return
    rng = np.random.default_rng(seed)
    idx = np.arange(n) if n <= sample else rng.choice(n, size=sample, replace=False)
    for i in idx:
        recomputed = G.evaluate(table.words[i]).as_array()
        scale = max(1.0, float(np.abs(table.mats[i]).max()))
        err = float(np.abs(recomputed - table.mats[i]).max()) / scale
        if err > G.tol_cross_check:
            raise CrossCheckFailed(f"元素 {table.words[i]} 矩阵偏差 {err:.3e}")


@log_performance
def element_table(G: SurfaceGroup, max_disp: float, check: bool = True) -> ElementTable:
    """满足 dist(o, g·o) ≤ max_disp 的全部元素（数组形式）"""
    if max_disp > G.hard_cap:
        raise CapExceeded(f"max_disp = {max_disp} 超过上限 {G.hard_cap}")
    o = G.basepoint.z
    table = tile_bfs(G, ball_bound(o, max_disp + G.effective_slack - G.circumradius - 0.05))
    table = table.subset(dist_many(o, table.points) <= max_disp + 1e-12).sorted()
    if check:
        cross_check(G, table)
    logger.debug(f"枚举到 {len(table)} 个位移 ≤ {max_disp} 的元素")
    return table


def enumerate_elements(G: SurfaceGroup, max_disp: float) -> List[Tuple[Word, MoebiusTransform]]:
    """
    枚举 dist(o, g·o) ≤ max_disp 的全部群元素

    Args:
        G: 曲面群
        max_disp: 位移上界

    Returns:
        (字, 矩阵) 列表，按 (字长, 字典序) 排序

    Raises:
        CapExceeded: max_disp 超过上限
    """
    return element_table(G, max_disp).items()


def bfs_elements(G: SurfaceGroup, depth: int) -> ElementTable:
    """不剪枝的铺砌 BFS，深度为边配对字长（测试用对照）"""
    o = G.basepoint.z
    seen = OrbitIndex(G.orbit_tol)
    seen.add(o)
    words: List[Word] = [IDENTITY_WORD]
    mats = [np.eye(2)[None]]
    frontier_words, frontier_m = [IDENTITY_WORD], np.eye(2)[None]
    for _ in range(depth):
        cand = normalize_batch(np.einsum('nij,sjk->nsik', frontier_m, G.side_arrays).reshape(-1, 2, 2))
        pts = (cand[:, 0, 0] * o + cand[:, 0, 1]) / (cand[:, 1, 0] * o + cand[:, 1, 1])
        new_words, rows = [], []
        for i in range(len(cand)):
            if not seen.add(pts[i]):
                continue
            parent, side = divmod(i, len(G.side_letters))
            new_words.append(concat(frontier_words[parent], (G.side_letters[side],)))
            rows.append(i)
        if not rows:
            break
        frontier_words, frontier_m = new_words, cand[np.array(rows)]
        words.extend(new_words)
        mats.append(frontier_m)
    allm = np.concatenate(mats)
    pts = (allm[:, 0, 0] * o + allm[:, 0, 1]) / (allm[:, 1, 0] * o + allm[:, 1, 1])
    return ElementTable(words, allm, pts)


# ---------------------------------------------------------------- 闭测地线


@dataclass(frozen=True)
class ConjClass:
    """
    定向闭测地线（共轭类）

    枚举得到的类以轴线在基本多边形中穿越边序列的最小旋转为代表；
    free 为真时代表是自由群意义下循环约化字的最小旋转，用于字层面的构造。
    """
    rep: Word
    length: float = field(compare=False)
    homology: Tuple[int, ...] = field(compare=False)
    free: bool = False

    @property
    def halflength(self) -> float:
        return self.length / 2.0

    @property
    def key(self) -> Tuple:
        return (self.free, word_key(self.rep))

    def to_dict(self) -> Dict[str, Any]:
        return {'word': list(self.rep), 'length': self.length, 'homology': list(self.homology), 'free': self.free}


@dataclass(frozen=True)
class GroupElement:
    """群元素：字与位移 dist(o, g·o)"""
    word: Word
    length: float = field(compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {'word': list(self.word), 'length': self.length}


def element(G: SurfaceGroup, w: Sequence[int]) -> GroupElement:
    w = free_reduce(w)
    o = G.basepoint
    return GroupElement(w, dist(o, G.evaluate(w).apply_point(o)))


def word_class(G: SurfaceGroup, w: Sequence[int]) -> ConjClass:
    """字的自由共轭类；抛物或平凡元素的长度记为 0"""
    t = abs(G.evaluate(w).trace)
    length = trace_length(t) if t > 2.0 + 1e-9 else 0.0
    return ConjClass(cyclic_key(w), length, abelianize(w, G.rank), True)


@dataclass(frozen=True)
class AxisWalk:
    """沿轴线右侧超循环的穿越记录，参数以基点投影为原点"""
    start_word: Word
    times: Tuple[float, ...]
    letters: Word


@dataclass(frozen=True)
class Classification:
    """分类结果：g = conj·rep·conj⁻¹"""
    klass: ConjClass
    conj: Word
    tiles: Tuple[Word, ...]


def axis_frame(G: SurfaceGroup, g: MoebiusTransform) -> Tuple[Geodesic, MoebiusTransform, float]:
    """
    轴线、把标准虚轴（参数 0 在基点投影处）送到轴线的变换、基点投影参数

    Returns:
        (axis, N, p_o)
    """
    geo = axis(g)
    p_o = geo.param(G.basepoint)
    N = geo.standardizer().inverse() @ _dilation(p_o)
    return geo, N, p_o


def walk_axis(G: SurfaceGroup, N: MoebiusTransform, t_from: float, t_to: float,
              eta: float = ETA, max_steps: int = 100_000) -> AxisWalk:
    """
    沿 N 给出的定向测地线右侧距离 eta 的超循环行走，记录边穿越

    Args:
        G: 曲面群
        N: 标准虚轴到测地线的变换
        t_from: 起始参数
        t_to: 终止参数

    Returns:
        AxisWalk（时间为相对标准参数）
    """
    ch, sh = math.cosh(eta), math.sinh(eta)
    X0 = ch * np.array([math.cosh(t_from), math.sinh(t_from), 0.0]) + sh * np.array([0.0, 0.0, 1.0])
    z = N.apply(from_hyperboloid(X0))
    k_word, k_mat, _ = G.reduce_point(z)
    psi = rho(k_mat.inverse() @ N) @ _boost(t_from)
    normals_j = G.side_normals @ MINKOWSKI
    t_cur = t_from
    times: List[float] = []
    letters: List[int] = []
    for _ in range(max_steps):
        P, V, A = psi[:, 0], psi[:, 1], psi[:, 2]
        alpha = ch * (normals_j @ P)
        beta = ch * (normals_j @ V)
        gamma0 = sh * (normals_j @ A)
        best_tau, best_j = math.inf, -1
        for j in range(len(alpha)):
            for tau in _exit_roots(alpha[j], beta[j], gamma0[j]):
                if tau < best_tau:
                    best_tau, best_j = tau, j
        if best_j < 0 or t_cur + best_tau > t_to:
            break
        t_cur += best_tau
        times.append(t_cur)
        letters.append(G.side_letters[best_j])
        psi = G.side_rho_inverse[best_j] @ psi @ _boost(best_tau)
    else:
        raise CapExceeded("轴线行走步数超过上限")
    return AxisWalk(k_word, tuple(times), tuple(letters))


def _exit_roots(alpha: float, beta: float, gamma0: float) -> List[float]:
    """f(τ) = α cosh τ + β sinh τ + γ₀ 的正根中满足 f'(τ) > 0 的那些"""
    A, B, C = alpha + beta, 2.0 * gamma0, alpha - beta
    roots: List[float] = []
    if abs(A) < 1e-300:
        if abs(B) > 0:
            roots = [-C / B]
    else:
        disc = B * B - 4.0 * A * C
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (B + math.copysign(sq, B if B != 0 else 1.0))
        roots = [q / A] + ([C / q] if q != 0 else [])
    out = []
    for s in roots:
        if s <= 0:
            continue
        tau = math.log(s)
        if tau <= 1e-9:
            continue
        if alpha * math.sinh(tau) + beta * math.cosh(tau) > 0:
            out.append(tau)
    return out


def classify_element(G: SurfaceGroup, g: MoebiusTransform) -> Classification:
    """
    求双曲元素的共轭类规范代表

    Args:
        G: 曲面群
        g: 双曲元素

    Returns:
        Classification，满足 g = conj·rep·conj⁻¹

    Raises:
        NotHyperbolic: g 不是双曲元素
        CrossCheckFailed: 数值校验失败
    """
    ell = trace_length(g.trace)
    if ell <= 1e-9:
        raise NotHyperbolic("单位元或抛物元素没有闭测地线")
    _, N, _ = axis_frame(G, g)
    walk = walk_axis(G, N, 0.0, 3.0 * ell + 1e-6)
    times, letters = walk.times, walk.letters
    if not times:
        raise CrossCheckFailed("轴线没有穿越任何边")
    first_period = [i for i, t in enumerate(times) if t < times[0] + ell - 1e-12]
    gaps = [(times[i + 1] - times[i], i) for i in first_period if i + 1 < len(times)]
    _, i_star = max(gaps)
    start = 0.5 * (times[i_star] + times[i_star + 1])
    before = [x for t, x in zip(times, letters) if t < start]
    period = [x for t, x in zip(times, letters) if start < t < start + ell]
    k_start = concat(walk.start_word, before)
    # 穿越序列可能是若干个周期的重复；从最小周期起逐个倍数校验
    p = minimal_period(period)
    for k in range(1, len(period) // p + 1):
        cand = period[:p * k]
        c, u = cyclic_reduce_with_conjugator(cand)
        r = minimal_rotation_index(c)
        rep = tuple(c[r:] + c[:r])
        conj = concat(k_start, u, c[:r])
        if _conjugates_to(G, g, conj, rep):
            break
    else:
        raise CrossCheckFailed(f"穿越序列 {tuple(period)} 的任何周期都与元素不共轭")

    tiles = tuple(concat(k_start, cand[:i]) for i in range(len(cand)))
    klass = ConjClass(rep, ell, abelianize(rep, G.rank))
    return Classification(klass, conj, tiles)


def _conjugates_to(G: SurfaceGroup, g: MoebiusTransform, conj: Word, rep: Word) -> bool:
    """conj⁻¹·g·conj 与 rep 的矩阵在相对容差内一致"""
    conj_m = G.evaluate(conj)
    expected = conj_m.inverse() @ g @ conj_m
    got = G.evaluate(rep)
    scale = max(1.0, max(abs(v) for v in expected.entries))
    return max(abs(x - y) for x, y in zip(got.entries, expected.entries)) / scale <= G.tol_cross_check


def classify(G: SurfaceGroup, w: Union[Sequence[int], MoebiusTransform]) -> ConjClass:
    """字或矩阵所在的共轭类"""
    g = w if isinstance(w, MoebiusTransform) else G.evaluate(w)
    return classify_element(G, g).klass


@lru_cache(maxsize=65536)
def reverse_class(G: SurfaceGroup, gamma: ConjClass) -> ConjClass:
    """反向的类 γ̄，与 γ 使用同一种规范形式"""
    if gamma.free:
        return word_class(G, invert_word(gamma.rep))
    return classify(G, invert_word(gamma.rep))


def oriented(G: SurfaceGroup, gamma: ConjClass) -> Tuple[ConjClass, int]:
    """
    在 {γ, γ̄} 中取键较小者作为规范定向

    Returns:
        (规范类, ±1)，γ = ±规范类
    """
    bar = reverse_class(G, gamma)
    if gamma.key <= bar.key:
        return gamma, 1
    return bar, -1


def max_listing_length(G: SurfaceGroup) -> float:
    """closed_geodesics 在枚举上限内能处理的最大长度上界"""
    return 2.0 * (G.hard_cap - 2.0 * G.circumradius)


@log_performance
def closed_geodesics(G: SurfaceGroup, lo: float, hi: float) -> List[ConjClass]:
    """
    长度在 [lo, hi] 内的全部定向闭测地线，每个共轭类一次

    采用折半搜索：轴线经过基本多边形的代表元可写成两个位移 ≤ hi/2 + 2r 的元素之积，
    因此可列出的长度上界是 max_listing_length(G) = 2·(hard_cap − 2r)。

    Raises:
        CapExceeded: hi 超过 max_listing_length(G)
    """
    r = G.circumradius
    half = hi / 2.0 + 2.0 * r
    if half > G.hard_cap:
        raise CapExceeded(f"长度上界 {hi} 需要枚举位移 {half:.3f}，超过上限 {G.hard_cap}；"
                          f"当前上限下最多列出长度 {max_listing_length(G):.3f}")
    if hi <= 0 or hi < lo:
        return []
    table = element_table(G, half)
    m = table.mats.reshape(-1, 4)
    m2 = m[:, [0, 2, 1, 3]]
    # 迹为 2 的乘积（单位元）不对应闭测地线
    t_lo = max(2.0 * math.cosh(max(lo, 0.0) / 2.0) - 1e-9, 2.0 + 1e-6)
    t_hi = 2.0 * math.cosh(hi / 2.0) + 1e-9
    o = G.basepoint.z
    seen = OrbitIndex(G.orbit_tol)
    found: Dict[Word, ConjClass] = {}
    chunk = max(1, 4_000_000 // max(1, len(table)))
    for s in range(0, len(table), chunk):
        tr = np.abs(m[s:s + chunk] @ m2.T)
        ii, jj = np.nonzero((tr >= t_lo) & (tr <= t_hi))
        for i, j in zip(ii + s, jj):
            g = MoebiusTransform.from_array(table.mats[i] @ table.mats[j])
            if not seen.add(g.apply(o)):
                continue
            if axis(g).distance_to(o) > r + 1e-6:
                continue
            cl = classify_element(G, g)
            found.setdefault(cl.klass.rep, cl.klass)
            # 沿轴线经过的瓦片给出同一类中其余的候选代表
            for k in cl.tiles:
                km = G.evaluate(k)
                seen.add((km.inverse() @ g @ km).apply(o))
    out = [c for c in found.values() if lo - 1e-9 <= c.length <= hi + 1e-9]
    out.sort(key=lambda c: (round(c.length, 9), c.key))
    logger.info(f"长度 [{lo}, {hi}] 内共有 {len(out)} 条定向闭测地线")
    return out


def systole(G: SurfaceGroup) -> float:
    """最短闭测地线长度"""
    best = math.inf
    disp = 2.0 * G.circumradius + 1.0
    for _ in range(2):
        table = element_table(G, min(disp, G.hard_cap))
        tr = np.abs(table.mats[:, 0, 0] + table.mats[:, 1, 1])
        tr = tr[tr > 2.0 + 1e-9]
        best = min(best, trace_length(float(tr.min())))
        # 最短测地线有一个轴线穿过基本多边形的提升
        disp = best + 2.0 * G.circumradius
    return best


def export_geodesics(classes: Sequence[ConjClass]) -> List[Dict[str, Any]]:
    """JSON 导出格式 {word, length, homology}"""
    return [c.to_dict() for c in classes]
