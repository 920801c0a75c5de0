"""
形式和与半随机测度

有界分母的有理形式和、权函数 σ_C/σ_G/σ_Γ/σ_Π、|f|_* 推前、半随机范数、
脚测度的 δ 等价判定，以及有效随机元素。所有系数使用精确有理数。
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (Any, Callable, Dict, Generic, Hashable, Iterable, Iterator,
                    List, Mapping, Optional, Sequence, Tuple, TypeVar, Union)

import mpmath
import numpy as np

from ..utils.errors import EmptyDomain, KindMismatch, MassMismatch
from ..utils.logger import get_logger

logger = get_logger(__name__)

K = TypeVar("K", bound=Hashable)
Number = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class FormalSum(Generic[K]):
    """
    有限支撑的形式有理线性组合

    denom_bound 是一个公分母：每个系数的既约分母都整除它。加法取最小公倍数，
    乘以有理数时乘上该有理数的分母。
    """

    __slots__ = ("_terms", "denom_bound")

    def __init__(self, terms: Optional[Mapping[K, Number]] = None, denom_bound: Optional[int] = None):
        clean: Dict[K, Fraction] = {}
        for k, v in (terms or {}).items():
            v = Fraction(v)
            if v != 0:
                clean[k] = v
        self._terms = clean
        lcd = 1
        for v in clean.values():
            lcd = _lcm(lcd, v.denominator)
        if denom_bound is None:
            denom_bound = lcd
        elif denom_bound <= 0 or denom_bound % lcd != 0:
            raise ValueError(f"分母界 {denom_bound} 不被所有系数分母整除（最小公分母 {lcd}）")
        self.denom_bound = int(denom_bound)

    @classmethod
    def single(cls, key: K, coeff: Number = 1) -> "FormalSum[K]":
        return cls({key: coeff})

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[K, Number]]) -> "FormalSum[K]":
        acc: Dict[K, Fraction] = {}
        for k, v in pairs:
            acc[k] = acc.get(k, Fraction(0)) + Fraction(v)
        return cls(acc)

    # 访问

    def __getitem__(self, key: K) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def __iter__(self) -> Iterator[K]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, key: object) -> bool:
        return key in self._terms

    def items(self):
        return self._terms.items()

    def support(self) -> List[K]:
        return list(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def total(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self._terms.values()), Fraction(0))

    def denominator(self) -> int:
        """系数的最小公分母"""
        lcd = 1
        for v in self._terms.values():
            lcd = _lcm(lcd, v.denominator)
        return lcd

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._terms.values())

    # 算术

    def __add__(self, other: "FormalSum[K]") -> "FormalSum[K]":
        if not isinstance(other, FormalSum):
            return NotImplemented
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return FormalSum(acc, _lcm(self.denom_bound, other.denom_bound))

    def __radd__(self, other):
        if other == 0:
            return self
        return NotImplemented

    def __neg__(self) -> "FormalSum[K]":
        return FormalSum({k: -v for k, v in self._terms.items()}, self.denom_bound)

    def __sub__(self, other: "FormalSum[K]") -> "FormalSum[K]":
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self + (-other)

    def scale(self, q: Number) -> "FormalSum[K]":
        q = Fraction(q)
        if q == 0:
            return FormalSum()
        return FormalSum({k: v * q for k, v in self._terms.items()}, self.denom_bound * q.denominator)

    def __mul__(self, q: Number) -> "FormalSum[K]":
        if isinstance(q, (int, Fraction)):
            return self.scale(q)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}·{k!r}" for k, v in list(self._terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f", … (+{len(self._terms) - 6})"
        return f"FormalSum({inner}{more})"

    # 线性映射

    def map_keys(self, f: Callable[[K], Any]) -> "FormalSum":
        """按 f 重新命名键（不可逆时系数相加）"""
        acc: Dict[Any, Fraction] = {}
        for k, v in self._terms.items():
            nk = f(k)
            acc[nk] = acc.get(nk, Fraction(0)) + v
        return FormalSum(acc, self.denom_bound)

    def apply_linear(self, f: Callable[[K], "FormalSum"]) -> "FormalSum":
        """线性延拓：Σ c_k·f(k)"""
        return linear_sum(f(k).scale(v) for k, v in self._terms.items())

    def to_dict(self, key_fn: Callable[[K], Any] = repr) -> Dict[str, Any]:
        """{denominator, terms: [key, numerator]}"""
        N = self.denom_bound
        terms = [[key_fn(k), int(v * N)] for k, v in self._terms.items()]
        return {'denominator': N, 'terms': terms}


def linear_sum(parts: Iterable[FormalSum]) -> FormalSum:
    """一次性累加多个形式和"""
    acc: Dict[Any, Fraction] = {}
    bound = 1
    for p in parts:
        for k, v in p.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        bound = _lcm(bound, p.denom_bound)
    return FormalSum(acc, bound)


# ---------------------------------------------------------------- 权函数


@dataclass(frozen=True)
class WeightFn:
    """
    权函数

    kind: "C"（弧，e^{−l}）、"G"（群元素，e^{−l}）、"Γ"（闭测地线，R·e^{−2R}）、
    "Π"（裤子，e^{−3R}）、"1"（单点 {1}）或 "table"（显式精确权重表）。
    """
    kind: str
    eps: float = 0.0
    R: float = 0.0
    table: Optional[Mapping[Any, Number]] = field(default=None, compare=False, hash=False)


def _kind_of(obj: Any) -> str:
    if hasattr(obj, "init_dir"):
        return "C"
    if hasattr(obj, "cuffs"):
        return "Π"
    name = type(obj).__name__
    if name == "ConjClass":
        return "Γ"
    if name == "GroupElement":
        return "G"
    if obj == 1:
        return "1"
    return "?"


def weight(sigma: WeightFn, obj: Any):
    """
    σ(obj)

    Raises:
        KindMismatch: obj 不属于 σ 的定义域
    """
    if sigma.kind == "table":
        if sigma.table is None or obj not in sigma.table:
            raise KindMismatch(f"权重表中没有 {obj!r}")
        return Fraction(sigma.table[obj])
    kind = _kind_of(obj)
    if kind != sigma.kind:
        raise KindMismatch(f"对象类型 {kind} 与权函数 {sigma.kind} 不符")
    if kind in ("C", "G"):
        return math.exp(-obj.length)
    if kind == "Γ":
        return sigma.R * math.exp(-2.0 * sigma.R)
    if kind == "Π":
        return math.exp(-3.0 * sigma.R)
    return Fraction(1)


@dataclass
class FiniteMap:
    """有限定义域上的映射 f: X → RY，f(x) = Σ_y f_x(y)·y"""
    items: List[Tuple[Any, FormalSum]] = field(default_factory=list)

    def __post_init__(self):
        self._index = {x: i for i, (x, _) in enumerate(self.items)}

    def __call__(self, x: Any) -> FormalSum:
        return self.items[self._index[x]][1]

    def domain(self) -> List[Any]:
        return [x for x, _ in self.items]

    def __contains__(self, x: Any) -> bool:
        return x in self._index

    def compose(self, g: "FiniteMap") -> "FiniteMap":
        """g∘f，要求 f 的像支撑落在 g 的定义域内"""
        out = []
        for x, fx in self.items:
            missing = [y for y in fx if y not in g]
            if missing:
                raise EmptyDomain(f"复合映射缺少定义域元素 {missing[0]!r}")
            out.append((x, fx.apply_linear(g)))
        return FiniteMap(out)

    def linear_combination(self, lam: Number, other: "FiniteMap", mu: Number) -> "FiniteMap":
        """λ·f + μ·g（定义域取并，缺失处视为 0）"""
        keys = self.domain() + [x for x in other.domain() if x not in self]
        zero: FormalSum = FormalSum()
        out = []
        for x in keys:
            a = self(x) if x in self else zero
            b = other(x) if x in other else zero
            out.append((x, a.scale(lam) + b.scale(mu)))
        return FiniteMap(out)


def pushforward_abs(f: FiniteMap, sigma_x: WeightFn) -> Dict[Any, Any]:
    """(|f|_*σ_X)(y) = Σ_x |f_x(y)|·σ_X(x)"""
    out: Dict[Any, Any] = {}
    for x, fx in f.items:
        w = weight(sigma_x, x)
        for y, c in fx.items():
            term = abs(c) * w if isinstance(w, Fraction) else float(abs(c)) * w
            out[y] = out.get(y, 0) + term
    return out


def semirandom_norm(f: FiniteMap, sigma_x: WeightFn, sigma_y: WeightFn):
    """最小的 K 使 |f|_*σ_X ≤ K·σ_Y；零映射为 0"""
    push = pushforward_abs(f, sigma_x)
    best: Any = 0
    for y, m in push.items():
        ratio = m / weight(sigma_y, y)
        if ratio > best:
            best = ratio
    return best


def product_weight(sigma1: WeightFn, sigma2: WeightFn) -> Callable[[Tuple[Any, Any]], Any]:
    """⊠ 类的乘积测度替代：σ₁×σ₂，作为上界使用"""
    def w(pair: Tuple[Any, Any]):
        return weight(sigma1, pair[0]) * weight(sigma2, pair[1])
    return w


def boxtimes_check(coupling: Mapping[Tuple[Any, Any], Any], sigma1: Mapping[Any, Any],
                   sigma2: Mapping[Any, Any]) -> bool:
    """给定耦合测度，检验两个坐标推前分别不超过 σ₁、σ₂"""
    m1: Dict[Any, Any] = {}
    m2: Dict[Any, Any] = {}
    for (x, y), w in coupling.items():
        if w < 0:
            return False
        m1[x] = m1.get(x, 0) + w
        m2[y] = m2.get(y, 0) + w
    return all(v <= sigma1.get(x, 0) for x, v in m1.items()) and all(v <= sigma2.get(y, 0) for y, v in m2.items())


# ---------------------------------------------------------------- 脚测度


@dataclass(frozen=True)
class FeetMeasure:
    """√γ ≅ R/hl·Z 上的原子测度"""
    cuff: Any
    hl: float
    atoms: Tuple[Tuple[float, Fraction], ...]

    @classmethod
    def build(cls, cuff: Any, hl: float, atoms: Iterable[Tuple[float, Number]]) -> "FeetMeasure":
        acc: Dict[float, Fraction] = {}
        for pos, m in atoms:
            p = math.fmod(pos, hl)
            if p < 0:
                p += hl
            if p >= hl:
                p = 0.0
            acc[p] = acc.get(p, Fraction(0)) + Fraction(m)
        return cls(cuff, hl, tuple(sorted((p, m) for p, m in acc.items() if m != 0)))

    def total(self) -> Fraction:
        return sum((m for _, m in self.atoms), Fraction(0))

    def mass_in(self, start: float, length: float) -> Fraction:
        """闭弧 [start, start + length] 的质量（length ≥ hl 时为全部）"""
        if length >= self.hl:
            return self.total()
        out = Fraction(0)
        for p, m in self.atoms:
            off = math.fmod(p - start, self.hl)
            if off < 0:
                off += self.hl
            if off <= length + 1e-12 or off >= self.hl - 1e-12:
                out += m
        return out


def _one_sided(m1: FeetMeasure, m2: FeetMeasure, delta: float) -> bool:
    pts = [p for p, _ in m1.atoms]
    hl = m1.hl
    for i, a in enumerate(pts):
        for j in range(len(pts)):
            b = pts[(i + j) % len(pts)]
            length = math.fmod(b - a, hl)
            if length < 0:
                length += hl
            if j == 0:
                length = 0.0
            if m1.mass_in(a, length) > m2.mass_in(a - delta, length + 2.0 * delta):
                return False
    return True


def delta_equivalent(m1: FeetMeasure, m2: FeetMeasure, delta: float) -> bool:
    """
    δ 等价：对每段以原子为端点的圆弧 A，m1(A) ≤ m2(N_δ(A))，反之亦然

    Raises:
        MassMismatch: 总质量不等
    """
    if m1.total() != m2.total():
        raise MassMismatch(f"总质量不等: {m1.total()} ≠ {m2.total()}")
    if abs(m1.hl - m2.hl) > 1e-9:
        raise MassMismatch("两个测度所在圆周长度不同")
    return _one_sided(m1, m2, delta) and _one_sided(m2, m1, delta)


# ---------------------------------------------------------------- 有效随机元素


def floor_exp_2R(R: Union[float, Fraction], max_prec: int = 4096) -> int:
    """
    ⌊e^{2R}⌋：逐步提高工作精度，直到 e^{2R} 与最近整数的距离超过舍入误差界

    R 按其精确有理值处理（浮点数取二进制精确值）。

    Raises:
        ArithmeticError: 在 max_prec 位精度内无法确定
    """
    R = Fraction(R)
    if R == 0:
        return 1
    prec = 64
    while prec <= max_prec:
        with mpmath.workprec(prec):
            e = mpmath.exp(2 * mpmath.mpf(R.numerator) / R.denominator)
            f = mpmath.floor(e)
            margin = e * mpmath.ldexp(1, 16 - prec)
            if e - f > margin and f + 1 - e > margin:
                return int(f)
        prec *= 2
    raise ArithmeticError(f"无法在精度 {max_prec} 内确定 floor(e^(2R))")


def random_element(X: Sequence[Any], eps: float, R: Union[float, Fraction], seed: int = 0,
                   N: Optional[int] = None) -> FormalSum:
    """
    分母为 ⌊e^{2R}⌋ 的近似均匀凸组合

    均匀向量按最大余数法取整到分母 N，余数相同的元素由种子决定次序。

    Raises:
        EmptyDomain: X 为空
    """
    if not X:
        raise EmptyDomain("随机元素的定义域为空")
    N = N if N is not None else floor_exp_2R(R)
    n = len(X)
    base, rem = divmod(N, n)
    numerators = [base] * n
    order = np.random.default_rng(seed).permutation(n)
    for i in order[:rem]:
        numerators[int(i)] += 1
    terms = {x: Fraction(k, N) for x, k in zip(X, numerators) if k}
    return FormalSum(terms, N)
