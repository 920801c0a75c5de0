"""
双曲平面基础

上半平面模型中的 Möbius 变换、点、单位切向量与测地线，以及距离、角度、
迹长换算和裤子三角函数 h。所有对象均为不可变值类型，可在任意线程中共享。
"""

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from ..utils.errors import BaseMismatch, Degenerate, NotHyperbolic

TWO_PI = 2.0 * math.pi
TOL_MATRIX = 1e-9
_ZERO_ENTRY = 1e-12
_INF = math.inf

# 边界点：实数或 math.inf
BoundaryPoint = float


def _mod_2pi(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    # fmod 可能在 2π 附近返回 2π 本身
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class PointH:
    """上半平面中的点 x + iy，y > 0"""
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise Degenerate(f"上半平面点要求 y > 0，实际 y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z: complex) -> "PointH":
        return cls(z.real, z.imag)


ORIGIN = PointH(0.0, 1.0)


@dataclass(frozen=True)
class UnitTangent:
    """单位切向量：基点加上共形坐标中的方向角 dir ∈ [0, 2π)"""
    base: PointH
    dir: float

    def __post_init__(self):
        object.__setattr__(self, "dir", _mod_2pi(self.dir))


@dataclass(frozen=True)
class MoebiusTransform:
    """
    PSL(2,R) 元素

    构造后自动做射影规范化：除以 sqrt(det)，并使 (a,b,c,d) 中第一个非零项为正。
    """
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det <= 0:
            raise Degenerate(f"行列式必须为正，实际为 {det}")
        s = math.sqrt(det)
        entries = [self.a / s, self.b / s, self.c / s, self.d / s]
        for v in entries:
            if abs(v) > _ZERO_ENTRY:
                if v < 0:
                    entries = [-e for e in entries]
                break
        for name, v in zip("abcd", entries):
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, m) -> "MoebiusTransform":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @property
    def entries(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "MoebiusTransform") -> "MoebiusTransform":
        return compose(self, other)

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def translation_length(self) -> float:
        """双曲元素的平移长度（= 对应闭测地线长度）"""
        return trace_length(self.trace)

    def apply(self, z: complex) -> complex:
        """作用在上半平面的点（复数形式）"""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def apply_point(self, p: PointH) -> PointH:
        return PointH.from_complex(self.apply(p.z))

    def apply_boundary(self, x: BoundaryPoint) -> BoundaryPoint:
        """作用在边界 R ∪ {∞}"""
        if math.isinf(x):
            return _INF if abs(self.c) < _ZERO_ENTRY else self.a / self.c
        den = self.c * x + self.d
        if abs(den) < _ZERO_ENTRY:
            return _INF
        return (self.a * x + self.b) / den

    def act_on_tangent(self, u: UnitTangent) -> UnitTangent:
        """切映射：方向增加 arg g'(z) = −2·arg(cz + d)"""
        z = u.base.z
        w = self.c * z + self.d
        return UnitTangent(PointH.from_complex(self.apply(z)), u.dir - 2.0 * cmath.phase(w))

    def key(self, quantum: float = 1e-6) -> Tuple[int, int, int, int]:
        """量化后的规范化矩阵，用于去重"""
        return tuple(int(round(v / quantum)) for v in self.entries)

    def close_to(self, other: "MoebiusTransform", tol: float = TOL_MATRIX) -> bool:
        return max(abs(x - y) for x, y in zip(self.entries, other.entries)) <= tol


def compose(g: MoebiusTransform, h: MoebiusTransform) -> MoebiusTransform:
    """
    复合 g∘h（矩阵乘积 g·h），结果重新做射影规范化

    Args:
        g: 左因子
        h: 右因子

    Returns:
        规范化后的乘积
    """
    return MoebiusTransform(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def dist(p: Union[PointH, complex], q: Union[PointH, complex]) -> float:
    """双曲距离 2·asinh(|p−q| / (2·sqrt(y_p·y_q)))"""
    zp = p.z if isinstance(p, PointH) else p
    zq = q.z if isinstance(q, PointH) else q
    return 2.0 * math.asinh(abs(zp - zq) / (2.0 * math.sqrt(zp.imag * zq.imag)))


def dist_many(p: complex, qs: np.ndarray) -> np.ndarray:
    """一个点到一批点（复数数组）的距离"""
    qs = np.asarray(qs, dtype=complex)
    return 2.0 * np.arcsinh(np.abs(qs - p) / (2.0 * np.sqrt(p.imag * qs.imag)))


def directions_many(p: complex, qs: np.ndarray) -> np.ndarray:
    """从 p 指向一批点的初始方向角"""
    w = (np.asarray(qs, dtype=complex) - p.real) / p.imag
    return np.angle((w - 1j) / (w + 1j)) + math.pi / 2.0


def directions_towards(ps: np.ndarray, q: complex) -> np.ndarray:
    """从一批点各自指向 q 的初始方向角"""
    ps = np.asarray(ps, dtype=complex)
    w = (q - ps.real) / ps.imag
    return np.angle((w - 1j) / (w + 1j)) + math.pi / 2.0


def angle_gap(a, b):
    """方向角之差的绝对值，取值 [0, π]，支持数组"""
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


def angle(u1: UnitTangent, u2: UnitTangent, tol: float = TOL_MATRIX) -> float:
    """
    同一基点处两个切向量之间的无向角 Θ ∈ [0, π]

    Raises:
        BaseMismatch: 基点距离超过容差
    """
    if dist(u1.base, u2.base) > tol:
        raise BaseMismatch("切向量基点不同", u1=u1, u2=u2)
    return abs(_mod_2pi(u1.dir - u2.dir + math.pi) - math.pi)


def trace_length(t: float) -> float:
    """由迹求长度：ℓ = 2·arccosh(|t|/2)"""
    if abs(t) < 2.0 - 1e-12:
        raise NotHyperbolic(f"|trace| = {abs(t)} < 2")
    return 2.0 * math.acosh(max(abs(t) / 2.0, 1.0))


def h_func(a: float, b: float) -> float:
    """满足 cosh(h/2) = sinh(a/2)·sinh(b/2) 的 h"""
    p = math.sinh(a / 2.0) * math.sinh(b / 2.0)
    if p < 1.0 - 1e-12:
        raise Degenerate(f"sinh 乘积 {p} < 1，不存在闭测地线", a=a, b=b)
    return 2.0 * math.acosh(max(p, 1.0))


def rotate(u: UnitTangent, theta: float) -> UnitTangent:
    return UnitTangent(u.base, u.dir + theta)


def reverse(u: UnitTangent) -> UnitTangent:
    return UnitTangent(u.base, u.dir + math.pi)


def rotation_about_i(phi: float) -> MoebiusTransform:
    """绕 i 逆时针旋转 phi（在 i 处导数为 e^{i·phi}）"""
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return MoebiusTransform(c, s, -s, c)


def frame(u: UnitTangent) -> MoebiusTransform:
    """把 i 处竖直向上的切向量送到 u 的等距"""
    x, y = u.base.x, u.base.y
    sy = math.sqrt(y)
    return compose(MoebiusTransform(sy, x / sy, 0.0, 1.0 / sy), rotation_about_i(u.dir - math.pi / 2.0))


def shoot(u: UnitTangent, t: float) -> UnitTangent:
    """沿 u 的测地线走 t 后得到的终端切向量"""
    g = frame(u)
    return g.act_on_tangent(UnitTangent(PointH(0.0, math.exp(t)), math.pi / 2.0))


def direction_to(p: PointH, q: PointH) -> float:
    """从 p 指向 q 的测地线初始方向角"""
    w = (q.z - p.x) / p.y
    return _mod_2pi(cmath.phase((w - 1j) / (w + 1j)) + math.pi / 2.0)


def tangent_towards(p: PointH, q: PointH) -> UnitTangent:
    return UnitTangent(p, direction_to(p, q))


def arrival_tangent(p: PointH, q: PointH) -> UnitTangent:
    """从 p 到 q 的测地线在 q 处的终端切向量"""
    return reverse(tangent_towards(q, p))


# 双曲面模型


MINKOWSKI = np.diag([-1.0, 1.0, 1.0])


def to_hyperboloid(z: Union[PointH, complex]) -> np.ndarray:
    z = z.z if isinstance(z, PointH) else z
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return np.array([(1.0 + r2) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y])


def minkowski(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ MINKOWSKI @ v)


# 测地线


@dataclass(frozen=True)
class Geodesic:
    """
    定向完备测地线，端点 neg → pos（可为 math.inf）

    标准化变换 M 把 neg 送到 0、pos 送到 ∞，测地线成为向上的虚轴。
    参数 param(z) = log|M(z)|；右侧为 Re M(z) > 0（切向量顺时针转四分之一）。
    """
    neg: BoundaryPoint
    pos: BoundaryPoint

    def __post_init__(self):
        if self.neg == self.pos:
            raise Degenerate("测地线端点重合")

    def standardizer(self) -> MoebiusTransform:
        e1, e2 = self.neg, self.pos
        if math.isinf(e2):
            return MoebiusTransform(1.0, -e1, 0.0, 1.0)
        if math.isinf(e1):
            return MoebiusTransform(0.0, -1.0, 1.0, -e2)
        s = 1.0 if e1 > e2 else -1.0
        return MoebiusTransform(s, -s * e1, 1.0, -e2)

    def reversed(self) -> "Geodesic":
        return Geodesic(self.pos, self.neg)

    def image(self, g: MoebiusTransform) -> "Geodesic":
        return Geodesic(g.apply_boundary(self.neg), g.apply_boundary(self.pos))

    def param(self, z: Union[PointH, complex]) -> float:
        """最近点投影的弧长坐标"""
        z = z.z if isinstance(z, PointH) else z
        return math.log(abs(self.standardizer().apply(z)))

    def point(self, t: float) -> PointH:
        return self.standardizer().inverse().apply_point(PointH(0.0, math.exp(t)))

    def tangent(self, t: float) -> UnitTangent:
        return self.standardizer().inverse().act_on_tangent(UnitTangent(PointH(0.0, math.exp(t)), math.pi / 2.0))

    def project(self, z: Union[PointH, complex]) -> PointH:
        return self.point(self.param(z))

    def distance_to(self, z: Union[PointH, complex]) -> float:
        z = z.z if isinstance(z, PointH) else z
        w = self.standardizer().apply(z)
        return math.asinh(abs(w.real) / w.imag)

    def side(self, z: Union[PointH, complex]) -> int:
        """+1 右侧，−1 左侧，0 在测地线上"""
        z = z.z if isinstance(z, PointH) else z
        re = self.standardizer().apply(z).real
        if abs(re) < 1e-12:
            return 0
        return 1 if re > 0 else -1

    def intersects(self, other: "Geodesic") -> bool:
        m = self.standardizer()
        a, b = m.apply_boundary(other.neg), m.apply_boundary(other.pos)
        if math.isinf(a) or math.isinf(b):
            return False
        return a * b < 0

    @classmethod
    def through(cls, u: UnitTangent) -> "Geodesic":
        g = frame(u)
        return cls(g.apply_boundary(0.0), g.apply_boundary(_INF))


def axis(g: MoebiusTransform) -> Geodesic:
    """
    双曲元素的平移轴，方向从排斥不动点指向吸引不动点

    Raises:
        NotHyperbolic: |trace| ≤ 2
    """
    t = g.trace
    if abs(t) <= 2.0 + 1e-12:
        raise NotHyperbolic(f"|trace| = {abs(t)} 不是双曲元素")
    a, b, c, d = g.entries
    s = math.sqrt(t * t - 4.0)
    if abs(c) < _ZERO_ENTRY:
        finite = b / (d - a)
        if abs(a / d) > 1.0:
            return Geodesic(finite, _INF)
        return Geodesic(_INF, finite)
    dm = d - a
    q = -0.5 * (dm + math.copysign(s, dm if dm != 0 else 1.0))
    z1 = q / c
    z2 = -b / q
    if abs(c * z1 + d) > 1.0:
        return Geodesic(z2, z1)
    return Geodesic(z1, z2)


@dataclass(frozen=True)
class CommonPerpendicular:
    """两条超平行测地线的公垂线：foot1 在第一条上，foot2 在第二条上"""
    foot1: PointH
    foot2: PointH
    length: float


def common_perpendicular(geo1: Geodesic, geo2: Geodesic) -> Optional[CommonPerpendicular]:
    """
    两条测地线的公垂线

    Args:
        geo1: 第一条测地线
        geo2: 第二条测地线

    Returns:
        公垂线；若两者相交或渐近则返回 None
    """
    m = geo1.standardizer()
    a, b = m.apply_boundary(geo2.neg), m.apply_boundary(geo2.pos)
    if math.isinf(a) or math.isinf(b) or a * b <= 0 or abs(a) < _ZERO_ENTRY or abs(b) < _ZERO_ENTRY:
        return None
    ab = a * b
    x = 2.0 * ab / (a + b)
    y2 = ab - x * x
    if y2 <= 0:
        return None
    minv = m.inverse()
    f1 = minv.apply_point(PointH(0.0, math.sqrt(ab)))
    f2 = minv.apply_point(PointH(x, math.sqrt(y2)))
    return CommonPerpendicular(f1, f2, dist(f1, f2))
