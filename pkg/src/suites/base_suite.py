"""
恒等式套件基类

定义所有恒等式套件的基本接口、结果格式与注册表。
每个套件枚举若干实例，对每个实例计算 ∂(构造) − (期望边界)，残差为零即通过。
"""

import json
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from ..algebra.formal_algebra import FormalSum
from ..geometry.pants import boundary
from ..homology.context import HomologyContext
from ..utils.errors import PantsHomologyError
from ..utils.logger import get_logger


class InstanceStatus(Enum):
    """单个实例的结果状态"""
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


@dataclass
class InstanceResult:
    """单个实例的结果"""
    label: str
    status: InstanceStatus
    pants: int = 0
    residual: int = 0
    error: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'status': self.status.value,
            'pants': self.pants,
            'residual': self.residual,
            'error': self.error,
        }


@dataclass
class SuiteResult:
    """套件结果"""
    name: str
    success: bool
    message: str
    instances: List[InstanceResult] = field(default_factory=list)
    seconds: float = 0.0
    error: Optional[str] = None
    required: int = 0

    def count(self, status: InstanceStatus) -> int:
        return sum(1 for r in self.instances if r.status is status)

    @property
    def failed(self) -> bool:
        """存在残差非零的实例（构造失败不计入）"""
        return self.count(InstanceStatus.FAIL) > 0

    @property
    def complete(self) -> bool:
        """选取与验证都没有出错，且通过的实例数达到要求"""
        return self.error is None and self.count(InstanceStatus.PASS) >= max(self.required, 1)

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return {
            'name': self.name,
            'success': self.success,
            'message': self.message,
            'passed': self.count(InstanceStatus.PASS),
            'failed': self.count(InstanceStatus.FAIL),
            'errors': self.count(InstanceStatus.ERROR),
            'seconds': self.seconds,
            'error': self.error,
            'required': self.required,
            'instances': [r.to_dict() for r in self.instances],
        }

    def to_json(self) -> str:
        """转换为JSON格式"""
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


class IdentitySuite(ABC):
    """恒等式套件基类"""

    default_count: int = 10

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.logger = get_logger(f"suite.{name}")
        self.enabled = True

    @abstractmethod
    def instances(self, ctx: HomologyContext, count: int) -> List[Any]:
        """
        确定性地选取至多 count 个实例

        Args:
            ctx: 同调上下文
            count: 实例个数

        Returns:
            实例列表
        """

    @abstractmethod
    def construct(self, ctx: HomologyContext, instance: Any) -> FormalSum:
        """实例对应的多裤子（或群对形式和）"""

    @abstractmethod
    def expected(self, ctx: HomologyContext, instance: Any) -> FormalSum:
        """实例应有的边界"""

    def boundary_of(self, ctx: HomologyContext, chain: FormalSum) -> FormalSum:
        return boundary(ctx.G, chain)

    def label(self, instance: Any) -> str:
        return repr(instance)

    def validate_params(self, count: int) -> bool:
        return count >= 1

    def is_available(self) -> bool:
        return self.enabled

    def get_info(self) -> Dict[str, Any]:
        """
        获取套件信息

        Returns:
            套件信息字典
        """
        return {
            'name': self.name,
            'description': self.description,
            'enabled': self.enabled,
            'default_count': self.default_count,
        }

    def check(self, ctx: HomologyContext, instance: Any) -> InstanceResult:
        """单个实例：残差为零即通过；领域错误记为 ERROR"""
        label = self.label(instance)
        try:
            chain = self.construct(ctx, instance)
            residual = self.boundary_of(ctx, chain) - self.expected(ctx, instance)
        except PantsHomologyError as exc:
            self.logger.warning(f"{self.name} 实例 {label} 构造失败: {exc}")
            return InstanceResult(label, InstanceStatus.ERROR, error=exc.to_dict())
        status = InstanceStatus.PASS if residual.is_zero() else InstanceStatus.FAIL
        if status is InstanceStatus.FAIL:
            self.logger.error(f"{self.name} 实例 {label}: 残差支撑 {len(residual)}")
        return InstanceResult(label, status, pants=len(chain), residual=len(residual))

    def execute(self, ctx: HomologyContext, count: int) -> SuiteResult:
        """
        运行套件

        Args:
            ctx: 同调上下文
            count: 实例个数

        Returns:
            SuiteResult: 运行结果
        """
        rows = [self.check(ctx, inst) for inst in self.instances(ctx, count)]
        result = SuiteResult(self.name, True, "", rows, required=count)
        result.success = not result.failed and result.complete
        result.message = (f"{result.count(InstanceStatus.PASS)}/{count} 通过，{result.count(InstanceStatus.FAIL)} 失败，"
                          f"{result.count(InstanceStatus.ERROR)} 构造失败")
        return result

    def safe_execute(self, ctx: HomologyContext, count: Optional[int] = None) -> SuiteResult:
        """
        安全运行套件（包含错误处理）

        Args:
            ctx: 同调上下文
            count: 实例个数，缺省为 default_count

        Returns:
            SuiteResult: 运行结果
        """
        count = self.default_count if count is None else count
        if not self.is_available():
            return SuiteResult(self.name, False, f"套件 {self.name} 当前不可用", error="Suite disabled")
        if not self.validate_params(count):
            return SuiteResult(self.name, False, f"参数验证失败: count = {count}", error="Invalid parameters")

        self.logger.info(f"运行套件 {self.name}，实例数 {count}")
        start = time.perf_counter()
        try:
            result = self.execute(ctx, count)
        except PantsHomologyError as exc:
            self.logger.error(f"套件 {self.name} 选取实例失败: {exc}")
            result = SuiteResult(self.name, False, "实例选取失败", error=exc.code)
        except Exception as e:
            self.logger.error(f"套件 {self.name} 运行时发生异常: {e}")
            result = SuiteResult(self.name, False, "套件运行失败", error=str(e))
        result.seconds = time.perf_counter() - start

        if result.success:
            self.logger.info(f"套件 {self.name} 通过: {result.message}")
        else:
            self.logger.warning(f"套件 {self.name} 未通过: {result.message or result.error}")
        return result


class SuiteRegistry:
    """套件注册表"""

    def __init__(self):
        self.suites: Dict[str, IdentitySuite] = {}
        self.logger = get_logger("suite_registry")

    def register(self, suite: IdentitySuite) -> None:
        self.suites[suite.name] = suite
        self.logger.debug(f"注册套件: {suite.name}")

    def get_suite(self, name: str) -> Optional[IdentitySuite]:
        return self.suites.get(name)

    def names(self) -> List[str]:
        return list(self.suites)

    def run(self, name: str, ctx: HomologyContext, count: Optional[int] = None) -> SuiteResult:
        """
        运行指定套件

        Args:
            name: 套件名称
            ctx: 同调上下文
            count: 实例个数

        Returns:
            运行结果
        """
        suite = self.get_suite(name)
        if not suite:
            return SuiteResult(name, False, f"套件 {name} 不存在", error="Suite not found")
        return suite.safe_execute(ctx, count)

    def run_all(self, ctx: HomologyContext, counts: Optional[Dict[str, int]] = None) -> List[SuiteResult]:
        counts = counts or {}
        return [s.safe_execute(ctx, counts.get(s.name)) for s in self.suites.values() if s.is_available()]

    def list_suites(self) -> List[Dict[str, Any]]:
        return [s.get_info() for s in self.suites.values()]
