"""
恒等式套件

每个套件在确定性选取的实例上以零容差验证一条边界恒等式。
"""

from .base_suite import IdentitySuite, InstanceResult, InstanceStatus, SuiteRegistry, SuiteResult
from .identity_suites import SUITES, default_registry

__all__ = [
    "IdentitySuite",
    "InstanceResult",
    "InstanceStatus",
    "SUITES",
    "SuiteRegistry",
    "SuiteResult",
    "default_registry",
]
