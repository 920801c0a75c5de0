"""
配置管理模块

负责加载和管理容差、枚举上限与构造参数。
"""

from .settings import Settings
from .env_loader import load_env

__all__ = ["Settings", "load_env"]
