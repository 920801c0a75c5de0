"""
工具函数模块

日志、错误层次与导出辅助函数。
"""

from .errors import PantsHomologyError
from .helpers import derive_seed, ensure_directory, parallel_map, write_csv, write_json
from .logger import get_logger, setup_logging

__all__ = [
    "PantsHomologyError",
    "derive_seed",
    "ensure_directory",
    "get_logger",
    "parallel_map",
    "setup_logging",
    "write_csv",
    "write_json",
]
