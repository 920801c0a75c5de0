"""
日志系统

为几何枚举、构造与恒等式校验提供统一的日志记录，支持 Rich 控制台与轮转文件输出。
"""

import functools
import logging
import logging.handlers
import time
from pathlib import Path
from typing import Optional

from rich.console import Console
from rich.logging import RichHandler

ROOT_LOGGER = "pants-homology"

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'


def get_logger(
    name: str,
    level: str = "INFO",
    log_file: Optional[str] = None,
    max_size_mb: int = 10,
    backup_count: int = 5
) -> logging.Logger:
    """
    获取配置好的日志记录器

    Args:
        name: 日志记录器名称（模块名会挂在 pants-homology 根记录器下）
        level: 日志级别
        log_file: 日志文件路径
        max_size_mb: 日志文件最大大小（MB）
        backup_count: 备份文件数量

    Returns:
        配置好的日志记录器
    """
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
        name = f"{ROOT_LOGGER}.{name}"
    logger = logging.getLogger(name)

    # 子记录器通过传播使用根记录器的处理器
    if name != ROOT_LOGGER or logger.handlers:
        return logger

    logger.setLevel(getattr(logging, level.upper(), logging.INFO))
    formatter = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    console_handler = RichHandler(
        console=Console(stderr=True),
        rich_tracebacks=True,
        tracebacks_show_locals=True
    )
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_file,
            maxBytes=max_size_mb * 1024 * 1024,
            backupCount=backup_count,
            encoding='utf-8'
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    max_size_mb: int = 10,
    backup_count: int = 5
) -> logging.Logger:
    """
    设置全局日志配置

    Args:
        level: 日志级别
        log_file: 日志文件路径
        max_size_mb: 日志文件最大大小（MB）
        backup_count: 备份文件数量

    Returns:
        根日志记录器
    """
    root_logger = get_logger(
        name=ROOT_LOGGER,
        level=level,
        log_file=log_file,
        max_size_mb=max_size_mb,
        backup_count=backup_count
    )
    root_logger.setLevel(getattr(logging, level.upper(), logging.INFO))

    # 第三方库只保留警告
    for noisy in ("matplotlib", "numba", "sympy", "hypothesis"):
        logging.getLogger(noisy).setLevel(logging.WARNING)

    root_logger.debug("日志系统初始化完成")
    return root_logger


def log_function_call(func):
    """
    函数调用日志装饰器

    Args:
        func: 要装饰的函数

    Returns:
        装饰后的函数
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = get_logger(func.__module__)
        logger.debug(f"调用函数: {func.__name__}")
        try:
            result = func(*args, **kwargs)
            logger.debug(f"函数 {func.__name__} 执行成功")
            return result
        except Exception as e:
            logger.error(f"函数 {func.__name__} 执行失败: {e}")
            raise
    return wrapper


def log_performance(func):
    """
    性能监控装饰器

    Args:
        func: 要装饰的函数

    Returns:
        装饰后的函数
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = get_logger(func.__module__)
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception:
            logger.error(f"函数 {func.__name__} 执行失败，耗时: {time.perf_counter() - start_time:.2f}秒")
            raise
        logger.debug(f"函数 {func.__name__} 执行时间: {time.perf_counter() - start_time:.2f}秒")
        return result
    return wrapper
