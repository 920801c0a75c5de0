"""
环境变量加载器

通过 python-dotenv 读取 .env 文件，并把 PANTS_* 变量映射到配置覆盖项。
"""

import os
from typing import Any, Callable, Dict, Optional

from dotenv import load_dotenv

# 环境变量 -> (配置节, 字段, 类型转换)
ENV_OVERRIDES: Dict[str, tuple] = {
    "PANTS_SEED": ("homology", "seed", int),
    "PANTS_LOG_LEVEL": ("logging", "level", str),
    "PANTS_JOBS": ("jobs", "workers", int),
    "PANTS_OUT": ("output", "dir", str),
    "PANTS_HARD_CAP": ("enumeration", "hard_cap", float),
}


def load_env(env_file: Optional[str] = None) -> Dict[str, Any]:
    """
    加载环境变量并返回已识别的覆盖项

    Args:
        env_file: .env 文件路径，缺省时由 python-dotenv 自动查找

    Returns:
        {(section, field): value} 形式展开后的覆盖字典，键为 "section.field"
    """
    if env_file:
        load_dotenv(env_file, override=False)
    else:
        load_dotenv(override=False)

    overrides: Dict[str, Any] = {}
    for var, (section, key, cast) in ENV_OVERRIDES.items():
        raw = os.getenv(var)
        if raw is None or raw == "":
            continue
        try:
            overrides[f"{section}.{key}"] = _cast(cast, raw)
        except ValueError:
            # 无法解析的值直接忽略，保留文件配置
            continue
    return overrides


def _cast(cast: Callable[[str], Any], raw: str) -> Any:
    return cast(raw.strip())
