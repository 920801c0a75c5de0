"""
辅助函数

输出目录、JSON/CSV 导出、文件哈希、配置合并、确定性种子派生与工作池。
"""

import csv
import hashlib
import json
import platform
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, TypeVar, Union

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def ensure_directory(path: Union[str, Path]) -> Path:
    """
    确保目录存在

    Args:
        path: 目录路径

    Returns:
        Path对象
    """
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _to_jsonable(obj: Any) -> Any:
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, datetime):
        return obj.isoformat()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"无法序列化类型 {type(obj).__name__}")


def write_json(data: Any, path: Union[str, Path], indent: int = 2) -> Path:
    """
    写出 JSON 文件（自动创建父目录）

    Args:
        data: 可序列化对象（支持 numpy 标量与数组）
        path: 输出路径
        indent: 缩进

    Returns:
        写出的路径
    """
    path = Path(path)
    ensure_directory(path.parent)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=indent, ensure_ascii=False, default=_to_jsonable)
    return path


def read_json(path: Union[str, Path]) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_csv(rows: Iterable[Mapping[str, Any]], path: Union[str, Path],
              fieldnames: Optional[Sequence[str]] = None) -> Path:
    """
    写出 CSV 表格

    Args:
        rows: 字典行
        path: 输出路径
        fieldnames: 列名，默认取第一行的键

    Returns:
        写出的路径
    """
    rows = list(rows)
    path = Path(path)
    ensure_directory(path.parent)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in fieldnames})
    return path


def get_file_hash(file_path: Union[str, Path], algorithm: str = 'sha256') -> str:
    """
    计算文件哈希值

    Args:
        file_path: 文件路径
        algorithm: 哈希算法

    Returns:
        哈希值
    """
    hash_obj = hashlib.new(algorithm)

    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(4096), b""):
            hash_obj.update(chunk)

    return hash_obj.hexdigest()


def stable_hash(obj: Any) -> str:
    """对象的规范 JSON 表示的 sha256"""
    text = json.dumps(obj, sort_keys=True, default=_to_jsonable)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def derive_seed(seed: int, *parts: Any) -> int:
    """由主种子与调用位置派生子种子，与调用顺序无关"""
    digest = hashlib.sha256(json.dumps([seed, *parts], default=_to_jsonable).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def parallel_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    保序并行映射；workers ≤ 1 时顺序执行

    numpy 的矩阵运算会释放 GIL，线程池即可获得并行度。
    """
    if workers <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def generate_run_id() -> str:
    return datetime.now().strftime("%Y%m%d-%H%M%S-") + uuid.uuid4().hex[:8]


def get_system_info() -> Dict[str, Any]:
    """
    获取系统信息

    Returns:
        系统信息字典
    """
    return {
        'platform': platform.system(),
        'architecture': platform.machine(),
        'python_version': platform.python_version(),
        'numpy_version': np.__version__,
    }
