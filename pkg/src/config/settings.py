"""
配置设置管理

负责管理几何容差、枚举上限、构造参数与输出位置，支持 YAML 文件与 PANTS_* 环境变量。
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .env_loader import load_env

logger = logging.getLogger("pants-homology.config")


@dataclass
class GeometryConfig:
    """数值容差"""
    tol_matrix: float = 1e-9
    tol_angle: float = 1e-6
    tol_cross_check: float = 1e-6
    orbit_tol: float = 0.1


@dataclass
class SurfaceConfig:
    """基础曲面配置"""
    file: str = ""
    q0: float = 1.0
    L0: float = 2.0


@dataclass
class EnumerationConfig:
    """枚举上限"""
    hard_cap: float = 14.0
    slack: float = 2.5
    max_elements: int = 2_000_000


@dataclass
class ChainConfig:
    """链引理常数"""
    Q: float = 4.0
    C_chain: float = 10.0
    C_ra: float = 20.0
    C_ang: float = 10.0
    D1: float = 4.0
    sample_step: float = 0.01


@dataclass
class HomologyConfig:
    """好裤同调构造参数"""
    eps: float = 0.8
    R: float = 5.0
    relaxed: bool = True
    n_desk: int = 2
    support_cap: int = 3
    aux_cap: int = 1
    C_small: float = 3.0
    K: float = 4.0
    v_directions: int = 64
    v0_offset: float = math.pi / 4
    v_dir: Optional[float] = 0.3
    seed: int = 0


@dataclass
class OutputConfig:
    """输出配置"""
    dir: str = "./out"
    json_indent: int = 2


@dataclass
class JobsConfig:
    """并行配置"""
    workers: int = 1


@dataclass
class LoggingConfig:
    """日志配置"""
    level: str = "INFO"
    file: str = "./pants-homology.log"
    max_size_mb: int = 10
    backup_count: int = 5


_SECTIONS = ("geometry", "surface", "enumeration", "chain", "homology",
             "output", "jobs", "logging")


@dataclass
class Settings:
    """应用程序设置"""
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    enumeration: EnumerationConfig = field(default_factory=EnumerationConfig)
    chain: ChainConfig = field(default_factory=ChainConfig)
    homology: HomologyConfig = field(default_factory=HomologyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    jobs: JobsConfig = field(default_factory=JobsConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def from_dict(cls, config_data: Optional[Dict[str, Any]]) -> "Settings":
        """
        从字典构造配置，未知键被忽略

        Args:
            config_data: 按配置节分组的字典

        Returns:
            Settings实例
        """
        if not config_data:
            return cls()
        kwargs = {}
        for section in _SECTIONS:
            section_cls = type(getattr(cls(), section))
            known = {f.name for f in fields(section_cls)}
            data = config_data.get(section) or {}
            unknown = set(data) - known
            if unknown:
                logger.warning(f"配置节 {section} 中存在未知键: {sorted(unknown)}")
            kwargs[section] = section_cls(**{k: v for k, v in data.items() if k in known})
        return cls(**kwargs)

    @classmethod
    def load_from_file(cls, config_file: str = "config.yaml") -> "Settings":
        """
        从YAML文件加载配置

        Args:
            config_file: 配置文件路径

        Returns:
            Settings实例
        """
        config_path = Path(config_file)
        if not config_path.exists():
            logger.warning(f"配置文件 {config_file} 不存在，使用默认配置")
            return cls()

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config_data = yaml.safe_load(f)
            return cls.from_dict(config_data)
        except Exception as e:
            logger.warning(f"加载配置文件失败: {e}，使用默认配置")
            return cls()

    @classmethod
    def load_with_priority(cls, config_file: Optional[str] = None,
                           env_file: Optional[str] = None) -> "Settings":
        """
        按优先级加载配置：显式文件 → config.yaml → 默认值，然后应用环境变量覆盖

        Args:
            config_file: YAML配置文件路径
            env_file: .env 文件路径

        Returns:
            Settings实例
        """
        candidate = Path(config_file) if config_file else Path("config.yaml")
        if candidate.exists():
            settings = cls.load_from_file(str(candidate))
            logger.debug(f"从YAML文件加载配置: {candidate}")
        else:
            if config_file:
                logger.warning(f"配置文件 {config_file} 不存在，使用默认配置")
            settings = cls()

        settings.apply_overrides(load_env(env_file))
        return settings

    def apply_overrides(self, overrides: Dict[str, Any]) -> None:
        """
        应用 "section.field" 形式的覆盖项

        Args:
            overrides: 覆盖字典
        """
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, _, key = dotted.partition(".")
            target = getattr(self, section, None)
            if target is None or not hasattr(target, key):
                logger.warning(f"忽略未知配置覆盖: {dotted}")
                continue
            setattr(target, key, value)

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return asdict(self)

    def save_to_file(self, config_file: str = "config.yaml") -> None:
        """
        保存配置到文件

        Args:
            config_file: 配置文件路径
        """
        try:
            with open(config_file, 'w', encoding='utf-8') as f:
                yaml.dump(self.to_dict(), f, default_flow_style=False, allow_unicode=True)
            logger.info(f"配置已保存到 {config_file}")
        except Exception as e:
            logger.error(f"保存配置文件失败: {e}")

    def problems(self) -> List[str]:
        """
        列出所有违反的配置约束

        Returns:
            问题描述列表，空列表表示配置有效
        """
        issues: List[str] = []
        g = self.geometry
        for name in ("tol_matrix", "tol_angle", "tol_cross_check", "orbit_tol"):
            if getattr(g, name) <= 0:
                issues.append(f"geometry.{name} 必须大于0")
        h = self.homology
        if not (0 < h.eps <= 1):
            issues.append("homology.eps 必须在 (0, 1] 之间")
        if h.R <= 0:
            issues.append("homology.R 必须大于0")
        if h.n_desk < 1:
            issues.append("homology.n_desk 必须至少为1")
        if h.support_cap < 1:
            issues.append("homology.support_cap 必须至少为1")
        if h.aux_cap < 1:
            issues.append("homology.aux_cap 必须至少为1")
        if h.v_directions < 1:
            issues.append("homology.v_directions 必须至少为1")
        if self.enumeration.hard_cap <= 0:
            issues.append("enumeration.hard_cap 必须大于0")
        if self.enumeration.slack < 0:
            issues.append("enumeration.slack 不能为负")
        if self.surface.q0 <= 0:
            issues.append("surface.q0 必须大于0")
        if self.jobs.workers < 1:
            issues.append("jobs.workers 必须至少为1")
        if self.logging.level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            issues.append(f"logging.level 无效: {self.logging.level}")
        return issues

    def validate(self) -> bool:
        """
        验证配置的有效性

        Returns:
            验证结果
        """
        issues = self.problems()
        for issue in issues:
            logger.error(f"错误：{issue}")
        return not issues
