"""
测试公共夹具

曲面群只加载一次；同调上下文使用默认的放宽配置与固定的 v 方向，避免网格搜索。
"""

import pytest
from hypothesis import settings as hyp_settings

from src.config.settings import HomologyConfig, Settings
from src.geometry.fuchsian import load_surface
from src.homology.context import HomologyContext

hyp_settings.register_profile("pants", max_examples=60, deadline=None)
hyp_settings.load_profile("pants")


@pytest.fixture(scope="session")
def G():
    """内置的正八边形曲面"""
    return load_surface()


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture(scope="session")
def ctx(G):
    """放宽模式的同调上下文（ε = 0.8，R = 5）"""
    return HomologyContext.build(G, HomologyConfig())


@pytest.fixture
def strict_ctx(G):
    return HomologyContext.build(G, HomologyConfig(relaxed=False))
