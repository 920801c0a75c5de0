"""
恒等式套件框架的测试
"""

import json

import pytest

from src.algebra.formal_algebra import FormalSum
from src.homology.dichotomy import homology_sum, pair_boundary, phi2
from src.suites import SUITES, IdentitySuite, InstanceStatus, SuiteRegistry, default_registry
from src.utils.errors import IdentityElement


class Phi2Suite(IdentitySuite):
    """∂φ₂(B) = B − H(B)：不依赖连接枚举的小套件"""

    default_count = 3

    def __init__(self, broken=False):
        super().__init__("phi2", "φ₂ 的边界")
        self.broken = broken

    def instances(self, ctx, count):
        return [(1,), (-2, 3), (1, -4, -4)][:count]

    def construct(self, ctx, word):
        return phi2(word)

    def boundary_of(self, ctx, chain):
        return pair_boundary(chain)

    def expected(self, ctx, word):
        out = FormalSum.single(word) - homology_sum(ctx.G, word)
        return out + FormalSum.single(word) if self.broken else out


class RaisingSuite(Phi2Suite):
    def construct(self, ctx, word):
        raise IdentityElement("构造失败", word=word)


class TestSuiteRuns:
    def test_passing_suite(self, ctx):
        result = Phi2Suite().safe_execute(ctx)
        assert result.success
        assert result.count(InstanceStatus.PASS) == 3
        assert result.seconds >= 0.0

    def test_count_limits_instances(self, ctx):
        assert len(Phi2Suite().safe_execute(ctx, 1).instances) == 1

    def test_nonzero_residual_fails(self, ctx):
        result = Phi2Suite(broken=True).safe_execute(ctx)
        assert not result.success
        assert result.failed
        assert all(r.residual == 1 for r in result.instances)

    def test_construction_errors_are_recorded(self, ctx):
        result = RaisingSuite().safe_execute(ctx)
        assert not result.success
        assert not result.failed
        assert result.count(InstanceStatus.ERROR) == 3
        assert result.instances[0].error['code'] == 'identity_element'

    def test_disabled_suite(self, ctx):
        suite = Phi2Suite()
        suite.enabled = False
        result = suite.safe_execute(ctx)
        assert result.error == "Suite disabled"

    def test_invalid_count(self, ctx):
        assert Phi2Suite().safe_execute(ctx, 0).error == "Invalid parameters"

    def test_result_serialises(self, ctx):
        data = json.loads(Phi2Suite().safe_execute(ctx).to_json())
        assert data['passed'] == 3
        assert data['failed'] == 0
        assert data['instances'][0]['status'] == 'pass'


class TestRegistry:
    def test_default_registry(self):
        registry = default_registry()
        assert registry.names() == [cls().name for cls in SUITES]
        assert "Phi" in registry.names()

    def test_info(self):
        info = default_registry().list_suites()[0]
        assert set(info) == {'name', 'description', 'enabled', 'default_count'}

    def test_unknown_suite(self, ctx):
        result = default_registry().run("nope", ctx)
        assert result.error == "Suite not found"

    def test_run_all_skips_disabled(self, ctx):
        registry = SuiteRegistry()
        registry.register(Phi2Suite())
        off = RaisingSuite()
        off.name = "off"
        off.enabled = False
        registry.register(off)
        results = registry.run_all(ctx)
        assert [r.name for r in results] == ["phi2"]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["phi", "curve"])
    def test_group_level_suites_have_no_residual(self, ctx, name):
        result = default_registry().run(name, ctx, 2)
        assert not result.failed
