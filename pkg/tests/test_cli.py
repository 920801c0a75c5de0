"""
命令行界面的测试
"""

import pytest
from click.testing import CliRunner

from src import __version__
from src.algebra.formal_algebra import FormalSum
from src.homology.dichotomy import homology_sum, pair_boundary, phi2
from src.main import PantsCLI, main
from src.suites import IdentitySuite, SuiteRegistry
from src.utils.errors import IdentityElement
from src.utils.helpers import read_json


@pytest.fixture
def runner():
    return CliRunner()


class TestCLI:
    def test_help(self, runner):
        result = runner.invoke(main, ['--help'])
        assert result.exit_code == 0
        for command in ('spectrum', 'chain-constants', 'conn-count', 'pants', 'feet', 'identities', 'build-cover',
                        'homology', 'calibrate'):
            assert command in result.output

    def test_version(self, runner):
        result = runner.invoke(main, ['--version'])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_invalid_configuration(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['--eps', '2.0', 'spectrum'])
        assert result.exit_code == 4

    def test_spectrum_writes_outputs(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['--out', 'out', 'spectrum', '--lo', '0', '--hi', '3.2'])
            assert result.exit_code == 0, result.output
            rows = read_json('out/spectrum.json')
            manifest = read_json('out/spectrum.manifest.json')
        assert rows
        assert manifest['command'] == 'spectrum'
        assert manifest['counts']['geodesics'] == len(rows)

    def test_cap_exceeded_exit_code(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['--out', 'out', 'spectrum', '--lo', '0', '--hi', '30'])
        assert result.exit_code == 3


class Phi2Suite(IdentitySuite):
    default_count = 3

    def __init__(self, words=((1,), (-2, 3), (1, -4, -4)), raising=False):
        super().__init__("phi2", "φ₂ 的边界")
        self.words = list(words)
        self.raising = raising

    def instances(self, ctx, count):
        return self.words[:count]

    def construct(self, ctx, word):
        if self.raising:
            raise IdentityElement("构造失败", word=word)
        return phi2(word)

    def boundary_of(self, ctx, chain):
        return pair_boundary(chain)

    def expected(self, ctx, word):
        return FormalSum.single(word) - homology_sum(ctx.G, word)


class TestIdentitiesExitCode:
    def _invoke(self, runner, monkeypatch, ctx, suite):
        registry = SuiteRegistry()
        registry.register(suite)
        monkeypatch.setattr("src.main.default_registry", lambda: registry)
        monkeypatch.setattr(PantsCLI, "context", lambda self: ctx)
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['--out', 'out', 'identities'])
            rows = read_json('out/identities.json')
        return result, rows

    def test_all_instances_pass(self, runner, monkeypatch, ctx):
        result, rows = self._invoke(runner, monkeypatch, ctx, Phi2Suite())
        assert result.exit_code == 0, result.output
        assert rows[0]['passed'] == rows[0]['required'] == 3

    def test_construction_errors_fail_the_run(self, runner, monkeypatch, ctx):
        result, rows = self._invoke(runner, monkeypatch, ctx, Phi2Suite(raising=True))
        assert result.exit_code == 2
        assert rows[0]['passed'] == 0

    def test_too_few_instances_fail_the_run(self, runner, monkeypatch, ctx):
        result, rows = self._invoke(runner, monkeypatch, ctx, Phi2Suite(words=[(1,), (-2, 3)]))
        assert result.exit_code == 2
        assert rows[0]['passed'] == 2
        assert rows[0]['required'] == 3
