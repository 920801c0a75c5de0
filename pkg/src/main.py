"""
pants-homology 主入口点

提供命令行界面：测地线谱、连接计数、好裤枚举、脚分布、恒等式套件、覆叠组装与好裤同调。
"""

import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

# 添加项目根目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from src import __version__
from src.assembly.cover import (correct_multipants, cover_components, cover_degree, doubled_pants,
                                equidistribution_statistic, export_cover, glue, recompute_twists,
                                verify_good)
from src.config.settings import Settings
from src.geometry.chain_calculus import calibrate_constants
from src.geometry.connections import conn_count_table, count_fit
from src.geometry.fuchsian import SurfaceGroup, closed_geodesics, export_geodesics, load_surface, reverse_class
from src.geometry.hyperbolic_core import UnitTangent
from src.geometry.pants import (K_gamma, calibrate_R, enumerate_good_pants, equidistribution_report,
                                feet_table, good_pants_from_curve)
from src.homology.context import HomologyContext
from src.homology.omega import omega_report
from src.suites import default_registry
from src.utils.errors import IdentityFailure, PantsHomologyError
from src.utils.helpers import generate_run_id, get_file_hash, get_system_info, stable_hash, write_csv, write_json
from src.utils.logger import get_logger, setup_logging


@dataclass
class RunManifest:
    """一次运行的全部输入与计数；相同清单重跑得到相同的形式和"""
    command: str
    run_id: str
    version: str
    surface_hash: str
    eps: float
    R: float
    seed: int
    hard_cap: float
    relaxed: bool
    workers: int
    settings: Dict[str, Any]
    counts: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    ledger: List[Dict[str, Any]] = field(default_factory=list)
    seconds: float = 0.0
    system: Dict[str, Any] = field(default_factory=get_system_info)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class PantsCLI:
    """pants-homology 命令行界面"""

    def __init__(self):
        self.console = Console()
        self.settings: Optional[Settings] = None
        self.G: Optional[SurfaceGroup] = None
        self.logger = None
        self._ctx: Optional[HomologyContext] = None
        self._start = time.perf_counter()

    def initialize(self, config_file: Optional[str], overrides: Dict[str, Any], debug: bool = False) -> bool:
        """
        初始化应用程序

        Args:
            config_file: 配置文件路径
            overrides: 命令行覆盖项（"section.field" 形式）
            debug: 启用调试日志

        Returns:
            是否成功
        """
        self.settings = Settings.load_with_priority(config_file)
        self.settings.apply_overrides(overrides)
        if debug:
            self.settings.logging.level = "DEBUG"
        if not self.settings.validate():
            self.console.print("配置验证失败", style="red")
            return False

        setup_logging(
            level=self.settings.logging.level,
            log_file=self.settings.logging.file,
            max_size_mb=self.settings.logging.max_size_mb,
            backup_count=self.settings.logging.backup_count
        )
        self.logger = get_logger("cli")
        return True

    @property
    def out_dir(self) -> Path:
        return Path(self.settings.output.dir)

    @property
    def workers(self) -> int:
        return self.settings.jobs.workers

    def surface(self) -> SurfaceGroup:
        if self.G is None:
            s = self.settings
            source = s.surface.file or {'builtin': 'bolza', 'q0': s.surface.q0, 'L0': s.surface.L0}
            self.G = load_surface(
                source,
                hard_cap=s.enumeration.hard_cap,
                slack=s.enumeration.slack,
                max_elements=s.enumeration.max_elements,
                tol_matrix=s.geometry.tol_matrix,
                tol_cross_check=s.geometry.tol_cross_check,
                orbit_tol=s.geometry.orbit_tol,
            )
        return self.G

    def context(self) -> HomologyContext:
        if self._ctx is None:
            self._ctx = HomologyContext.build(self.surface(), self.settings.homology)
        return self._ctx

    def surface_hash(self) -> str:
        f = self.settings.surface.file
        if f and Path(f).exists():
            return get_file_hash(f)
        return stable_hash({'builtin': 'bolza', 'q0': self.settings.surface.q0, 'L0': self.settings.surface.L0})

    def manifest(self, command: str, counts: Dict[str, Any], outputs: List[Path]) -> Path:
        """在输出目录写出 RunManifest"""
        h = self.settings.homology
        m = RunManifest(
            command=command,
            run_id=generate_run_id(),
            version=__version__,
            surface_hash=self.surface_hash(),
            eps=h.eps,
            R=h.R,
            seed=h.seed,
            hard_cap=self.settings.enumeration.hard_cap,
            relaxed=h.relaxed,
            workers=self.workers,
            settings=self.settings.to_dict(),
            counts=counts,
            outputs=[str(p) for p in outputs],
            ledger=list(self._ctx.ledger) if self._ctx is not None else [],
            seconds=time.perf_counter() - self._start,
        )
        path = write_json(m.to_dict(), self.out_dir / f"{command}.manifest.json", self.settings.output.json_indent)
        self.logger.info(f"运行清单已写出: {path}")
        return path

    def write(self, data: Any, name: str) -> Path:
        return write_json(data, self.out_dir / name, self.settings.output.json_indent)

    def spinner(self, message: str) -> Progress:
        progress = Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                            console=self.console, transient=True)
        progress.add_task(message, total=None)
        return progress

    def good_curves(self):
        h = self.settings.homology
        return closed_geodesics(self.surface(), 2.0 * (h.R - h.eps), 2.0 * (h.R + h.eps))


def _run(cli: PantsCLI, fn) -> None:
    """执行命令体；领域错误转换为退出码"""
    try:
        fn()
    except PantsHomologyError as exc:
        cli.console.print(f"[{exc.code}] {exc.message}", style="red")
        if cli.logger:
            cli.logger.error(f"命令失败: {exc.to_dict()}")
        sys.exit(exc.exit_code)


@click.group()
@click.option('--config', '-c', 'config_file', help='配置文件路径')
@click.option('--surface', 'surface_file', help='曲面 YAML 文件')
@click.option('--eps', type=float, help='ε')
@click.option('--R', 'R', type=float, help='R')
@click.option('--cap', type=float, help='枚举位移上限')
@click.option('--seed', type=int, help='主种子')
@click.option('--jobs', type=int, help='并行线程数')
@click.option('--out', 'out_dir', help='输出目录')
@click.option('--relaxed/--strict', default=None, help='放宽模式')
@click.option('--debug', is_flag=True, help='启用调试日志')
@click.version_option(__version__, prog_name='pants-homology')
@click.pass_context
def main(ctx: click.Context, config_file, surface_file, eps, R, cap, seed, jobs, out_dir, relaxed, debug):
    """pants-homology - 闭双曲曲面上的好裤同调与有限覆盖"""
    overrides = {
        'surface.file': surface_file,
        'homology.eps': eps,
        'homology.R': R,
        'enumeration.hard_cap': cap,
        'homology.seed': seed,
        'jobs.workers': jobs,
        'output.dir': out_dir,
        'homology.relaxed': relaxed,
    }
    cli = PantsCLI()
    if not cli.initialize(config_file, overrides, debug):
        sys.exit(4)
    ctx.obj = cli


@main.command()
@click.option('--lo', type=float, default=0.0, help='长度下界')
@click.option('--hi', type=float, default=8.0, help='长度上界')
@click.pass_obj
def spectrum(cli: PantsCLI, lo: float, hi: float):
    """闭测地线长度谱"""
    def body():
        with cli.spinner("枚举闭测地线..."):
            classes = closed_geodesics(cli.surface(), lo, hi)
        path = cli.write(export_geodesics(classes), "spectrum.json")
        table = Table(title=f"闭测地线 [{lo}, {hi}]")
        table.add_column("长度", justify="right")
        table.add_column("代表字")
        table.add_column("同调")
        for c in classes[:20]:
            table.add_row(f"{c.length:.6f}", str(list(c.rep)), str(list(c.homology)))
        cli.console.print(table)
        cli.manifest('spectrum', {'geodesics': len(classes)}, [path])
    _run(cli, body)


@main.command('chain-constants')
@click.option('--safety', type=float, default=2.0, help='安全系数')
@click.pass_obj
def chain_constants(cli: PantsCLI, safety: float):
    """在网格上校准链引理常数，并与配置中的常数比较"""
    def body():
        with cli.spinner("校准链引理常数..."):
            calibrated = calibrate_constants(safety=safety)
        configured = asdict(cli.settings.chain)
        rows = [{'constant': k, 'calibrated': v, 'configured': configured[k], 'ok': v <= configured[k]}
                for k, v in calibrated.items()]
        table = Table(title="链引理常数")
        for col in ("常数", "校准值", "配置值"):
            table.add_column(col)
        for r in rows:
            table.add_row(r['constant'], f"{r['calibrated']:.4g}", f"{r['configured']:.4g}",
                          style="green" if r['ok'] else "red")
        cli.console.print(table)
        path = write_csv(rows, cli.out_dir / "chain_constants.csv")
        cli.manifest('chain-constants', {r['constant']: r['calibrated'] for r in rows}, [path])
    _run(cli, body)


@main.command('conn-count')
@click.option('--L-min', 'L_min', type=float, default=6.0)
@click.option('--L-max', 'L_max', type=float, default=9.0)
@click.option('--step', type=float, default=1.0)
@click.option('--window', type=float, default=0.5, help='角度与长度窗口 ε')
@click.option('--direction', type=float, default=0.0, help='u、v 的方向角')
@click.pass_obj
def conn_count(cli: PantsCLI, L_min: float, L_max: float, step: float, window: float, direction: float):
    """连接计数与指数律拟合"""
    def body():
        G = cli.surface()
        u = UnitTangent(G.basepoint, direction)
        n = int(round((L_max - L_min) / step)) + 1
        lengths = [L_min + k * step for k in range(n)]
        with cli.spinner("统计连接数..."):
            rows = conn_count_table(G, u, u, window, lengths, cli.workers)
        path = write_csv(rows, cli.out_dir / "conn_count.csv")
        slope, intercept, rel = count_fit((r['L'], r['count']) for r in rows)
        cli.console.print(Panel(f"斜率 {slope:.4f}\n截距 {intercept:.4f}\n最大相对残差 {rel:.3g}",
                                title="计数拟合", border_style="blue"))
        cli.manifest('conn-count', {'rows': rows, 'slope': slope, 'intercept': intercept,
                                    'max_rel_residual': rel}, [path])
    _run(cli, body)


@main.command()
@click.option('--max-curves', type=int, default=None, help='只取前若干条好曲线')
@click.pass_obj
def pants(cli: PantsCLI, max_curves: Optional[int]):
    """枚举好裤子并输出 K_γ 表"""
    def body():
        G, h = cli.surface(), cli.settings.homology
        curves = cli.good_curves()
        if max_curves:
            curves = curves[:max_curves]
        with cli.spinner("枚举好裤子..."):
            mu = enumerate_good_pants(G, h.eps, h.R, curves=curves, workers=cli.workers)
        path = cli.write([p.to_dict() for p in mu.support()], "pants.json")
        rows = []
        for g in curves:
            rows.append({'curve': list(g.rep), 'length': g.length, 'K': K_gamma(G, g, h.eps, h.R),
                         'K_bar': K_gamma(G, reverse_class(G, g), h.eps, h.R)})
        table_path = write_csv(rows, cli.out_dir / "K_gamma.csv")
        cli.console.print(f"{len(curves)} 条好曲线，{len(mu)} 条好裤子", style="green")
        cli.manifest('pants', {'curves': len(curves), 'pants': len(mu)}, [path, table_path])
    _run(cli, body)


@main.command()
@click.option('--curve', 'curve_index', type=int, default=0, help='好曲线的下标')
@click.option('--bins', type=int, default=8)
@click.pass_obj
def feet(cli: PantsCLI, curve_index: int, bins: int):
    """一条好曲线上的脚分布"""
    def body():
        G, h = cli.surface(), cli.settings.homology
        curves = cli.good_curves()
        if not curves:
            cli.console.print("没有好曲线", style="yellow")
            return
        gamma = curves[curve_index % len(curves)]
        with cli.spinner("枚举好裤子..."):
            mu = enumerate_good_pants(G, h.eps, h.R, curves=[gamma], workers=cli.workers)
        path = write_csv(feet_table(mu, gamma), cli.out_dir / "feet.csv")
        report = equidistribution_report(mu, gamma, bins)
        report['delta'] = equidistribution_statistic(mu, gamma)
        report_path = cli.write(report, "feet_report.json")
        cli.console.print(Panel(f"总质量 {report['total']}\n最大相对偏差 {report['max_rel_dev']:.3g}\n"
                                f"δ 等价统计量 {report['delta']:.4g}", title="脚分布", border_style="blue"))
        cli.manifest('feet', {'curve': list(gamma.rep), 'feet': len(report['bins'])}, [path, report_path])
    _run(cli, body)


@main.command()
@click.option('--suite', 'suites', multiple=True, help='只运行指定套件（可重复）')
@click.option('--count', type=int, default=None, help='每个套件的实例数')
@click.pass_obj
def identities(cli: PantsCLI, suites, count: Optional[int]):
    """以零容差验证全部边界恒等式"""
    def body():
        registry = default_registry()
        ctx = cli.context()
        names = list(suites) or registry.names()
        results = [registry.run(name, ctx, count) for name in names]
        table = Table(title="恒等式套件")
        for col in ("套件", "通过", "失败", "构造失败", "秒"):
            table.add_column(col)
        for r in results:
            d = r.to_dict()
            style = "green" if r.success else ("red" if r.failed or r.error else "yellow")
            table.add_row(r.name, str(d['passed']), str(d['failed']), str(d['errors']), f"{r.seconds:.1f}",
                          style=style)
        cli.console.print(table)
        path = cli.write([r.to_dict() for r in results], "identities.json")
        cli.manifest('identities', {r.name: r.to_dict()['passed'] for r in results}, [path])
        if any(r.failed for r in results):
            raise IdentityFailure("存在残差非零的恒等式实例")
        short = [r.name for r in results if not r.complete]
        if short:
            raise IdentityFailure(f"套件未验证足够的实例: {', '.join(short)}", suites=short)
    _run(cli, body)


@main.command('build-cover')
@click.option('--source', type=click.Choice(['doubled', 'corrected']), default='doubled')
@click.option('--curve', 'curve_index', type=int, default=0, help='起始好曲线的下标')
@click.option('--max-steps', type=int, default=16)
@click.option('--max-curves', type=int, default=None, help='corrected：μ₁ 只取前若干条好曲线')
@click.pass_obj
def build_cover(cli: PantsCLI, source: str, curve_index: int, max_steps: int, max_curves: Optional[int]):
    """由边界消去的多裤子组装覆叠"""
    def body():
        G, h = cli.surface(), cli.settings.homology
        curves = cli.good_curves()
        if source == 'doubled':
            gamma = curves[curve_index % len(curves)]
            candidates = good_pants_from_curve(G, gamma, h.eps, h.R)
            if not candidates:
                cli.console.print("起始曲线上没有好裤子", style="yellow")
                sys.exit(4)
            mu = doubled_pants(G, candidates[0], h.eps, h.R, max_steps)
            cover = glue(G, mu, h.eps, h.R)
            path = export_cover(cover, G, cli.out_dir / "cover.json", h.eps, h.R)
            good = verify_good(cover, h.eps, h.R)
            drift = recompute_twists(G, cover)
            cli.console.print(Panel(f"裤子 {len(cover.instances)}，χ = {cover.euler}，"
                                    f"度数 {cover_degree(cover, G)}\n连通分支 {len(cover_components(cover))}\n"
                                    f"好性 {'通过' if good['ok'] else '未通过'}，扭转重算偏差 {drift:.2e}",
                                    title="覆叠", border_style="green" if good['ok'] else "red"))
            cli.manifest('build-cover', {'pants': len(cover.instances), 'euler': cover.euler,
                                         'good': good['ok'], 'twist_drift': drift}, [path])
            if not good['ok']:
                sys.exit(4)
        else:
            ctx = cli.context()
            subset = curves[:max_curves] if max_curves else curves
            mu1 = enumerate_good_pants(G, h.eps, h.R, curves=subset, workers=cli.workers)
            correction = correct_multipants(ctx, mu1)
            path = cli.write(correction.to_dict(), "correction.json")
            cli.console.print(Panel(f"N = {correction.N}\n边界为零: {correction.evenly_distributed}\n"
                                    f"负系数 {correction.negative}\nmax|Φ(ν)(Π)| = {float(correction.max_phi):.4g}",
                                    title="修正", border_style="blue"))
            cli.manifest('build-cover', correction.to_dict(), [path])
            if not correction.evenly_distributed:
                raise IdentityFailure("修正后的多裤子边界不为零")
    _run(cli, body)


@main.command()
@click.option('--max-curves', type=int, default=None)
@click.option('--phi-curves', type=int, default=0, help='额外验证 Φ 的曲线数')
@click.pass_obj
def homology(cli: PantsCLI, max_curves: Optional[int], phi_curves: int):
    """好裤同调 Ω₁ 的 Smith 标准形"""
    def body():
        ctx = cli.context()
        with cli.spinner("计算 Smith 标准形..."):
            report = omega_report(ctx, max_curves=max_curves, phi_curves=phi_curves, workers=cli.workers)
        path = cli.write(report, "homology.json")
        cli.console.print(Panel(f"裤子 {report['pants']}，曲线 {report['curves']}\n秩 {report['rank']}，"
                                f"挠 {report['torsion']}\n到 H₁ 的像秩 {report['h1_rank']}\n"
                                f"∂ 的像在核内: {report['boundary_in_kernel']}",
                                title="Ω₁", border_style="blue"))
        cli.manifest('homology', {k: report[k] for k in ('pants', 'curves', 'rank', 'h1_rank')}, [path])
        if not report['boundary_in_kernel']:
            raise IdentityFailure("裤子边界的同调像不为零")
    _run(cli, body)


@main.command()
@click.option('--R-values', 'R_values', default="4,5,6,7", help='逗号分隔的 R')
@click.option('--cal-eps', type=float, default=0.5)
@click.option('--max-curves', type=int, default=None, help='每个 R 只检查前若干条曲线')
@click.pass_obj
def calibrate(cli: PantsCLI, R_values: str, cal_eps: float, max_curves: Optional[int]):
    """求使每条好曲线都有好裤子的最小 R*"""
    def body():
        values = [float(x) for x in R_values.split(',') if x.strip()]
        rows = calibrate_R(cli.surface(), cal_eps, values, max_curves=max_curves, workers=cli.workers)
        path = write_csv(rows, cli.out_dir / "calibrate.csv")
        R_star = next((r['R'] for r in rows if r['curves'] and r['K_min'] >= 1), None)
        cli.console.print(f"R* = {R_star}", style="green" if R_star is not None else "yellow")
        cli.manifest('calibrate', {'R_star': R_star, 'rows': rows}, [path])
    _run(cli, body)


if __name__ == "__main__":
    main()
