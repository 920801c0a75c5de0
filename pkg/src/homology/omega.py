"""
Φ、Ψ 与好裤同调

Φ(γ) = −RC(γ) + R_{G×G}(φ(X(γ))) + R_{G×G}(φ(Y(γ)))，Ψ(h) = Σ h_i·R_G(h_i)，
二者满足 ∂Φ(γ) = γ − Ψ(H(γ))。Ω₁ = ZΓ_{ε,R} / ∂(ZΠ_{ε,R}) 由边界矩阵的 Smith 标准形给出。
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from ..algebra.formal_algebra import FormalSum, linear_sum
from ..geometry.fuchsian import ConjClass, SurfaceGroup, abelianize, closed_geodesics
from ..geometry.pants import boundary, class_sum, curve_sum, enumerate_good_pants
from ..utils.errors import IdentityFailure, PantsHomologyError
from ..utils.logger import get_logger, log_performance
from .context import HomologyContext
from .dichotomy import (curve_dichotomy, curve_to_group, pairs_to_pants, phi_bounded,
                        replace_group)

logger = get_logger(__name__)


def Phi(ctx: HomologyContext, gamma: ConjClass) -> FormalSum:
    """
    Φ(γ)，满足 ∂Φ(γ) = γ − Ψ(H(γ))

    Raises:
        PantsHomologyError: 任一辅助构造失败
    """
    def build() -> FormalSum:
        D = curve_dichotomy(ctx, gamma)
        parts = [curve_to_group(ctx, gamma).scale(-1)]
        for w in (D.X, D.Y):
            parts.append(pairs_to_pants(ctx, phi_bounded(ctx, w)))
        return linear_sum(parts)
    return ctx.memo(('Phi', gamma.key), build)


def Psi(ctx: HomologyContext, h: Sequence[int]) -> FormalSum:
    """Ψ(h) = Σ h_i·R_G(第 i 个生成元)，Z-线性"""
    return linear_sum(replace_group(ctx, (i + 1,)).scale(c) for i, c in enumerate(h) if c)


def homology_vector(G: SurfaceGroup, gamma: ConjClass) -> Tuple[int, ...]:
    """H(γ)：代表字的指数和向量"""
    return abelianize(gamma.rep, G.rank)


def check_phi(ctx: HomologyContext, gamma: ConjClass) -> Dict[str, Any]:
    """
    验证 ∂Φ(γ) = γ − Ψ(H(γ))

    Returns:
        {word, ok, pants, l1, denominator, residual}

    Raises:
        IdentityFailure: 严格模式下恒等式不成立
    """
    G = ctx.G
    phi = Phi(ctx, gamma)
    h = homology_vector(G, gamma)
    residual = boundary(G, phi) - (curve_sum(G, gamma.rep) - Psi(ctx, h))
    ok = residual.is_zero()
    row = {
        'word': list(gamma.rep),
        'homology': list(h),
        'ok': ok,
        'pants': len(phi),
        'l1': str(phi.l1()),
        'denominator': phi.denominator(),
        'residual': len(residual),
    }
    if ok:
        logger.info(f"∂Φ 恒等式成立: {list(gamma.rep)}，{len(phi)} 条裤子")
    else:
        logger.error(f"∂Φ 恒等式不成立: {list(gamma.rep)}，残差支撑 {len(residual)}")
        if not ctx.relaxed:
            raise IdentityFailure("∂Φ(γ) ≠ γ − Ψ(H(γ))", word=gamma.rep)
    return row


def phi_report(ctx: HomologyContext, curves: Sequence[ConjClass]) -> List[Dict[str, Any]]:
    """逐条曲线验证 Φ 并记录规模；构造失败的曲线记为错误"""
    rows = []
    for gamma in curves:
        try:
            rows.append(check_phi(ctx, gamma))
        except IdentityFailure:
            raise
        except PantsHomologyError as exc:
            logger.warning(f"Φ 未定义: {list(gamma.rep)}: {exc}")
            rows.append({'word': list(gamma.rep), 'ok': False, 'error': exc.to_dict()})
    return rows


# ---------------------------------------------------------------- Ω₁


def _snf_diagonal(rows: List[List[int]], n_cols: int) -> List[int]:
    if not rows or n_cols == 0:
        return []
    S = smith_normal_form(Matrix(rows), domain=ZZ)
    return [abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0]


def _rank(rows: List[List[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    return int(Matrix(rows).rank())


@log_performance
def good_pants_homology(G: SurfaceGroup, eps: float, R: float, max_curves: Optional[int] = None,
                        workers: int = 1) -> Dict[str, Any]:
    """
    Ω₁ 的 Smith 标准形与到 H₁(M, Z) 的诱导映射

    边界矩阵的行是好裤子、列是规范定向的好曲线（γ̄ = −γ）。

    Returns:
        {pants, curves, smith_normal_form, rank, free_rank, torsion,
         h1_rank, h1_smith_normal_form, boundary_in_kernel}

    Raises:
        CapExceeded: 枚举超过上限
    """
    curves = closed_geodesics(G, 2.0 * (R - eps), 2.0 * (R + eps))
    if max_curves:
        curves = curves[:max_curves]
    mu = enumerate_good_pants(G, eps, R, curves=curves, workers=workers)

    columns: Dict[Tuple, ConjClass] = {}
    for c in curves:
        for klass, _ in class_sum(G, c).items():
            columns.setdefault(klass.key, klass)
    pants = sorted(mu.support(), key=lambda p: repr(p.key))
    boundaries = [boundary(G, FormalSum.single(p)) for p in pants]
    for b in boundaries:
        for klass in b:
            columns.setdefault(klass.key, klass)
    keys = sorted(columns)
    index = {k: j for j, k in enumerate(keys)}

    rows = []
    for b in boundaries:
        row = [0] * len(keys)
        for klass, coeff in b.items():
            row[index[klass.key]] = int(coeff)
        rows.append(row)
    H = [list(columns[k].homology) for k in keys]

    diag = _snf_diagonal(rows, len(keys))
    rank = len(diag)
    composite = [[sum(r[j] * H[j][i] for j in range(len(keys))) for i in range(G.rank)] for r in rows]
    in_kernel = all(x == 0 for r in composite for x in r)
    h1_diag = _snf_diagonal(H, G.rank)
    report = {
        'pants': len(pants),
        'curves': len(keys),
        'smith_normal_form': diag,
        'rank': rank,
        'free_rank': len(keys) - rank,
        'torsion': [d for d in diag if d > 1],
        'h1_rank': _rank(H),
        'h1_smith_normal_form': h1_diag,
        'boundary_in_kernel': in_kernel,
    }
    logger.info(f"Ω₁: {len(pants)} 条裤子，{len(keys)} 条曲线，秩 {rank}，"
                f"挠 {report['torsion']}，到 H₁ 的像秩 {report['h1_rank']}")
    return report


def omega_report(ctx: HomologyContext, max_curves: Optional[int] = None, phi_curves: int = 0,
                 workers: int = 1) -> Dict[str, Any]:
    """Ω₁ 的计算结果，附带前 phi_curves 条好曲线上的 Φ 验证与放宽记录"""
    report = good_pants_homology(ctx.G, ctx.eps, ctx.R, max_curves=max_curves, workers=workers)
    if phi_curves:
        curves = closed_geodesics(ctx.G, 2.0 * (ctx.R - ctx.eps), 2.0 * (ctx.R + ctx.eps))[:phi_curves]
        report['phi'] = phi_report(ctx, curves)
    report['ledger'] = list(ctx.ledger)
    return report
