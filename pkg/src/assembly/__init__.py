"""
组装模块

多裤子的检验、脚的配对、粘合为覆叠复形与修正。
"""

from .cover import (AbstractPants, CoverComplex, FNCoord, Pairing, correct_multipants,
                    cover_components, cover_degree, doubled_pants, export_cover, fn_coords,
                    glue, hall_pairing, is_evenly_distributed, model_surface, verify_good)

__all__ = [
    "AbstractPants",
    "CoverComplex",
    "FNCoord",
    "Pairing",
    "correct_multipants",
    "cover_components",
    "cover_degree",
    "doubled_pants",
    "export_cover",
    "fn_coords",
    "glue",
    "hall_pairing",
    "is_evenly_distributed",
    "model_surface",
    "verify_good",
]
