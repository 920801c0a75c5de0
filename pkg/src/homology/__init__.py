"""
好裤同调模块

替换映射、方块与分解、窄三角形、二分以及 Φ/Ψ。
"""

from .context import HomologyContext
from .dichotomy import (choose_v, curve_dichotomy, curve_to_group, group_boundary,
                        group_dichotomy, group_to_pants, ineff_v, phi_bounded, replace_group,
                        stretch)
from .omega import Phi, Psi, good_pants_homology, omega_report
from .replacement import replace_left, replace_right
from .square import exchange, item2, item4, pstar, square
from .triangles import narrow_triangle, replace_triangle, rotation, small_narrow_triangle

__all__ = [
    "HomologyContext",
    "Phi",
    "Psi",
    "choose_v",
    "curve_dichotomy",
    "curve_to_group",
    "exchange",
    "good_pants_homology",
    "group_boundary",
    "group_dichotomy",
    "group_to_pants",
    "ineff_v",
    "item2",
    "item4",
    "narrow_triangle",
    "omega_report",
    "phi_bounded",
    "pstar",
    "replace_group",
    "replace_left",
    "replace_right",
    "replace_triangle",
    "rotation",
    "small_narrow_triangle",
    "square",
    "stretch",
]
