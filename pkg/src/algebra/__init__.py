"""
形式代数模块

有理形式和、权函数、半随机范数、脚测度与有效随机元素。
"""

from .formal_algebra import (FeetMeasure, FiniteMap, FormalSum, WeightFn, boxtimes_check,
                             delta_equivalent, floor_exp_2R, linear_sum, product_weight,
                             pushforward_abs, random_element, semirandom_norm, weight)

__all__ = [
    "FeetMeasure",
    "FiniteMap",
    "FormalSum",
    "WeightFn",
    "boxtimes_check",
    "delta_equivalent",
    "floor_exp_2R",
    "linear_sum",
    "product_weight",
    "pushforward_abs",
    "random_element",
    "semirandom_norm",
    "weight",
]
