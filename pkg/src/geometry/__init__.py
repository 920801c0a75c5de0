"""
几何模块

双曲平面基本运算、曲面群、链引理、连接集与裤子。
"""

from .connections import GeodesicArc, L_of, enumerate_conn, make_arc
from .fuchsian import ConjClass, SurfaceGroup, closed_geodesics, load_surface
from .hyperbolic_core import MoebiusTransform, PointH, UnitTangent
from .pants import Pants, boundary, enumerate_good_pants

__all__ = [
    "ConjClass",
    "GeodesicArc",
    "L_of",
    "MoebiusTransform",
    "Pants",
    "PointH",
    "SurfaceGroup",
    "UnitTangent",
    "boundary",
    "closed_geodesics",
    "enumerate_conn",
    "enumerate_good_pants",
    "load_surface",
    "make_arc",
]
