"""
pants-homology - 闭双曲曲面上好裤同调的桌面规模实现

连接枚举、裤子构造、形式代数与同调修正，以及有限覆盖的组装。
"""

__version__ = "0.1.0"
