"""
错误类型

定义所有模块共用的异常层次结构，每个异常携带机器可读的错误码与退出码。
"""

from typing import Any, Dict, Optional


class PantsHomologyError(Exception):
    """所有领域错误的基类"""

    code: str = "error"
    exit_code: int = 4

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典格式"""
        return {
            'code': self.code,
            'exit_code': self.exit_code,
            'message': self.message,
            'details': {k: repr(v) for k, v in self.details.items()},
        }


def _make(name: str, code: str, exit_code: int = 4, doc: Optional[str] = None):
    cls = type(name, (PantsHomologyError,), {'code': code, 'exit_code': exit_code})
    cls.__doc__ = doc or code
    return cls


# hyperbolic_core
BaseMismatch = _make("BaseMismatch", "base_mismatch", doc="两个切向量的基点不同")
NotHyperbolic = _make("NotHyperbolic", "not_hyperbolic", doc="|trace| < 2")
Degenerate = _make("Degenerate", "degenerate", doc="退化输入（例如 sinh 乘积小于 1）")

# fuchsian
BadRelator = _make("BadRelator", "bad_relator")
NonHyperbolicGenerator = _make("NonHyperbolicGenerator", "non_hyperbolic_generator")
CapExceeded = _make("CapExceeded", "cap_exceeded", exit_code=3)
CrossCheckFailed = _make("CrossCheckFailed", "cross_check_failed", doc="矩阵与字重新计算不一致")

# chain_calculus
ShortArc = _make("ShortArc", "short_arc")
WideBend = _make("WideBend", "wide_bend")
NotRightAngle = _make("NotRightAngle", "not_right_angle")
DegenerateChord = _make("DegenerateChord", "degenerate_chord")
TooShortTail = _make("TooShortTail", "too_short_tail")
ChainBoundViolated = _make("ChainBoundViolated", "chain_bound_violated", doc="测得的残差超过链引理给出的上界")

# connections
EmptyBand = _make("EmptyBand", "empty_band")
InsufficientData = _make("InsufficientData", "insufficient_data")

# pants
NotTheta = _make("NotTheta", "not_theta")
NotOrthogonal = _make("NotOrthogonal", "not_orthogonal")
WrongSide = _make("WrongSide", "wrong_side")
NotACuff = _make("NotACuff", "not_a_cuff")
NegativeCoefficient = _make("NegativeCoefficient", "negative_coefficient")

# formal_algebra
KindMismatch = _make("KindMismatch", "kind_mismatch")
MassMismatch = _make("MassMismatch", "mass_mismatch")
EmptyDomain = _make("EmptyDomain", "empty_domain")

# pants_homology
EmptyComplement = _make("EmptyComplement", "empty_complement")
EmptyAuxiliary = _make("EmptyAuxiliary", "empty_auxiliary")
EmptyInterpolant = _make("EmptyInterpolant", "empty_interpolant")
NotNarrow = _make("NotNarrow", "not_narrow")
EmptyConnection = _make("EmptyConnection", "empty_connection")
OrientationClash = _make("OrientationClash", "orientation_clash")
EmptyF = _make("EmptyF", "empty_f")
IdentityElement = _make("IdentityElement", "identity_element")
NotSaturated = _make("NotSaturated", "not_saturated")
NotBoundedTriangle = _make("NotBoundedTriangle", "not_bounded_triangle")
TooLong = _make("TooLong", "too_long")
EmptyMidArc = _make("EmptyMidArc", "empty_mid_arc")
PhiUndefined = _make("PhiUndefined", "phi_undefined")
IdentityFailure = _make("IdentityFailure", "identity_failure", exit_code=2)

# assembly
NotEven = _make("NotEven", "not_even")
PairingFailed = _make("PairingFailed", "pairing_failed")
CannotCancel = _make("CannotCancel", "cannot_cancel")


__all__ = [name for name, obj in list(globals().items())
           if isinstance(obj, type) and issubclass(obj, PantsHomologyError)]
