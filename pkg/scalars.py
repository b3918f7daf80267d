#!/usr/bin/env python3
"""
精确标量：高斯有理数 ℚ(i)

标量直接使用 sympy 的 QQ_I 域元素。注意 QQ_I 元素与 int 比较相等时返回
NotImplemented，判零一律用 bool()。
"""

from fractions import Fraction
from typing import Any, Dict, Union

from sympy import QQ, QQ_I, Rational

from errors import ParseError

Scalar = type(QQ_I(0))
ScalarLike = Union[int, Fraction, str, Rational, Any]

ZERO = QQ_I(0)
ONE = QQ_I(1)
I_UNIT = QQ_I(0, 1)


def _rational(value) -> Any:
    """转换为 QQ 元素"""
    if isinstance(value, bool):
        raise ParseError(f"布尔值不能作为标量: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.p), int(value.q))
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except ValueError as e:
            raise ParseError(f"无法解析有理数: {value!r}") from e
        return QQ(frac.numerator, frac.denominator)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise ParseError(f"不支持的标量类型: {type(value).__name__}")


def scalar(re: ScalarLike = 0, im: ScalarLike = 0) -> Scalar:
    """由实部、虚部构造标量"""
    if isinstance(re, Scalar) and not im:
        return re
    return QQ_I(_rational(re), _rational(im))


def as_scalar(value: ScalarLike) -> Scalar:
    if isinstance(value, Scalar):
        return value
    return scalar(value)


def frac(p: int, q: int = 1) -> Scalar:
    return QQ_I(QQ(p, q))


def _fmt(q) -> str:
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def scalar_to_json(c: Scalar) -> Dict[str, str]:
    return {"re": _fmt(c.x), "im": _fmt(c.y)}


def scalar_from_json(obj: Any) -> Scalar:
    if isinstance(obj, dict):
        return scalar(str(obj.get("re", "0")), str(obj.get("im", "0")))
    return as_scalar(obj)


def is_real(c: Scalar) -> bool:
    return not c.y


def real_part(c: Scalar) -> Fraction:
    return Fraction(int(c.x.numerator), int(c.x.denominator))


def format_scalar(c: Scalar) -> str:
    """人类可读形式，如 1/2、-3i、1/2+3i"""
    if not c.y:
        return _fmt(c.x)
    if not c.x:
        return f"{_fmt(c.y)}i"
    sign = "+" if c.y > 0 else "-"
    return f"{_fmt(c.x)}{sign}{_fmt(abs(c.y))}i"
