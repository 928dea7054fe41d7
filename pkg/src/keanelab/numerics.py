"""Exact scalars, 4-vectors and 4x4 matrices.

Scalars are plain Python ``int`` (arbitrary precision) and
:class:`fractions.Fraction` (always in lowest terms).  Vectors are tuples of
length 4 and matrices are tuples of four row tuples.  Basis indices in the
public helpers are 1-based, matching ``e_1 .. e_4``.
"""
from __future__ import annotations

from decimal import Context, Decimal
from fractions import Fraction
from typing import Sequence, Tuple, Union

Scalar = Union[int, Fraction]
Vec4 = Tuple[Scalar, Scalar, Scalar, Scalar]
Mat4 = Tuple[Vec4, Vec4, Vec4, Vec4]

DIM = 4


class DegenerateVectorError(ValueError):
    """Normalization of a vector with zero l1 norm."""


def _check_vec(v: Sequence[Scalar]) -> None:
    if len(v) != DIM:
        raise ValueError(f"expected a 4-vector, got length {len(v)}")


def identity() -> Mat4:
    return tuple(tuple(int(i == j) for j in range(DIM)) for i in range(DIM))


def basis(i: int) -> Vec4:
    """The column vector e_i, 1 <= i <= 4."""
    if not 1 <= i <= DIM:
        raise ValueError(f"basis index must be in 1..4, got {i}")
    return tuple(int(j == i - 1) for j in range(DIM))


def matrix(rows: Sequence[Sequence[Scalar]]) -> Mat4:
    if len(rows) != DIM or any(len(r) != DIM for r in rows):
        raise ValueError("expected a 4x4 array")
    return tuple(tuple(r) for r in rows)


def column(m: Mat4, j: int) -> Vec4:
    """Column j (1-based) of ``m``."""
    if not 1 <= j <= DIM:
        raise ValueError(f"column index must be in 1..4, got {j}")
    return tuple(row[j - 1] for row in m)


def l1_norm(v: Sequence[Scalar]) -> Scalar:
    _check_vec(v)
    return sum(abs(x) for x in v)


def mat_mul(a: Mat4, b: Mat4) -> Mat4:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(DIM)) for j in range(DIM))
        for i in range(DIM)
    )


def mat_vec(m: Mat4, v: Sequence[Scalar]) -> Vec4:
    _check_vec(v)
    return tuple(sum(m[i][k] * v[k] for k in range(DIM)) for i in range(DIM))


def normalize(v: Sequence[Scalar]) -> Vec4:
    """Scale ``v`` onto the unit simplex; the result sums to exactly 1.

    Raises :class:`DegenerateVectorError` for the zero vector.
    """
    total = l1_norm(v)
    if total == 0:
        raise DegenerateVectorError("cannot normalize a vector with zero l1 norm")
    return tuple(Fraction(x) / total for x in v)


def int_power_le(base_a: Fraction, exp_a: int, base_b: Fraction, exp_b: int) -> bool:
    """Exact test of ``base_a**exp_a <= base_b**exp_b`` for non-negative bases."""
    a = Fraction(base_a) ** exp_a
    b = Fraction(base_b) ** exp_b
    return a <= b


# -- serialization ---------------------------------------------------------

def rat_str(x: Scalar) -> str:
    """Render a rational as ``"p/q"`` in lowest terms (``"3/1"`` for integers)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def int_str(x: int) -> str:
    return str(int(x))


def parse_rat(text: Union[str, int, Fraction]) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction."""
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def parse_int(text: Union[str, int]) -> int:
    if isinstance(text, bool):
        raise ValueError(f"not an integer: {text!r}")
    if isinstance(text, int):
        return text
    if isinstance(text, str) and text.strip().lstrip("+-").isdigit():
        return int(text.strip())
    raise ValueError(f"not an integer: {text!r}")


_DECIMAL_CTX = Context(prec=12)


def decimal_str(x: Scalar, digits: int = 12) -> str:
    """Decimal approximation to ``digits`` significant digits.

    Goes through :mod:`decimal` so huge or tiny values never overflow a float.
    """
    x = Fraction(x)
    if x == 0:
        return "0"
    ctx = _DECIMAL_CTX if digits == 12 else Context(prec=digits)
    d = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d, f".{digits - 1}e")
