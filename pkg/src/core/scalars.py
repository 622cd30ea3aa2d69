"""Scalars - exact polynomials in Z[t], the coefficient ring of every morphism"""

from fractions import Fraction
from typing import Iterable, Union

from sympy import Poly as SymPoly
from sympy import Symbol, sympify
from sympy.polys.densearith import dup_add, dup_mul, dup_neg, dup_sub
from sympy.polys.densebasic import dup_strip
from sympy.polys.densetools import dup_eval
from sympy.polys.domains import QQ, ZZ


Rational = Union[int, Fraction, str]

T = Symbol("t")


class Poly:
    """
    Univariate polynomial with arbitrary-precision integer coefficients.

    Stored internally as a stripped dense list (highest degree first) so the
    sympy dense kernels operate on it directly. `coeffs` exposes the
    lowest-degree-first view used by the JSON form.
    """

    __slots__ = ("_rep",)

    def __init__(self, coeffs: Iterable[int] = ()):
        low_first = [int(c) for c in coeffs]
        self._rep = tuple(int(c) for c in dup_strip(low_first[::-1]))

    @classmethod
    def _from_rep(cls, rep) -> "Poly":
        poly = cls.__new__(cls)
        poly._rep = tuple(int(c) for c in dup_strip(list(rep)))
        return poly

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def one(cls) -> "Poly":
        return cls((1,))

    @classmethod
    def const(cls, value: int) -> "Poly":
        return cls((value,))

    @classmethod
    def t_power(cls, k: int) -> "Poly":
        """The monomial t^k"""
        if k < 0:
            raise ValueError(f"negative exponent {k}")
        return cls._from_rep((1,) + (0,) * k)

    @classmethod
    def parse(cls, text: str) -> "Poly":
        """Parse the textual form, e.g. '2 - 3*t + t^2'"""
        expr = sympify(text, locals={"t": T})
        rep = SymPoly(expr, T, domain=ZZ).all_coeffs()
        return cls._from_rep(rep)

    @property
    def coeffs(self) -> list[int]:
        return list(self._rep[::-1])

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial"""
        return len(self._rep) - 1

    def is_zero(self) -> bool:
        return not self._rep

    def __add__(self, other: "Poly") -> "Poly":
        other = _coerce(other)
        return Poly._from_rep(dup_add(list(self._rep), list(other._rep), ZZ))

    __radd__ = __add__

    def __sub__(self, other: "Poly") -> "Poly":
        other = _coerce(other)
        return Poly._from_rep(dup_sub(list(self._rep), list(other._rep), ZZ))

    def __rsub__(self, other) -> "Poly":
        return _coerce(other) - self

    def __mul__(self, other: "Poly") -> "Poly":
        other = _coerce(other)
        return Poly._from_rep(dup_mul(list(self._rep), list(other._rep), ZZ))

    __rmul__ = __mul__

    def __neg__(self) -> "Poly":
        return Poly._from_rep(dup_neg(list(self._rep), ZZ))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._rep == other._rep

    def __hash__(self) -> int:
        return hash(self._rep)

    def __bool__(self) -> bool:
        return bool(self._rep)

    def __repr__(self) -> str:
        return f"Poly({self.coeffs})"

    def __str__(self) -> str:
        parts = []
        for power, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if power == 0:
                body = str(abs(c))
            else:
                mono = "t" if power == 1 else f"t^{power}"
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            if not parts:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(parts) if parts else "0"

    def evaluate(self, value: Rational) -> Fraction:
        return poly_eval(self, value)

    def to_json(self) -> list[int]:
        return self.coeffs

    @classmethod
    def from_json(cls, data: list[int]) -> "Poly":
        return cls(data)


def _coerce(value) -> Poly:
    if isinstance(value, Poly):
        return value
    if isinstance(value, int):
        return Poly.const(value)
    raise TypeError(f"cannot use {type(value).__name__} as a polynomial")


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    """
    Ring operation on two polynomials.

    Args:
        a: Left operand
        b: Right operand
        op: One of 'add', 'sub', 'mul'

    Returns:
        The canonical (stripped) result
    """
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation '{op}'")


def to_fraction(value: Rational) -> Fraction:
    """Read an exact rational from int, Fraction or 'p/q' text"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value).strip())


def poly_eval(p: Poly, v: Rational) -> Fraction:
    """Horner evaluation at an exact rational"""
    point = to_fraction(v)
    rep = [QQ(c) for c in p._rep]
    result = dup_eval(rep, QQ(point.numerator, point.denominator), QQ)
    return Fraction(int(QQ.numer(result)), int(QQ.denom(result)))
