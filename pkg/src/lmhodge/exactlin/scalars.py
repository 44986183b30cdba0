"""Exact scalars: Python's Fraction for Q and a small Gaussian-rational type for Q(i)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

Rational = Fraction
Scalar = Union[Fraction, "GaussRational"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, GaussRational):
        if x.im:
            raise ValueError(f"{x} is not rational")
        return x.re
    if hasattr(x, "p") and hasattr(x, "q"):  # flint fmpq
        return Fraction(int(x.p), int(x.q))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class GaussRational:
    """An element re + im*i of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    @staticmethod
    def coerce(x) -> "GaussRational":
        if isinstance(x, GaussRational):
            return x
        return GaussRational(as_fraction(x), 0)

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussRational.coerce(other)
        except TypeError:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * o.conjugate()
        return GaussRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussRational.coerce(other) / self

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if k < 0:
            return (GaussRational(1) / self) ** (-k)
        out = GaussRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = GaussRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussRational(0, 1)


def conj(x):
    return x.conjugate() if isinstance(x, GaussRational) else x


def normalize_scalar(x) -> Scalar:
    """Return a Fraction when x is real, else a GaussRational."""
    if isinstance(x, GaussRational):
        return x.re if x.im == 0 else x
    return as_fraction(x)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    """Parse the canonical "p/q" encoding (q > 0, reduced); anything else is rejected."""
    if not isinstance(s, str):
        raise ValueError(f"expected a 'p/q' string, got {s!r}")
    parts = s.split("/")
    if len(parts) != 2:
        raise ValueError(f"expected 'p/q', got {s!r}")
    p_s, q_s = parts
    if not _is_int_literal(p_s) or not _is_int_literal(q_s, signed=False):
        raise ValueError(f"malformed rational {s!r}")
    p, q = int(p_s), int(q_s)
    if q <= 0:
        raise ValueError(f"denominator must be positive in {s!r}")
    x = Fraction(p, q)
    if x.numerator != p or x.denominator != q:
        raise ValueError(f"rational {s!r} is not in lowest terms")
    return x


def _is_int_literal(s: str, signed: bool = True) -> bool:
    body = s[1:] if signed and s.startswith("-") else s
    if not body.isdigit() or not body.isascii():
        return False
    if body == "0" and s.startswith("-"):
        return False
    return body == "0" or not body.startswith("0")
