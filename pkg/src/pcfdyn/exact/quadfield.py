"""Exact arithmetic in Q(alpha) with alpha^2 - alpha + 1 = 0.

alpha = (1 + i sqrt 3)/2 is a primitive sixth root of unity; its conjugate
is 1 - alpha.  Elements are a + b*alpha with rational a, b.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath

from .ratpoly import as_fraction

__all__ = ["QAlpha", "ALPHA"]


class QAlpha:
    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        if isinstance(a, QAlpha):
            self.a, self.b = a.a, a.b
            return
        self.a = as_fraction(a)
        self.b = as_fraction(b)

    @staticmethod
    def _lift(x) -> "QAlpha":
        return x if isinstance(x, QAlpha) else QAlpha(x)

    def __add__(self, other):
        o = self._lift(other)
        return QAlpha(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QAlpha(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        # alpha^2 = alpha - 1
        bd = self.b * o.b
        return QAlpha(self.a * o.a - bd, self.a * o.b + self.b * o.a + bd)

    __rmul__ = __mul__

    def conjugate(self) -> "QAlpha":
        # alpha -> 1 - alpha
        return QAlpha(self.a + self.b, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + self.a * self.b + self.b * self.b

    def inverse(self) -> "QAlpha":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(alpha)")
        c = self.conjugate()
        return QAlpha(c.a / n, c.b / n)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QAlpha(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def to_mpc(self):
        alpha = mpmath.mpc(mpmath.mpf(1) / 2, mpmath.sqrt(3) / 2)
        return mpmath.mpf(self.a.numerator) / self.a.denominator + (
            mpmath.mpf(self.b.numerator) / self.b.denominator
        ) * alpha

    @classmethod
    def recognize(cls, z, max_den: int = 10**6) -> "QAlpha":
        """Nearest element with small denominators to the complex number z."""
        z = mpmath.mpc(z)
        b = z.imag / (mpmath.sqrt(3) / 2)
        a = z.real - b / 2
        fa = Fraction(str(mpmath.nstr(a, 40))).limit_denominator(max_den)
        fb = Fraction(str(mpmath.nstr(b, 40))).limit_denominator(max_den)
        return cls(fa, fb)

    def __repr__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*alpha"
        return f"{self.a} + {self.b}*alpha"

    __str__ = __repr__


ALPHA = QAlpha(0, 1)
