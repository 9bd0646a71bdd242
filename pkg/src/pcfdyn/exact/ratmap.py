"""Rational maps of P^1 over an exact field.

Coefficients are ``Fraction`` or ``QAlpha`` elements, stored lowest degree
first; ``None`` stands for the point at infinity.  Critical points come from
the Wronskian N'D - ND' (its finite roots, with multiplicity = local degree
minus one) plus a deficit at infinity.  Roots are located numerically,
recognized in the field, and then certified by exact deflation.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from ..numeric import roots as numeric_roots, to_mpc
from .elimination import charpoly_mod, inverse_mod
from .quadfield import QAlpha
from .ratpoly import RatPoly, as_fraction, poly_gcd, squarefree_part

__all__ = ["RatMap", "field_roots", "FieldRootError", "critical_values_over_q"]


class FieldRootError(ArithmeticError):
    """A polynomial does not split over the coefficient field."""


def _zero(x):
    return x * 0


def _trim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def padd(p, q):
    n = max(len(p), len(q))
    z = _zero((p or q)[0]) if (p or q) else Fraction(0)
    return _trim([(p[i] if i < len(p) else z) + (q[i] if i < len(q) else z) for i in range(n)])


def pneg(p):
    return [-c for c in p]


def pmul(p, q):
    if not p or not q:
        return []
    out = [_zero(p[0])] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _trim(out)


def ppow(p, n: int):
    out = [p[0] * 0 + 1] if p else [Fraction(1)]
    for _ in range(n):
        out = pmul(out, p)
    return out


def pderiv(p):
    return _trim([k * c for k, c in enumerate(p)][1:])


def peval(p, x):
    acc = _zero(x)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pdivmod(p, q):
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    out = [_zero(q[0])] * max(len(p) - len(q) + 1, 0)
    inv = 1 / q[-1]
    while len(r) >= len(q) and r:
        k = len(r) - len(q)
        c = r[-1] * inv
        out[k] = c
        for i, b in enumerate(q):
            r[k + i] = r[k + i] - c * b
        r = _trim(r[:-1]) if r[-1] == 0 else _trim(r)
    return _trim(out), _trim(r)


def _to_complex(x):
    return x.to_mpc() if isinstance(x, QAlpha) else to_mpc(x)


def _recognizer(sample) -> Callable:
    if isinstance(sample, QAlpha):
        return QAlpha.recognize

    def rat(z):
        return Fraction(mpmath.nstr(mpmath.mpf(z.real), 50)).limit_denominator(10**9)

    return rat


def field_roots(p: Sequence, precision: int = 192) -> list[tuple[object, int]]:
    """All roots of p in its coefficient field, with multiplicities.

    Raises ``FieldRootError`` when p does not split completely.
    """
    p = _trim(p)
    if len(p) < 2:
        return []
    recog = _recognizer(p[-1])
    with mpmath.workprec(precision):
        boxes = numeric_roots([_to_complex(c) for c in p], precision=precision)
        cands = []
        for b in boxes:
            r = recog(b.center)
            if r not in cands:
                cands.append(r)
    out = []
    rest = p
    for r in cands:
        m = 0
        while len(rest) > 1 and peval(rest, r) == 0:
            rest, rem = pdivmod(rest, [-r, r * 0 + 1])
            assert not rem
            m += 1
        if m:
            out.append((r, m))
    if len(rest) > 1:
        raise FieldRootError(f"polynomial of degree {len(p) - 1} does not split over the field")
    return out


class RatMap:
    """z -> N(z)/D(z) with coprime N, D over an exact field."""

    def __init__(self, num: Sequence, den: Sequence = (1,)):
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        exotic = any(isinstance(c, QAlpha) for c in num + den)
        lift = QAlpha if exotic else as_fraction
        self.num = [lift(c) for c in num]
        self.den = [lift(c) for c in den]
        self.one = lift(1)

    @classmethod
    def polynomial(cls, coeffs: Sequence) -> "RatMap":
        return cls(coeffs, (1,))

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def __call__(self, z):
        if z is None:
            dn, dd = len(self.num) - 1, len(self.den) - 1
            if dn > dd:
                return None
            if dn < dd:
                return self.one * 0
            return self.num[-1] / self.den[-1]
        d = peval(self.den, z)
        if d == 0:
            return None
        return peval(self.num, z) / d

    def compose(self, inner: "RatMap") -> "RatMap":
        """self o inner."""
        d = self.degree
        p, q = inner.num, inner.den
        pw_p = [ppow(p, i) for i in range(d + 1)]
        pw_q = [ppow(q, i) for i in range(d + 1)]

        def hom(coeffs):
            acc = []
            for i, c in enumerate(coeffs):
                if c != 0:
                    acc = padd(acc, [c * t for t in pmul(pw_p[i], pw_q[d - i])])
            return acc

        return RatMap(hom(self.num), hom(self.den))

    def iterate(self, n: int) -> "RatMap":
        out = self
        for _ in range(n - 1):
            out = self.compose(out)
        return out

    def wronskian(self) -> list:
        return padd(pmul(pderiv(self.num), self.den), pneg(pmul(self.num, pderiv(self.den))))

    def critical_points(self) -> list[tuple[object, int]]:
        """(point, local degree - 1) over the field; None is infinity."""
        W = self.wronskian()
        pts = field_roots(W)
        deficit = 2 * self.degree - 2 - (len(W) - 1)
        if deficit > 0:
            pts.append((None, deficit))
        return pts

    def critical_values(self) -> list:
        out = []
        for c, _ in self.critical_points():
            v = self(c)
            if v not in out:
                out.append(v)
        return out

    def orbit_closure(self, start: Sequence, limit: int = 64) -> list:
        """Forward closure of ``start`` (exact), or raise if it exceeds ``limit`` points."""
        seen = list(dict.fromkeys(start))
        frontier = list(seen)
        while frontier:
            nxt = []
            for z in frontier:
                w = self(z)
                if w not in seen:
                    seen.append(w)
                    nxt.append(w)
            if len(seen) > limit:
                raise ArithmeticError("orbit closure exceeds limit")
            frontier = nxt
        return seen

    def postcritical_set(self, limit: int = 64) -> list:
        return self.orbit_closure(self.critical_values(), limit)

    def to_text(self) -> str:
        def fmt(p):
            terms = []
            for k, c in enumerate(p):
                if c == 0:
                    continue
                mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
                coeff = f"({c})"
                terms.append(coeff if not mono else f"{coeff}*{mono}")
            return " + ".join(reversed(terms)) or "0"

        return f"[{fmt(self.num)}] / [{fmt(self.den)}]"


def critical_values_over_q(R: RatMap) -> tuple[RatPoly, bool]:
    """Finite critical values of a map over Q as a squarefree defining polynomial.

    Returns (defining polynomial, infinity is a critical value).  Uses the
    characteristic polynomial of N/D in Q[z]/(s) for the critical points s,
    so no critical point needs to be rational.
    """
    N, D = RatPoly(R.num), RatPoly(R.den)
    W = RatPoly(R.wronskian())
    s = squarefree_part(W).monic() if W.degree > 0 else RatPoly([1])
    at_inf = False
    finite_vals = RatPoly([1])
    deficit = 2 * R.degree - 2 - W.degree
    if deficit > 0:
        v = R(None)
        if v is None:
            at_inf = True
        else:
            finite_vals = finite_vals * RatPoly([-v, 1])
    if s.degree > 0:
        poles = poly_gcd(s, D)
        if poles.degree > 0:
            at_inf = True
            s = s.exact_div(poles.monic())
        if s.degree > 0:
            a = (N * inverse_mod(D % s, s)) % s
            finite_vals = finite_vals * charpoly_mod(s, a)
    return squarefree_part(finite_vals).monic(), at_inf
