"""Elimination in Q[x]/(s): images of root sets under polynomial and rational maps.

For a monic squarefree ``s`` the characteristic polynomial of multiplication
by ``a`` in Q[x]/(s) is prod (y - a(r)) over the roots r of s, which agrees
with Res_x(s(x), y - a(x)) up to sign.  It is computed from power sums
(Newton's identities), so only univariate arithmetic over Q is needed.
"""
from __future__ import annotations

from fractions import Fraction

from .ratpoly import RatPoly

__all__ = ["power_sums", "charpoly_mod", "ext_gcd", "inverse_mod", "compose_mod"]


def power_sums(s: RatPoly, count: int) -> list[Fraction]:
    """Power sums p_0..p_{count-1} of the roots of monic ``s``."""
    s = s.monic()
    n = s.degree
    c = s.coeffs  # c[n] == 1
    p = [Fraction(n)]
    for k in range(1, count):
        acc = Fraction(0)
        for i in range(1, min(k, n) + 1):
            if i < k:
                acc += c[n - i] * p[k - i]
            else:
                acc += k * c[n - k]
        p.append(-acc)
    return p


def charpoly_mod(s: RatPoly, a: RatPoly) -> RatPoly:
    """prod_{s(r)=0} (y - a(r)), computed in Q[x]/(s); ``s`` need not be monic."""
    s = s.monic()
    n = s.degree
    if n <= 0:
        return RatPoly([1])
    a = a % s
    ps = power_sums(s, n)
    traces = []
    b = RatPoly([1])
    for _ in range(n):
        b = (b * a) % s
        traces.append(sum((cj * ps[j] for j, cj in enumerate(b.coeffs)), Fraction(0)))
    e = [Fraction(1)]
    for i in range(1, n + 1):
        acc = Fraction(0)
        for j in range(1, i + 1):
            term = e[i - j] * traces[j - 1]
            acc += term if j % 2 == 1 else -term
        e.append(acc / i)
    # y^n - e1 y^(n-1) + e2 y^(n-2) - ...
    coeffs = [Fraction(0)] * (n + 1)
    for i in range(n + 1):
        coeffs[n - i] = e[i] if i % 2 == 0 else -e[i]
    return RatPoly(coeffs)


def ext_gcd(a: RatPoly, b: RatPoly) -> tuple[RatPoly, RatPoly, RatPoly]:
    """Return (g, u, v) with u a + v b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = RatPoly([1]), RatPoly([])
    t0, t1 = RatPoly([]), RatPoly([1])
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    lc = r0.lc
    return r0.monic(), s0 * (1 / lc), t0 * (1 / lc)


def inverse_mod(a: RatPoly, s: RatPoly) -> RatPoly:
    g, u, _ = ext_gcd(a % s, s)
    if g.degree != 0:
        raise ZeroDivisionError("polynomial is not invertible modulo s")
    return u % s


def compose_mod(p: RatPoly, a: RatPoly, s: RatPoly) -> RatPoly:
    """p(a(x)) mod s by Horner, never forming the full composition."""
    a = a % s
    acc = RatPoly([])
    for c in reversed(p.coeffs):
        acc = (acc * a + c) % s
    return acc
