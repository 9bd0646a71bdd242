"""The auxiliary map h(z) = (2/z - 1)^2 and its exact orbit facts.

h has critical points 0 and 2 with orbit 2 -> 0 -> inf -> 1 -> 1, so
P(h) = {0, 1, inf}, every iterate h^n with n >= 2 has critical values
exactly P(h), and J(h) is the whole sphere (1 is a repelling fixed point).
"""
from __future__ import annotations

from fractions import Fraction

import mpmath

from ..exact.ratmap import RatMap, critical_values_over_q
from ..exact.ratpoly import rational_roots
from ..numeric import INF, SpherePoint

__all__ = [
    "H_EXACT",
    "h_eval",
    "h_preimages",
    "choose_k",
    "h_orbit",
    "hn_critical_values",
]

# (z - 2)^2 / z^2
H_EXACT = RatMap([4, -4, 1], [0, 0, 1])


def h_eval(z) -> SpherePoint:
    z = SpherePoint.of(z)
    if z.is_inf:
        return SpherePoint(1)
    if z.value == 0:
        return INF
    return SpherePoint((2 / z.value - 1) ** 2)


def h_preimages(t) -> list[tuple[SpherePoint, int]]:
    """The solutions w of (2 - w)^2 = t w^2 with their local degrees."""
    t = SpherePoint.of(t)
    if t.is_inf:
        return [(SpherePoint(0), 2)]
    if t.value == 0:
        return [(SpherePoint(2), 2)]
    if t.value == 1:
        return [(SpherePoint(1), 1), (INF, 1)]
    s = mpmath.sqrt(t.value)
    return [(SpherePoint(2 / (1 + s)), 1), (SpherePoint(2 / (1 - s)), 1)]


def choose_k(size: int) -> int:
    """Smallest k with 2^k > size + 3."""
    if size < 3:
        raise ValueError("choose_k needs at least three marked points")
    k = 0
    while 2**k <= size + 3:
        k += 1
    return k


def h_orbit(start=Fraction(2), steps: int = 4) -> list:
    """Exact forward orbit under h; ``None`` is infinity."""
    out = [start]
    for _ in range(steps):
        out.append(H_EXACT(out[-1]))
    return out


def hn_critical_values(n: int) -> tuple[list[Fraction], bool]:
    """Critical values of h^n over Q: (sorted finite values, infinity flag).

    The finite part comes from a squarefree defining polynomial whose roots
    are all rational here; a non-rational root would surface as a leftover.
    """
    if n < 1:
        raise ValueError("n must be positive")
    poly, at_inf = critical_values_over_q(H_EXACT.iterate(n))
    rats, cof = rational_roots(poly)
    if cof.degree > 0:
        raise ArithmeticError("h^n has an irrational critical value")
    return sorted(set(rats)), at_inf
