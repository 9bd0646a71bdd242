"""Multiprecision complex numerics on the Riemann sphere.

Values are ``mpmath.mpc`` numbers evaluated under an explicit working
precision.  ``SpherePoint`` tags the point at infinity explicitly, so huge
finite values never silently become infinite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpc, mpf

__all__ = [
    "DEFAULT_PRECISION",
    "SpherePoint",
    "INF",
    "sph_dist",
    "Mobius",
    "mobius_through",
    "DegenerateConfigurationError",
    "RootFindingError",
    "RootBox",
    "roots",
    "poly_eval",
    "poly_deriv",
    "to_mpc",
]

DEFAULT_PRECISION = 256


class DegenerateConfigurationError(ValueError):
    """Points that must be distinct coincide at the working tolerance."""


class RootFindingError(ArithmeticError):
    """Simultaneous iteration failed to produce enclosures of the requested size."""


def to_mpc(x) -> mpc:
    if isinstance(x, mpc):
        return x
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, (float, complex)):
        return mpc(mpf(int(x.numerator)) / int(x.denominator))
    return mpc(x)


class SpherePoint:
    """A point of P^1: a finite complex value, or infinity (``value is None``)."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        self.value = None if value is None else to_mpc(value)

    @property
    def is_inf(self) -> bool:
        return self.value is None

    @classmethod
    def of(cls, x) -> "SpherePoint":
        if isinstance(x, SpherePoint):
            return x
        if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "∞", "oo"):
            return INF
        return cls(x)

    def reciprocal(self) -> "SpherePoint":
        """The chart swap z -> 1/z."""
        if self.value is None:
            return SpherePoint(0)
        if self.value == 0:
            return INF
        return SpherePoint(1 / self.value)

    def __repr__(self) -> str:
        if self.value is None:
            return "SpherePoint(inf)"
        return f"SpherePoint({mpmath.nstr(self.value, 12)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpherePoint):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(self.value)

    def to_json(self, digits: int = 40):
        if self.value is None:
            return "inf"
        return [mpmath.nstr(self.value.real, digits), mpmath.nstr(self.value.imag, digits)]


INF = SpherePoint(None)


def sph_dist(x: SpherePoint, y: SpherePoint) -> mpf:
    """Chordal distance 2|x-y| / sqrt((1+|x|^2)(1+|y|^2)), in [0, 2]."""
    x, y = SpherePoint.of(x), SpherePoint.of(y)
    if x.is_inf and y.is_inf:
        return mpf(0)
    if x.is_inf:
        x, y = y, x
    if y.is_inf:
        return 2 / mpmath.sqrt(1 + abs(x.value) ** 2)
    a, b = x.value, y.value
    return 2 * abs(a - b) / mpmath.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d) with ad - bc != 0."""

    a: mpc
    b: mpc
    c: mpc
    d: mpc

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale == 0 or abs(det) <= scale**2 * mpf(2) ** (-mp.prec + 8):
            raise DegenerateConfigurationError("Mobius determinant vanishes")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(mpc(1), mpc(0), mpc(0), mpc(1))

    def __call__(self, z) -> SpherePoint:
        z = SpherePoint.of(z)
        if z.is_inf:
            return INF if self.c == 0 else SpherePoint(self.a / self.c)
        num = self.a * z.value + self.b
        den = self.c * z.value + self.d
        if den == 0:
            return INF
        return SpherePoint(num / den)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        """Composition self o other."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def to_json(self, digits: int = 40) -> dict:
        return {k: SpherePoint(getattr(self, k)).to_json(digits) for k in "abcd"}


def mobius_through(p0, p1, p2, tol=None) -> Mobius:
    """The Mobius map sending (p0, p1, p2) to (0, 1, infinity)."""
    p0, p1, p2 = (SpherePoint.of(p) for p in (p0, p1, p2))
    if tol is None:
        tol = mpf(2) ** (-mp.prec // 2)
    for u, v in ((p0, p1), (p0, p2), (p1, p2)):
        if sph_dist(u, v) <= tol:
            raise DegenerateConfigurationError("normalising points are not distinct")
    one, zero = mpc(1), mpc(0)
    if p2.is_inf:
        return Mobius(one, -p0.value, zero, p1.value - p0.value)
    if p0.is_inf:
        return Mobius(zero, p1.value - p2.value, one, -p2.value)
    if p1.is_inf:
        return Mobius(one, -p0.value, one, -p2.value)
    k1 = p1.value - p2.value
    k2 = p1.value - p0.value
    return Mobius(k1, -p0.value * k1, k2, -p2.value * k2)


# ---------------------------------------------------------------------------
# polynomials with complex coefficients (lowest degree first)


def poly_eval(coeffs: Sequence, z):
    acc = mpc(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def poly_deriv(coeffs: Sequence) -> list:
    return [k * c for k, c in enumerate(coeffs)][1:]


@dataclass(frozen=True)
class RootBox:
    center: mpc
    radius: mpf

    def contains(self, z) -> bool:
        return abs(to_mpc(z) - self.center) <= self.radius


def _newton_polygon_start(coeffs: list) -> list:
    """Starting points on circles read off the upper hull of (i, log|c_i|).

    An edge from i to j of the hull carries j - i roots of modulus about
    (|c_i| / |c_j|)^(1/(j - i)), so widely spread root sizes start close.
    """
    n = len(coeffs) - 1
    pts = [(i, mpmath.log(abs(c))) for i, c in enumerate(coeffs) if c != 0]
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (i1, y1), (i2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - i1) <= (p[1] - y1) * (i2 - i1):
                hull.pop()
            else:
                break
        hull.append(p)
    z = []
    for (i, yi), (j, yj) in zip(hull, hull[1:]):
        m = j - i
        r = mpmath.exp((yi - yj) / m)
        z.extend(r * mpmath.expj(2 * mpmath.pi * k / m + mpf("0.4") + i) for k in range(m))
    return z if len(z) == n else [mpmath.expj(2 * mpmath.pi * k / n + mpf("0.4")) for k in range(n)]


def _aberth(coeffs: list, maxiter: int) -> tuple[list, bool]:
    n = len(coeffs) - 1
    lc = coeffs[-1]
    z = _newton_polygon_start(coeffs)
    dcoeffs = poly_deriv(coeffs)
    eps = mpf(2) ** (-mp.prec + 32)
    best, stall = None, 0
    for _ in range(maxiter):
        worst = mpf(0)
        for k in range(n):
            zk = z[k]
            pv = poly_eval(coeffs, zk)
            if pv == 0:
                continue
            ratio = pv / poly_eval(dcoeffs, zk) if poly_eval(dcoeffs, zk) != 0 else pv / lc
            s = mpc(0)
            for j in range(n):
                if j != k:
                    diff = zk - z[j]
                    if diff != 0:
                        s += 1 / diff
            w = ratio / (1 - ratio * s)
            z[k] = zk - w
            rel = abs(w) / max(mpf(1), abs(z[k]))
            if rel > worst:
                worst = rel
        if worst <= eps:
            return z, True
        if worst > mpf(2) ** (-mp.prec // 4):
            continue
        if best is None or worst < best * mpf("0.5"):
            best, stall = worst, 0
        else:
            stall += 1
            if stall > 12:
                # roundoff floor; the enclosure radii decide acceptance
                return z, worst < mpf(2) ** (-mp.prec // 2)
    return z, False


def roots(coeffs: Iterable, precision: int = DEFAULT_PRECISION, maxiter: int = 2000) -> list[RootBox]:
    """Root enclosures of a complex polynomial (lowest degree first).

    Aberth-Ehrlich iteration with guard bits; each enclosure radius is the
    inclusion-disk bound n |p(z)| / |lc prod (z - z_j)|.  Clustered (multiple)
    roots get more guard bits until every radius is below 2^(-precision/2).
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ValueError("roots needs a nonconstant polynomial")
    target = mpf(2) ** (-(precision // 2))
    guard = 64
    while True:
        with mpmath.workprec(precision + guard):
            c = [to_mpc(x) for x in coeffs]
            if abs(c[-1]) <= mpf(2) ** (-precision) * max(abs(x) for x in c):
                raise ValueError("leading coefficient vanishes at tolerance")
            # strip zero roots exactly
            k0 = 0
            while c[k0] == 0:
                k0 += 1
            core = c[k0:]
            n = len(core) - 1
            zs = [mpc(0)] * k0
            if n == 1:
                zs.append(-core[0] / core[1])
                converged = True
            elif n >= 2:
                found, converged = _aberth(core, maxiter)
                zs.extend(found)
            else:
                converged = True
            boxes = []
            lc = c[-1]
            deg = len(c) - 1
            for i, zi in enumerate(zs):
                prod = lc
                for j, zj in enumerate(zs):
                    if j != i:
                        prod *= zi - zj
                pv = poly_eval(c, zi)
                if pv == 0:
                    rad = mpf(0)
                elif prod == 0:
                    rad = mpf("inf")
                else:
                    rad = deg * abs(pv / prod)
                boxes.append((zi, rad))
        worst = max(r for _, r in boxes)
        if worst < target:
            with mpmath.workprec(precision):
                return sorted(
                    (RootBox(+z, +r) for z, r in boxes),
                    key=lambda b: (float(b.center.real), float(b.center.imag)),
                )
        if guard >= 4 * precision:
            desc = ", ".join(mpmath.nstr(x, 8) for x in coeffs)
            state = "did not converge" if not converged else f"left enclosure radius {mpmath.nstr(worst, 5)}"
            raise RootFindingError(f"root iteration {state} for polynomial [{desc}]")
        guard *= 2
