"""Finite Galois-stable sets of algebraic numbers and the Belyi reduction.

A set is stored through a monic squarefree defining polynomial over Q whose
roots are exactly the finite elements, plus a flag for the point at infinity.
Images under polynomials and critical-value sets are computed by elimination,
so no number-field arithmetic is ever needed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .certificates import Claim, exact_claim
from .exact.elimination import charpoly_mod, compose_mod
from .exact.ratpoly import RatPoly, as_fraction, compose, format_poly, parse_poly, rational_roots, squarefree_part

__all__ = [
    "FiniteAlgebraicSet",
    "BelyiCertificate",
    "BelyiDegreeLimitError",
    "image_set",
    "critical_values_set",
    "critical_points_set",
    "subset_of",
    "forward_invariant",
    "union",
    "belyi",
    "fold_polynomial",
    "parse_set",
]

_INF_TOKENS = {"inf", "infinity", "∞", "oo"}


@dataclass(frozen=True, eq=False)
class FiniteAlgebraicSet:
    """Finite subset of P^1(Qbar): roots of ``defining`` plus optionally infinity."""

    defining: RatPoly
    rational_points: tuple[Fraction, ...] | None = None
    contains_infinity: bool = False

    def __post_init__(self):
        d = self.defining
        if d.is_zero():
            raise ValueError("defining polynomial must be nonzero")
        if d.lc != 1:
            raise ValueError("defining polynomial must be monic")
        if d.degree < 1 and not self.contains_infinity:
            raise ValueError("a finite algebraic set must be nonempty")
        if self.rational_points is not None:
            if RatPoly.from_roots(self.rational_points) != d:
                raise ValueError("rational_points do not match the defining polynomial")

    # -- construction ------------------------------------------------------
    @classmethod
    def from_points(cls, points: Iterable, infinity: bool = False) -> "FiniteAlgebraicSet":
        pts = sorted({as_fraction(p) for p in points})
        return cls(RatPoly.from_roots(pts), tuple(pts), infinity)

    @classmethod
    def from_defining(cls, poly: RatPoly, infinity: bool = False) -> "FiniteAlgebraicSet":
        if poly.is_zero():
            raise ValueError("defining polynomial must be nonzero")
        sq = squarefree_part(poly) if poly.degree >= 1 else RatPoly([1])
        if sq.degree >= 1:
            roots, cof = rational_roots(sq)
            pts = tuple(sorted(roots)) if cof.degree == 0 else None
        else:
            pts = ()
        return cls(sq, pts, infinity)

    # -- views ---------------------------------------------------------------
    @property
    def finite_size(self) -> int:
        return self.defining.degree

    def __len__(self) -> int:
        return self.defining.degree + (1 if self.contains_infinity else 0)

    @property
    def is_rational(self) -> bool:
        return self.rational_points is not None

    def finite_part(self) -> "FiniteAlgebraicSet":
        return FiniteAlgebraicSet(self.defining, self.rational_points, False)

    def with_infinity(self, flag: bool = True) -> "FiniteAlgebraicSet":
        return FiniteAlgebraicSet(self.defining, self.rational_points, flag)

    def split_rational(self) -> tuple[list[Fraction], RatPoly]:
        """Rational elements and the monic cofactor carrying the irrational ones."""
        if self.rational_points is not None:
            return list(self.rational_points), RatPoly([1])
        return rational_roots(self.defining)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteAlgebraicSet):
            return NotImplemented
        return self.defining == other.defining and self.contains_infinity == other.contains_infinity

    def __hash__(self) -> int:
        return hash((self.defining, self.contains_infinity))

    def __repr__(self) -> str:
        if self.rational_points is not None:
            body = ", ".join(str(p) for p in self.rational_points)
        else:
            body = f"roots of {self.defining}"
        if self.contains_infinity:
            body = f"{body}, inf" if body else "inf"
        return f"FiniteAlgebraicSet({{{body}}})"

    def to_json(self) -> dict:
        out: dict = {"defining": format_poly(self.defining), "infinity": self.contains_infinity}
        if self.rational_points is not None:
            out["points"] = [str(p) for p in self.rational_points]
        return out


def parse_set(source) -> FiniteAlgebraicSet:
    """Parse ``{"points": [...]}`` or ``{"defining": "c0,c1,...", "infinity": bool}``."""
    if isinstance(source, FiniteAlgebraicSet):
        return source
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad set JSON at position {exc.pos}: {exc.msg}") from None
    if not isinstance(source, dict):
        raise ValueError("set JSON must be an object with 'points' or 'defining'")
    infinity = bool(source.get("infinity", False))
    if "points" in source:
        pts = []
        for pos, tok in enumerate(source["points"]):
            if isinstance(tok, str) and tok.strip().lower() in _INF_TOKENS:
                infinity = True
                continue
            if isinstance(tok, float):
                raise ValueError(f"point {pos} ({tok!r}) must be an integer or an 'n/d' string")
            try:
                pts.append(as_fraction(tok))
            except (ValueError, TypeError, ZeroDivisionError):
                raise ValueError(f"bad point {tok!r} at position {pos}") from None
        if not pts:
            return FiniteAlgebraicSet(RatPoly([1]), (), True) if infinity else _empty_error()
        return FiniteAlgebraicSet.from_points(pts, infinity)
    if "defining" in source:
        return FiniteAlgebraicSet.from_defining(parse_poly(source["defining"]), infinity)
    raise ValueError("set JSON must contain 'points' or 'defining'")


def _empty_error():
    raise ValueError("a finite algebraic set must be nonempty")


# ---------------------------------------------------------------------------
# set operations


def _image_poly(rats: list[Fraction], cof: RatPoly, f: RatPoly) -> RatPoly:
    out = RatPoly.from_roots(f(r) for r in rats)
    if cof.degree >= 1:
        out = out * charpoly_mod(cof, f)
    return out


def image_set(S: FiniteAlgebraicSet, f: RatPoly) -> FiniteAlgebraicSet:
    """f(S) for a nonconstant polynomial f (infinity, if present, is fixed)."""
    if f.degree < 1:
        raise ValueError("image_set needs a nonconstant polynomial")
    rats, cof = S.split_rational()
    if S.finite_size == 0:
        return FiniteAlgebraicSet(RatPoly([1]), (), S.contains_infinity)
    if cof.degree == 0:
        return FiniteAlgebraicSet.from_points([f(r) for r in rats], S.contains_infinity)
    return FiniteAlgebraicSet.from_defining(_image_poly(rats, cof, f), S.contains_infinity)


def critical_points_set(f: RatPoly) -> FiniteAlgebraicSet:
    """C_0(f): the finite critical points."""
    if f.degree < 2:
        raise ValueError("critical points need degree >= 2")
    return FiniteAlgebraicSet.from_defining(f.derivative())


def critical_values_set(f: RatPoly) -> FiniteAlgebraicSet:
    """V_0(f) = f(C_0(f)), the finite critical values of a polynomial."""
    return image_set(critical_points_set(f), f)


def union(*sets: FiniteAlgebraicSet) -> FiniteAlgebraicSet:
    """Union; rational point lists are merged when every input has one."""
    infinity = any(s.contains_infinity for s in sets)
    if all(s.rational_points is not None for s in sets):
        pts = {p for s in sets for p in s.rational_points}
        if not pts:
            return FiniteAlgebraicSet(RatPoly([1]), (), infinity)
        return FiniteAlgebraicSet.from_points(pts, infinity)
    prod = RatPoly([1])
    for s in sets:
        prod = prod * s.defining
    return FiniteAlgebraicSet.from_defining(prod, infinity)


def subset_of(S: FiniteAlgebraicSet, T: FiniteAlgebraicSet) -> bool:
    """Exact containment: S.defining divides T.defining (and infinity flags agree)."""
    if S.contains_infinity and not T.contains_infinity:
        return False
    return S.defining.divides(T.defining)


def forward_invariant(S: FiniteAlgebraicSet, f: RatPoly) -> bool:
    """True iff f maps S into itself, tested as S(f(z)) = 0 mod S(z)."""
    if S.finite_size == 0:
        return True
    return compose_mod(S.defining, f, S.defining).is_zero()


# ---------------------------------------------------------------------------
# Belyi reduction


class BelyiDegreeLimitError(ArithmeticError):
    """A fold step would push the Belyi polynomial past the configured degree cap."""


def fold_polynomial(m: int, n: int) -> RatPoly:
    """((m+n)^(m+n) / (m^m n^n)) z^m (1-z)^n: fixes {0,1} setwise, sends m/(m+n) to 1."""
    if m < 1 or n < 1:
        raise ValueError("fold exponents must be positive")
    const = Fraction((m + n) ** (m + n), m**m * n**n)
    return (RatPoly.x() ** m) * (RatPoly([1, -1]) ** n) * const


@dataclass
class BelyiCertificate:
    """A Belyi polynomial for S together with its two exact containment facts."""

    beta: RatPoly
    image_check: Claim
    critval_check: Claim
    degree: int
    factors: list[RatPoly] = field(default_factory=list)
    stages: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.image_check.verdict and self.critval_check.verdict

    def to_json(self) -> dict:
        return {
            "beta": format_poly(self.beta),
            "degree": self.degree,
            "achieved_belyi_degree": self.degree,
            "factors": [format_poly(q) for q in self.factors],
            "stages": list(self.stages),
            "claims": [self.image_check.to_json(), self.critval_check.to_json()],
            "verdict": self.verdict,
        }


ZERO_ONE = FiniteAlgebraicSet.from_points([0, 1])


def _choose_fold(points: list[Fraction]) -> tuple[Fraction, int, int]:
    """Interior point of (0,1) with the smallest fold degree (ties: smallest point)."""
    best = None
    for r in points:
        if 0 < r < 1:
            key = (r.denominator, r)
            if best is None or key < best[0]:
                best = (key, r)
    r = best[1]
    return r, r.numerator, r.denominator - r.numerator


def _short(r: Fraction) -> str:
    text = f"{r.numerator}/{r.denominator}" if r.denominator.bit_length() < 200 else f"<{r.denominator.bit_length()}-bit rational>"
    return text


def _short_int(k: int) -> str:
    return str(k) if k.bit_length() < 64 else f"~2^{k.bit_length()}"


def belyi(S: FiniteAlgebraicSet, max_degree: int = 20000) -> BelyiCertificate:
    """Polynomial beta with beta(S) and V_0(beta) inside {0,1}, both checked exactly.

    Irrational stage: fold by the whole irrational cofactor q until the
    tracked set is rational (cofactor degree strictly drops).  Rational stage:
    send min/max to 0/1 and fold interior points m/(m+n) one at a time.
    ``max_degree`` bounds the composite degree; exceeding it raises
    ``BelyiDegreeLimitError`` rather than running for ever.
    """
    if S.finite_size < 1:
        raise ValueError("belyi needs at least one finite point")
    finite = S.finite_part()
    tracked = finite
    factors: list[RatPoly] = []
    stages: list[str] = []
    degree = 1

    def push(q: RatPoly, label: str):
        nonlocal degree
        if degree * max(q.degree, 1) > max_degree:
            raise BelyiDegreeLimitError(
                f"{label} of degree {q.degree} would raise deg(beta) to {degree * q.degree} > {max_degree}"
            )
        factors.append(q)
        stages.append(label)
        degree *= q.degree

    while True:
        rats, cof = tracked.split_rational()
        if cof.degree < 1:
            break
        q = cof.monic()
        push(q, f"irrational fold by degree-{q.degree} cofactor")
        # cofactor has no rational roots, so deg q >= 2
        tracked = union(FiniteAlgebraicSet.from_points([q(r) for r in rats] + [0]), critical_values_set(q))

    pts = sorted(tracked.rational_points)
    if len(pts) == 1:
        push(RatPoly([-pts[0], 1]), "translate to 0")
        pts = [Fraction(0)]
    else:
        lo, hi = pts[0], pts[-1]
        if (lo, hi) != (0, 1):
            aff = RatPoly([-lo / (hi - lo), 1 / (hi - lo)])
            push(aff, "affine normalisation to [0,1]")
            pts = sorted({aff(p) for p in pts})
        while any(0 < p < 1 for p in pts):
            r, m, n = _choose_fold(pts)
            if degree * (m + n) > max_degree:
                raise BelyiDegreeLimitError(
                    f"next fold has degree {_short_int(m + n)}; deg(beta) would exceed {max_degree}"
                )
            fold = fold_polynomial(m, n)
            push(fold, f"fold at {_short(r)} (m={m}, n={n})")
            pts = sorted({fold(p) for p in pts} | {Fraction(0), Fraction(1)})

    beta = RatPoly.x()
    for q in factors:
        beta = compose(q, beta)
    return certify_belyi(finite, beta, factors, stages)


def certify_belyi(S: FiniteAlgebraicSet, beta: RatPoly, factors=(), stages=()) -> BelyiCertificate:
    img = image_set(S, beta)
    image_ok = subset_of(img, ZERO_ONE)
    if beta.degree >= 2:
        cv = critical_values_set(beta)
        crit_ok = subset_of(cv, ZERO_ONE)
        crit_detail = f"V_0(beta) defined by {cv.defining}"
    else:
        crit_ok = True
        crit_detail = "beta has degree 1, no finite critical points"
    return BelyiCertificate(
        beta=beta,
        image_check=exact_claim(
            "beta(S) is contained in {0,1}", image_ok, f"image defined by {img.defining}; divides z(z-1)"
        ),
        critval_check=exact_claim("V_0(beta) is contained in {0,1}", crit_ok, crit_detail + "; divides z(z-1)"),
        degree=beta.degree,
        factors=list(factors),
        stages=list(stages),
    )
