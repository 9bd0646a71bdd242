"""Polynomials with a prescribed finite postcritical set.

Given a finite set X containing infinity, ``construct_postcritical`` builds
f = g o lambda o beta where beta is a Belyi polynomial for the finite part of
X and g has finite critical values exactly X minus infinity, with 0 and 1
among the critical points of g o lambda.  Then f(X) lands in X, the finite
critical values of f are X, and every finite point of X is critical, so f
is postcritically finite and hyperbolic with postcritical set X.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import mpmath
from mpmath import mpf

from .algsets import (
    FiniteAlgebraicSet,
    belyi,
    critical_values_set,
    forward_invariant,
    image_set,
    subset_of,
    union,
)
from .certificates import Certificate, exact_claim, numeric_claim
from .critval import NotRationalChain, PolyTemplate, chain_with_critvals, solve_template
from .exact.ratpoly import RatPoly, as_fraction, compose, format_poly, rational_roots
from .numeric import DEFAULT_PRECISION, poly_eval, roots, to_mpc

__all__ = [
    "NoExactRouteError",
    "PCFCertificate",
    "OrbitReport",
    "construct_postcritical",
    "postcritical_orbit",
    "degree_report",
    "move_to_infinity",
    "DEFAULT_BUDGET",
    "NUMERIC_BOUND",
]

DEFAULT_BUDGET = 512
NUMERIC_BOUND = 1e-30
DEFAULT_BELYI_CAP = 512


class NoExactRouteError(ArithmeticError):
    """The exact tier was requested but no rational construction applies."""


@dataclass
class PCFCertificate:
    """The constructed map, its factors, and the claims that certify it.

    ``f`` is a ``RatPoly`` on the exact path.  On the numeric path ``f`` is
    None and the map is ``g o beta`` with ``g_numeric`` multiprecision.
    """

    X: FiniteAlgebraicSet
    path: str
    beta: RatPoly
    g: RatPoly | None
    g_numeric: Any
    lam: RatPoly
    f: RatPoly | None
    certificate: Certificate
    belyi_degree: int
    g_degree: int
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.certificate.verdict

    @property
    def f_degree(self) -> int:
        return self.belyi_degree * self.g_degree

    def evaluate(self, z):
        """f(z) as a multiprecision complex number."""
        w = _eval_rat(self.lam, _eval_rat(self.beta, to_mpc(z)))
        if self.g is not None:
            return _eval_rat(self.g, w)
        return self.g_numeric(w)

    def to_json(self) -> dict:
        out = {
            "set": self.X.to_json(),
            "path": self.path,
            "verdict": self.verdict,
            "degrees": {
                "achieved_belyi_degree": self.belyi_degree,
                "g_degree": self.g_degree,
                "f_degree": self.f_degree,
            },
            "beta": format_poly(self.beta),
            "affine": format_poly(self.lam),
            "certificate": self.certificate.to_json(),
        }
        if self.f is not None:
            out["f"] = format_poly(self.f)
        if self.g is not None:
            out["g"] = format_poly(self.g)
        if self.g_numeric is not None:
            out["g_numeric"] = self.g_numeric.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _eval_rat(p: RatPoly, z):
    return poly_eval([to_mpc(c) for c in p.coeffs], z)


def move_to_infinity(X: FiniteAlgebraicSet, r) -> FiniteAlgebraicSet:
    """Image of X under the rational Mobius map z -> 1/(z - r), which sends r to infinity."""
    r = as_fraction(r)
    if X.defining(r) != 0:
        raise ValueError(f"{r} is not a point of the set")
    rest = X.defining.exact_div(RatPoly([-r, 1]))
    n = rest.degree
    # finite x != r go to 1/(x - r): reversed coefficients of rest(z + r)
    sh = list(rest.shift(r).coeffs)
    new_def = RatPoly(list(reversed(sh + [0] * (n + 1 - len(sh))))).monic()
    if X.contains_infinity:
        new_def = new_def * RatPoly([0, 1])
    return FiniteAlgebraicSet.from_defining(new_def, infinity=True)


def _claims_exact(S: FiniteAlgebraicSet, f: RatPoly) -> Certificate:
    cert = Certificate()
    cv = critical_values_set(f)
    cert.add(exact_claim("V_0(f) equals X minus infinity", cv == S, f"V_0(f) defined by {cv.defining}"))
    cert.add(exact_claim("f maps X minus infinity into itself", forward_invariant(S, f)))
    cert.add(
        exact_claim(
            "X minus infinity lies in C_0(f) (f is hyperbolic)",
            S.defining.divides(f.derivative()),
            "defining polynomial of X divides f'",
        )
    )
    return cert


def _exact_g(S: FiniteAlgebraicSet) -> tuple[RatPoly, RatPoly, str] | None:
    """(g, lambda, description) with V_0(g) = S and {0,1} critical for g o lambda."""
    pts = list(S.rational_points)
    chain = chain_with_critvals(pts, cubic_core=True)
    if not isinstance(chain, NotRationalChain):
        return chain.composite(), RatPoly.x(), "exact quadratic chain with cubic core"
    chain = chain_with_critvals(pts)
    if isinstance(chain, NotRationalChain):
        return None
    g = chain.composite()
    crit, _ = rational_roots(g.derivative())
    crit = sorted(set(crit), reverse=True)
    if len(crit) < 2:
        return None
    c0, c1 = crit[0], crit[1]
    lam = RatPoly([c0, c1 - c0])
    return g, lam, "exact quadratic chain with rational affine normalisation"


def construct_postcritical(
    X: FiniteAlgebraicSet,
    tier: str = "auto",
    precision: int = DEFAULT_PRECISION,
    belyi_cap: int = DEFAULT_BELYI_CAP,
) -> PCFCertificate:
    """Build a polynomial whose postcritical set is X (infinity in X).

    The exact path prefers a quadratic chain whose innermost factor is a
    cubic with critical points 0 and 1, then a plain chain with a rational
    affine normalisation sending 0 and 1 to the two largest rational
    critical points of g.

    tier ``"exact"`` insists on a construction over Q and raises
    ``NoExactRouteError`` otherwise; ``"auto"`` falls back to placing the
    critical values numerically.
    """
    if tier not in ("exact", "auto"):
        raise ValueError("tier must be 'exact' or 'auto'")
    if not X.contains_infinity:
        raise ValueError("the set must contain infinity; use move_to_infinity first")
    S = X.finite_part()
    if S.finite_size < 1:
        raise ValueError("the set needs at least one finite point besides infinity")

    if S.finite_size == 1:
        a = S.rational_points[0]
        f = RatPoly([a * a + a, -2 * a, 1])  # (z - a)^2 + a
        cert = _claims_exact(S, f)
        return PCFCertificate(X, "exact", RatPoly.x(), f, None, RatPoly.x(), f, cert, 1, 2,
                              ["single finite point: f = (z - a)^2 + a"])

    bc = belyi(S, max_degree=belyi_cap)
    beta = bc.beta
    notes = list(bc.stages)

    if S.is_rational:
        found = _exact_g(S)
        if found is not None:
            g, lam, desc = found
            f = compose(compose(g, lam), beta)
            cert = _claims_exact(S, f)
            cert.claims[0:0] = [bc.image_check, bc.critval_check]
            return PCFCertificate(X, "exact", beta, g, None, lam, f, cert, beta.degree, g.degree, notes + [desc])
    if tier == "exact":
        raise NoExactRouteError("no rational construction of g exists along the tried chains")
    return _numeric_path(X, S, bc, precision, notes)


def _beta_values(S: FiniteAlgebraicSet, beta: RatPoly, precision: int) -> list:
    """beta on the points of S: exact at rational points, else with enough guard bits.

    A high-degree beta has large coefficients, so naive evaluation at a
    working-precision root cancels away every significant bit.
    """
    rats, cof = S.split_rational()
    out = [to_mpc(beta(r)) for r in rats]
    if cof.degree > 0:
        height = max(abs(c.numerator).bit_length() + c.denominator.bit_length() for c in beta.coeffs)
        extra = height + 4 * beta.degree + 64
        boxes = roots(list(cof.coeffs), precision + extra)
        with mpmath.workprec(precision + extra + 32):
            out += [_eval_rat(beta, b.center) for b in boxes]
    return out


def _numeric_path(X, S, bc, precision, notes) -> PCFCertificate:
    beta = bc.beta
    boxes = roots([c for c in S.defining.coeffs], precision)
    with mpmath.workprec(precision + 32):
        targets = [b.center for b in boxes]
        tmpl = PolyTemplate.critical01(len(targets))
        g = solve_template(tmpl, targets, precision=precision)
        cert = Certificate()
        cert.add(bc.image_check)
        cert.add(bc.critval_check)
        bound = NUMERIC_BOUND
        # V_0(g) = S: the template has exactly these simple critical points
        dg = g.derivative_coeffs()
        cp = roots(dg, precision)
        placed = g.crit_points
        match = max(min(abs(b.center - c) for c in placed) for b in cp)
        cert.add(numeric_claim("the critical points of g are exactly the placed ones", match, bound))
        val_res = max(abs(g(c) - t) for c, t in zip(placed, targets))
        box_rad = max(b.radius for b in boxes)
        cert.add(numeric_claim("V_0(g) equals X minus infinity", val_res + box_rad, bound,
                               "critical values placed on root enclosures of the defining polynomial"))
        # g(0), g(1) in S, so f(S) lies in S since beta(S) lies in {0,1}
        land = max(min(abs(g(p) - t) for t in targets) for p in (0, 1))
        cert.add(numeric_claim("g maps {0,1} into X minus infinity", land + box_rad, bound))
        crit01 = max(abs(poly_eval(dg, mpmath.mpc(p))) for p in (0, 1))
        cert.add(numeric_claim("0 and 1 are critical points of g", crit01, bound,
                               "beta sends X to {0,1}, so X lies in C_0(g o beta)"))
        direct = mpf(0)
        for w in _beta_values(S, beta, precision):
            val = g(w)
            direct = max(direct, min(abs(val - s) for s in targets))
        cert.add(numeric_claim("direct evaluation: f(x) lies in X for every finite x in X", direct, bound))
    notes = notes + ["g placed numerically (critical points 0 and 1 plus simple ones)"]
    return PCFCertificate(X, "numeric", beta, None, g, RatPoly.x(), None, cert, beta.degree, g.degree, notes)


@dataclass
class OrbitReport:
    postcritical: FiniteAlgebraicSet | None
    steps: int
    budget: int
    finite: bool
    reason: str = ""

    def to_json(self) -> dict:
        out = {"finite": self.finite, "steps": self.steps, "budget": self.budget, "reason": self.reason}
        if self.postcritical is not None:
            out["postcritical_set"] = self.postcritical.to_json()
        return out


def escape_radius(f: RatPoly) -> Fraction:
    """R with |z| >= R implying |f(z)| >= 2|z|, so such orbits tend to infinity."""
    d = f.degree
    tail = sum((abs(c) for c in f.coeffs[:d]), Fraction(0))
    return max(Fraction(1), (2 + tail) / abs(f.lc))


HEIGHT_LIMIT_BITS = 1 << 16


def postcritical_orbit(f: RatPoly, budget: int = DEFAULT_BUDGET) -> OrbitReport:
    """Iterate V_0(f) forward until the cumulative union stabilises.

    Stops with finite=False once the cumulative defining degree exceeds
    ``budget``, or earlier when a rational orbit point lies beyond the escape
    radius (its orbit then tends to infinity, a proof of infiniteness).
    Coefficients past ``HEIGHT_LIMIT_BITS`` bits count as budget exhaustion.
    """
    if f.degree < 2:
        raise ValueError("postcritical_orbit needs deg f >= 2")
    if budget < 1:
        raise ValueError("budget must be positive")
    radius = escape_radius(f)
    current = critical_values_set(f)
    steps = 0
    while True:
        if current.defining.degree > budget:
            return OrbitReport(None, steps, budget, False, "degree budget exhausted")
        rats, _ = current.split_rational()
        if any(abs(r) >= radius for r in rats):
            return OrbitReport(None, steps, budget, False, "a rational orbit point escapes to infinity")
        if max(abs(c.numerator).bit_length() + c.denominator.bit_length() for c in current.defining.coeffs) > HEIGHT_LIMIT_BITS:
            return OrbitReport(None, steps, budget, False, "coefficient height limit reached")
        nxt = union(current, image_set(current, f))
        steps += 1
        if nxt == current:
            return OrbitReport(current, steps, budget, True, "forward invariant")
        current = nxt


def degree_report(X: FiniteAlgebraicSet, **kwargs) -> dict:
    """Achieved degrees of the construction and the comparison bound B + |X| + 1."""
    res = construct_postcritical(X, **kwargs)
    size = X.finite_size + (1 if X.contains_infinity else 0)
    return {
        "achieved_belyi_degree": res.belyi_degree,
        "achieved_postcritical_degree": res.f_degree,
        "bound_belyi_plus_size_plus_one": res.belyi_degree + size + 1,
        "path": res.path,
        "note": "both degrees are upper bounds from this construction, not minima",
    }
