"""Polynomials h with two finite postcritical points whose Julia set contains X.

Start from a Belyi polynomial beta for X with deg beta > 1 and
V_0(beta) = {0, 1}; pick non-critical a, b over {0, 1}; then h = alpha o beta
with alpha(0) = a, alpha(1) = b.  Hence V_0(h) = {a, b}, h maps {a, b} and X
into {a, b}, and P_0(h) = {a, b} avoids the critical points, so both lie in
J(h), and so does X by total invariance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..algsets import (
    BelyiDegreeLimitError,
    FiniteAlgebraicSet,
    belyi,
    critical_points_set,
    critical_values_set,
    fold_polynomial,
    image_set,
    subset_of,
    union,
)
from ..certificates import Certificate, exact_claim, numeric_claim
from ..exact.ratpoly import RatPoly, compose, poly_gcd, rational_roots, squarefree_part
from ..numeric import DEFAULT_PRECISION, poly_eval, roots, to_mpc
from ..postcritical import postcritical_orbit

__all__ = ["HPolyResult", "h_poly_for_set"]

ZERO_ONE = FiniteAlgebraicSet.from_points([0, 1])


@dataclass
class HPolyResult:
    X: FiniteAlgebraicSet
    beta: RatPoly
    route: str
    a: object
    b: object
    h: RatPoly | None
    h_numeric: list | None
    certificate: Certificate
    notes: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.certificate.verdict

    @property
    def exact(self) -> bool:
        return self.h is not None

    def to_json(self) -> dict:
        def num(z):
            if isinstance(z, Fraction):
                return str(z)
            return [mpmath.nstr(z.real, 30), mpmath.nstr(z.imag, 30)]

        out = {
            "X": self.X.to_json(),
            "beta": self.beta.to_text(),
            "beta_degree": self.beta.degree,
            "route": self.route,
            "a": num(self.a),
            "b": num(self.b),
            "alpha": "z -> a + (b - a) z  (alpha(0) = a, alpha(1) = b)",
            "certificate": self.certificate.to_json(),
        }
        if self.h is not None:
            out["h"] = self.h.to_text()
        else:
            out["h_coefficients"] = [num(c) for c in self.h_numeric]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _good_beta(beta: RatPoly) -> bool:
    return beta.degree > 1 and critical_values_set(beta) == ZERO_ONE


def _pick_ab(beta: RatPoly):
    zeros = _simple_rational_roots(beta)
    ones = _simple_rational_roots(beta - 1)
    if zeros and ones:
        return zeros[0], ones[0]
    if len(zeros) >= 2:
        return zeros[0], zeros[1]
    if len(ones) >= 2:
        return ones[0], ones[1]
    return None


def _candidates(X: FiniteAlgebraicSet, cap: int, enlarge_cap: int):
    base = belyi(X, max_degree=cap).beta
    yield base, "belyi"
    try:
        yield belyi(union(X, ZERO_ONE), max_degree=enlarge_cap).beta, "belyi for X with 0 and 1 adjoined"
    except BelyiDegreeLimitError:
        pass
    # 27/4 z (1-z)^2 after beta still sends X into {0,1} and has critical values {0,1}
    yield compose(fold_polynomial(1, 2), base), "fold (1,2) after belyi"


def _choose_beta(X: FiniteAlgebraicSet, cap: int, enlarge_cap: int):
    """First candidate with deg > 1, V_0 = {0,1} and rational a, b; else the first good one."""
    fallback = None
    for beta, route in _candidates(X, cap, enlarge_cap):
        if not _good_beta(beta):
            continue
        ab = _pick_ab(beta)
        if ab is not None:
            return beta, route, ab
        if fallback is None:
            fallback = (beta, route, None)
    return fallback


def _simple_rational_roots(p: RatPoly) -> list[Fraction]:
    rats, _ = rational_roots(p)
    d = p.derivative()
    return sorted({r for r in rats if d(r) != 0})


def _simple_part(p: RatPoly) -> RatPoly:
    """Product of the simple irreducible factors, as a squarefree polynomial."""
    g = poly_gcd(p, p.derivative())
    q = p.exact_div(g) if g.degree > 0 else p
    # drop roots shared with p' (multiple roots of p)
    shared = poly_gcd(q, p.derivative())
    return q.exact_div(shared) if shared.degree > 0 else q


def h_poly_for_set(
    X: FiniteAlgebraicSet, cap: int = 4096, enlarge_cap: int = 64, precision: int = DEFAULT_PRECISION
) -> HPolyResult:
    """h = alpha o beta with |P_0(h)| = 2 and X in J(h), verified exactly when a, b are rational.

    Candidates for beta, in order: a Belyi polynomial for X, one for X with 0
    and 1 adjoined (degree at most ``enlarge_cap``), and the (1,2) fold after
    the first.  The first with rational non-critical a, b over {0, 1} wins.
    """
    if X.contains_infinity:
        raise ValueError("X must be a finite subset of the plane")
    if X.finite_size == 0:
        raise ValueError("X is empty")
    beta, route, ab = _choose_beta(X, cap, enlarge_cap)
    if ab is None:
        return _numeric_route(X, beta, route, precision)
    a, b = ab
    alpha = RatPoly([a, b - a])
    h = compose(alpha, beta)
    cert = Certificate()
    ab = FiniteAlgebraicSet.from_points([a, b])
    cert.add(exact_claim("deg h > 1", h.degree > 1, f"deg h = {h.degree}"))
    cert.add(exact_claim("V_0(h) = {a, b}", critical_values_set(h) == ab))
    cert.add(exact_claim("h({a, b}) is contained in {a, b}", h(a) in (a, b) and h(b) in (a, b)))
    cert.add(exact_claim("h(X) is contained in {a, b}", subset_of(image_set(X, h), ab)))
    C0 = critical_points_set(h)
    cert.add(
        exact_claim(
            "P_0(h) and C_0(h) are disjoint",
            C0.defining(a) != 0 and C0.defining(b) != 0,
        )
    )
    orbit = postcritical_orbit(h)
    cert.add(exact_claim("P_0(h) = {a, b} by forward orbit", orbit.finite and orbit.postcritical == ab))
    res = HPolyResult(X, beta, route, a, b, h, None, cert)
    res.notes.append("alpha(0) = a and alpha(1) = b, so that V_0(h) = alpha({0, 1}) = {a, b}")
    return res


def _numeric_route(X: FiniteAlgebraicSet, beta: RatPoly, route: str, precision: int) -> HPolyResult:
    """No rational non-critical points over {0, 1}: pick algebraic ones numerically."""
    with mpmath.workprec(precision + 32):
        cand = []
        for target, poly in ((0, beta), (1, beta - 1)):
            simple = _simple_part(poly)
            if simple.degree > 0:
                cand.extend((target, b.center) for b in roots([to_mpc(c) for c in simple.coeffs], precision))
        (_, a), (_, b) = cand[0], cand[1]
        alpha = [a, b - a]
        bc = [to_mpc(c) for c in beta.coeffs]
        hc = [c * alpha[1] for c in bc]
        hc[0] += alpha[0]
        # critical points of h are those of beta; the squarefree part has simple roots
        dsq = squarefree_part(beta.derivative())
        crit = [r.center for r in roots([to_mpc(c) for c in dsq.coeffs], precision)]
        vals = [poly_eval(hc, c) for c in crit]
        v_err = max(min(abs(v - a), abs(v - b)) for v in vals)
        ha, hb = poly_eval(hc, a), poly_eval(hc, b)
        ab_err = max(min(abs(ha - a), abs(ha - b)), min(abs(hb - a), abs(hb - b)))
        rats, cof = X.split_rational()
        xs = [to_mpc(r) for r in rats]
        if cof.degree > 0:
            xs += [r.center for r in roots([to_mpc(c) for c in cof.coeffs], precision)]
        x_err = max(min(abs(poly_eval(hc, x) - a), abs(poly_eval(hc, x) - b)) for x in xs)
        sep = min(abs(c - p) for c in crit for p in (a, b))
    bound = 1e-30
    cert = Certificate()
    cert.add(numeric_claim("V_0(h) = {a, b}", float(v_err), bound))
    cert.add(numeric_claim("h({a, b}) is contained in {a, b}", float(ab_err), bound))
    cert.add(numeric_claim("h(X) is contained in {a, b}", float(x_err), bound))
    cert.add(numeric_claim("P_0(h) and C_0(h) are disjoint (inverse separation)", 1 / float(sep), 1e12))
    res = HPolyResult(X, beta, route, a, b, None, hc, cert)
    res.notes.append("a, b are irrational; verification is numeric at the working precision")
    return res
