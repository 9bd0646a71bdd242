"""Polynomials with prescribed finite critical values.

Two routes.  ``chain_with_critvals`` composes quadratics z^2 + a exactly over
Q, pulling inner targets back through outer factors by square roots; it
fails cleanly when a square root leaves Q.  ``solve_template`` places the
critical values of a normalized polynomial family numerically, by Newton
iteration along a homotopy in the target values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from .exact.ratpoly import RatPoly, as_fraction, compose
from .numeric import DEFAULT_PRECISION, DegenerateConfigurationError, poly_eval, to_mpc

__all__ = [
    "QuadChain",
    "NotRationalChain",
    "rational_sqrt",
    "chain_with_critvals",
    "PolyTemplate",
    "NumPoly",
    "TemplateSolveError",
    "solve_template",
    "cubic_triple",
]


def rational_sqrt(q: Fraction) -> Fraction | None:
    """The nonnegative square root of ``q`` if it is rational, else None."""
    q = as_fraction(q)
    if q < 0:
        return None
    a, b = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


@dataclass(frozen=True)
class QuadChain:
    """Factor maps listed innermost first; the composite applies them in order."""

    factors: tuple[RatPoly, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a chain needs at least one factor")

    @property
    def degree(self) -> int:
        return math.prod(f.degree for f in self.factors)

    def composite(self) -> RatPoly:
        g = self.factors[0]
        for f in self.factors[1:]:
            g = compose(f, g)
        return g

    def to_json(self) -> dict:
        return {"factors": [f.to_text() for f in self.factors], "degree": self.degree}


@dataclass(frozen=True)
class NotRationalChain:
    """Every ordering of the chain needed an irrational square root."""

    targets: tuple[Fraction, ...]
    discriminants: tuple[Fraction, ...]

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {
            "not_rational": True,
            "targets": [str(t) for t in self.targets],
            "failing_discriminants": [str(d) for d in self.discriminants],
        }


def _cubic_core(t1: Fraction, t2: Fraction) -> RatPoly:
    # critical points exactly 0 and 1, with values t1 and t2
    d = t1 - t2
    return RatPoly([t1, 0, -3 * d, 2 * d])


def _build(targets: tuple[Fraction, ...], cubic: bool, failures: list) -> list[RatPoly] | None:
    if len(targets) == 1:
        return [RatPoly([targets[0], 0, 1])]
    if cubic and len(targets) == 2:
        return [_cubic_core(targets[0], targets[1])]
    for k, a in enumerate(targets):
        inner = []
        for j, t in enumerate(targets):
            if j == k:
                continue
            r = rational_sqrt(t - a)
            if r is None:
                failures.append(t - a)
                break
            inner.append(-r)
        else:
            sub = _build(tuple(inner), cubic, failures)
            if sub is not None:
                return sub + [RatPoly([a, 0, 1])]
    return None


def chain_with_critvals(targets: Sequence, cubic_core: bool = False) -> QuadChain | NotRationalChain:
    """Compose quadratics so the composite has finite critical values exactly ``targets``.

    The outer factor z^2 + a contributes a, and every other target t must be
    a critical value of the inner chain at -sqrt(t - a).  Outer choices are
    tried in order with backtracking.  With ``cubic_core`` the innermost pair
    of targets is placed by a cubic whose critical points are 0 and 1, so
    the composite already has {0, 1} among its critical points.
    """
    ts = tuple(as_fraction(t) for t in targets)
    if not ts:
        raise ValueError("chain_with_critvals needs at least one target")
    if len(set(ts)) != len(ts):
        raise ValueError("targets must be distinct")
    failures: list[Fraction] = []
    factors = _build(ts, cubic_core, failures)
    if factors is None:
        uniq = tuple(dict.fromkeys(failures))
        return NotRationalChain(ts, uniq)
    return QuadChain(tuple(factors))


# ---------------------------------------------------------------------------
# numeric templates


class TemplateSolveError(ArithmeticError):
    """Newton/homotopy failed to place the critical values."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class PolyTemplate:
    """A normalized polynomial family with a fixed branching scheme.

    scheme
        ``"quadratic"``: z^2 + a, one simple critical point.
        ``"triple"``: A (z - t)^3 + a with g(0) = 0, g(1) = 1.
        ``"simple"``: all finite critical points simple, g(0) = 0, g(1) = 1;
        degree = number of targets + 1.
        ``"critical01"``: critical points 0, 1 and further simple ones, no
        pinned values; degree = number of targets + 1.
    """

    degree: int
    scheme: str
    multiplicities: tuple[int, ...]
    pins: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.scheme not in ("quadratic", "triple", "simple", "critical01"):
            raise ValueError(f"unknown template scheme {self.scheme!r}")
        if sum(self.multiplicities) != self.degree - 1:
            raise ValueError("critical multiplicities must add up to degree - 1")

    @classmethod
    def quadratic(cls) -> "PolyTemplate":
        return cls(2, "quadratic", (1,))

    @classmethod
    def triple(cls) -> "PolyTemplate":
        return cls(3, "triple", (2,), ((0, 0), (1, 1)))

    @classmethod
    def simple(cls, n_targets: int) -> "PolyTemplate":
        if n_targets < 1:
            raise ValueError("need at least one target")
        return cls(n_targets + 1, "simple", (1,) * n_targets, ((0, 0), (1, 1)))

    @classmethod
    def critical01(cls, n_targets: int) -> "PolyTemplate":
        if n_targets < 2:
            raise ValueError("need at least two targets")
        return cls(n_targets + 1, "critical01", (1,) * n_targets)

    @property
    def n_targets(self) -> int:
        return 1 if self.scheme in ("quadratic", "triple") else len(self.multiplicities)


@dataclass
class NumPoly:
    """A multiprecision polynomial with its placed critical points.

    ``crit_points[i]`` has value ``targets[i]``; ``params`` are the Newton
    unknowns, reusable as the seed of a nearby solve.
    """

    coeffs: list
    crit_points: list
    crit_values: list
    template: PolyTemplate
    residual: mpf
    precision: int
    params: list = field(default_factory=list)
    steps: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        with mpmath.workprec(self.precision + 32):
            return poly_eval(self.coeffs, to_mpc(z))

    def derivative_coeffs(self) -> list:
        return [k * c for k, c in enumerate(self.coeffs)][1:]

    def to_json(self, digits: int = 30) -> dict:
        def cx(z):
            return [mpmath.nstr(z.real, digits), mpmath.nstr(z.imag, digits)]

        return {
            "degree": self.degree,
            "scheme": self.template.scheme,
            "coefficients": [cx(c) for c in self.coeffs],
            "critical_points": [cx(c) for c in self.crit_points],
            "residual": float(self.residual),
            "precision_bits": self.precision,
        }


# -- polynomial helpers over mpc (lowest degree first) ----------------------


def _mul_linear(p: list, r) -> list:
    """p(s) * (s - r)."""
    out = [mpc(0)] * (len(p) + 1)
    for i, c in enumerate(p):
        out[i + 1] += c
        out[i] -= r * c
    return out


def _integrate(p: list) -> list:
    return [mpc(0)] + [c / (i + 1) for i, c in enumerate(p)]


def _from_roots(rs) -> list:
    p = [mpc(1)]
    for r in rs:
        p = _mul_linear(p, r)
    return p


# -- triple (cubic) template -------------------------------------------------


def cubic_triple(a, branch_hint=None, precision: int = DEFAULT_PRECISION) -> NumPoly:
    """A (z - t)^3 + a with g(0) = 0, g(1) = 1, closed form.

    ((1 - t)/t)^3 = (1 - a)/a picks three cube-root branches; the one whose t
    is nearest ``branch_hint`` is kept (the real branch when no hint).
    """
    tmpl = PolyTemplate.triple()
    with mpmath.workprec(precision + 32):
        a = to_mpc(a)
        if a == 0 or a == 1:
            raise DegenerateConfigurationError("triple template needs a target away from 0 and 1")
        w = (1 - a) / a
        base = mpmath.cbrt(w) if w.imag == 0 and w.real > 0 else w ** (mpf(1) / 3)
        omegas = [mpmath.expj(2 * mpmath.pi * k / 3) for k in range(3)]
        cands = []
        for om in omegas:
            u = base * om
            if u == -1:
                continue
            cands.append(1 / (1 + u))
        if branch_hint is None:
            t = min(cands, key=lambda c: (abs(c.imag), -c.real))
        else:
            hint = to_mpc(branch_hint)
            t = min(cands, key=lambda c: abs(c - hint))
        A = a / t**3
        coeffs = [-A * t**3 + a, 3 * A * t**2, -3 * A * t, A]
        res = max(abs(poly_eval(coeffs, 0)), abs(poly_eval(coeffs, 1) - 1), abs(poly_eval(coeffs, t) - a))
    with mpmath.workprec(precision):
        return NumPoly([+c for c in coeffs], [+t], [+a], tmpl, +res, precision, [+A, +t], 0)


# -- simple / critical01 templates -----------------------------------------


class _System:
    """Unknowns and residuals for the Newton solve.

    g(z) = K + L Q(z) with Q(z) = int_0^z B, B(s) = prod(s - fixed) prod(s - c_j).
    """

    def __init__(self, tmpl: PolyTemplate):
        self.tmpl = tmpl
        if tmpl.scheme == "simple":
            self.fixed = []
            self.n_free = tmpl.n_targets
        else:
            self.fixed = [mpc(0), mpc(1)]
            self.n_free = tmpl.n_targets - 2

    def unpack(self, u):
        if self.tmpl.scheme == "simple":
            return mpc(0), u[0], list(u[1:])
        return u[0], u[1], list(u[2:])

    def pack(self, K, L, cs):
        if self.tmpl.scheme == "simple":
            return [L] + list(cs)
        return [K, L] + list(cs)

    def crit_points(self, u):
        _, _, cs = self.unpack(u)
        return self.fixed + cs

    def polynomial(self, u) -> list:
        K, L, cs = self.unpack(u)
        Q = _integrate(_from_roots(self.fixed + cs))
        out = [L * c for c in Q]
        out[0] += K
        return out

    def values(self, u):
        """Residual vector before subtracting targets (pins included)."""
        K, L, cs = self.unpack(u)
        crit = self.fixed + cs
        Q = _integrate(_from_roots(crit))
        vals = [K + L * poly_eval(Q, c) for c in crit]
        if self.tmpl.scheme == "simple":
            return [K + L * poly_eval(Q, 1)] + vals
        return vals

    def jacobian(self, u):
        K, L, cs = self.unpack(u)
        crit = self.fixed + cs
        B = _from_roots(crit)
        Q = _integrate(B)
        points = ([mpc(1)] if self.tmpl.scheme == "simple" else []) + crit
        # d/dc_j of Q(w) is -int_0^w B(s)/(s - c_j) ds
        dQ = []
        for j, c in enumerate(cs):
            others = self.fixed + cs[:j] + cs[j + 1 :]
            dQ.append(_integrate(_from_roots(others)))
        rows = []
        for w in points:
            row = []
            if self.tmpl.scheme != "simple":
                row.append(mpc(1))
            row.append(poly_eval(Q, w))
            for j in range(len(cs)):
                row.append(-L * poly_eval(dQ[j], w))
            rows.append(row)
        return mpmath.matrix(rows)

    def targets_vector(self, targets):
        t = [to_mpc(x) for x in targets]
        if self.tmpl.scheme == "simple":
            return [mpc(1)] + t
        return t

    def base(self):
        """A symmetric start: free critical points on a circle around 1/2."""
        m = self.n_free
        cs = [mpf(1) / 2 + mpf("0.35") * mpmath.expj(2 * mpmath.pi * (j + mpf("0.25")) / max(m, 1)) for j in range(m)]
        if self.tmpl.scheme == "simple":
            Q = _integrate(_from_roots(cs))
            L = 1 / poly_eval(Q, 1)
            return self.pack(mpc(0), L, cs)
        return self.pack(mpc(0), mpc(1), cs)


def _residual(sys: _System, u, v) -> tuple[list, mpf]:
    vals = sys.values(u)
    r = [a - b for a, b in zip(vals, v)]
    return r, max(abs(x) for x in r)


def _newton(sys: _System, u, v, tol, maxit: int):
    r, nr = _residual(sys, u, v)
    steps = 0
    for _ in range(maxit):
        if nr <= tol:
            break
        J = sys.jacobian(u)
        try:
            du = mpmath.lu_solve(J, mpmath.matrix(r))
        except ZeroDivisionError as exc:
            raise DegenerateConfigurationError("template Jacobian is singular (critical values collide)") from exc
        lam = mpf(1)
        while True:
            cand = [a - lam * b for a, b in zip(u, du)]
            rc, nrc = _residual(sys, cand, v)
            if nrc < nr or lam < mpf(2) ** -12:
                break
            lam /= 2
        steps += 1
        if nrc >= nr:
            return u, nr, steps, False
        u, r, nr = cand, rc, nrc
    return u, nr, steps, nr <= tol


def _check_separated(sys: _System, u, sep):
    pts = sys.crit_points(u)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) < sep:
                raise DegenerateConfigurationError("critical points of the template collided")


def solve_template(
    template: PolyTemplate,
    targets: Sequence,
    seed: NumPoly | Sequence | None = None,
    precision: int = DEFAULT_PRECISION,
    detour=None,
) -> NumPoly:
    """Place the finite critical values of ``template`` at ``targets``.

    Homotopy from the seed (or a symmetric base polynomial) to the targets,
    with Newton correction and step halving, then Newton polishing until the
    residual is below 2^(-precision/2).  ``detour`` bends the target path
    off the straight segment, which avoids collisions on symmetric paths.
    """
    targets = list(targets)
    if len(targets) != template.n_targets:
        raise ValueError(f"template expects {template.n_targets} targets, got {len(targets)}")
    if template.scheme == "quadratic":
        with mpmath.workprec(precision):
            a = to_mpc(targets[0])
            return NumPoly([a, mpc(0), mpc(1)], [mpc(0)], [a], template, mpf(0), precision, [a], 0)
    if template.scheme == "triple":
        hint = None
        if isinstance(seed, NumPoly):
            hint = seed.crit_points[0]
        return cubic_triple(targets[0], hint, precision)

    work = precision + 32
    tol = mpf(2) ** (-(precision // 2))
    with mpmath.workprec(work):
        sys = _System(template)
        v1 = sys.targets_vector(targets)
        if isinstance(seed, NumPoly):
            u = [to_mpc(x) for x in seed.params]
        elif seed is not None:
            u = [to_mpc(x) for x in seed]
        else:
            u = sys.base()
        v0 = sys.values(u)
        if detour is None:
            detour = [mpc(mpf("0.3"), mpf("0.7")) * (1 + k) / (len(v0)) for k in range(len(v0))]
        detour = [to_mpc(x) for x in detour]
        if template.scheme == "simple":
            detour[0] = mpc(0)  # the pin g(1) = 1 never moves

        def path(s):
            return [(1 - s) * a + s * b + s * (1 - s) * d for a, b, d in zip(v0, v1, detour)]

        s, ds = mpf(0), mpf("0.05")
        track_tol = mpf(2) ** (-40)
        total = 0
        sep = mpf(2) ** (-precision // 4)
        while s < 1:
            s_new = min(mpf(1), s + ds)
            cand, nr, steps, ok = _newton(sys, u, path(s_new), track_tol, 8)
            total += steps
            if ok:
                u, s = cand, s_new
                _check_separated(sys, u, sep)
                ds = min(ds * mpf("1.5"), mpf("0.25"))
            else:
                ds /= 2
                if ds < mpf(2) ** -24:
                    raise TemplateSolveError(f"homotopy stalled at s={mpmath.nstr(s, 6)}", residual=float(nr))
        final_tol = mpf(2) ** (-(work - 24))
        u, nr, steps, _ = _newton(sys, u, v1, final_tol, 60)
        total += steps
        if not nr < tol:
            raise TemplateSolveError(f"Newton residual {mpmath.nstr(nr, 5)} above tolerance", residual=float(nr))
        _check_separated(sys, u, sep)
        coeffs = sys.polynomial(u)
        crit = sys.crit_points(u)
        crit_vals = [poly_eval(coeffs, c) for c in crit]
    with mpmath.workprec(precision):
        return NumPoly(
            [+c for c in coeffs],
            [+c for c in crit],
            [+c for c in crit_vals],
            template,
            +nr,
            precision,
            [+x for x in u],
            total,
        )
