"""Numerical Thurston pullback for marked self-maps of a finite set.

Given points X on the sphere and F: X -> X, the map realized is
f = g o h^n o N^-1, where h(z) = (2/z - 1)^2, g is a polynomial with
g(0) = 0, g(1) = 1 whose finite critical values are the remaining marked
points, and N is a Mobius map.  A configuration P (marked points, three of
them pinned at 0, 1, inf) is pulled back by choosing for each label y a
point w_y with g_P(h^n(w_y)) = P(F(y)) and renormalizing.  The first choice
is the preimage nearest to X; later choices follow the branch continuously.
"""
from __future__ import annotations

import time
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import mpmath
import numpy as np
from mpmath import mpc, mpf
from scipy.optimize import linear_sum_assignment

from ..certificates import Certificate, exact_claim, numeric_claim
from ..critval import NumPoly, PolyTemplate, cubic_triple, solve_template
from ..numeric import (
    DEFAULT_PRECISION,
    INF,
    DegenerateConfigurationError,
    Mobius,
    SpherePoint,
    mobius_through,
    poly_deriv,
    poly_eval,
    roots,
    sph_dist,
    to_mpc,
)
from .hmap import choose_k, h_eval, h_preimages
from .table import TABLE, eval_numeric, match_fixture

__all__ = [
    "MarkedSelfMap",
    "Configuration",
    "ThurstonOptions",
    "ThurstonResult",
    "ThurstonFailure",
    "PullbackState",
    "pullback_step",
    "solve_thurston",
    "parse_point",
]


class ThurstonFailure(RuntimeError):
    """The iteration did not produce an accepted realization."""

    def __init__(self, message: str, trace=()):
        super().__init__(message)
        self.trace = list(trace)


class _SelectionTooFar(ThurstonFailure):
    """The initial preimage selection misses X by more than delta0 (raise n)."""


def _real_part(text: str):
    try:
        return Fraction(text)
    except ValueError:
        return mpmath.mpf(text)


def _mpf(x):
    return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)


def parse_point(text) -> SpherePoint:
    """'inf', rationals like '1/9', decimals, complex literals like '1/3+2j', or [re, im]."""
    if isinstance(text, SpherePoint):
        return text
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ValueError(f"point pair must be [re, im], got {text!r}")
        re_, im_ = (_real_part(str(t).strip()) for t in text)
        return SpherePoint(re_ if im_ == 0 else mpmath.mpc(_mpf(re_), _mpf(im_)))
    s = str(text).strip().replace(" ", "")
    if s.lower() in ("inf", "infinity", "oo", "∞"):
        return INF
    try:
        return SpherePoint(Fraction(s))
    except ZeroDivisionError:
        raise ValueError(f"cannot parse point {text!r}") from None
    except ValueError:
        pass
    if s[-1:] in ("j", "i"):
        body = s[:-1]
        # split at the last sign that is not an exponent sign or the leading one
        cut = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] not in "eE"), default=0)
        re_text, im_text = (body[:cut], body[cut:]) if cut else ("0", body)
        if im_text in ("", "+", "-"):
            im_text += "1"
        try:
            re_, im_ = _real_part(re_text), _real_part(im_text)
        except (ValueError, TypeError, ZeroDivisionError):
            raise ValueError(f"cannot parse point {text!r}") from None
        return SpherePoint(mpmath.mpc(_mpf(re_), _mpf(im_)))
    try:
        return SpherePoint(mpmath.mpf(s))
    except (ValueError, TypeError):
        raise ValueError(f"cannot parse point {text!r}") from None


class MarkedSelfMap:
    """F: labels -> labels, with optional local degrees M(y) of f at each label."""

    def __init__(self, mapping: Mapping[Hashable, Hashable], multiplicity: Mapping | None = None):
        self.F = dict(mapping)
        self.labels = tuple(self.F)
        for y, x in self.F.items():
            if x not in self.F:
                raise ValueError(f"F({y!r}) = {x!r} is not a label")
        self.M = None
        if multiplicity is not None:
            self.M = {y: int(multiplicity.get(y, 1)) for y in self.labels}
            if any(m < 1 for m in self.M.values()):
                raise ValueError("multiplicities must be positive")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def is_bijective(self) -> bool:
        return len(set(self.F.values())) == len(self.labels)

    def fiber(self, x) -> list:
        return [y for y in self.labels if self.F[y] == x]

    def to_json(self) -> dict:
        out = {"F": {str(k): str(v) for k, v in self.F.items()}}
        if self.M is not None:
            out["M"] = {str(k): v for k, v in self.M.items()}
        return out


class Configuration:
    """An injective placement of labels on the sphere."""

    def __init__(self, points: Mapping[Hashable, object], tol: float = 1e-30):
        self.points = {k: parse_point(v) for k, v in points.items()}
        labels = list(self.points)
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if sph_dist(self.points[labels[i]], self.points[labels[j]]) <= tol:
                    raise DegenerateConfigurationError(f"labels {labels[i]!r} and {labels[j]!r} coincide")

    @property
    def labels(self) -> tuple:
        return tuple(self.points)

    def __getitem__(self, k) -> SpherePoint:
        return self.points[k]

    def distinguished(self) -> tuple:
        """Labels sitting at (0, 1, inf) if all three are present, else the first three."""
        at = {}
        for k, p in self.points.items():
            if p.is_inf:
                at["inf"] = k
            elif p.value == 0:
                at["0"] = k
            elif p.value == 1:
                at["1"] = k
        if len(at) == 3:
            return at["0"], at["1"], at["inf"]
        return self.labels[:3]

    def normalized(self) -> tuple[dict, Mobius, tuple]:
        triple = self.distinguished()
        M0 = mobius_through(*(self.points[t] for t in triple))
        P = {k: M0(p) for k, p in self.points.items()}
        P[triple[0]], P[triple[1]], P[triple[2]] = SpherePoint(0), SpherePoint(1), INF
        return P, M0, triple

    def to_json(self, digits: int = 20) -> dict:
        return {str(k): p.to_json(digits) for k, p in self.points.items()}


@dataclass
class ThurstonOptions:
    precision: int = DEFAULT_PRECISION
    tol: float = 1e-10
    cert_tol: float = 1e-9
    delta0: float = 0.25
    max_iters: int = 400
    n_start: int | None = None
    n_cap: int = 40
    # the initial fiber scan enumerates deg(g) 2^n points
    max_scan_n: int = 18
    max_attempts: int = 6
    # extra pullbacks after the tolerance is met, for margin in the residuals
    polish_steps: int = 2
    time_limit: float = 540.0


# ---------------------------------------------------------------------------
# polynomial part


def _g_for(P: dict, free: Sequence, seed: NumPoly | None, precision: int) -> NumPoly:
    targets = [P[x].value for x in free]
    if len(free) == 1:
        hint = seed.crit_points[0] if seed is not None else None
        return cubic_triple(targets[0], hint, precision)
    tmpl = PolyTemplate.simple(len(free))
    if seed is None:
        return solve_template(tmpl, targets, precision=precision)
    detour = [mpc(0)] * (len(free) + 1)
    return solve_template(tmpl, targets, seed=seed, precision=precision, detour=detour)


def _g_eval(g: NumPoly, z: SpherePoint) -> SpherePoint:
    if z.is_inf:
        return INF
    return SpherePoint(poly_eval(g.coeffs, z.value))


def _deflate(coeffs: list, r, m: int) -> list:
    for _ in range(m):
        out = [mpc(0)] * (len(coeffs) - 1)
        acc = mpc(0)
        for k in range(len(coeffs) - 1, 0, -1):
            acc = acc * r + coeffs[k]
            out[k - 1] = acc
        coeffs = out
    return coeffs


def _g_fiber(g: NumPoly, target: str, value: SpherePoint, crit: tuple | None, precision: int):
    """Points u with g(u) = value, with local degree.

    ``target`` is "0", "1", "inf" or "free"; for free targets ``crit`` is the
    placed critical point and its multiplicity.
    """
    if target == "inf":
        return [(INF, g.degree)]
    poly = list(g.coeffs)
    poly[0] = poly[0] - value.value
    if target == "0":
        known = [(mpc(0), 1)]
    elif target == "1":
        known = [(mpc(1), 1)]
    else:
        known = [(crit[0], crit[1] + 1)]
    rest = poly
    for r, m in known:
        rest = _deflate(rest, r, m)
    out = [(SpherePoint(r), m) for r, m in known]
    if len(rest) >= 2:
        out.extend((SpherePoint(b.center), 1) for b in roots(rest, precision))
    return out


# ---------------------------------------------------------------------------
# numpy scan of the full fiber


def _np_sphere(vals: np.ndarray, infs: np.ndarray) -> np.ndarray:
    """Unit vectors of points of the sphere (stereographic, overflow-safe)."""
    out = np.empty((len(vals), 3))
    big = np.abs(vals) > 1
    small = ~big & ~infs
    v = vals[small]
    r2 = np.abs(v) ** 2
    out[small, 0] = 2 * v.real / (1 + r2)
    out[small, 1] = 2 * v.imag / (1 + r2)
    out[small, 2] = (r2 - 1) / (1 + r2)
    bm = big & ~infs
    with np.errstate(over="ignore", invalid="ignore"):
        inv = 1 / vals[bm]
    s2 = np.abs(inv) ** 2
    cinv = np.conj(inv)
    out[bm, 0] = 2 * cinv.real / (1 + s2)
    out[bm, 1] = 2 * cinv.imag / (1 + s2)
    out[bm, 2] = (1 - s2) / (1 + s2)
    out[infs] = (0.0, 0.0, 1.0)
    return out


def _np_point(p: SpherePoint) -> np.ndarray:
    if p.is_inf:
        return _np_sphere(np.array([0j]), np.array([True]))[0]
    return _np_sphere(np.array([complex(p.value)]), np.array([False]))[0]


@dataclass
class _Tree:
    vals: list  # per level: complex128 array
    infs: list
    mults: list
    parents: list


def _preimage_tree(us: list[tuple[SpherePoint, int]], n: int) -> _Tree:
    vals = np.array([0j if u.is_inf else complex(u.value) for u, _ in us])
    infs = np.array([u.is_inf for u, _ in us])
    mults = np.array([m for _, m in us], dtype=np.int64)
    tree = _Tree([vals], [infs], [mults], [np.arange(len(us))])
    for _ in range(n):
        v, inf, mu = tree.vals[-1], tree.infs[-1], tree.mults[-1]
        idx = np.arange(len(v))
        is0 = ~inf & (v == 0)
        is1 = ~inf & (v == 1)
        gen = ~inf & ~is0 & ~is1
        s = np.sqrt(v[gen])
        nv = [2 / (1 + s), 2 / (1 - s), np.zeros(inf.sum(), complex), np.full(is0.sum(), 2 + 0j)]
        ni = [np.zeros(gen.sum(), bool)] * 2 + [np.zeros(inf.sum(), bool), np.zeros(is0.sum(), bool)]
        nm = [mu[gen], mu[gen], 2 * mu[inf], 2 * mu[is0]]
        npar = [idx[gen], idx[gen], idx[inf], idx[is0]]
        # 1 has preimages 1 and inf
        nv += [np.ones(is1.sum(), complex), np.zeros(is1.sum(), complex)]
        ni += [np.zeros(is1.sum(), bool), np.ones(is1.sum(), bool)]
        nm += [mu[is1], mu[is1]]
        npar += [idx[is1], idx[is1]]
        tree.vals.append(np.concatenate(nv))
        tree.infs.append(np.concatenate(ni))
        tree.mults.append(np.concatenate(nm))
        tree.parents.append(np.concatenate(npar))
    return tree


def _chain_indices(tree: _Tree, leaf: int) -> list[int]:
    idx = [leaf]
    for k in range(len(tree.vals) - 1, 0, -1):
        idx.append(int(tree.parents[k][idx[-1]]))
    return idx[::-1]


def _descend(u: SpherePoint, mult: int, guides: Sequence[SpherePoint]) -> tuple[list, int]:
    """Pull u back through h, following the branch nearest each guide."""
    chain = [u]
    for guide in guides:
        pre = h_preimages(chain[-1])
        w, m = min(pre, key=lambda pm: sph_dist(pm[0], guide))
        chain.append(w)
        mult *= m
    return chain, mult


# ---------------------------------------------------------------------------
# pullback


@dataclass
class PullbackState:
    """Normalized configuration with the tracked preimage chains.

    ``chains[y]`` lists u = h^n(w_y), h^(n-1)(w_y), ..., w_y.
    """

    P: dict
    triple: tuple
    n: int
    g: NumPoly | None = None
    chains: dict = field(default_factory=dict)
    mults: dict = field(default_factory=dict)
    normalizer: Mobius | None = None

    @property
    def free(self) -> list:
        return [x for x in self.P if x not in self.triple]

    def role(self, x) -> str:
        if x == self.triple[0]:
            return "0"
        if x == self.triple[1]:
            return "1"
        if x == self.triple[2]:
            return "inf"
        return "free"


def _crit_table(state: PullbackState, g: NumPoly) -> dict:
    return {x: (g.crit_points[i], g.template.multiplicities[i]) for i, x in enumerate(state.free)}


def _fiber_for(state: PullbackState, g: NumPoly, x, crit: dict, precision: int):
    return _g_fiber(g, state.role(x), state.P[x], crit.get(x), precision)


def _normalize(state: PullbackState, ws: dict) -> tuple[dict, Mobius]:
    l0, l1, li = state.triple
    N = mobius_through(ws[l0], ws[l1], ws[li])
    P = {y: N(w) for y, w in ws.items()}
    P[l0], P[l1], P[li] = SpherePoint(0), SpherePoint(1), INF
    return P, N


def _initial_selection(state: PullbackState, F: MarkedSelfMap, X: dict, precision: int) -> tuple[dict, dict, float]:
    """Scan (g o h^n)^-1(X(F(y))) and pick, per F-fiber, the injective
    assignment minimizing total chordal distance to X."""
    g = state.g
    crit = _crit_table(state, g)
    chains, mults, worst = {}, {}, 0.0
    for x in dict.fromkeys(F.F.values()):
        group = F.fiber(x)
        us = _fiber_for(state, g, x, crit, precision)
        tree = _preimage_tree(us, state.n)
        leaves = _np_sphere(tree.vals[-1], tree.infs[-1])
        cost = np.stack([np.linalg.norm(leaves - _np_point(X[y]), axis=1) for y in group])
        if F.M is not None:
            for i, y in enumerate(group):
                cost[i, tree.mults[-1] != F.M[y]] = np.inf
        if not np.isfinite(cost).any(axis=1).all():
            raise ThurstonFailure(f"no preimage of the required local degree over label {x!r}")
        finite = np.where(np.isfinite(cost), cost, 1e6)
        rows, cols = linear_sum_assignment(finite)
        for i, leaf in zip(rows, cols):
            y = group[i]
            worst = max(worst, float(finite[i, leaf]))
            idx = _chain_indices(tree, int(leaf))
            u, m = us[idx[0]]
            guides = [
                INF if tree.infs[k][idx[k]] else SpherePoint(complex(tree.vals[k][idx[k]]))
                for k in range(1, len(idx))
            ]
            chains[y], mults[y] = _descend(u, m, guides)
    return chains, mults, worst


def _branch_candidates(chain: list, u_new: SpherePoint, m_u: int) -> list[tuple[list, int]]:
    """The nearest-branch chain plus every chain that flips one branch choice."""
    out = [_descend(u_new, m_u, chain[1:])]
    n = len(chain) - 1
    for k in range(1, n + 1):
        base, m = _descend(u_new, m_u, chain[1:k])
        pre = h_preimages(base[-1])
        if len(pre) < 2:
            continue
        pre.sort(key=lambda pm: sph_dist(pm[0], chain[k]))
        alt, am = pre[1]
        rest, m2 = _descend(alt, m * am, chain[k + 1 :])
        out.append((base + rest, m2))
    return out


def pullback_step(state: PullbackState, F: MarkedSelfMap, precision: int) -> tuple[PullbackState, float]:
    """One pullback of ``state.P``; returns the new state and the max displacement."""
    g = _g_for(state.P, state.free, state.g, precision)
    crit = _crit_table(state, g)
    chains, mults = {}, {}
    sep = mpf(2) ** (-(precision // 3))
    for x in dict.fromkeys(F.F.values()):
        group = F.fiber(x)
        us = _fiber_for(state, g, x, crit, precision)
        picks = {}
        for y in group:
            old = state.chains[y]
            u, m = min(us, key=lambda um: sph_dist(um[0], old[0]))
            picks[y] = _descend(u, m, old[1:])
        ends = [picks[y][0][-1] for y in group]
        collide = any(
            sph_dist(ends[i], ends[j]) < sep for i in range(len(group)) for j in range(i + 1, len(group))
        )
        if collide:
            picks = _resolve_collision(state, group, us, sep)
        for y in group:
            chains[y], mults[y] = picks[y]
    ws = {y: chains[y][-1] for y in state.P}
    P, N = _normalize(state, ws)
    disp = max(float(sph_dist(P[y], state.P[y])) for y in state.P)
    new = PullbackState(P, state.triple, state.n, g, chains, mults, N)
    return new, disp


def _resolve_collision(state: PullbackState, group: list, us: list, sep) -> dict:
    cands = []
    for u, m in us:
        for y in group:
            cands.extend(_branch_candidates(state.chains[y], u, m))
    # drop duplicate endpoints
    uniq = []
    for ch, m in cands:
        if all(sph_dist(ch[-1], c2[-1]) >= sep for c2, _ in uniq):
            uniq.append((ch, m))
    if len(uniq) < len(group):
        raise ThurstonFailure("pullback selections collide and no injective assignment exists")
    cost = np.array([[float(sph_dist(ch[-1], state.chains[y][-1])) for ch, _ in uniq] for y in group])
    rows, cols = linear_sum_assignment(cost)
    return {group[i]: uniq[j] for i, j in zip(rows, cols)}


# ---------------------------------------------------------------------------
# result


@dataclass
class ThurstonResult:
    marked: MarkedSelfMap
    status: str
    configuration: dict
    triple: tuple
    initial_mobius: Mobius
    precision: int
    n: int | None = None
    g: NumPoly | None = None
    normalizer: Mobius | None = None
    fixture: str | None = None
    conjugacy: Mobius | None = None
    trace: list = field(default_factory=list)
    lambda_hat: float | None = None
    epsilon: float | None = None
    envelope_constant: float | None = None
    distance_to_X: float | None = None
    r_dyn: float | None = None
    r_crit: float | None = None
    min_separation: float | None = None
    multiplicities: dict = field(default_factory=dict)
    certificate: Certificate = field(default_factory=Certificate)
    elapsed: float = 0.0

    @property
    def degree(self) -> int:
        if self.fixture is not None:
            return TABLE[self.fixture].map.degree
        return self.g.degree * 2**self.n

    @property
    def accepted(self) -> bool:
        return self.certificate.verdict

    def evaluate_normalized(self, z) -> SpherePoint:
        """f in the normalized chart (distinguished labels at 0, 1, inf)."""
        z = SpherePoint.of(z)
        with mpmath.workprec(self.precision + 32):
            if self.fixture is not None:
                mu = self.conjugacy
                return mu(eval_numeric(TABLE[self.fixture].map, mu.inverse()(z)))
            w = self.normalizer.inverse()(z)
            for _ in range(self.n):
                w = h_eval(w)
            return _g_eval(self.g, w)

    def evaluate(self, z) -> SpherePoint:
        """f in the coordinates of the input configuration."""
        M0 = self.initial_mobius
        return M0.inverse()(self.evaluate_normalized(M0(SpherePoint.of(z))))

    def postcritical_points(self) -> dict:
        M0inv = self.initial_mobius.inverse()
        return {y: M0inv(p) for y, p in self.configuration.items()}

    def to_json(self, digits: int = 20) -> dict:
        out = {
            "status": self.status,
            "accepted": self.accepted,
            "marked_map": self.marked.to_json(),
            "distinguished": [str(t) for t in self.triple],
            "precision_bits": self.precision,
            "degree": self.degree,
            "configuration_normalized": {str(k): p.to_json(digits) for k, p in self.configuration.items()},
            "postcritical_points": {str(k): p.to_json(digits) for k, p in self.postcritical_points().items()},
            "initial_mobius": self.initial_mobius.to_json(digits),
            "r_dyn": self.r_dyn,
            "r_crit": self.r_crit,
            "min_separation": self.min_separation,
            "local_degrees": {str(k): v for k, v in self.multiplicities.items()},
            "certificate": self.certificate.to_json(),
        }
        if self.fixture is not None:
            out["fixture"] = self.fixture
            out["conjugacy"] = self.conjugacy.to_json(digits)
        else:
            out.update(
                {
                    "n": self.n,
                    "map": "g o h^n o N^-1 with h(z) = (2/z - 1)^2",
                    "g": self.g.to_json(digits),
                    "N": self.normalizer.to_json(digits),
                    "iterations": len(self.trace),
                    "displacements": [float(d) for d in self.trace],
                    "lambda_hat": self.lambda_hat,
                    "epsilon": self.epsilon,
                    "envelope_constant": self.envelope_constant,
                    "distance_to_X": self.distance_to_X,
                }
            )
        return out


def _critical_values(result: ThurstonResult) -> list[SpherePoint]:
    """Critical values of g o h^n: g(crit g), g(0), g(1) and infinity."""
    g = result.g
    pts = [SpherePoint(b.center) for b in roots(poly_deriv(g.coeffs), result.precision)]
    pts += [SpherePoint(0), SpherePoint(1)]
    out = [INF]
    for c in pts:
        out.append(_g_eval(g, c))
    return out


def _finish(result: ThurstonResult, opts: ThurstonOptions) -> ThurstonResult:
    F, P = result.marked, result.configuration
    cert = result.certificate
    with mpmath.workprec(result.precision + 32):
        r_dyn = max(float(sph_dist(result.evaluate_normalized(P[y]), P[F.F[y]])) for y in F.labels)
        if result.fixture is not None:
            vals = [result.conjugacy(SpherePoint.of(p)) for p in _fixture_points(result.fixture)]
        else:
            vals = _critical_values(result)
        near = max(float(min(sph_dist(v, p) for p in P.values())) for v in vals)
        cover = max(float(min(sph_dist(v, p) for v in vals)) for p in P.values())
        labels = list(P)
        sepmin = min(
            float(sph_dist(P[labels[i]], P[labels[j]])) for i in range(len(labels)) for j in range(i + 1, len(labels))
        )
    result.r_dyn, result.r_crit, result.min_separation = r_dyn, max(near, cover), sepmin
    tol = opts.cert_tol
    cert.add(numeric_claim("f(P*(y)) = P*(F(y)) for every label (chordal)", r_dyn, tol))
    cert.add(numeric_claim("critical values of f coincide with P* (chordal, both directions)", result.r_crit, tol))
    cert.add(
        exact_claim(
            "|P*| = |X| with pairwise separation above 10 tol",
            sepmin > 10 * tol,
            f"min separation {sepmin:.3e}",
        )
    )
    return result


def _fixture_points(cid: str) -> list:
    return [INF if p is None else SpherePoint(to_mpc(p)) for p in TABLE[cid].expected_graph]


def _three_point(F: MarkedSelfMap, P: dict, M0: Mobius, triple: tuple, opts: ThurstonOptions, t0: float):
    """|X| = 3: moduli space is a point, realize by the matching fixture."""
    cid, pi = match_fixture(F.F)
    # pi: fixture point -> label; send each fixture point to its label's position
    inv = {lab: q for q, lab in pi.items()}
    qs = [INF if inv[t] is None else SpherePoint(to_mpc(inv[t])) for t in triple]
    with mpmath.workprec(opts.precision + 32):
        mu = mobius_through(*qs)
    res = ThurstonResult(F, "three-point", P, triple, M0, opts.precision, fixture=cid, conjugacy=mu)
    res.certificate.notes.append(f"three marked points: conjugate of table map {cid}(z) = {TABLE[cid].formula}")
    res.certificate.add(exact_claim(f"F is conjugate to the dynamics of fixture {cid} on P({cid})", True))
    _finish(res, opts)
    res.elapsed = time.time() - t0
    return res


def _schedule(opts: ThurstonOptions, size: int):
    """Yield (n, precision); send True after a selection miss to raise n only.

    A selection miss shrinks with n since backward orbits of h are dense, so
    it escalates n alone; other failures alternate n + 1 and doubled
    precision.  Non-selection attempts are limited by ``max_attempts``.
    """
    n = opts.n_start if opts.n_start is not None else max(choose_k(size), 6)
    prec = opts.precision
    cap = min(opts.n_cap, opts.max_scan_n)
    other = 0
    flip = False
    while n <= cap and other < opts.max_attempts:
        missed = yield n, prec
        if missed:
            n += 1
            continue
        other += 1
        if not flip:
            n += 1
        else:
            prec *= 2
        flip = not flip


def solve_thurston(
    X: Configuration | Mapping,
    F: MarkedSelfMap | Mapping,
    opts: ThurstonOptions | None = None,
) -> ThurstonResult:
    """Realize F on the marked points X by a postcritically finite rational map.

    Returns an accepted ``ThurstonResult`` or raises ``ThurstonFailure``
    carrying the displacement trace of the last attempt.
    """
    t0 = time.time()
    opts = opts or ThurstonOptions()
    if not isinstance(X, Configuration):
        X = Configuration(X)
    if not isinstance(F, MarkedSelfMap):
        F = MarkedSelfMap(F)
    if set(X.labels) != set(F.labels):
        raise ValueError("configuration and self-map use different labels")
    if len(F) < 3:
        raise ValueError("at least three marked points are needed; with two, F is realizable iff bijective")
    with mpmath.workprec(opts.precision + 32):
        P0, M0, triple = X.normalized()
    if len(F) == 3:
        return _three_point(F, P0, M0, triple, opts, t0)

    last_trace: list = []
    reasons = []
    schedule = _schedule(opts, len(F))
    missed = None
    while True:
        try:
            n, prec = schedule.send(missed)
        except StopIteration:
            break
        try:
            with mpmath.workprec(prec + 32):
                result = _attempt(F, P0, M0, triple, n, prec, opts, t0)
        except (ThurstonFailure, DegenerateConfigurationError, ArithmeticError) as exc:
            reasons.append(f"n={n}, {prec} bits: {exc}")
            last_trace = getattr(exc, "trace", last_trace)
            missed = isinstance(exc, _SelectionTooFar)
            if time.time() - t0 > opts.time_limit:
                break
            continue
        result.elapsed = time.time() - t0
        return result
    raise ThurstonFailure(
        "no accepted realization; attempts: " + " | ".join(reasons) + "; consider a larger delta0",
        last_trace,
    )


def _attempt(F, P0, M0, triple, n, prec, opts, t0) -> ThurstonResult:
    state = PullbackState(dict(P0), triple, n)
    state.g = _g_for(state.P, state.free, None, prec)
    chains, mults, worst = _initial_selection(state, F, P0, prec)
    if worst > opts.delta0:
        raise _SelectionTooFar(f"initial selection only reaches {worst:.3g} > delta0 = {opts.delta0}")
    state.chains, state.mults = chains, mults
    ws = {y: chains[y][-1] for y in state.P}
    P1, N = _normalize(state, ws)
    eps = max(float(sph_dist(P1[y], P0[y])) for y in P0)
    state = PullbackState(P1, triple, n, state.g, chains, mults, N)
    trace = [eps]
    converged = False
    for _ in range(opts.max_iters):
        state, disp = pullback_step(state, F, prec)
        trace.append(disp)
        if disp < opts.tol:
            converged = True
            break
        if time.time() - t0 > opts.time_limit:
            break
    if not converged:
        raise ThurstonFailure(f"no convergence after {len(trace)} pullbacks (last step {trace[-1]:.3g})", trace)
    for _ in range(opts.polish_steps):
        state, disp = pullback_step(state, F, prec)
        trace.append(disp)
    # realized map: one more pullback of the limit gives g*, the chains and N
    P_star = state.P
    final, _ = pullback_step(state, F, prec)
    res = ThurstonResult(
        F,
        "converged",
        P_star,
        triple,
        M0,
        prec,
        n=n,
        g=final.g,
        normalizer=final.normalizer,
        trace=trace,
        multiplicities=dict(final.mults),
    )
    ratios = [trace[i] / trace[i - 1] for i in range(1, len(trace)) if trace[i - 1] > 0]
    lam = max(ratios[-5:]) if ratios else 0.0
    res.lambda_hat, res.epsilon = lam, eps
    # envelope d_i <= K eps lam^i; K near 1 means the decay has the geometric shape
    if 0 < lam < 1:
        res.envelope_constant = max(d / (eps * lam**i) for i, d in enumerate(trace))
    with mpmath.workprec(prec):
        res.distance_to_X = max(float(sph_dist(P_star[y], P0[y])) for y in P0)
    cert = res.certificate
    cert.add(numeric_claim("max displacement of the last pullback", trace[-1], opts.tol))
    cert.add(numeric_claim("empirical contraction lambda_hat (max of the last five ratios)", lam, 1.0))
    if res.envelope_constant is not None:
        bound = eps / (1 - lam) * res.envelope_constant
        cert.add(
            numeric_claim(
                "d(X, P*) within the geometric envelope K eps / (1 - lambda_hat)",
                res.distance_to_X,
                bound * (1 + 1e-9) + 1e-300,
                f"eps={eps:.3e}, lambda_hat={lam:.3f}, K={res.envelope_constant:.3f}",
            )
        )
    if len(F) == 4:
        d = res.degree
        root = int(d**0.5)
        square = any((root + k) ** 2 == d for k in (-1, 0, 1))
        cert.add(exact_claim(f"deg f = 3*2^{n} = {d} is not a perfect square (no flexible Lattes example)", not square))
    if F.M is not None:
        cert.add(exact_claim("local degrees match the requested multiplicities", res.multiplicities == F.M))
    _finish(res, opts)
    if not res.accepted:
        failed = [c.statement for c in cert.claims if not c.verdict]
        raise ThurstonFailure("realization rejected: " + "; ".join(failed), trace)
    return res
