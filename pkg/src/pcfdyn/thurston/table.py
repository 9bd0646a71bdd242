"""Seven maps with three postcritical points, one per dynamics pattern.

A map with |P(f)| = 3 induces a self-map of a three-point set, and there
are exactly seven such self-maps up to relabelling.  Each fixture below
realizes one of them; B lives over Q(alpha) with alpha^2 - alpha + 1 = 0,
the other six over Q.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Hashable, Mapping

import mpmath

from ..certificates import Certificate, exact_claim
from ..exact.quadfield import ALPHA, QAlpha
from ..exact.ratmap import RatMap
from ..numeric import INF, SpherePoint, to_mpc

__all__ = [
    "TableCase",
    "TABLE",
    "canonical_pattern",
    "pattern_isomorphism",
    "functional_graph",
    "verify_table_case",
    "match_fixture",
    "eval_numeric",
]


def _b_map() -> RatMap:
    a = ALPHA
    one = QAlpha(1)
    # (z - a)^3 and (z - 1 + a)^3, expanded
    num = [-(a**3), 3 * a * a, -3 * a, one]
    c = a - 1
    den = [c**3, 3 * c * c, 3 * c, one]
    return RatMap(num, den)


@dataclass(frozen=True)
class TableCase:
    id: str
    formula: str
    field: str
    # expected dynamics on P(f); None is infinity
    expected: tuple[tuple[object, object], ...]

    @property
    def map(self) -> RatMap:
        return _MAPS[self.id]()

    @property
    def expected_graph(self) -> dict:
        return dict(self.expected)


_MAPS = {
    "A": lambda: RatMap([-1, 0, 1], [0, 0, 1]),
    "B": _b_map,
    "C": lambda: RatMap([0, 0, 3, -2]),
    "D": lambda: RatMap([4, -4, 1], [0, 0, 1]),
    "E": lambda: RatMap([-1, 0, 1]),
    "F": lambda: RatMap([1, -4, 4], [0, -4, 4]),
    "G": lambda: RatMap([-2, 0, 1]),
}

TABLE: dict[str, TableCase] = {
    "A": TableCase("A", "1 - 1/z^2", "Q", ((0, None), (None, 1), (1, 0))),
    "B": TableCase("B", "(z - alpha)^3 / (z - 1 + alpha)^3", "Q(alpha)", ((0, 1), (None, 1), (1, 1))),
    "C": TableCase("C", "z^2 (3 - 2z)", "Q", ((0, 0), (1, 1), (None, None))),
    "D": TableCase("D", "(1 - 2/z)^2", "Q", ((0, None), (None, 1), (1, 1))),
    "E": TableCase("E", "z^2 - 1", "Q", ((-1, 0), (0, -1), (None, None))),
    "F": TableCase("F", "(2z - 1)^2 / (4z(z - 1))", "Q", ((0, None), (None, 1), (1, None))),
    "G": TableCase("G", "z^2 - 2", "Q", ((-2, 2), (2, 2), (None, None))),
}


def canonical_pattern(mapping: Mapping[Hashable, Hashable]) -> tuple[int, ...]:
    """Lexicographically least relabelling of a self-map of a finite set."""
    pts = list(mapping)
    if any(v not in mapping for v in mapping.values()):
        raise ValueError("mapping is not a self-map")
    best = None
    for perm in permutations(range(len(pts))):
        idx = dict(zip(pts, perm))
        word = [0] * len(pts)
        for p in pts:
            word[idx[p]] = idx[mapping[p]]
        word = tuple(word)
        if best is None or word < best:
            best = word
    return best


def pattern_isomorphism(src: Mapping, dst: Mapping) -> dict | None:
    """A bijection pi with pi(src(x)) = dst(pi(x)), or None."""
    a, b = list(src), list(dst)
    if len(a) != len(b):
        return None
    for image in permutations(b):
        pi = dict(zip(a, image))
        if all(pi[src[x]] == dst[pi[x]] for x in a):
            return pi
    return None


def functional_graph(R: RatMap) -> dict:
    """R restricted to its postcritical set, computed exactly."""
    P = R.postcritical_set()
    return {p: R(p) for p in P}


def _fmt(p) -> str:
    return "inf" if p is None else str(p)


def verify_table_case(case_id: str) -> Certificate:
    """Exact check that a fixture has three postcritical points and the tabulated dynamics."""
    case = TABLE[case_id.upper()]
    R = case.map
    cert = Certificate()
    crit = R.critical_points()
    # Riemann-Hurwitz: total ramification 2d - 2, certified by exact deflation
    cert.add(
        exact_claim(
            "critical points split over the field with total multiplicity 2d-2",
            sum(m for _, m in crit) == 2 * R.degree - 2,
            ", ".join(f"{_fmt(c)} (x{m})" for c, m in crit),
        )
    )
    graph = functional_graph(R)
    cert.add(exact_claim("|P(f)| = 3", len(graph) == 3, "P(f) = {" + ", ".join(_fmt(p) for p in graph) + "}"))
    expected = case.expected_graph
    same_set = set(graph) == set(expected)
    cert.add(exact_claim("P(f) equals the tabulated point set", same_set))
    cert.add(
        exact_claim(
            "f on P(f) matches the tabulated pattern",
            same_set and all(graph[p] == expected[p] for p in expected),
            "; ".join(f"{_fmt(p)} -> {_fmt(q)}" for p, q in graph.items()),
        )
    )
    cert.notes.append(f"{case.id}(z) = {case.formula} over {case.field}")
    cert.notes.append("degree minimality of the table entries is not checked")
    return cert


def match_fixture(F: Mapping) -> tuple[str, dict]:
    """The fixture whose dynamics on P(f) is conjugate to F, with the conjugacy."""
    for cid, case in TABLE.items():
        pi = pattern_isomorphism(case.expected_graph, F)
        if pi is not None:
            return cid, pi
    raise ValueError("no fixture matches the given three-point map")


def _cnum(x):
    return x.to_mpc() if isinstance(x, QAlpha) else to_mpc(x)


def eval_numeric(R: RatMap, z) -> SpherePoint:
    """Evaluate an exact map at a numeric point of the sphere."""
    z = SpherePoint.of(z)
    num = [_cnum(c) for c in R.num]
    den = [_cnum(c) for c in R.den]
    if z.is_inf:
        if len(num) > len(den):
            return INF
        if len(num) < len(den):
            return SpherePoint(0)
        return SpherePoint(num[-1] / den[-1])
    d = mpmath.polyval(den[::-1], z.value)
    n = mpmath.polyval(num[::-1], z.value)
    if d == 0:
        return INF
    return SpherePoint(n / d)
