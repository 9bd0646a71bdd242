"""Branching data needed to prescribe local degrees M on the marked points.

For x in X the partition P_x lists M(y) over y in F^-1(x); padding with a 1
gives P'_x.  A map g with critical values X whose branching over x extends
P'_x has at least 2|X| points over X, enough room to place an injective
iota: X -> g^-1(X) with g(iota(y)) = F(y) and mult(g, iota(y)) = M(y).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from ..passports import Partition, extend_to_rational_passport
from .solver import MarkedSelfMap

__all__ = ["MultiplicityPlan", "multiplicity_plan", "achievable_local_degrees"]

REALIZABLE = "realizable by implemented templates"
UNSUPPORTED = "passport produced, numerical realization unsupported"


def achievable_local_degrees(role: str, size: int, n: int = 6) -> set[int]:
    """Local degrees of g o h^n at a point over a label of the given role.

    ``role`` is "0", "1", "inf" or "free" for the image label.  g is the cubic
    A(z - t)^3 + a when size = 4 and a simple-template polynomial of degree
    size - 2 otherwise; h^n is ramified only along 2 -> 0 -> inf -> 1.
    """
    if role not in ("0", "1", "inf", "free"):
        raise ValueError(f"unknown role {role!r}; expected '0', '1', 'inf' or 'free'")
    deg_g = 3 if size == 4 else size - 2
    if role == "inf":
        # u = inf is the only point over inf, and w passes through 0 and 2
        return {deg_g * (4 if n >= 2 else 2)}
    if role == "0":
        # u = 0 forces h^(n-1)(w) = 2; other zeros of g are simple
        return {1, 2}
    if role == "1":
        # u = 1: w = 0 gives 2 (pole of h), a chain through 2 then 0 gives 4
        return {1, 2, 4} if n >= 3 else {1, 2}
    return {3} if size == 4 else {1, 2}


@dataclass
class MultiplicityPlan:
    F: MarkedSelfMap
    M: dict
    partitions: dict
    padded: dict
    requirements: list
    triple: tuple
    achievable: dict
    verdict: str
    passport: object | None = None
    checks: dict = field(default_factory=dict)

    @property
    def realizable(self) -> bool:
        return self.verdict == REALIZABLE

    def to_json(self) -> dict:
        out = {
            "partitions": {str(x): list(p) for x, p in self.partitions.items()},
            "padded": {str(x): list(p) for x, p in self.padded.items()},
            "checks": self.checks,
            "requirements": self.requirements,
            "distinguished": [str(t) for t in self.triple],
            "achievable": {str(y): sorted(v) for y, v in self.achievable.items()},
            "verdict": self.verdict,
        }
        if self.passport is not None:
            out["passport"] = self.passport.to_json()
        return out


def multiplicity_plan(
    F: MarkedSelfMap | Mapping,
    M: Mapping[Hashable, int] | None = None,
    triple: Sequence | None = None,
    n: int = 6,
    build_passport: bool = True,
) -> MultiplicityPlan:
    """Partitions P_x, P'_x, the counting checks and a feasibility verdict.

    ``triple`` names the labels placed at (0, 1, inf); by default the first
    three labels.  The verdict compares M(y) with the local degrees the
    implemented templates can produce over F(y).
    """
    if not isinstance(F, MarkedSelfMap):
        F = MarkedSelfMap(F, M)
    if len(F) < 3:
        raise ValueError("multiplicity plans need at least three labels")
    if M is None:
        M = F.M if F.M is not None else {y: 1 for y in F.labels}
    M = {y: int(M.get(y, 1)) for y in F.labels}
    triple = tuple(triple) if triple is not None else F.labels[:3]
    parts, padded = {}, {}
    for x in F.labels:
        p = Partition(tuple(M[y] for y in F.fiber(x)))
        parts[x] = p
        padded[x] = Partition(p + (1,))
    size = len(F)
    s1 = sum(len(p) for p in parts.values())
    s2 = sum(len(p) for p in padded.values())
    checks = {
        "sum |P_x|": s1,
        "sum |P'_x|": s2,
        "sum |P_x| = |X|": s1 == size,
        "sum |P'_x| = 2|X|": s2 == 2 * size,
        "2|X| >= |X| + 3": 2 * size >= size + 3,
    }
    requirements = [f"M({y}) = {M[y]} = mult(g, iota({y})) with g(iota({y})) = {F.F[y]}" for y in F.labels]

    def role(x):
        if x == triple[0]:
            return "0"
        if x == triple[1]:
            return "1"
        if x == triple[2]:
            return "inf"
        return "free"

    achievable = {y: achievable_local_degrees(role(F.F[y]), size, n) for y in F.labels}
    ok = all(M[y] in achievable[y] for y in F.labels)
    verdict = REALIZABLE if ok else UNSUPPORTED
    passport = None
    if not ok and build_passport:
        passport = extend_to_rational_passport([padded[x] for x in F.labels])
    return MultiplicityPlan(F, M, parts, padded, requirements, triple, achievable, verdict, passport, checks)
