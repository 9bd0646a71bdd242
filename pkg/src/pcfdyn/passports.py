"""Partitions, passports and their realisation by permutations.

A partition is stored as a tuple of parts in descending order.  A passport
is a list of partitions of a common degree d, and c(P) = sum (d - |P_i|)
counts critical points; polynomial passports have c = d - 1.

Permutations act on {0, ..., d-1} and are stored as image tuples.  Products
are compositions: ``product([a, b])`` applies b first, then a.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Partition",
    "Passport",
    "extends",
    "passport_extends",
    "c_value",
    "is_polynomial_passport",
    "extend_to_polynomial_passport",
    "bump_polynomial_passport",
    "match_degrees",
    "Constellation",
    "realize_polynomial_constellation",
    "mate",
    "extend_to_rational_passport",
    "cycles",
    "cycle_type",
    "compose",
    "invert",
    "from_cycles",
    "RealizationError",
]


class RealizationError(RuntimeError):
    """The backtracking search found no realisation (a bug for valid input)."""


# ---------------------------------------------------------------------------
# partitions and passports


def Partition(parts: Iterable[int]) -> tuple[int, ...]:
    """Normalize to a descending tuple of positive integers."""
    parts = tuple(sorted((int(p) for p in parts), reverse=True))
    if any(p < 1 for p in parts):
        raise ValueError("partition parts must be positive integers")
    return parts


def is_trivial(p: Sequence[int]) -> bool:
    return all(x == 1 for x in p)


def extends(q: Sequence[int], p: Sequence[int]) -> bool:
    """Q = P + P' for some partition P', i.e. P is a sub-multiset of Q."""
    cq, cp = Counter(q), Counter(p)
    return all(cq[k] >= v for k, v in cp.items())


def passport_extends(Q: Sequence[Sequence[int]], P: Sequence[Sequence[int]]) -> bool:
    """Some ordering of Q extends P entrywise (equal lengths required)."""
    if len(Q) != len(P):
        return False
    used = [False] * len(Q)

    def go(i: int) -> bool:
        if i == len(P):
            return True
        for j, q in enumerate(Q):
            if not used[j] and extends(q, P[i]):
                used[j] = True
                if go(i + 1):
                    return True
                used[j] = False
        return False

    return go(0)


@dataclass(frozen=True)
class Passport:
    partitions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "partitions", tuple(Partition(p) for p in self.partitions))
        degs = {sum(p) for p in self.partitions}
        if len(degs) > 1:
            raise ValueError(f"partitions have different degrees {sorted(degs)}")

    @property
    def degree(self) -> int:
        return sum(self.partitions[0]) if self.partitions else 0

    @property
    def is_strict(self) -> bool:
        return all(not is_trivial(p) for p in self.partitions)

    def __len__(self) -> int:
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def to_json(self) -> list:
        return [list(p) for p in self.partitions]


def c_value(P: Passport | Sequence[Sequence[int]]) -> int:
    """sum_i (d - |P_i|)."""
    P = P if isinstance(P, Passport) else Passport(tuple(P))
    d = P.degree
    return sum(d - len(p) for p in P.partitions)


def is_polynomial_passport(P: Passport | Sequence[Sequence[int]]) -> bool:
    P = P if isinstance(P, Passport) else Passport(tuple(P))
    return P.is_strict and c_value(P) == P.degree - 1


def _equalize(parts: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Pad every partition to one degree d, keeping all of them nontrivial."""
    need = [sum(p) if not is_trivial(p) else sum(p) + 2 for p in parts]
    d = max(need)
    out = []
    for p in parts:
        if is_trivial(p):
            out.append(Partition(p + (2,) + (1,) * (d - sum(p) - 2)))
        else:
            out.append(Partition(p + (1,) * (d - sum(p))))
    return out


def extend_to_polynomial_passport(parts: Sequence[Sequence[int]]) -> Passport:
    """Extend a list of n >= 2 partitions to a polynomial passport.

    Phases: equalize degrees with nontrivial partitions; add (1) to every
    partition until d - 1 >= c; then add (3) to the first two partitions and
    (1,1,1) to the rest (d grows by 3, c by 4) until c = d - 1.
    """
    if len(parts) < 2:
        raise ValueError("extension to a polynomial passport needs n >= 2 partitions")
    cur = _equalize([Partition(p) for p in parts])
    d = sum(cur[0])
    c = sum(d - len(p) for p in cur)
    if d - 1 < c:
        pad = c - (d - 1)
        cur = [Partition(p + (1,) * pad) for p in cur]
        d += pad
    while c < d - 1:
        cur = [Partition(p + ((3,) if i < 2 else (1, 1, 1))) for i, p in enumerate(cur)]
        d += 3
        c += 4
    return Passport(tuple(cur))


def bump_polynomial_passport(P: Passport, k: int) -> Passport:
    """Raise the degree of a polynomial passport by k >= 2, keeping c = d - 1."""
    if k < 2:
        raise ValueError("degree bumps need k >= 2")
    if len(P) < 2:
        raise ValueError("degree bumps need at least two partitions")
    out = []
    for i, p in enumerate(P.partitions):
        if i == 0:
            out.append(p + (k,))
        elif i == 1:
            out.append(p + (2,) + (1,) * (k - 2))
        else:
            out.append(p + (1,) * k)
    return Passport(tuple(out))


def match_degrees(A: Passport, B: Passport) -> tuple[Passport, Passport]:
    """Bring two polynomial passports to a common degree by bumps of size >= 2.

    A gap of exactly 1 is closed by bumping the larger side by 2 and the
    smaller by 3.
    """
    da, db = A.degree, B.degree
    swap = da > db
    if swap:
        A, B, da, db = B, A, db, da
    gap = db - da
    if gap == 1:
        A, B = bump_polynomial_passport(A, 3), bump_polynomial_passport(B, 2)
    elif gap >= 2:
        A = bump_polynomial_passport(A, gap)
    return (B, A) if swap else (A, B)


# ---------------------------------------------------------------------------
# permutations


def compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """a o b (b first)."""
    return tuple(a[b[i]] for i in range(len(b)))


def invert(a: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def product(perms: Sequence[Sequence[int]], d: int) -> tuple[int, ...]:
    """sigma_1 o sigma_2 o ... o sigma_n (sigma_n applied first)."""
    acc = tuple(range(d))
    for p in perms:
        acc = compose(acc, p)
    return acc


def cycles(a: Sequence[int]) -> list[tuple[int, ...]]:
    seen = [False] * len(a)
    out = []
    for i in range(len(a)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = a[j]
        out.append(tuple(cyc))
    return out


def cycle_type(a: Sequence[int]) -> tuple[int, ...]:
    return Partition(len(c) for c in cycles(a))


def from_cycles(cyc: Iterable[Sequence[int]], d: int, one_based: bool = False) -> tuple[int, ...]:
    perm = list(range(d))
    off = 1 if one_based else 0
    seen = set()
    for c in cyc:
        c = [x - off for x in c]
        for x in c:
            if not 0 <= x < d or x in seen:
                raise ValueError(f"bad cycle {c} for degree {d}")
            seen.add(x)
        for i, x in enumerate(c):
            perm[x] = c[(i + 1) % len(c)]
    return tuple(perm)


def _orbits(perms: Sequence[Sequence[int]], d: int) -> int:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for i in range(d):
            a, b = find(i), find(p[i])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(d)})


@dataclass(frozen=True)
class Constellation:
    """Permutations sigma_1..sigma_n of {0..d-1}.

    Polynomial constellations have product equal to the standard d-cycle
    i -> i+1; full (rational) constellations have identity product.
    """

    degree: int
    perms: tuple[tuple[int, ...], ...]

    def product(self) -> tuple[int, ...]:
        return product(self.perms, self.degree)

    def is_transitive(self) -> bool:
        return _orbits(self.perms, self.degree) == 1

    def passport(self) -> Passport:
        return Passport(tuple(cycle_type(p) for p in self.perms))

    def product_is_identity(self) -> bool:
        return self.product() == tuple(range(self.degree))

    def product_is_standard_cycle(self) -> bool:
        d = self.degree
        return self.product() == tuple((i + 1) % d for i in range(d))

    def genus_from_c(self) -> int:
        """2g - 2 = c - 2d for an identity-product constellation."""
        c = sum(self.degree - len(cycles(p)) for p in self.perms)
        twice = c - 2 * self.degree + 2
        return twice // 2 if twice % 2 == 0 else twice / 2

    def genus_from_cycles(self) -> int:
        """2 - 2g = sum of cycle counts - (n - 2) d."""
        chi = sum(len(cycles(p)) for p in self.perms) - (len(self.perms) - 2) * self.degree
        twice = 2 - chi
        return twice // 2 if twice % 2 == 0 else twice / 2

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "permutations": [[[x + 1 for x in c] for c in cycles(p) if len(c) > 1] for p in self.perms],
            "passport": self.passport().to_json(),
        }


def _cycle_of(prod_cycles: list[list[int]], x: int) -> int:
    for k, c in enumerate(prod_cycles):
        if x in c:
            return k
    raise KeyError(x)


def realize_polynomial_constellation(P: Passport | Sequence[Sequence[int]]) -> Constellation:
    """Permutations of cycle types P_1..P_n whose product is the standard d-cycle.

    Each cycle of each sigma_i must join elements lying in distinct cycles of
    the running product, so every multiplication merges cycles and the
    final product is a single d-cycle; elements are chosen by backtracking,
    preferring product cycles with many unused elements.  The result is then
    conjugated so the product is i -> i+1.
    """
    P = P if isinstance(P, Passport) else Passport(tuple(P))
    if not is_polynomial_passport(P):
        raise ValueError("not a polynomial passport: c must equal d - 1 with nontrivial partitions")
    d = P.degree
    plan = [(i, part) for i, p in enumerate(P.partitions) for part in p if part > 1]
    n = len(P)
    chosen: list[list[list[int]]] = [[] for _ in range(n)]

    def current_product() -> tuple[int, ...]:
        return product([from_cycles(c, d) for c in chosen], d)

    def search(step: int) -> bool:
        if step == len(plan):
            return True
        i, m = plan[step]
        used = {x for c in chosen[i] for x in c}
        prod_cycles = [list(c) for c in cycles(current_product())]
        # candidate elements grouped by product cycle
        groups = []
        for c in prod_cycles:
            free = [x for x in c if x not in used]
            if free:
                groups.append(free)
        if len(groups) < m:
            return False
        groups.sort(key=lambda g: (-len(g), g[0]))

        def pick(start: int, acc: list[int]) -> bool:
            if len(acc) == m:
                chosen[i].append(list(acc))
                if search(step + 1):
                    return True
                chosen[i].pop()
                return False
            for gi in range(start, len(groups) - (m - len(acc)) + 1):
                for x in groups[gi][:1] if len(acc) else groups[gi][:2]:
                    acc.append(x)
                    if pick(gi + 1, acc):
                        return True
                    acc.pop()
            return False

        return pick(0, [])

    if not search(0):
        raise RealizationError(f"no realisation found for passport {P.to_json()}")
    perms = [from_cycles(c, d) for c in chosen]
    pi = product(perms, d)
    # conjugate by tau with tau pi tau^-1 = (0 1 ... d-1)
    order = [0]
    while len(order) < d:
        order.append(pi[order[-1]])
    tau = [0] * d
    for k, x in enumerate(order):
        tau[x] = k
    tau_inv = invert(tau)
    conj = tuple(compose(compose(tau, p), tau_inv) for p in perms)
    out = Constellation(d, conj)
    assert out.product_is_standard_cycle() and out.passport().partitions == P.partitions
    return out


def mate(A: Constellation, B: Constellation) -> Constellation:
    """Glue two polynomial constellations of equal degree into a rational one.

    The second list is reversed and inverted, so the full product telescopes
    to the identity; the passport is the concatenation of both passports.
    """
    if A.degree != B.degree:
        raise ValueError(f"degree mismatch: {A.degree} vs {B.degree}")
    if not (A.product_is_standard_cycle() and B.product_is_standard_cycle()):
        raise ValueError("mate expects products equal to the standard d-cycle")
    tail = tuple(invert(t) for t in reversed(B.perms))
    return Constellation(A.degree, A.perms + tail)


def extend_to_rational_passport(parts: Sequence[Sequence[int]]):
    """Extend n >= 3 partitions to the passport of a rational map, realised.

    n >= 4: split as (P1, P2) and (P3, ..., Pn), extend each to a polynomial
    passport, match degrees, realise and mate.  n = 3: build a dessin.
    """
    if len(parts) < 3:
        raise ValueError("rational extension needs n >= 3 partitions")
    parts = [Partition(p) for p in parts]
    if len(parts) == 3:
        from .dessins import build_dessin

        return build_dessin(*parts)
    A = extend_to_polynomial_passport(parts[:2])
    B = extend_to_polynomial_passport(parts[2:])
    A, B = match_degrees(A, B)
    out = mate(realize_polynomial_constellation(A), realize_polynomial_constellation(B))
    assert out.product_is_identity() and out.is_transitive()
    return out
