"""Planar dessins d'enfants as pairs of edge permutations.

Edges are 0..d-1.  ``sigma0`` rotates edges around white vertices (over 0),
``sigma1`` around black vertices (over 1); faces (over infinity) are the
cycles of (sigma0 sigma1)^-1.  A dessin is planar when
#white + #black + #faces - d = 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .passports import Partition, compose, cycle_type, cycles, extends, invert, is_trivial, _orbits

__all__ = ["Dessin", "model_white_star", "model_black_star", "model_polygon", "build_dessin", "dessin_invariants"]


@dataclass
class Dessin:
    sigma0: tuple[int, ...]
    sigma1: tuple[int, ...]
    # (kind, edge set) for each protected center: kind is "0", "1" or "inf"
    centers: list[tuple[str, frozenset]] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.sigma0)

    @property
    def faces(self) -> tuple[int, ...]:
        return invert(compose(self.sigma0, self.sigma1))

    def cycle_sets(self, kind: str) -> list[frozenset]:
        perm = {"0": self.sigma0, "1": self.sigma1, "inf": self.faces}[kind]
        return [frozenset(c) for c in cycles(perm)]

    def centers_intact(self) -> bool:
        return all(edges in self.cycle_sets(kind) for kind, edges in self.centers)

    def to_json(self) -> dict:
        genus, connected, passport = dessin_invariants(self)

        def cyc(p):
            return [[x + 1 for x in c] for c in cycles(p) if len(c) > 1]

        return {
            "degree": self.degree,
            "sigma0": cyc(self.sigma0),
            "sigma1": cyc(self.sigma1),
            "faces": cyc(self.faces),
            "genus": genus,
            "connected": connected,
            "passport": [list(p) for p in passport],
        }


def dessin_invariants(D: Dessin) -> tuple[int, bool, tuple]:
    """(genus, connected, (white type, black type, face type)) from cycle counts."""
    d = D.degree
    connected = _orbits([D.sigma0, D.sigma1], d) == 1
    chi = len(cycles(D.sigma0)) + len(cycles(D.sigma1)) + len(cycles(D.faces)) - d
    twice = 2 - chi
    genus = twice // 2 if twice % 2 == 0 else twice / 2
    return genus, connected, (cycle_type(D.sigma0), cycle_type(D.sigma1), cycle_type(D.faces))


def model_white_star(m: int) -> Dessin:
    """z^m: one white center of valence m, m black leaves, one face."""
    s0 = tuple((i + 1) % m for i in range(m))
    return Dessin(s0, tuple(range(m)), [("0", frozenset(range(m)))])


def model_black_star(m: int) -> Dessin:
    """z^m + 1: the mirror of the white star."""
    s1 = tuple((i + 1) % m for i in range(m))
    return Dessin(tuple(range(m)), s1, [("1", frozenset(range(m)))])


def model_polygon(m: int) -> Dessin:
    """(z^m + z^-m + 2)/4: a 2m-gon with alternating colours and two m-faces."""
    n = 2 * m
    s0 = [0] * n
    s1 = [0] * n
    for j in range(m):
        a, b = 2 * j, 2 * j + 1
        s0[a], s0[b] = b, a
        c, e = 2 * j + 1, (2 * j + 2) % n
        s1[c], s1[e] = e, c
    D = Dessin(tuple(s0), tuple(s1))
    inner = next(f for f in D.cycle_sets("inf") if 0 in f)
    D.centers = [("inf", inner)]
    return D


class _Builder:
    def __init__(self):
        # hub edge 0 with white end w and black end b
        self.s0 = [0]
        self.s1 = [0]
        self.centers: list[tuple[str, frozenset]] = []

    def add(self, model: Dessin) -> int:
        off = len(self.s0)
        self.s0.extend(x + off for x in model.sigma0)
        self.s1.extend(x + off for x in model.sigma1)
        for kind, edges in model.centers:
            self.centers.append((kind, frozenset(e + off for e in edges)))
        return off

    def new_edge(self) -> int:
        self.s0.append(len(self.s0))
        self.s1.append(len(self.s1))
        return len(self.s0) - 1

    @staticmethod
    def insert_after(perm: list[int], anchor: int, x: int):
        perm[x] = perm[anchor]
        perm[anchor] = x

    def snapshot(self) -> Dessin:
        return Dessin(tuple(self.s0), tuple(self.s1), list(self.centers))


def build_dessin(P0: Sequence[int], P1: Sequence[int], Pinf: Sequence[int]) -> Dessin:
    """A connected planar dessin whose three partitions extend P0, P1, Pinf.

    Trivial partitions are first extended by (2).  Each part m contributes a
    model: a white star for P0, a black star for P1, a 2m-gon for Pinf.
    Components are joined to a hub edge [b, w]: white stars to w, black stars
    to b, polygons alternately to w and b, always through non-center vertices
    and through a corner of the outer face, so no center changes.
    """
    parts = []
    for P in (P0, P1, Pinf):
        P = Partition(P)
        if not P or is_trivial(P):
            P = Partition(P + (2,))
        parts.append(P)
    B = _Builder()
    hub = 0
    for m in parts[0]:
        off = B.add(model_white_star(m))
        x = B.new_edge()
        B.insert_after(B.s0, hub, x)  # white end at w
        B.s1[off], B.s1[x] = x, off  # black end at a leaf
    for m in parts[1]:
        off = B.add(model_black_star(m))
        x = B.new_edge()
        B.insert_after(B.s1, hub, x)  # black end at b
        B.s0[off], B.s0[x] = x, off  # white end at a leaf
    for k, m in enumerate(parts[2]):
        off = B.add(model_polygon(m))
        center = B.centers[-1]
        x = B.new_edge()
        to_white_hub = k % 2 == 0
        if to_white_hub:
            B.insert_after(B.s0, hub, x)
            perm, anchors = B.s1, (off + 1, B.s1[off + 1])
        else:
            B.insert_after(B.s1, hub, x)
            perm, anchors = B.s0, (off, B.s0[off])
        saved = list(perm)
        for anchor in anchors:
            perm[:] = saved
            B.insert_after(perm, anchor, x)
            if center[1] in B.snapshot().cycle_sets("inf"):
                break
        else:
            raise AssertionError("no outer corner found on polygon component")
    D = B.snapshot()
    genus, connected, passport = dessin_invariants(D)
    assert connected and genus == 0, "dessin assembly lost planarity"
    assert D.centers_intact(), "a protected center changed valence"
    assert all(extends(q, p) for q, p in zip(passport, parts)), "partitions not extended"
    return D
