"""Verification reports: labelled claims that are either exact or numeric."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

EXACT = "exact"
NUMERIC = "numeric"


@dataclass(frozen=True)
class Claim:
    statement: str
    method: str
    verdict: bool
    bound: float | None = None
    residual: float | None = None
    detail: str = ""

    def __post_init__(self):
        if self.method not in (EXACT, NUMERIC):
            raise ValueError(f"unknown claim method {self.method!r}")
        if self.method == NUMERIC and self.bound is None:
            raise ValueError("numeric claims need a tolerance bound")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"statement": self.statement, "method": self.method, "verdict": self.verdict}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.residual is not None:
            out["residual"] = self.residual
        if self.detail:
            out["detail"] = self.detail
        return out


def exact_claim(statement: str, verdict: bool, detail: str = "") -> Claim:
    return Claim(statement, EXACT, bool(verdict), detail=detail)


def numeric_claim(statement: str, residual: float, bound: float, detail: str = "") -> Claim:
    return Claim(statement, NUMERIC, bool(residual < bound), bound=bound, residual=float(residual), detail=detail)


@dataclass
class Certificate:
    """A list of claims; the overall verdict is their conjunction."""

    claims: list[Claim] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, claim: Claim) -> Claim:
        self.claims.append(claim)
        return claim

    @property
    def verdict(self) -> bool:
        return bool(self.claims) and all(c.verdict for c in self.claims)

    @property
    def exact(self) -> bool:
        return all(c.method == EXACT for c in self.claims)

    def to_json(self) -> dict[str, Any]:
        out = {"verdict": self.verdict, "claims": [c.to_json() for c in self.claims]}
        if self.notes:
            out["notes"] = list(self.notes)
        return out
