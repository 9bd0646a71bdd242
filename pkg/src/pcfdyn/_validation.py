"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import json
from numbers import Integral
from typing import Mapping

from .algsets import FiniteAlgebraicSet, parse_set
from .exact.ratpoly import RatPoly, parse_poly

__all__ = [
    "check_point_set",
    "check_polynomial",
    "check_precision",
    "check_positive_int",
    "check_tolerance",
    "check_labelled_points",
    "check_label_map",
]


def check_point_set(X) -> FiniteAlgebraicSet:
    """Accept a FiniteAlgebraicSet, set JSON (str or dict), or a list of points."""
    if isinstance(X, FiniteAlgebraicSet):
        return X
    if isinstance(X, (list, tuple)):
        return parse_set({"points": list(X)})
    return parse_set(X)


def check_polynomial(p) -> RatPoly:
    if isinstance(p, RatPoly):
        return p
    return parse_poly(p)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be at least {minimum}, got {value}")
    return int(value)


def check_precision(bits) -> int:
    return check_positive_int(bits, "precision", minimum=53)


def check_tolerance(tol, name: str = "tol") -> float:
    tol = float(tol)
    if not 0 < tol < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {tol}")
    return tol


def check_labelled_points(points) -> dict:
    """Labelled points from a JSON object, or a JSON array (labels "0", "1", ...)."""
    if isinstance(points, str):
        try:
            points = json.loads(points)
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad points JSON at position {exc.pos}: {exc.msg}") from None
    if isinstance(points, Mapping):
        return {str(k): str(v) for k, v in points.items()}
    if isinstance(points, (list, tuple)):
        return {str(i): str(v) for i, v in enumerate(points)}
    raise ValueError("points must be a JSON object or array")


def check_label_map(source, labels, name: str = "map") -> dict:
    """Parse "a:b,c:d" (or a mapping) into a dict over the given labels."""
    if isinstance(source, Mapping):
        pairs = [(str(k), str(v)) for k, v in source.items()]
    else:
        pairs = []
        pos = 0
        for tok in str(source).split(","):
            if not tok.strip():
                pos += len(tok) + 1
                continue
            if ":" not in tok:
                raise ValueError(f"{name}: token {tok.strip()!r} at position {pos} lacks ':'")
            k, v = tok.split(":", 1)
            pairs.append((k.strip(), v.strip()))
            pos += len(tok) + 1
    out = dict(pairs)
    for k in out:
        if k not in labels:
            raise ValueError(f"{name}: unknown label {k!r}")
    return out
