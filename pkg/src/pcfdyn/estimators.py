"""Estimator-style wrappers around the constructions.

``fit`` takes the point set (and, for Thurston, the marked self-map), runs
the construction, and stores results in trailing-underscore attributes;
``predict`` evaluates the fitted map.  Parameters are plain constructor
arguments so ``get_params``/``set_params``/``clone`` work as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    check_label_map,
    check_labelled_points,
    check_point_set,
    check_positive_int,
    check_precision,
    check_tolerance,
)
from .algsets import belyi
from .exact.ratpoly import as_fraction
from .postcritical import DEFAULT_BELYI_CAP, construct_postcritical, postcritical_orbit
from .thurston import Configuration, MarkedSelfMap, ThurstonOptions, parse_point, solve_thurston

__all__ = ["BelyiMap", "PostcriticalPolynomial", "ThurstonRealizer"]


def _as_points(z):
    return list(np.atleast_1d(np.asarray(z, dtype=object)).ravel())


class BelyiMap(BaseEstimator):
    """Belyi polynomial beta for a finite algebraic set, with beta(X) and V_0(beta) in {0, 1}."""

    def __init__(self, max_degree: int = 20000):
        self.max_degree = max_degree

    def fit(self, X, y=None):
        cap = check_positive_int(self.max_degree, "max_degree")
        self.set_ = check_point_set(X)
        self.certificate_ = belyi(self.set_, max_degree=cap)
        self.beta_ = self.certificate_.beta
        self.degree_ = self.beta_.degree
        return self

    def predict(self, z):
        """Exact values beta(z) for rational inputs."""
        check_is_fitted(self, "beta_")
        return [self.beta_(as_fraction(p)) for p in _as_points(z)]


class PostcriticalPolynomial(BaseEstimator):
    """Polynomial f with postcritical set X (infinity in X)."""

    def __init__(self, tier: str = "auto", precision: int = 256, belyi_cap: int = DEFAULT_BELYI_CAP):
        self.tier = tier
        self.precision = precision
        self.belyi_cap = belyi_cap

    def fit(self, X, y=None):
        if self.tier not in ("auto", "exact"):
            raise ValueError("tier must be 'auto' or 'exact'")
        self.set_ = check_point_set(X)
        self.certificate_ = construct_postcritical(
            self.set_,
            tier=self.tier,
            precision=check_precision(self.precision),
            belyi_cap=check_positive_int(self.belyi_cap, "belyi_cap"),
        )
        self.f_ = self.certificate_.f
        self.path_ = self.certificate_.path
        self.degree_ = self.certificate_.f_degree
        return self

    def predict(self, z):
        check_is_fitted(self, "certificate_")
        pts = [parse_point(p) if isinstance(p, str) else p for p in _as_points(z)]
        if any(getattr(p, "is_inf", False) for p in pts):
            raise ValueError("a polynomial is evaluated at finite points only")
        return [self.certificate_.evaluate(p.value if hasattr(p, "value") else p) for p in pts]

    def orbit(self, budget: int = 512):
        """Exact postcritical orbit of the fitted map (exact path only)."""
        check_is_fitted(self, "certificate_")
        if self.f_ is None:
            raise ValueError("the numeric path has no exact polynomial to iterate")
        return postcritical_orbit(self.f_, budget)


class ThurstonRealizer(BaseEstimator):
    """Rational map realizing a marked self-map F of a finite set, by pullback."""

    def __init__(self, precision: int = 256, tol: float = 1e-10, delta0: float = 0.25, max_iters: int = 400, n_start=None):
        self.precision = precision
        self.tol = tol
        self.delta0 = delta0
        self.max_iters = max_iters
        self.n_start = n_start

    def fit(self, X, F, multiplicity=None):
        points = check_labelled_points(X)
        fmap = check_label_map(F, points, "F")
        mults = None
        if multiplicity is not None:
            mults = {k: int(v) for k, v in check_label_map(multiplicity, points, "multiplicity").items()}
        opts = ThurstonOptions(
            precision=check_precision(self.precision),
            tol=check_tolerance(self.tol),
            delta0=float(self.delta0),
            max_iters=check_positive_int(self.max_iters, "max_iters"),
            n_start=None if self.n_start is None else check_positive_int(self.n_start, "n_start"),
        )
        self.result_ = solve_thurston(Configuration(points), MarkedSelfMap(fmap, mults), opts)
        self.postcritical_ = self.result_.postcritical_points()
        self.degree_ = self.result_.degree
        return self

    def predict(self, z):
        check_is_fitted(self, "result_")
        return [self.result_.evaluate(parse_point(p) if isinstance(p, str) else p) for p in _as_points(z)]
