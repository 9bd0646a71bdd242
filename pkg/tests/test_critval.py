from fractions import Fraction as Q

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcfdyn.algsets import FiniteAlgebraicSet, critical_values_set
from pcfdyn.critval import (
    NotRationalChain,
    PolyTemplate,
    QuadChain,
    chain_with_critvals,
    cubic_triple,
    rational_sqrt,
    solve_template,
)
from pcfdyn.exact.ratpoly import RatPoly, compose
from pcfdyn.numeric import poly_eval


def composite(chain: QuadChain) -> RatPoly:
    f = chain.factors[0]
    for g in chain.factors[1:]:
        f = compose(g, f)
    return f


def test_single_target_is_z_squared_plus_a():
    chain = chain_with_critvals((-2,))
    assert isinstance(chain, QuadChain)
    assert composite(chain) == RatPoly([-2, 0, 1])


def test_two_targets_chebyshev():
    chain = chain_with_critvals((-2, 2))
    f = composite(chain)
    assert f == RatPoly([2, 0, -4, 0, 1])
    assert critical_values_set(f) == FiniteAlgebraicSet.from_points([-2, 2])


def test_non_square_discriminant_reported():
    res = chain_with_critvals((1, 3))
    assert isinstance(res, NotRationalChain)
    assert rational_sqrt(res.discriminants[0]) is None


def test_rational_sqrt():
    assert rational_sqrt(Q(9, 4)) == Q(3, 2)
    assert rational_sqrt(Q(2)) is None
    assert rational_sqrt(Q(-1)) is None


def test_cubic_triple_closed_form():
    with mpmath.workprec(256):
        g = cubic_triple(Q(1, 9))
        expected = [0, 1, -3, 3]  # 3 (z - 1/3)^3 + 1/9
        assert max(abs(a - b) for a, b in zip(g.coeffs, expected)) < 1e-60
        assert abs(g.crit_points[0] - mpmath.mpf(1) / 3) < 1e-60
        assert abs(g.crit_values[0] - mpmath.mpf(1) / 9) < 1e-60


def test_quadratic_template_needs_no_newton():
    g = solve_template(PolyTemplate.quadratic(), [Q(1, 4)])
    assert g.steps == 0
    assert abs(g.crit_values[0] - mpmath.mpf(1) / 4) < 1e-60


def test_degree_three_template_half():
    with mpmath.workprec(256):
        g = solve_template(PolyTemplate.simple(2), [mpmath.mpf(1) / 2, mpmath.mpc(2, 1)])
        assert min(abs(v - mpmath.mpf(1) / 2) for v in g.crit_values) < 1e-30
        assert abs(poly_eval(g.coeffs, 0)) < 1e-30 and abs(poly_eval(g.coeffs, 1) - 1) < 1e-30


def test_template_riemann_hurwitz():
    with pytest.raises(ValueError):
        PolyTemplate(3, "simple", (1,))
    assert PolyTemplate.simple(4).degree == 5
    assert PolyTemplate.triple().degree == 3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=3, unique=True))
def test_chain_success_means_exact_critical_values(targets):
    res = chain_with_critvals(tuple(targets))
    if isinstance(res, NotRationalChain):
        return
    f = composite(res)
    assert f.degree == 2 ** len(targets)
    assert critical_values_set(f) == FiniteAlgebraicSet.from_points(targets)


@settings(max_examples=15, deadline=None)
@given(st.complex_numbers(min_magnitude=0.2, max_magnitude=3), st.complex_numbers(min_magnitude=0.2, max_magnitude=3))
def test_template_lipschitz_under_small_perturbation(a, b):
    if abs(a - b) < 0.3 or min(abs(a - 1), abs(b - 1)) < 0.2:
        return
    with mpmath.workprec(256):
        try:
            g = solve_template(PolyTemplate.simple(2), [a, b])
        except ArithmeticError:
            return
        delta = mpmath.mpf("1e-8")
        h = solve_template(PolyTemplate.simple(2), [a + delta, b], seed=g)
        move = max(abs(x - y) for x, y in zip(g.coeffs, h.coeffs))
        assert move < 1e4 * delta
