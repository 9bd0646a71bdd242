import cmath
from fractions import Fraction as Q

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcfdyn.numeric import (
    INF,
    DegenerateConfigurationError,
    SpherePoint,
    mobius_through,
    poly_eval,
    roots,
    sph_dist,
)

finite = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)


def chordal(x, y):
    # 2|x - y| / sqrt((1 + |x|^2)(1 + |y|^2)), with the limit at infinity
    if x is None and y is None:
        return 0.0
    if x is None:
        return 2 / abs(cmath.sqrt(1 + abs(y) ** 2))
    if y is None:
        return chordal(y, x)
    return 2 * abs(x - y) / ((1 + abs(x) ** 2) * (1 + abs(y) ** 2)) ** 0.5


def test_sqrt2_roots_to_thirty_digits():
    with mpmath.workprec(256):
        found = sorted(float(b.center.real) for b in roots([-2, 0, 1]))
        centers = sorted((b.center for b in roots([-2, 0, 1])), key=lambda c: c.real)
        assert abs(centers[1] - mpmath.sqrt(2)) < mpmath.mpf(10) ** -30
    assert found == pytest.approx([-2**0.5, 2**0.5])


def test_cluster_for_repeated_root():
    with mpmath.workprec(256):
        boxes = roots([-4, 27, -54, 27])
        near_third = [b for b in boxes if abs(b.center - mpmath.mpf(1) / 3) < 1e-20]
        near_four_thirds = [b for b in boxes if abs(b.center - mpmath.mpf(4) / 3) < 1e-20]
    assert len(near_third) == 2 and len(near_four_thirds) == 1


def test_chordal_frozen():
    assert float(sph_dist(SpherePoint(0), SpherePoint(1))) == pytest.approx(2**0.5)
    assert float(sph_dist(SpherePoint(0), INF)) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "triple, probe, expected",
    [((1, 0, INF), Q(1, 3), Q(2, 3)), ((0, 2, INF), 3, Q(3, 2))],
)
def test_mobius_through_frozen(triple, probe, expected):
    with mpmath.workprec(256):
        check_three_points(triple, probe, expected)


def check_three_points(triple, probe, expected):
    m = mobius_through(*triple)
    for src, dst in zip(triple, (0, 1, None)):
        image = m(SpherePoint.of(src))
        if dst is None:
            assert image.is_inf
        else:
            assert abs(image.value - dst) < 1e-40
    assert abs(m(SpherePoint.of(probe)).value - mpmath.mpf(expected.numerator) / expected.denominator) < 1e-40


def test_degenerate_triple_rejected():
    with pytest.raises(DegenerateConfigurationError):
        mobius_through(0, 0, 1)


@settings(max_examples=80, deadline=None)
@given(finite, finite)
def test_chordal_matches_formula(x, y):
    assert float(sph_dist(SpherePoint(x), SpherePoint(y))) == pytest.approx(chordal(x, y), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(finite, finite, finite, finite)
def test_mobius_normalizes_and_inverts(a, b, c, w):
    pts = [a, b, c]
    if min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1 :]) < 1e-3:
        return
    with mpmath.workprec(256):
        m = mobius_through(a, b, c)
        assert_normalized(m, a, b, c, w)


def assert_normalized(m, a, b, c, w):
    assert abs(m(SpherePoint(a)).value) < 1e-30
    assert abs(m(SpherePoint(b)).value - 1) < 1e-30
    assert m(SpherePoint(c)).is_inf
    back = m.inverse()(m(SpherePoint(w)))
    assert float(sph_dist(back, SpherePoint(w))) < 1e-30


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=7))
def test_roots_agree_with_numpy(planted):
    coeffs = np.poly(planted)[::-1]
    boxes = roots([complex(c) for c in coeffs])
    if len(set(planted)) == len(planted) and min(
        (abs(p - q) for i, p in enumerate(planted) for q in planted[i + 1 :]), default=1
    ) > 1e-2:
        for r in np.roots(coeffs[::-1]):
            assert min(abs(b.center - complex(r)) for b in boxes) < 1e-6
    assert len(boxes) == len(planted)
    scale = sum(abs(c) for c in coeffs) * max(1, max(abs(p) for p in planted)) ** len(planted)
    for b in boxes:
        assert abs(complex(poly_eval([complex(c) for c in coeffs], b.center))) < 1e-9 * scale
