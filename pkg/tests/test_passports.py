from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcfdyn.dessins import build_dessin, dessin_invariants, model_black_star, model_polygon, model_white_star
from pcfdyn.passports import (
    Constellation,
    Passport,
    c_value,
    cycle_type,
    extend_to_polynomial_passport,
    extend_to_rational_passport,
    extends,
    from_cycles,
    is_polynomial_passport,
    mate,
    match_degrees,
    passport_extends,
    realize_polynomial_constellation,
)

partition = st.lists(st.integers(1, 6), min_size=1, max_size=4).map(lambda p: tuple(sorted(p, reverse=True)))
nontrivial = partition.filter(lambda p: any(x > 1 for x in p))


def euler_genus(perms, d):
    """Genus from Riemann-Hurwitz for an identity-product tuple: 2 - 2g = 2d - sum (d - #cycles)."""
    c = sum(d - len(cycle_sets(p)) for p in perms)
    return (c - 2 * d + 2) // 2


def cycle_sets(p):
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        cyc, x = [], s
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = p[x]
        out.append(cyc)
    return out


def test_single_partition_rejected():
    with pytest.raises(ValueError):
        extend_to_polynomial_passport([(2,)])


def test_c_value_frozen():
    assert c_value([(2, 1), (2, 1)]) == 2
    assert is_polynomial_passport([(2, 1), (2, 1)])


@pytest.mark.parametrize(
    "parts, expected",
    [
        ([(2,), (2,)], ((2, 1), (2, 1))),
        ([(3,), (2,)], ((3, 1), (2, 1, 1))),
        ([(2, 1, 1, 1), (2, 1, 1, 1)], ((3, 3, 2, 1, 1, 1), (3, 3, 2, 1, 1, 1))),
    ],
)
def test_polynomial_extension_frozen(parts, expected):
    P = extend_to_polynomial_passport(parts)
    assert P.partitions == expected
    assert c_value(P) == P.degree - 1


def test_extension_relation():
    assert extends((2, 1, 1), (2,))
    assert not extends((3, 1), (2,))
    assert passport_extends([(2, 1), (2, 1)], [(2,), (2,)])


def test_realize_degree_three():
    C = realize_polynomial_constellation(Passport(((2, 1), (2, 1))))
    assert C.product_is_standard_cycle() and C.is_transitive()
    assert C.passport() == Passport(((2, 1), (2, 1)))


def test_mate_degree_two():
    A = Constellation(2, (from_cycles([[1, 2]], 2, one_based=True),))
    M = mate(A, A)
    assert M.product_is_identity() and M.is_transitive() and M.genus_from_c() == 0
    assert M.passport() == Passport(((2,), (2,)))


def test_mate_three_cycle_with_transpositions():
    A = Constellation(3, (from_cycles([[1, 2, 3]], 3, one_based=True),))
    B = realize_polynomial_constellation(Passport(((2, 1), (2, 1))))
    M = mate(A, B)
    assert len(M.perms) == 3 and M.product_is_identity() and M.is_transitive()


def test_match_degrees_equalizes():
    A, B = match_degrees(
        extend_to_polynomial_passport([(2,), (2,)]), extend_to_polynomial_passport([(3,), (3,)])
    )
    assert A.degree == B.degree
    assert c_value(A) == A.degree - 1 and c_value(B) == B.degree - 1


class TestDessinModels:
    def test_white_star(self):
        assert dessin_invariants(model_white_star(3)) == (0, True, ((3,), (1, 1, 1), (3,)))

    def test_black_star(self):
        genus, connected, _ = dessin_invariants(model_black_star(4))
        assert genus == 0 and connected

    def test_polygon_two(self):
        D = model_polygon(2)
        assert Counter(map(len, cycle_sets(D.sigma0))) == Counter({2: 2})
        assert dessin_invariants(D) == (0, True, ((2, 2), (2, 2), (2, 2)))

    def test_three_models_with_hub(self):
        genus, connected, passport = dessin_invariants(build_dessin((2,), (2,), (2,)))
        assert genus == 0 and connected
        assert all(extends(q, (2,)) for q in passport)

    def test_pre_extension_for_lonely_part(self):
        D = build_dessin((5,), (1,), (1,))
        genus, connected, passport = dessin_invariants(D)
        assert genus == 0 and connected and extends(passport[0], (5,))


def test_rational_extension_four_parts():
    R = extend_to_rational_passport([(2,), (2,), (2,), (2,)])
    assert isinstance(R, Constellation)
    assert R.product_is_identity() and R.is_transitive()
    assert c_value(R.passport()) == 2 * R.degree - 2


def test_rational_extension_three_parts_is_dessin():
    D = extend_to_rational_passport([(2,), (3,), (4,)])
    genus, connected, passport = dessin_invariants(D)
    assert genus == 0 and connected
    assert all(extends(q, p) for q, p in zip(passport, [(2,), (3,), (4,)]))


@settings(max_examples=60, deadline=None)
@given(st.lists(nontrivial, min_size=2, max_size=5))
def test_polynomial_extension_property(parts):
    P = extend_to_polynomial_passport(parts)
    assert passport_extends(P, parts)
    assert c_value(P) == P.degree - 1


@settings(max_examples=40, deadline=None)
@given(st.lists(nontrivial, min_size=3, max_size=5))
def test_rational_extension_property(parts):
    R = extend_to_rational_passport(parts)
    if isinstance(R, Constellation):
        perms, d = list(R.perms), R.degree
        # sigma_1 o ... o sigma_n, sigma_n applied first
        prod = list(range(d))
        for p in perms:
            prod = [prod[p[x]] for x in range(d)]
        assert prod == list(range(d))
        assert R.is_transitive()
        assert euler_genus(perms, d) == 0
        P = R.passport()
    else:
        genus, connected, P = dessin_invariants(R)
        assert genus == 0 and connected
        P = Passport(tuple(P))
    assert passport_extends(P, parts)
    assert c_value(P) == 2 * P.degree - 2


@settings(max_examples=40, deadline=None)
@given(st.lists(nontrivial, min_size=2, max_size=3))
def test_realization_property(parts):
    P = extend_to_polynomial_passport(parts)
    if P.degree > 14:
        return
    C = realize_polynomial_constellation(P)
    assert C.product_is_standard_cycle() and C.is_transitive()
    assert sorted(cycle_type(p) for p in C.perms) == sorted(P.partitions)
