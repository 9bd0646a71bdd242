import math
from fractions import Fraction as Q

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcfdyn.algsets import FiniteAlgebraicSet
from pcfdyn.exact.ratpoly import RatPoly
from pcfdyn.numeric import INF, SpherePoint, sph_dist
from pcfdyn.thurston import (
    TABLE,
    Configuration,
    MarkedSelfMap,
    ThurstonFailure,
    ThurstonOptions,
    achievable_local_degrees,
    canonical_pattern,
    choose_k,
    functional_graph,
    h_eval,
    h_orbit,
    h_poly_for_set,
    h_preimages,
    hn_critical_values,
    match_fixture,
    multiplicity_plan,
    parse_point,
    solve_thurston,
    verify_table_case,
)

POINTS = {"0": "0", "1": "1", "inf": "inf", "x": "1/9"}
MAPS = {
    "identity": {"0": "0", "1": "1", "inf": "inf", "x": "x"},
    "four-cycle": {"0": "1", "1": "x", "x": "inf", "inf": "0"},
    "constant": {"0": "0", "1": "0", "inf": "0", "x": "0"},
}


def h_exact(z):
    # (2/z - 1)^2 on the Riemann sphere, None for infinity
    if z is None:
        return Q(1)
    if z == 0:
        return None
    return (Q(2) / z - 1) ** 2


class TestH:
    def test_orbit_of_two(self):
        assert h_orbit() == [2, 0, None, 1, 1]
        z, seen = Q(2), []
        for _ in range(5):
            seen.append(z)
            z = h_exact(z)
        assert seen == h_orbit()

    def test_values(self):
        assert h_eval(SpherePoint(2)).value == 0
        assert h_eval(INF).value == 1 and h_eval(SpherePoint(1)).value == 1

    def test_preimages_of_one(self):
        pts = h_preimages(SpherePoint(1))
        assert sorted("inf" if p.is_inf else str(p.value.real) for p, _ in pts) == ["1.0", "inf"]

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_iterate_critical_values(self, n):
        finite, at_inf = hn_critical_values(n)
        assert finite == [0, 1] and at_inf

    @pytest.mark.parametrize("size, k", [(3, 3), (4, 3), (13, 5)])
    def test_choose_k(self, size, k):
        assert choose_k(size) == k
        assert 2**k > size + 3 and 2 ** (k - 1) <= size + 3 or k == 3

    def test_choose_k_rejects_small(self):
        with pytest.raises(ValueError):
            choose_k(2)


class TestTable:
    @pytest.mark.parametrize("cid", list("ABCDEFG"))
    def test_fixture_verifies(self, cid):
        cert = verify_table_case(cid)
        assert cert.verdict
        assert len(functional_graph(TABLE[cid].map)) == 3

    def test_patterns_are_distinct(self):
        pats = {canonical_pattern(functional_graph(TABLE[c].map)) for c in TABLE}
        assert len(pats) == 7

    def test_e_graph(self):
        assert functional_graph(TABLE["E"].map) == {Q(-1): Q(0), Q(0): Q(-1), None: None}

    def test_a_three_cycle(self):
        assert functional_graph(TABLE["A"].map) == {Q(0): None, None: Q(1), Q(1): Q(0)}

    def test_b_over_quadratic_field(self):
        g = functional_graph(TABLE["B"].map)
        assert {k: v for k, v in g.items()} == {0: 1, None: 1, 1: 1}
        assert TABLE["B"].field == "Q(alpha)"

    def test_match_fixture(self):
        cid, pi = match_fixture({"a": "b", "b": "a", "c": "c"})
        assert cid == "E"
        assert set(pi.values()) == {"a", "b", "c"}


class TestHPoly:
    def test_one_third(self):
        res = h_poly_for_set(FiniteAlgebraicSet.from_points([Q(1, 3)]))
        h = res.h
        assert res.exact and res.verdict
        assert (res.a, res.b) == (0, Q(4, 3))
        assert h.coeffs == (0, 9, -18, 9)  # 9 z (1 - z)^2
        assert h(0) == 0 and h(Q(4, 3)) == Q(4, 3) and h(Q(1, 3)) == Q(4, 3)
        # C_0(h) = {1/3, 1} is disjoint from {0, 4/3}
        assert h.derivative()(Q(1, 3)) == 0 and h.derivative()(1) == 0
        assert h.derivative()(0) != 0 and h.derivative()(Q(4, 3)) != 0

    def test_irrational_pair_numeric(self):
        res = h_poly_for_set(FiniteAlgebraicSet.from_defining(RatPoly([-2, 0, 1])))
        assert res.verdict

    def test_rejects_infinity(self):
        with pytest.raises(ValueError):
            h_poly_for_set(FiniteAlgebraicSet.from_points([1], True))

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=20), min_size=1, max_size=2, unique=True))
    def test_exact_property(self, points):
        res = h_poly_for_set(FiniteAlgebraicSet.from_points(points))
        assert res.verdict
        if res.exact:
            h, a, b = res.h, res.a, res.b
            assert all(h(p) in (a, b) for p in points)
            assert h(a) in (a, b) and h(b) in (a, b)
            assert h.derivative()(a) != 0 and h.derivative()(b) != 0


class TestMultiplicity:
    def test_counting_checks(self):
        plan = multiplicity_plan(MAPS["identity"], {"x": 2})
        assert plan.checks["sum |P_x| = |X|"] and plan.checks["sum |P'_x| = 2|X|"]
        assert 2 in plan.partitions["x"]
        assert any("mult(g, iota(x))" in r for r in plan.requirements)

    def test_forced_ramification_over_infinity(self):
        plan = multiplicity_plan(MAPS["identity"], {"inf": 1})
        assert not plan.realizable
        assert plan.passport is not None

    @pytest.mark.parametrize("name", list(MAPS))
    def test_achieved_local_degrees_are_realizable(self, name):
        res = solve_thurston(POINTS, MAPS[name])
        plan = multiplicity_plan(MAPS[name], res.multiplicities, triple=res.triple)
        assert plan.realizable

    def test_roles(self):
        assert achievable_local_degrees("1", 4) == {1, 2, 4}
        assert achievable_local_degrees("1", 4, n=2) == {1, 2}
        assert achievable_local_degrees("0", 5) == {1, 2}
        assert achievable_local_degrees("inf", 4) == {12}
        assert achievable_local_degrees("free", 4) == {3}
        with pytest.raises(ValueError):
            achievable_local_degrees("l0", 4)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), min_size=5, max_size=5))
    def test_counting_property(self, images):
        labels = ["a", "b", "c", "d", "e"]
        plan = multiplicity_plan(dict(zip(labels, images)), build_passport=False)
        assert sum(len(p) for p in plan.partitions.values()) == 5
        assert sum(len(p) for p in plan.padded.values()) == 10


class TestParsing:
    @pytest.mark.parametrize(
        "text, value",
        [("1/9", Q(1, 9)), ("-2/3+1j", complex(-2 / 3, 1)), ("2j", 2j), (["1/3", "2"], complex(1 / 3, 2))],
    )
    def test_parse_point(self, text, value):
        p = parse_point(text)
        assert abs(complex(p.value) - complex(value)) < 1e-12

    def test_parse_infinity_and_errors(self):
        assert parse_point("inf").is_inf
        for bad in ("x", "1/0", "1/0+j"):
            with pytest.raises(ValueError):
                parse_point(bad)

    def test_marked_map_validation(self):
        with pytest.raises(ValueError):
            MarkedSelfMap({"a": "b"})


class TestSolver:
    @pytest.mark.parametrize("name", list(MAPS))
    def test_one_ninth_configuration(self, name):
        res = solve_thurston(POINTS, MAPS[name])
        assert res.accepted
        assert res.r_dyn < 1e-9 and res.r_crit < 1e-9
        assert len(res.configuration) == 4
        assert res.lambda_hat < 1
        # displacements stay under the fitted geometric envelope K eps lambda^i
        K, eps, lam = res.envelope_constant, res.epsilon, res.lambda_hat
        assert all(d <= K * eps * lam**i * (1 + 1e-9) for i, d in enumerate(res.trace) if lam > 0)
        assert res.trace[-1] < res.trace[0]
        assert not math.isqrt(res.degree) ** 2 == res.degree
        assert res.degree == 3 * 2**res.n

    def test_distinguished_triple_exact(self):
        res = solve_thurston(POINTS, MAPS["four-cycle"])
        P = res.configuration
        assert P["0"].value == 0 and P["1"].value == 1 and P["inf"].is_inf

    def test_constant_map_dynamics(self):
        res = solve_thurston(POINTS, MAPS["constant"])
        target = res.postcritical_points()["0"]
        with mpmath.workprec(256):
            for p in res.postcritical_points().values():
                assert sph_dist(res.evaluate(p), target) < 1e-9

    def test_three_points_use_fixture(self):
        res = solve_thurston({"a": "-1", "b": "0", "c": "inf"}, {"a": "b", "b": "a", "c": "c"})
        assert res.fixture == "E" and res.accepted

    def test_two_points_rejected(self):
        with pytest.raises(ValueError):
            solve_thurston({"a": "0", "b": "inf"}, {"a": "b", "b": "a"})

    def test_failure_carries_trace(self):
        opts = ThurstonOptions(delta0=1e-6, n_cap=7)
        with pytest.raises(ThurstonFailure) as info:
            solve_thurston(POINTS, MAPS["identity"], opts)
        assert "delta0" in str(info.value)

    def test_configuration_normalizes(self):
        X = Configuration({"a": "2", "b": "3", "c": "5", "d": "1/2"})
        P, M0, triple = X.normalized()
        assert triple == ("a", "b", "c")
        assert P["a"].value == 0 and P["b"].value == 1 and P["c"].is_inf

    @settings(max_examples=12, deadline=None)
    @given(
        st.fractions(min_value=-30, max_value=30, max_denominator=12).filter(lambda x: x not in (0, 1)),
        st.lists(st.sampled_from(["0", "1", "inf", "x"]), min_size=4, max_size=4),
    )
    def test_random_four_point_maps(self, x, images):
        F = dict(zip(["0", "1", "inf", "x"], images))
        res = solve_thurston({"0": "0", "1": "1", "inf": "inf", "x": str(x)}, F)
        assert res.accepted and res.r_dyn < 1e-9 and res.r_crit < 1e-9
        assert res.configuration["0"].value == 0 and res.configuration["inf"].is_inf
        assert res.degree == 3 * 2**res.n
        assert multiplicity_plan(F, res.multiplicities, triple=res.triple, n=res.n, build_passport=False).realizable
