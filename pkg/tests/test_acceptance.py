"""Acceptance criteria, one check per criterion.

Each check records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see conftest.py) and when this file is run as a script.
"""
import random
import signal
import time
from fractions import Fraction as Q
from itertools import combinations_with_replacement

import mpmath
import pytest

from pcfdyn.algsets import (
    BelyiDegreeLimitError,
    FiniteAlgebraicSet,
    belyi,
    critical_points_set,
    critical_values_set,
    forward_invariant,
    subset_of,
)
from pcfdyn.exact.ratpoly import RatPoly, poly_gcd
from pcfdyn.passports import (
    Constellation,
    Passport,
    c_value,
    extend_to_polynomial_passport,
    extend_to_rational_passport,
    is_polynomial_passport,
    passport_extends,
    realize_polynomial_constellation,
)
from pcfdyn.dessins import dessin_invariants
from pcfdyn.postcritical import construct_postcritical, postcritical_orbit
from pcfdyn.thurston import TABLE, functional_graph, h_orbit, h_poly_for_set, hn_critical_values, solve_thurston
from pcfdyn.thurston import ThurstonOptions, verify_table_case

RESULTS: dict[int, tuple[bool, str]] = {}
STATEMENTS = {
    1: "Belyi maps are exact for fixed and 200 random rational sets",
    2: "PCF polynomial construction end to end",
    3: "passport extension, rational realization and backtracking suite",
    4: "Thurston solver on {0,1,inf,1/9}",
    5: "table fixtures A..G",
    6: "h = (2/z-1)^2 sanity",
    7: "h polynomial with two-point postcritical set",
}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)


def summary_lines() -> list[str]:
    out = []
    for n in sorted(STATEMENTS):
        if n not in RESULTS:
            continue
        ok, detail = RESULTS[n]
        out.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {STATEMENTS[n]} ({detail})")
    return out


def rand_rational(rng: random.Random, height: int) -> Q:
    while True:
        q = Q(rng.randint(-height, height), rng.randint(1, height))
        if max(abs(q.numerator), q.denominator) <= height:
            return q


def rand_set(rng, size_max, height):
    pts = set()
    k = rng.randint(1, size_max)
    while len(pts) < k:
        pts.add(rand_rational(rng, height))
    return sorted(pts)


class _Timeout(Exception):
    pass


def _alarm(*_):
    raise _Timeout


def with_deadline(seconds, fn, *args):
    old = signal.signal(signal.SIGALRM, _alarm)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        return fn(*args)
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def belyi_exact(S: FiniteAlgebraicSet) -> bool:
    """beta(X) in {0,1} and V_0(beta) in {0,1}, both as polynomial divisibility."""
    beta = belyi(S).beta
    target = beta * (beta - 1)
    if not S.defining.divides(target):
        return False
    d1 = beta.derivative()
    if d1.is_constant():
        return True
    squarefree = d1.exact_div(poly_gcd(d1, d1.derivative()))
    return squarefree.divides(target)


def test_criterion_1_belyi():
    fixed = [FiniteAlgebraicSet.from_points([0, 1, Q(1, 3)]), FiniteAlgebraicSet.from_defining(RatPoly([-2, 0, 1]))]
    fixed_ok = all(belyi_exact(S) for S in fixed)
    rng = random.Random(20261018)
    tally = {"ok": 0, "wrong": 0, "cap": 0, "slow": 0}
    for _ in range(200):
        S = FiniteAlgebraicSet.from_points(rand_set(rng, 5, 50))
        t0 = time.perf_counter()
        try:
            ok = with_deadline(5.0, belyi_exact, S)
        except BelyiDegreeLimitError:
            tally["cap"] += 1
            continue
        except _Timeout:
            tally["slow"] += 1
            continue
        if not ok:
            tally["wrong"] += 1
        elif time.perf_counter() - t0 >= 5.0:
            tally["slow"] += 1
        else:
            tally["ok"] += 1
    detail = f"fixed sets {'ok' if fixed_ok else 'wrong'}; random {tally['ok']}/200 within 5 s, {tally['cap']} over degree cap, {tally['slow']} over time, {tally['wrong']} wrong"
    record(1, fixed_ok and tally["ok"] == 200, detail)
    assert fixed_ok and tally["wrong"] == 0
    assert tally["ok"] == 200, detail


def pcf_claims_hold(points) -> tuple[bool, str]:
    X = FiniteAlgebraicSet.from_points(points, True)
    res = construct_postcritical(X, precision=256)
    if not res.verdict:
        return False, res.path
    finite = X.finite_part()
    if res.f is None:
        ok = all(c.residual < 1e-30 for c in res.certificate.claims if c.method == "numeric")
        return ok, "numeric"
    f = res.f
    ok = critical_values_set(f) == finite and forward_invariant(finite, f) and subset_of(finite, critical_points_set(f))
    rep = postcritical_orbit(f)
    return ok and rep.finite and rep.postcritical == finite, "exact"


def test_criterion_2_pcf_polynomials():
    ok, path = pcf_claims_hold([-2, 2])
    good, paths = int(ok and path == "exact"), {"exact": 0, "numeric": 0}
    rng = random.Random(7)
    for _ in range(50):
        ok, path = pcf_claims_hold(rand_set(rng, 3, 10))
        good += ok
        paths[path] = paths.get(path, 0) + 1
    detail = f"{good}/51 sets, paths exact={paths['exact']} numeric={paths['numeric']}, height <= 10"
    record(2, good == 51, detail)
    assert good == 51, detail


def polynomial_passports(d):
    """All passports of degree d with c = d - 1 (multisets of nontrivial partitions)."""
    parts = [p for p in partitions(d) if len(p) < d]
    weight = {p: d - len(p) for p in parts}
    out = []

    def go(start, left, acc):
        if left == 0:
            out.append(tuple(acc))
            return
        for i in range(start, len(parts)):
            if weight[parts[i]] <= left:
                go(i, left - weight[parts[i]], acc + [parts[i]])

    go(0, d - 1, [])
    return out


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def euler_genus_zero(perms, d):
    c = sum(d - cycle_count(p) for p in perms)
    return c == 2 * d - 2


def cycle_count(p):
    seen, count = set(), 0
    for s in range(len(p)):
        if s in seen:
            continue
        count += 1
        x = s
        while x not in seen:
            seen.add(x)
            x = p[x]
    return count


def product_identity(perms, d):
    prod = list(range(d))
    for p in perms:
        prod = [prod[p[x]] for x in range(d)]
    return prod == list(range(d))


def test_criterion_3_passports():
    rng = random.Random(3)
    bad = []
    for _ in range(100):
        n = rng.randint(2, 5)
        parts = [tuple(sorted((rng.randint(1, 6) for _ in range(rng.randint(1, 3))), reverse=True)) for _ in range(n)]
        parts = [p if any(x > 1 for x in p) else (2,) + p[1:] for p in parts]
        P = extend_to_polynomial_passport(parts)
        if not (passport_extends(P, parts) and c_value(P) == P.degree - 1):
            bad.append(("poly", parts))
        if n >= 3:
            R = extend_to_rational_passport(parts)
            if isinstance(R, Constellation):
                d = R.degree
                ok = product_identity(R.perms, d) and R.is_transitive() and euler_genus_zero(R.perms, d)
                RP = R.passport()
            else:
                genus, connected, RP = dessin_invariants(R)
                ok = genus == 0 and connected
                RP = Passport(tuple(RP))
            if not (ok and passport_extends(RP, parts) and c_value(RP) == 2 * RP.degree - 2):
                bad.append(("rational", parts))
    t0 = time.perf_counter()
    count = 0
    for d in range(2, 11):
        for partitions_ in polynomial_passports(d):
            P = Passport(partitions_)
            assert is_polynomial_passport(P)
            C = realize_polynomial_constellation(P)
            if not (C.product_is_standard_cycle() and C.is_transitive() and C.passport() == P):
                bad.append(("realize", partitions_))
            count += 1
    elapsed = time.perf_counter() - t0
    detail = f"100 collections, {count} polynomial passports with d <= 10 realized in {elapsed:.2f} s, {len(bad)} failures"
    record(3, not bad and elapsed < 60, detail)
    assert not bad and elapsed < 60, detail


FOUR = {"0": "0", "1": "1", "inf": "inf", "x": "1/9"}
FOUR_MAPS = {
    "identity": {"0": "0", "1": "1", "inf": "inf", "x": "x"},
    "four-cycle": {"0": "1", "1": "x", "x": "inf", "inf": "0"},
    "constant": {"0": "0", "1": "0", "inf": "0", "x": "0"},
}


def test_criterion_4_thurston():
    notes, ok_all = [], True
    for name, F in FOUR_MAPS.items():
        t0 = time.perf_counter()
        res = solve_thurston(FOUR, F, ThurstonOptions(precision=256))
        lam, eps, K = res.lambda_hat, res.epsilon, res.envelope_constant
        envelope = all(dd <= K * eps * lam**i * (1 + 1e-9) for i, dd in enumerate(res.trace))
        deg = res.degree
        ok = (
            res.accepted
            and res.r_dyn < 1e-9
            and res.r_crit < 1e-9
            and len(res.configuration) == 4
            and lam < 1
            and envelope
            and deg == 3 * 2**res.n
            and int(deg**0.5) ** 2 != deg
            and time.perf_counter() - t0 < 600
        )
        ok_all &= ok
        notes.append(f"{name}: n={res.n} lambda={lam:.3g} r_dyn={res.r_dyn:.1e}")
    record(4, ok_all, "; ".join(notes))
    assert ok_all


EXPECTED_GRAPHS = {
    "A": {Q(0): None, None: Q(1), Q(1): Q(0)},
    "E": {Q(-1): Q(0), Q(0): Q(-1), None: None},
    "G": {Q(-2): Q(2), Q(2): Q(2), None: None},
}


def test_criterion_5_table():
    failed = []
    for cid in TABLE:
        cert = verify_table_case(cid)
        graph = functional_graph(TABLE[cid].map)
        if not (cert.verdict and len(graph) == 3):
            failed.append(cid)
        if cid in EXPECTED_GRAPHS and graph != EXPECTED_GRAPHS[cid]:
            failed.append(cid)
    exact_field = TABLE["B"].field == "Q(alpha)"
    detail = f"{len(TABLE) - len(set(failed))}/7 fixtures verified, B over {TABLE['B'].field}"
    record(5, not failed and exact_field and len(TABLE) == 7, detail)
    assert not failed and exact_field


def h_exact(z):
    if z is None:
        return Q(1)
    if z == 0:
        return None
    return (Q(2) / z - 1) ** 2


def test_criterion_6_h():
    orbit_ok = h_orbit() == [2, 0, None, 1, 1] and [h_exact(z) for z in (Q(2), Q(0), None, Q(1))] == [0, None, 1, 1]
    # critical points of h are 2 and 0, so the postcritical set is the orbit of 0 and infinity
    pc, frontier = set(), [Q(0), None]
    while frontier:
        z = frontier.pop()
        if z not in pc:
            pc.add(z)
            frontier.append(h_exact(z))
    iterates = all(hn_critical_values(n) == ([0, 1], True) for n in (2, 3, 4))
    ok = orbit_ok and pc == {Q(0), Q(1), None} and iterates
    record(6, ok, "orbit 2->0->inf->1->1 exact; V(h^n) = {0,1,inf} for n = 2,3,4")
    assert ok


def hpoly_exact_checks(points) -> tuple[bool, bool]:
    res = h_poly_for_set(FiniteAlgebraicSet.from_points(points))
    if not res.exact:
        return res.verdict, False
    h, a, b = res.h, res.a, res.b
    crit = critical_points_set(h)
    ok = (
        critical_values_set(h) == FiniteAlgebraicSet.from_points([a, b])
        and h(a) in (a, b)
        and h(b) in (a, b)
        and all(h(p) in (a, b) for p in points)
        and not subset_of(FiniteAlgebraicSet.from_points([a]), crit)
        and not subset_of(FiniteAlgebraicSet.from_points([b]), crit)
    )
    return ok, True


def test_criterion_7_hpoly():
    res = h_poly_for_set(FiniteAlgebraicSet.from_points([Q(1, 3)]))
    h = res.h
    frozen = (
        res.exact
        and h == RatPoly([0, 9, -18, 9])
        and (h(0), h(Q(4, 3)), h(Q(1, 3))) == (0, Q(4, 3), Q(4, 3))
        and critical_values_set(h) == FiniteAlgebraicSet.from_points([0, Q(4, 3)])
        and critical_points_set(h) == FiniteAlgebraicSet.from_points([Q(1, 3), 1])
    )
    rng = random.Random(11)
    good = exact = 0
    for _ in range(50):
        pts = rand_set(rng, 2, 20)
        ok, was_exact = hpoly_exact_checks(pts)
        good += ok
        exact += was_exact
    detail = f"1/3 facts {'exact' if frozen else 'wrong'}; {good}/50 random sets pass ({exact} exact, {50 - exact} numeric)"
    record(7, frozen and good == 50, detail)
    assert frozen and good == 50, detail


if __name__ == "__main__":
    mpmath.mp.prec = 256
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(summary_lines()))
