"""Command line: ``pcfdyn <subcommand> ...`` prints one JSON document.

Exit codes: 0 when the result is accepted, 2 for a correctly determined
negative answer (an escaping orbit, no exact route), 1 for errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable

from . import __version__
from ._validation import (
    check_label_map,
    check_labelled_points,
    check_point_set,
    check_polynomial,
    check_positive_int,
    check_precision,
    check_tolerance,
)
from .algsets import BelyiDegreeLimitError, belyi
from .numeric import DEFAULT_PRECISION
from .passports import (
    Constellation,
    Passport,
    RealizationError,
    extend_to_polynomial_passport,
    extend_to_rational_passport,
    from_cycles,
    is_polynomial_passport,
    mate,
    realize_polynomial_constellation,
)
from .postcritical import DEFAULT_BELYI_CAP, DEFAULT_BUDGET, NoExactRouteError, construct_postcritical, postcritical_orbit
from .schema import OUTCOMES, RunManifest, envelope, input_digest

__all__ = ["main", "build_parser"]


class UsageError(ValueError):
    """Bad command-line syntax; reported through the error envelope."""


class _Parser(argparse.ArgumentParser):
    # exit code 2 means a verified negative answer, so usage errors must not use it
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Negative(Exception):
    """A verified negative answer; carries the JSON payload."""

    def __init__(self, payload: dict):
        super().__init__("negative result")
        self.payload = payload


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad {what} JSON at position {exc.pos}: {exc.msg}") from None


def _accept(payload: dict, verdict: bool) -> tuple[dict, str]:
    return payload, "accepted" if verdict else "error"


# ---------------------------------------------------------------------------
# subcommands: each returns (payload, outcome)


def cmd_belyi(a) -> tuple[dict, str]:
    X = check_point_set(a.set)
    cert = belyi(X, max_degree=check_positive_int(a.max_degree, "--max-degree"))
    return _accept({"set": X.to_json(), **cert.to_json()}, cert.verdict)


def cmd_construct(a) -> tuple[dict, str]:
    X = check_point_set(a.set)
    try:
        pc = construct_postcritical(X, tier=a.tier, precision=a.precision_bits, belyi_cap=a.belyi_cap)
    except NoExactRouteError as exc:
        raise Negative({"set": X.to_json(), "tier": a.tier, "finding": str(exc)}) from None
    out = pc.to_json()
    if pc.f is not None:
        orbit = postcritical_orbit(pc.f, a.budget)
        out["orbit"] = orbit.to_json()
        expected = X.finite_part()
        out["orbit_matches_set"] = bool(orbit.finite and orbit.postcritical == expected)
        return _accept(out, pc.verdict and out["orbit_matches_set"])
    return _accept(out, pc.verdict)


def cmd_orbit(a) -> tuple[dict, str]:
    f = check_polynomial(a.poly)
    rep = postcritical_orbit(f, check_positive_int(a.budget, "--budget"))
    out = {"poly": a.poly, **rep.to_json()}
    if not rep.finite:
        raise Negative(out)
    return out, "accepted"


def _parse_constellation(obj) -> Constellation:
    if not isinstance(obj, dict) or "degree" not in obj or "permutations" not in obj:
        raise ValueError("constellation JSON needs 'degree' and 'permutations'")
    d = check_positive_int(obj["degree"], "degree")
    perms = tuple(from_cycles(c, d, one_based=True) for c in obj["permutations"])
    return Constellation(d, perms)


def cmd_passport(a) -> tuple[dict, str]:
    if a.action == "extend":
        parts = _json_arg(a.parts, "--parts")
        if a.target == "polynomial":
            P = extend_to_polynomial_passport(parts)
            return _accept({"input": parts, "passport": P.to_json(), "degree": P.degree}, is_polynomial_passport(P))
        R = extend_to_rational_passport(parts)
        return _accept({"input": parts, "realization": R.to_json()}, True)
    if a.action == "realize":
        P = Passport(tuple(tuple(p) for p in _json_arg(a.passport, "--passport")))
        C = realize_polynomial_constellation(P)
        ok = C.product_is_standard_cycle() and C.is_transitive() and C.passport() == P
        return _accept({"constellation": C.to_json(), "product_is_standard_cycle": C.product_is_standard_cycle()}, ok)
    if a.action == "mate":
        A = _parse_constellation(_json_arg(a.a, "--a"))
        B = _parse_constellation(_json_arg(a.b, "--b"))
        M = mate(A, B)
        ok = M.product_is_identity() and M.is_transitive() and M.genus_from_c() == 0
        return _accept({"constellation": M.to_json(), "genus": M.genus_from_c()}, ok)
    from .dessins import build_dessin

    parts = _json_arg(a.parts, "--parts")
    if len(parts) != 3:
        raise ValueError("dessin needs exactly three partitions")
    D = build_dessin(*parts)
    return _accept({"input": parts, "dessin": D.to_json()}, True)


def cmd_thurston(a) -> tuple[dict, str]:
    from .thurston import Configuration, MarkedSelfMap, ThurstonOptions, multiplicity_plan, solve_thurston

    points = check_labelled_points(a.points)
    F = check_label_map(a.map, points, "--map")
    M = None
    if a.mults:
        M = {k: int(v) for k, v in check_label_map(a.mults, points, "--mults").items()}
    opts = ThurstonOptions(
        precision=a.precision_bits,
        tol=check_tolerance(a.tol),
        delta0=float(a.delta0),
        max_iters=check_positive_int(a.max_iters, "--max-iters"),
        n_start=a.seed_n,
    )
    X = Configuration(points)
    marked = MarkedSelfMap(F, M)
    out: dict[str, Any] = {}
    if M is not None and len(marked) >= 3:
        _, _, triple = X.normalized()
        plan = multiplicity_plan(marked, M, triple=triple)
        out["multiplicity_plan"] = plan.to_json()
        if not plan.realizable:
            raise Negative(out)
    res = solve_thurston(X, marked, opts)
    out.update(res.to_json())
    return _accept(out, res.accepted)


def cmd_table(a) -> tuple[dict, str]:
    from .thurston import TABLE, functional_graph, verify_table_case

    ids = list(TABLE) if a.case.lower() == "all" else [a.case.upper()]
    cases, ok = {}, True
    for cid in ids:
        if cid not in TABLE:
            raise ValueError(f"unknown table case {cid!r}; expected one of A..G or 'all'")
        cert = verify_table_case(cid)
        graph = functional_graph(TABLE[cid].map)

        def fmt(p):
            return "inf" if p is None else str(p)

        cases[cid] = {
            "formula": TABLE[cid].formula,
            "field": TABLE[cid].field,
            "postcritical_set": [fmt(p) for p in graph],
            "graph": {fmt(p): fmt(q) for p, q in graph.items()},
            "certificate": cert.to_json(),
        }
        ok = ok and cert.verdict
    return _accept({"cases": cases}, ok)


def cmd_hpoly(a) -> tuple[dict, str]:
    from .thurston import h_poly_for_set

    X = check_point_set(a.set)
    res = h_poly_for_set(X, precision=a.precision_bits)
    return _accept(res.to_json(), res.verdict)


COMMANDS: dict[str, Callable] = {
    "belyi": cmd_belyi,
    "construct": cmd_construct,
    "orbit": cmd_orbit,
    "passport": cmd_passport,
    "thurston": cmd_thurston,
    "table": cmd_table,
    "hpoly": cmd_hpoly,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION)

    p = _Parser(prog="pcfdyn", description="Postcritically finite maps with prescribed data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("belyi", parents=[common], help="Belyi polynomial for a finite algebraic set")
    s.add_argument("--set", required=True, help='set JSON, e.g. {"points":["0","1","1/3"]}')
    s.add_argument("--max-degree", type=int, default=20000)

    s = sub.add_parser("construct", parents=[common], help="polynomial with prescribed postcritical set")
    s.add_argument("--set", required=True, help="set JSON; must contain infinity")
    s.add_argument("--tier", choices=("exact", "auto"), default="auto")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--belyi-cap", type=int, default=DEFAULT_BELYI_CAP)

    s = sub.add_parser("orbit", parents=[common], help="exact postcritical orbit of a polynomial")
    s.add_argument("--poly", required=True, help='coefficients lowest degree first, e.g. "1,0,1" (use --poly=-2,0,1 for a leading minus)')
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    s = sub.add_parser("passport", parents=[common], help="passport extension and realization")
    s.add_argument("action", choices=("extend", "realize", "mate", "dessin"))
    s.add_argument("--parts", help="partitions JSON, e.g. [[2],[2],[2]]")
    s.add_argument("--target", choices=("polynomial", "rational"), default="polynomial")
    s.add_argument("--passport", help="polynomial passport JSON for realize")
    s.add_argument("--a", help="constellation JSON for mate")
    s.add_argument("--b", help="constellation JSON for mate")

    s = sub.add_parser("thurston", parents=[common], help="realize a marked self-map by pullback")
    s.add_argument("--points", required=True, help='JSON array or object, e.g. ["0","1","inf","1/9"]')
    s.add_argument("--map", required=True, help='label map "0:1,1:2,..."')
    s.add_argument("--mults", default=None, help='local degrees "0:2,..." (default unconstrained)')
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--delta0", type=float, default=0.25)
    s.add_argument("--max-iters", type=int, default=400)
    s.add_argument("--seed-n", type=int, default=None)

    s = sub.add_parser("table", parents=[common], help="verify the three-point fixtures A..G")
    s.add_argument("--case", default="all")

    s = sub.add_parser("hpoly", parents=[common], help="polynomial h with |P_0(h)| = 2 and X in J(h)")
    s.add_argument("--set", required=True)
    return p


def _required(a) -> None:
    need = {
        "extend": ("parts",),
        "dessin": ("parts",),
        "realize": ("passport",),
        "mate": ("a", "b"),
    }
    if a.command == "passport":
        for name in need[a.action]:
            if getattr(a, name) is None:
                raise ValueError(f"passport {a.action} needs --{name}")


def _options(a) -> dict:
    skip = {"command", "output", "set", "poly", "parts", "passport", "a", "b", "points", "map", "mults"}
    return {k: v for k, v in sorted(vars(a).items()) if k not in skip}


def _inputs(a) -> dict:
    keys = ("set", "poly", "parts", "passport", "a", "b", "points", "map", "mults", "action", "case")
    return {k: getattr(a, k) for k in keys if getattr(a, k, None) is not None}


def _render_text(doc: dict) -> str:
    lines = [f"{doc['subcommand']}: {doc['manifest']['outcome']}"]

    def walk(obj, prefix=""):
        if isinstance(obj, dict):
            if "statement" in obj and "verdict" in obj:
                mark = "PASS" if obj["verdict"] else "FAIL"
                extra = f", residual {obj['residual']:.3e}" if obj.get("residual") is not None else ""
                lines.append(f"  [{mark}] {obj['statement']} ({obj['method']}{extra})")
                return
            for k, v in obj.items():
                walk(v, f"{prefix}{k}.")
        elif isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
            for x in obj:
                walk(x, prefix)
        else:
            text = json.dumps(obj)
            if len(text) > 100:
                text = text[:97] + "..."
            lines.append(f"  {prefix[:-1]} = {text}")

    walk(doc.get("result", doc.get("error")))
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        argv = sys.argv[1:] if argv is None else list(argv)
        command = next((t for t in argv if t in COMMANDS), "usage")
        manifest = RunManifest(command, input_digest({"argv": argv}), {}, __version__, "error", OUTCOMES["error"])
        doc = envelope(command, manifest, error={"type": "UsageError", "message": str(exc)})
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return manifest.exit_code
    payload, error = None, None
    try:
        a.precision_bits = check_precision(a.precision_bits)
        _required(a)
        payload, outcome = COMMANDS[a.command](a)
        if outcome == "error":
            error = {"type": "RejectedCertificate", "message": "a certificate claim failed", "result": payload}
    except Negative as neg:
        payload, outcome = neg.payload, "negative"
    except (ValueError, TypeError, ArithmeticError, RealizationError, RuntimeError, BelyiDegreeLimitError) as exc:
        outcome, error = "error", {"type": type(exc).__name__, "message": str(exc)}
    manifest = RunManifest(
        subcommand=a.command,
        input_digest=input_digest(_inputs(a)),
        options=_options(a),
        artifact_version=__version__,
        outcome=outcome,
        exit_code=OUTCOMES[outcome],
    )
    doc = envelope(a.command, manifest, payload if error is None else None, error)
    if a.output == "json":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(_render_text(doc) + "\n")
    return manifest.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
