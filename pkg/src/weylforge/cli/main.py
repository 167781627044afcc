"""Command line entry point.

Exit codes: 0 for success or a true verdict, 1 for a false verdict, 2 for a
usage or parse error, 3 when a search cap or degree bound was hit and the
answer is unknown.  Every command accepts ``--json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .. import corpus
from ..algebra import WEYL, Signature, commutator, is_central, mass
from ..coeffring import CPoly
from ..dixmier import (
    FAMILIES, build_identity_battery, check_dixmier_pair, check_skew_tuple, decompose_pair,
    family_instantiate, skew_completion_tuple, solve_skew_completion,
)
from ..matrixalg import (
    Inapplicable, NCMatrix, NotFoundWithinBounds, build_condition_iii_matrix, left_inverse_ansatz,
    recover_generators,
)
from ..morphism import (
    ElementaryWord, Endomorphism, IllDefinedEndomorphism, endo_apply, endo_check, endo_compose,
    endo_invert_ansatz, solve_factorization_params, table1_word, table2_word, verify_factorization,
    word_evaluate,
)
from ..systems import (
    DEGLEX, LEX, CapReached, EqSystem, caps_from_env, generate_dixmier_system, generate_skew_system,
    groebner_basis, linear_solve_exact,
)
from .parser import ParseError, parse_coefficient, parse_expression
from .printer import format_canonical, format_coefficient

TRUE, FALSE, USAGE, UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument helpers -------------------------------------------------------

def _signature(args) -> Signature:
    spec = getattr(args, "algebra", "weyl") or "weyl"
    if spec == "weyl":
        if getattr(args, "d", None):
            raise UsageError("--d only applies to csd algebras")
        return WEYL
    if not spec.startswith("csd"):
        raise UsageError(f"unknown algebra {spec!r}; use 'weyl' or 'csdN'")
    try:
        n = int(spec[3:])
    except ValueError as exc:
        raise UsageError(f"bad algebra {spec!r}") from exc
    if n < 2:
        raise UsageError("csdN needs N >= 2")
    if getattr(args, "d", None):
        values = [parse_coefficient(v) for v in args.d.split(",")]
        return Signature.csd(n, values)
    return Signature.csd(n)


def _poly(text: str, sig: Signature):
    return parse_expression(text, sig)


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _matrix(text: str, sig: Signature) -> NCMatrix:
    rows = [r for r in text.split(";")]
    return NCMatrix([[_poly(e, sig) for e in row.split(",")] for row in rows], sig)


def _params(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise UsageError(f"parameters look like name=value, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = parse_coefficient(value)
    return out


def _endo(images: Sequence[str] | None, sig: Signature, flag: str = "--image") -> Endomorphism:
    if not images:
        raise UsageError(f"give one {flag} per generator")
    if len(images) != sig.n:
        raise UsageError(f"{sig.n} generators need {sig.n} {flag} values, got {len(images)}")
    return Endomorphism(sig, [_poly(t, sig) for t in images])


def _fmt_map(e: Endomorphism) -> dict:
    return {name: format_canonical(img) for name, img in zip(e.sig.names, e.images)}


def _fmt_assumptions(assumptions) -> list[str]:
    return sorted(format_coefficient(a) for a in assumptions)


def _fmt_matrix(M: NCMatrix) -> list[list[str]]:
    return [[format_canonical(e) for e in row] for row in M.entries]


# -- commands ---------------------------------------------------------------
# Each command returns (exit code, json payload, text lines).

def cmd_verify_pair(args):
    p, q = _poly(args.p, WEYL), _poly(args.q, WEYL)
    c = commutator(q, p)
    ok = check_dixmier_pair(p, q)
    residual = f"[q,p] = {format_canonical(c)}"
    lines = ["DIXMIER"] if ok else ["NOT DIXMIER", residual]
    return (TRUE if ok else FALSE), {"dixmier": ok, "commutator": format_canonical(c)}, lines


def cmd_commutator(args):
    sig = _signature(args)
    c = commutator(_poly(args.f, sig), _poly(args.g, sig))
    return TRUE, {"commutator": format_canonical(c)}, [format_canonical(c)]


def cmd_mass(args):
    m = mass(_poly(args.f, WEYL))
    return TRUE, {"mass": m}, [str(m)]


def cmd_is_central(args):
    sig = _signature(args)
    ok = is_central(_poly(args.f, sig))
    return (TRUE if ok else FALSE), {"central": ok}, ["CENTRAL" if ok else "NOT CENTRAL"]


def cmd_identities(args):
    p, q = _poly(args.p, WEYL), _poly(args.q, WEYL)
    battery = build_identity_battery(decompose_pair(p, q))
    texts = [format_coefficient(r) for r in battery.residuals]
    ok = battery.vanishes()
    lines = [f"identity {s}: {r}" for s, r in enumerate(texts)]
    lines.append("ALL VANISH" if ok else "NOT ALL VANISH")
    return (TRUE if ok else FALSE), {"residuals": texts, "vanish": ok}, lines


def cmd_verify_tuple(args):
    sig = _signature(args)
    polys = [_poly(t, sig) for t in args.poly or []]
    if len(polys) != sig.n:
        raise UsageError(f"{sig.n} generators need {sig.n} --poly values")
    ok = check_skew_tuple(polys, sig)
    return (TRUE if ok else FALSE), {"skew": ok}, ["SKEW DIXMIER" if ok else "NOT SKEW DIXMIER"]


def cmd_skew_system(args):
    sig = _signature(args)
    res = solve_skew_completion(sig)
    payload = {"outcome": res.outcome,
               "assignment": {k: format_coefficient(v) for k, v in res.assignment.items()},
               "assumptions": _fmt_assumptions(res.assumptions), "free": list(res.free)}
    if res.outcome != "assignment":
        return FALSE, payload, ["INCONSISTENT"]
    tuple_ = skew_completion_tuple(sig, res)
    payload["tuple"] = [format_canonical(f) for f in tuple_]
    lines = [f"{k} = {v}" for k, v in payload["assignment"].items()]
    lines += [f"p{i + 1} = {t}" for i, t in enumerate(payload["tuple"])]
    if payload["assumptions"]:
        lines.append("assuming nonzero: " + ", ".join(payload["assumptions"]))
    return TRUE, payload, lines


def _system_payload(catalog, system: EqSystem) -> dict:
    return {"unknowns": list(catalog), "equations": [format_coefficient(e) for e in system.equations]}


def cmd_gen_system(args):
    catalog, system = generate_dixmier_system(args.n, args.m)
    payload = _system_payload(catalog, system)
    return TRUE, payload, [f"{e} = 0" for e in payload["equations"]]


def cmd_gen_skew_system(args):
    sig = _signature(args)
    bounds = _ints(args.bounds)
    if len(bounds) == 1:
        bounds = bounds * sig.n
    catalog, system = generate_skew_system(sig, bounds)
    payload = _system_payload(catalog, system)
    return TRUE, payload, [f"{e} = 0" for e in payload["equations"]]


def cmd_solve_linear(args):
    eqs = [CPoly.coerce(parse_coefficient(e)) for e in args.eq or []]
    if not eqs:
        raise UsageError("give at least one --eq")
    unknowns = tuple(u.strip() for u in args.unknowns.split(","))
    res = linear_solve_exact(EqSystem(unknowns, tuple(eqs)))
    payload = {"outcome": res.outcome,
               "assignment": {k: format_coefficient(v) for k, v in res.assignment.items()},
               "assumptions": _fmt_assumptions(res.assumptions), "free": list(res.free)}
    if res.outcome != "assignment":
        return FALSE, payload, ["INCONSISTENT"]
    lines = [f"{k} = {v}" for k, v in payload["assignment"].items()]
    if res.free:
        lines.append("free: " + ", ".join(res.free))
    if payload["assumptions"]:
        lines.append("assuming nonzero: " + ", ".join(payload["assumptions"]))
    return TRUE, payload, lines


def cmd_groebner(args):
    gens = [CPoly.coerce(parse_coefficient(e)) for e in args.poly or []]
    if not gens:
        raise UsageError("give at least one --poly")
    variables = [v.strip() for v in args.vars.split(",")] if args.vars else None
    basis = groebner_basis(gens, args.order, caps_from_env(), variables=variables)
    if isinstance(basis, CapReached):
        return UNKNOWN, {"outcome": "unknown", "reason": basis.reason}, [f"UNKNOWN ({basis.reason})"]
    texts = [format_coefficient(b) for b in basis]
    return TRUE, {"outcome": "basis", "basis": texts}, texts


def cmd_endo_check(args):
    sig = _signature(args)
    ok = endo_check(_endo(args.image, sig))
    return (TRUE if ok else FALSE), {"well_defined": ok}, ["ENDOMORPHISM" if ok else "NOT WELL DEFINED"]


def cmd_endo_apply(args):
    sig = _signature(args)
    out = endo_apply(_endo(args.image, sig), _poly(args.f, sig))
    return TRUE, {"image": format_canonical(out)}, [format_canonical(out)]


def cmd_endo_compose(args):
    sig = _signature(args)
    out = endo_compose(_endo(args.outer, sig, "--outer"), _endo(args.inner, sig, "--inner"))
    images = _fmt_map(out)
    return TRUE, {"images": images}, [f"{k} -> {v}" for k, v in images.items()]


def cmd_endo_invert(args):
    sig = _signature(args)
    e = _endo(args.image, sig)
    bounds = _ints(args.bounds)
    if len(bounds) == 1:
        bounds = bounds * sig.n
    res = endo_invert_ansatz(e, bounds)
    if not res.found:
        return UNKNOWN, {"outcome": "not_found", "bounds": list(bounds)}, ["NOT FOUND WITHIN BOUNDS"]
    images = _fmt_map(res.inverse)
    payload = {"outcome": "found", "images": images, "assumptions": _fmt_assumptions(res.assumptions)}
    lines = [f"{k} -> {v}" for k, v in images.items()]
    if payload["assumptions"]:
        lines.append("assuming nonzero: " + ", ".join(payload["assumptions"]))
    return TRUE, payload, lines


def cmd_word_eval(args):
    e = word_evaluate(ElementaryWord.parse(args.word))
    images = _fmt_map(e)
    return TRUE, {"images": images}, [f"{k} -> {v}" for k, v in images.items()]


def cmd_verify_factorization(args):
    target = Endomorphism(WEYL, [_poly(args.p, WEYL), _poly(args.q, WEYL)])
    ok = verify_factorization(ElementaryWord.parse(args.word), target)
    return (TRUE if ok else FALSE), {"verified": ok}, ["FACTORIZATION VERIFIED" if ok else "FACTORIZATION FAILS"]


def cmd_solve_factorization(args):
    target = Endomorphism(WEYL, [_poly(args.p, WEYL), _poly(args.q, WEYL)])
    res = solve_factorization_params(ElementaryWord.parse(args.template), target, caps_from_env())
    payload = {"outcome": res.outcome,
               "assignment": {k: format_coefficient(v) for k, v in res.assignment.items()},
               "assumptions": _fmt_assumptions(res.assumptions), "free": list(res.free)}
    if res.outcome == "inconsistent":
        return FALSE, payload, ["INCONSISTENT"]
    if res.outcome == "unknown":
        return UNKNOWN, payload, ["UNKNOWN"]
    lines = [f"{k} = {v}" for k, v in payload["assignment"].items()]
    if res.free:
        lines.append("free: " + ", ".join(res.free))
    if payload["assumptions"]:
        lines.append("assuming nonzero: " + ", ".join(payload["assumptions"]))
    return TRUE, payload, lines


def cmd_cond3_matrix(args):
    M = build_condition_iii_matrix(_poly(args.p, WEYL), _poly(args.q, WEYL))
    if isinstance(M, Inapplicable):
        return FALSE, {"outcome": "inapplicable", "reason": M.reason}, [f"INAPPLICABLE: {M.reason}"]
    rows = _fmt_matrix(M)
    return TRUE, {"outcome": "matrix", "matrix": rows}, ["[" + ", ".join(r) + "]" for r in rows]


def cmd_left_inverse(args):
    sig = _signature(args)
    M = _matrix(args.matrix, sig)
    bounds = _ints(args.bounds)
    if len(bounds) == 1:
        bounds = bounds[0]
    N = left_inverse_ansatz(M, bounds)
    if isinstance(N, NotFoundWithinBounds):
        return UNKNOWN, {"outcome": "not_found"}, ["NOT FOUND WITHIN BOUNDS"]
    rows = _fmt_matrix(N)
    return TRUE, {"outcome": "found", "inverse": rows}, ["[" + ", ".join(r) + "]" for r in rows]


def cmd_recover_generators(args):
    p, q = _poly(args.p, WEYL), _poly(args.q, WEYL)
    N = _matrix(args.inverse, WEYL)
    try:
        first, second = recover_generators(p, q, N)
    except ValueError as exc:
        return FALSE, {"recovered": False, "reason": str(exc)}, [f"FAILED: {exc}"]
    (a, b), (c, d) = N.entries
    lines = [f"t = ({format_canonical(a)})*p + ({format_canonical(b)})*q",
             f"x = ({format_canonical(c)})*p + ({format_canonical(d)})*q"]
    return TRUE, {"recovered": True, "t": format_canonical(first), "x": format_canonical(second)}, lines


def cmd_family(args):
    params = _params(args.params)
    fdata = [parse_coefficient(v) for v in args.f.split(",")] if args.f else None
    p, q = family_instantiate(args.name, params, fdata, args.index)
    payload = {"p": format_canonical(p), "q": format_canonical(q)}
    lines = [f"p = {payload['p']}", f"q = {payload['q']}"]
    if args.name.startswith("table"):
        table, case = args.name.split(".case")
        build = table1_word if table == "table1" else table2_word
        word = build(int(case), args.index, params)
        payload["word"] = str(word)
        lines.append(f"word = {word}")
    return TRUE, payload, lines


def cmd_fixtures(args):
    records = corpus.load_corpus()
    if args.action == "list":
        ids = [r["id"] for r in records]
        return TRUE, {"ids": ids}, ids
    results = corpus.run_corpus(records, corrected=not args.printed, ids=args.id)
    if args.id and not results:
        raise UsageError("no fixture matches the given ids")
    ok = all(r.passed for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        extra = "" if r.passed else "  (" + ", ".join(r.failures()) + ")"
        lines.append(f"{status} {r.id}{extra}")
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} fixtures pass")
    return (TRUE if ok else FALSE), {"results": [r.to_json() for r in results], "passed": ok}, lines


# -- parser -----------------------------------------------------------------

def _add_algebra(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algebra", default="weyl", help="'weyl' (default) or 'csdN', e.g. csd3")
    p.add_argument("--d", help="comma-separated constants d12,d13,...,d(n-1)n for csdN")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylforge",
                                     description="Exact computations in A_1 and CSD_n.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_text: str, algebra: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if algebra:
            _add_algebra(p)
        p.set_defaults(func=fn)
        return p

    p = add("verify-pair", cmd_verify_pair, "check q p - p q = 1 in A_1")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("commutator", cmd_commutator, "[f, g] = f g - g f", algebra=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = add("mass", cmd_mass, "number of homogeneous components in A_1")
    p.add_argument("--f", required=True)

    p = add("is-central", cmd_is_central, "does f commute with every generator", algebra=True)
    p.add_argument("--f", required=True)

    p = add("identities", cmd_identities, "residuals of the identity battery of a pair")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("verify-tuple", cmd_verify_tuple, "check [p_j, p_i] = d_ij", algebra=True)
    p.add_argument("--poly", action="append", help="one per generator, in order")

    p = add("skew-system", cmd_skew_system, "solve the linear completion of x_1..x_(n-1)", algebra=True)

    p = add("gen-system", cmd_gen_system, "equations for a generic pair of bidegree (n, m)")
    p.add_argument("--n", type=int, required=True, help="degree bound in x")
    p.add_argument("--m", type=int, required=True, help="degree bound in t")

    p = add("gen-skew-system", cmd_gen_skew_system, "equations for a generic skew tuple", algebra=True)
    p.add_argument("--bounds", default="1", help="per-variable degree caps, e.g. 1,1,1")

    p = add("solve-linear", cmd_solve_linear, "exact solution of linear equations")
    p.add_argument("--eq", action="append", help="an expression required to vanish")
    p.add_argument("--unknowns", required=True, help="comma-separated unknowns")

    p = add("groebner", cmd_groebner, "reduced Groebner basis over Q")
    p.add_argument("--poly", action="append")
    p.add_argument("--order", choices=[LEX, DEGLEX], default=LEX)
    p.add_argument("--vars", help="variable order, largest first")

    p = add("endo-check", cmd_endo_check, "do the images respect the relations", algebra=True)
    p.add_argument("--image", action="append")

    p = add("endo-apply", cmd_endo_apply, "apply an endomorphism to f", algebra=True)
    p.add_argument("--image", action="append")
    p.add_argument("--f", required=True)

    p = add("endo-compose", cmd_endo_compose, "outer o inner", algebra=True)
    p.add_argument("--outer", action="append")
    p.add_argument("--inner", action="append")

    p = add("endo-invert", cmd_endo_invert, "bounded search for an inverse", algebra=True)
    p.add_argument("--image", action="append")
    p.add_argument("--bounds", default="1", help="per-variable degree caps")

    p = add("word-eval", cmd_word_eval, "evaluate a word in Phi/Psi letters")
    p.add_argument("--word", required=True)

    p = add("verify-factorization", cmd_verify_factorization, "does the word evaluate to (p, q)")
    p.add_argument("--word", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("solve-factorization", cmd_solve_factorization, "solve for symbolic word coefficients")
    p.add_argument("--template", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("cond3-matrix", cmd_cond3_matrix, "the 2x2 matrix expressing (p, q) through (t, x)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = add("left-inverse", cmd_left_inverse, "bounded search for a matrix inverse", algebra=True)
    p.add_argument("--matrix", required=True, help="rows separated by ';', entries by ','")
    p.add_argument("--bounds", default="1")

    p = add("recover-generators", cmd_recover_generators, "express t and x through p and q")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--inverse", required=True, help="rows separated by ';', entries by ','")

    p = add("family", cmd_family, "instantiate a closed-form family")
    p.add_argument("--name", required=True, choices=FAMILIES)
    p.add_argument("--params", help="name=value pairs, e.g. l0=1,l1=2/3")
    p.add_argument("--index", type=int, help="m for table1.*, n for table2.*")
    p.add_argument("--f", help="coefficients of the free polynomial, constant term first")

    p = add("fixtures", cmd_fixtures, "list or run the shipped fixture corpus")
    p.add_argument("action", choices=["run", "list"])
    p.add_argument("--id", action="append", help="restrict to these fixture ids")
    p.add_argument("--printed", action="store_true", help="skip the recorded corrections")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else TRUE
    try:
        code, payload, lines = args.func(args)
    except (ParseError, UsageError, KeyError, ValueError, ZeroDivisionError, IllDefinedEndomorphism) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        if getattr(args, "json", False):
            print(json.dumps({"error": message}, sort_keys=True))
        else:
            print(f"error: {message}", file=sys.stderr)
        return USAGE
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
