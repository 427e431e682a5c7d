"""Command-line front end: build, cover, invariants, verify."""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from . import algc
from .cover import SLICE_CLAIMS, Ledger, ScriptError, _as_half_integer, load_script, run_script
from .fox import alexander_from_diagram
from .knots import KNOTS, knot_by_name
from .linkdiag import (DiagramError, OrientedDiagram, certified_names, jones_coefficients, linking_matrix,
                       sublink)
from .satellite import apply_pattern, bing_double_n, bing_double_n_infected, parallel_copies, pattern_by_name
from .scenarios import SCENARIOS, fixture_script, fixture_script_names, run_scenario

SCHEMA_VERSION = 1

MATRICES = {
    "unknot": algc.SeifertMatrix([]),
    "trefoil": algc.TREFOIL,
    "figure8": algc.FIGURE8,
    "metabolic": algc.METABOLIC_P2,
}


def _dump(obj: Any, path: Optional[str]) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed JSON ({exc})") from None


def load_diagram(path: str) -> OrientedDiagram:
    data = _read_json(path)
    if "diagram" in data and "crossings" not in data:
        data = data["diagram"]
    try:
        return OrientedDiagram.from_json(data)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a diagram file ({exc})") from None


def _component(d: OrientedDiagram, tok: str):
    return int(tok) - 1 if tok.isdigit() else tok


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    if args.knot and args.diagram:
        raise ValueError("give either --knot or --diagram")
    d = load_diagram(args.diagram) if args.diagram else knot_by_name(args.knot or "unknot")
    if args.bing:
        if d.n_components != 1:
            raise ValueError("--bing needs a knot")
        d = bing_double_n_infected(d, args.bing) if args.route == "infection" else bing_double_n(d, args.bing)
    for spec in args.pattern or []:
        comp, _, name = spec.partition(":")
        d = apply_pattern(d, _component(d, comp), pattern_by_name(name))
    for spec in args.parallel or []:
        comp, _, m = spec.partition(":")
        d = parallel_copies(d, _component(d, comp), int(m))
    _dump(d.to_json(), args.output)
    return 0


# ---------------------------------------------------------------------------
# cover
# ---------------------------------------------------------------------------

def _script(arg: str):
    if os.path.exists(arg):
        return load_script(arg)
    if arg in fixture_script_names():
        return fixture_script(arg)
    raise ValueError(f"no script file {arg!r} and no fixture of that name; fixtures: {fixture_script_names()}")


def cmd_cover(args) -> int:
    d = load_diagram(args.diagram)
    script = _script(args.script)
    claims = script.input_ledger()
    for item in args.assume or []:
        key, _, val = item.partition("=")
        if key == "solvable":
            f = _as_half_integer(val)
            claims = Ledger(claims.height, claims.sliceness, f, f)
        elif key == "slice":
            if val not in SLICE_CLAIMS:
                raise ValueError(f"unknown slice claim {val!r}; choose from {list(SLICE_CLAIMS)}")
            claims = Ledger(claims.height, val, claims.solvability, claims.input_solvability)
        else:
            raise ValueError(f"unknown assumption {key!r}; use solvable=<x> or slice=<claim>")
    out, ledger = run_script(d, script, claims=claims)
    if args.output:
        _dump(out.to_json(), args.output)
    report = {
        "schema_version": SCHEMA_VERSION,
        "script": script.dumps().splitlines(),
        "ledger": ledger.to_json(),
        "output": {"components": list(out.names), "crossings": out.n_crossings,
                   "certified": certified_names(out)},
    }
    _dump(report, args.report)
    return 0


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def _guard(fn, *a, **kw) -> Dict[str, Any]:
    """Run one invariant, turning refusals into an ``error`` entry."""
    try:
        return {"value": fn(*a, **kw)}
    except (DiagramError, algc.CapExceeded, ValueError) as exc:
        return {"error": str(exc)}


def algebraic_report(a: algc.SeifertMatrix, expression: Optional[str] = None) -> Dict[str, Any]:
    sf = algc.signature_function(a)
    try:
        sigma = sf.value_at(0.5)
    except algc.JumpPointError:
        sigma = None
    out: Dict[str, Any] = {
        "seifert_matrix": a.to_json(),
        "alexander": algc.alexander(a).format(),
        "signature_function": sf.to_json(),
        "signature_at_minus_one": sigma,
        "rho0": sf.integral().to_json(),
        "obstructions": algc.obstruction_report(a).to_json(),
    }
    if expression:
        out["expression"] = algc.eval_expression(expression, {"A": a}).to_json()
    return out


def diagram_report(d: OrientedDiagram, expression: Optional[str] = None) -> Dict[str, Any]:
    lm = linking_matrix(d)
    out: Dict[str, Any] = {
        "components": list(d.names),
        "crossings": d.n_crossings,
        "linking_matrix": lm.tolist(),
        "alexander": {n: alexander_from_diagram(sublink(d, [n], record=False)).format() for n in d.names},
        "jones": _guard(jones_coefficients, d),
    }
    if d.n_components > 1:
        out["alexander_link"] = alexander_from_diagram(d).format()
    else:
        seif = _guard(algc.seifert_from_diagram, d)
        if "error" in seif:
            out["algebraic"] = seif
        else:
            a = seif["value"]
            out["algebraic"] = algebraic_report(a, expression)
            out["dual_route_agree"] = algc.alexander(a) == alexander_from_diagram(d).canonical()
    return out


def cmd_invariants(args) -> int:
    sources = [x for x in (args.file, args.knot, args.matrix) if x]
    if len(sources) != 1:
        raise ValueError("give exactly one of FILE, --knot or --matrix")
    sf = None
    if args.matrix:
        if args.matrix in MATRICES:
            a = MATRICES[args.matrix]
        else:
            a = algc.SeifertMatrix.from_json(_read_json(args.matrix))
        body = {"kind": "matrix", **algebraic_report(a, args.expression)}
        sf = algc.signature_function(a)
    else:
        if args.knot:
            d = knot_by_name(args.knot)
        else:
            data = _read_json(args.file)
            if isinstance(data, list) or (isinstance(data, dict) and "matrix" in data):
                a = algc.SeifertMatrix.from_json(data)
                body = {"kind": "matrix", **algebraic_report(a, args.expression)}
                sf = algc.signature_function(a)
                d = None
            else:
                d = load_diagram(args.file)
        if d is not None:
            body = {"kind": "diagram", **diagram_report(d, args.expression)}
            if d.n_components == 1 and "seifert_matrix" in body.get("algebraic", {}):
                sf = algc.signature_function(algc.SeifertMatrix(body["algebraic"]["seifert_matrix"]))
    if args.signature_out:
        if sf is None:
            raise ValueError("signature export needs a knot or a Seifert matrix")
        with open(args.signature_out, "w") as fh:
            fh.write(sf.export_text())
    _dump({"schema_version": SCHEMA_VERSION, **body}, args.output)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    names: List[str] = []
    for n in args.scenarios:
        names.extend(SCENARIOS) if n.lower() == "all" else names.append(n.upper())
    results = [run_scenario(n) for n in names]
    for r in results:
        print(r.summary(), file=sys.stderr if args.json == "-" else sys.stdout)
    if args.json:
        _dump({"schema_version": SCHEMA_VERSION, "passed": all(r.passed for r in results),
               "scenarios": [r.to_json(timing=args.timing) for r in results]}, args.json)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bingcalc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build BD_n(K) and other satellites")
    b.add_argument("--knot", choices=sorted(KNOTS), help="fixture knot")
    b.add_argument("--diagram", help="diagram JSON file to start from")
    b.add_argument("--bing", type=int, default=0, help="number of Bing doublings")
    b.add_argument("--route", choices=("infection", "pattern"), default="infection",
                   help="draw BD_n(K) by infecting the template (default) or by iterating the pattern")
    b.add_argument("--pattern", action="append", metavar="COMP:NAME",
                   help="apply a named pattern (bing, core, parallel:m) to a component")
    b.add_argument("--parallel", action="append", metavar="COMP:M", help="replace a component by M parallel copies")
    b.add_argument("-o", "--output", help="output file (default stdout)")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("cover", help="run a covering link calculus script")
    c.add_argument("diagram")
    c.add_argument("script", help=f"script file or fixture name ({', '.join(fixture_script_names())})")
    c.add_argument("--assume", action="append", metavar="KEY=VALUE", help="solvable=<x> or slice=<claim>")
    c.add_argument("-o", "--output", help="write the output diagram here")
    c.add_argument("--report", help="JSON report with the ledger (default stdout)")
    c.set_defaults(func=cmd_cover)

    i = sub.add_parser("invariants", help="invariant report for a diagram or Seifert matrix")
    i.add_argument("file", nargs="?")
    i.add_argument("--knot", choices=sorted(KNOTS))
    i.add_argument("--matrix", help=f"Seifert matrix file or fixture ({', '.join(sorted(MATRICES))})")
    i.add_argument("--expression", help="cable expression in the atom A, e.g. '3*i(2)[A] + i(1)[A] + 3*[A]'")
    i.add_argument("--signature-out", help="write the signature step function as two-column text")
    i.add_argument("-o", "--output")
    i.set_defaults(func=cmd_invariants)

    v = sub.add_parser("verify", help="run acceptance scenarios")
    v.add_argument("scenarios", nargs="+", help=f"{', '.join(SCENARIOS)} or all")
    v.add_argument("--json", help="write a JSON report ('-' for stdout)")
    v.add_argument("--timing", action="store_true", help="include durations in the JSON report")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScriptError as exc:
        print(f"error: script step {exc}", file=sys.stderr)
        return 3
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (DiagramError, algc.CapExceeded, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
