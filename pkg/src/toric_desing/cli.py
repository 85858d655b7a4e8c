"""Command line tool: resolve toric hypersurfaces and binomial ideals.

Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 internal
assertion failure.  All JSON output uses sorted keys.
"""

from __future__ import annotations

import argparse
import json
import sys

from .binomial import BinomialIdeal, BudgetExceeded, standard_basis
from .driver import (BudgetError, DriverError, ResolutionProblem,
                     resolve_embedded)
from .fan import Fan, FanError, orthant
from .hypersurface import LinearForm, resolve_hypersurface
from .parse import ParseError, parse_binomial, parse_system
from .samuel import (NotApplicable, equimultiple_locus, presentation,
                     samuel_stratum_components)


class InputError(ValueError):
    pass


def _load_fan(path):
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return Fan.from_json(fh.read())


def _load_ideal(path) -> BinomialIdeal:
    with open(path, "r", encoding="utf-8") as fh:
        return BinomialIdeal.from_json(fh.read())


def _parse_lambda(text) -> LinearForm:
    try:
        return LinearForm.make(int(t) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad linear form {text!r}: {exc}") from exc


def cmd_resolve_hypersurface(args) -> int:
    lam = _parse_lambda(args.lam)
    fan = _load_fan(args.fan) or orthant(len(lam.values_on_basis))
    trace = resolve_hypersurface(fan, lam, tie_break=args.tie_break)
    out = trace.to_jsonl()
    if out:
        print(out)
    print(json.dumps({"steps": len(trace.steps),
                      "final_cones": len(trace.final_fan.maximal_cones)},
                     sort_keys=True))
    return 0


def cmd_standard_basis(args) -> int:
    ideal = _load_ideal(args.ideal)
    sb = standard_basis(ideal)
    x_names = ideal.x_names or tuple(f"x{i}" for i in range(ideal.num_x))
    y_names = ideal.y_names or tuple(f"y{i}" for i in range(ideal.num_y))
    x_names = tuple(n for i, n in enumerate(x_names) if i not in sb.demoted)
    y_names = y_names + tuple((ideal.x_names or tuple(
        f"x{i}" for i in range(ideal.num_x)))[i] for i in sb.demoted)
    payload = {
        "vertices": [list(f.alpha) for f in sb.elements],
        "elements": [f.pretty(x_names, y_names) for f in sb.elements],
        "torus_lattice": [list(r) for r in sb.lattice.basis()],
        "demoted": list(sb.demoted),
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_samuel_strata(args) -> int:
    ideal = _load_ideal(args.ideal)
    cp = presentation(ideal)
    names = ideal.x_names or tuple(f"x{i}" for i in range(ideal.num_x))
    kept = tuple(n for i, n in enumerate(names)
                 if i not in cp.basis.demoted)
    comps = samuel_stratum_components(cp)
    payload = {
        "components": [[kept[j] for j in comp] for comp in comps],
        "smooth": cp.is_smooth(),
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_resolve(args) -> int:
    if args.ideal:
        ideal = _load_ideal(args.ideal)
        if args.char:
            ideal = BinomialIdeal.make(
                ideal.num_x, ideal.num_y, ideal.generators, args.char,
                ideal.torus_basis, ideal.x_names, ideal.y_names)
        problem = ResolutionProblem.from_ideal(ideal, mode=args.mode)
    elif args.lam:
        lam = _parse_lambda(args.lam)
        fan = _load_fan(args.fan)
        problem = ResolutionProblem.from_linear_form(lam, fan, mode=args.mode)
    else:
        raise InputError("provide --ideal or --lambda")
    result = resolve_embedded(problem)
    trace = result.trace_jsonl()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace + ("\n" if trace else ""))
    elif trace:
        print(trace)
    print(json.dumps({
        "blowups": result.blowup_count(),
        "charts": len(result.charts),
        "max_order": result.max_order(),
        "normal_crossings": result.theta_clean,
    }, sort_keys=True))
    return 0


def cmd_equimultiple(args) -> int:
    names, e1, e2 = parse_binomial(args.binomial)
    units = set((args.units or "").split(",")) - {""}
    bad = units - set(names)
    if bad:
        raise InputError(f"unknown unit variables {sorted(bad)}")
    u_idx = [i for i, n in enumerate(names) if e1[i] and n not in units]
    w_idx = [i for i, n in enumerate(names) if n in units]
    v_idx = [i for i in range(len(names))
             if i not in u_idx and i not in w_idx]
    if any(e2[i] for i in u_idx) or any(e1[i] for i in v_idx):
        raise InputError("the two monomials must use disjoint variables")
    alpha = tuple(e1[i] for i in u_idx)
    beta = tuple(e2[i] for i in v_idx)
    gamma = tuple(e1[i] - e2[i] for i in w_idx)
    res = equimultiple_locus(alpha, beta, args.char, gamma)
    if isinstance(res, NotApplicable):
        print(json.dumps({"not_applicable": True, "char": res.char_p,
                          "order": res.d}, sort_keys=True))
        return 0
    local = [names[i] for i in u_idx] + [names[i] for i in v_idx]
    comps = [[local[j] for j in comp] for comp in res]
    print(json.dumps({"not_applicable": False, "components": comps},
                     sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toric-desing",
        description="combinatorial embedded resolution for toric and "
                    "binomial varieties")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resolve-hypersurface",
                       help="resolve a toric hypersurface given by a "
                            "linear form on a fan")
    p.add_argument("--fan", help="fan JSON file (default: affine orthant)")
    p.add_argument("--lambda", dest="lam", required=True,
                   help="comma separated values on the unit basis")
    p.add_argument("--tie-break", choices=("omega", "lex"), default="omega")
    p.set_defaults(func=cmd_resolve_hypersurface)

    p = sub.add_parser("standard-basis",
                       help="standard basis of a binomial ideal")
    p.add_argument("--ideal", required=True, help="ideal JSON file")
    p.set_defaults(func=cmd_standard_basis)

    p = sub.add_parser("samuel-strata",
                       help="components of the maximal Samuel stratum")
    p.add_argument("--ideal", required=True, help="ideal JSON file")
    p.set_defaults(func=cmd_samuel_strata)

    p = sub.add_parser("resolve", help="full embedded resolution")
    p.add_argument("--ideal", help="ideal JSON file")
    p.add_argument("--lambda", dest="lam",
                   help="hypersurface as a linear form")
    p.add_argument("--fan", help="ambient fan for --lambda")
    p.add_argument("--mode", default="canonical-binomial",
                   choices=("toric", "canonical-toric", "canonical-binomial"))
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--trace", help="write the step trace to this file")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("equimultiple",
                       help="equimultiple locus of a binomial")
    p.add_argument("--binomial", required=True, help='e.g. "u1*u2 - v1^3"')
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--units", help="comma separated invertible variables")
    p.set_defaults(func=cmd_equimultiple)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, FanError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, BudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (AssertionError, DriverError) as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
