"""Command-line front end.

Exit codes: 0 success or positive decision, 1 negative decision (not
homeomorphic, invalid mosaic), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import specfile
from .curve import DEFAULT_SAMPLES
from .geom import GeometryError
from .functions import EvaluationError
from .mosaic import MosaicError, check_partition, partition_at, refine_simple, validate
from .picgraph import GraphError, build_homeo, extract_graph, is_homeomorphic, match_subdivisions, smooth
from .picnorm import NormError, ensure_refined, equivalence_constants, pic_norm, transport_norm_check
from .variation import SearchBudget, bv_bracket, vf_exact


class InputError(Exception):
    pass


def _num(x):
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        return [x.real, x.imag] if x.imag else x.real
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def _pt(p):
    return [float(p[0]), float(p[1])]


def _line(line):
    return {"u": _pt(line.u), "v": _pt(line.v)}


def _load(path, args, check=True):
    try:
        return specfile.load(path, samples=args.samples, check=check)
    except specfile.SpecError as exc:
        raise InputError(str(exc)) from None


def _function(spec, name):
    if name not in spec.functions:
        raise InputError(f"unknown function {name!r}; have {sorted(spec.functions)}")
    return spec.functions[name]


def _budget(args):
    return SearchBudget(max_len=args.max_list_len, seed=args.seed)


# -- subcommands ------------------------------------------------------------------


def cmd_norm(args):
    spec = _load(args.set, args)
    ps = ensure_refined(spec.picset)
    names = [args.fn] if args.fn else sorted(spec.functions)
    if not names:
        raise InputError("the description defines no functions")
    seeds = [spec.lists[args.list]] if args.list else list(spec.lists.values())
    if args.list and args.list not in spec.lists:
        raise InputError(f"unknown list {args.list!r}")
    consts = equivalence_constants(ps)
    out = {"constants": consts.__dict__, "curves": len(ps), "functions": {}}
    for name in names:
        f = _function(spec, name)
        bracket = bv_bracket(f, ps, _budget(args), seeds=seeds)
        out["functions"][name] = {
            "pic_norm": pic_norm(f, ps),
            "bv_lower": bracket.lower,
            "bv_upper": bracket.upper,
            "bv_witness": [_pt(p) for p in bracket.lower_witness],
            "upper_provenance": bracket.upper_provenance,
        }
    out["spec"] = specfile.picset_fragment(ps)
    return 0, out


def cmd_vf(args):
    spec = _load(args.set, args, check=False)
    names = [args.list] if args.list else sorted(spec.lists)
    if not names:
        raise InputError("the description defines no lists")
    out = {"lists": {}}
    for name in names:
        if name not in spec.lists:
            raise InputError(f"unknown list {name!r}")
        L = spec.lists[name]
        count, line = vf_exact(L)
        out["lists"][name] = {"points": [_pt(p) for p in L], "vf": count, "witness": _line(line)}
    return 0, out


def _graph_summary(g):
    return {"vertices": [_pt(v) for v in g.vertices],
            "edges": [[u, v, k] for u, v, k in g.edges],
            "degrees": g.degrees()}


def cmd_homeo(args):
    a, b = _load(args.a, args), _load(args.b, args)
    ok, m = is_homeomorphic(extract_graph(a.picset), extract_graph(b.picset))
    out = {"homeomorphic": ok,
           "smoothed_a": _graph_summary(smooth(extract_graph(a.picset))),
           "smoothed_b": _graph_summary(smooth(extract_graph(b.picset)))}
    if ok and m is not None:
        out["vertex_map"] = {str(k): v for k, v in sorted(m.vertex_map.items())}
    if ok and args.build_map:
        aligned = match_subdivisions(a.picset, b.picset)
        hm = build_homeo(aligned)
        names = [args.fn] if args.fn else sorted(a.functions)
        residuals = {}
        for name in names:
            f = _function(a, name)
            residuals[name] = {"pic_norm": pic_norm(f, hm.sigma),
                               "residual": transport_norm_check(hm, f)}
        out["matched_curves"] = len(aligned.pairs)
        out["pairs"] = [[aligned.sigma.names[i], aligned.tau.names[j], flip]
                        for i, j, flip in aligned.pairs]
        out["transport"] = residuals
        out["spec_a"] = specfile.picset_fragment(hm.sigma)
        out["spec_b"] = specfile.picset_fragment(hm.tau)
    return (0 if ok else 1), out


def cmd_mosaic(args):
    spec = _load(args.set, args, check=False)
    ps = spec.picset
    if args.action == "validate":
        report = validate(ps)
        out = {"ok": report.ok, "violations": [v.as_dict() for v in report.violations],
               "spec": specfile.picset_fragment(ps)}
        return (0 if report.ok else 1), out
    report = validate(ps)
    if not report.ok:
        raise InputError("cannot refine an invalid set: " +
                         "; ".join(v.message for v in report.violations))
    refined = refine_simple(ps)
    out = {"curves_before": len(ps), "curves_after": len(refined),
           "ok": validate(refined).ok, "spec": specfile.picset_fragment(refined)}
    return 0, out


def cmd_partition(args):
    spec = _load(args.set, args)
    ps = spec.picset
    name = args.curve or ps.names[0]
    if name not in ps.names:
        raise InputError(f"unknown curve {name!r}")
    i = ps.names.index(name)
    c, P = ps.curves[i], ps.polygons[i]
    if args.point:
        try:
            v = tuple(float(x) for x in args.point.split(","))
        except ValueError:
            raise InputError("--point takes x,y") from None
    else:
        v = tuple(c.points[len(c) // 2])
    P1, P2 = partition_at(P, c, v)
    fails = check_partition(P, c, v, P1, P2)
    out = {"curve": name, "v": _pt(v), "P": [_pt(p) for p in P.vertices],
           "P1": [_pt(p) for p in P1.vertices], "P2": [_pt(p) for p in P2.vertices],
           "area": [P.area, P1.area, P2.area], "failed_conclusions": fails}
    return (0 if not fails else 1), out


def cmd_report(args):
    spec = _load(args.set, args, check=False)
    ps = spec.picset
    report = validate(ps)
    out = {"validate": {"ok": report.ok, "violations": [v.as_dict() for v in report.violations]}}
    if not report.ok:
        out["spec"] = specfile.picset_fragment(ps)
        return 1, out
    g = extract_graph(ps)
    out["graph"] = _graph_summary(g)
    out["smoothed"] = _graph_summary(smooth(g))
    _, out["norm"] = cmd_norm(args)
    if spec.lists:
        vf_args = argparse.Namespace(**{**vars(args), "list": None})
        _, out["vf"] = cmd_vf(vf_args)
    return 0, out


# -- output -------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _num(obj)


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k, v in obj.items():
            if isinstance(v, dict) or (isinstance(v, list) and v and isinstance(v[0], (dict, list))):
                lines.append(f"{pad}{str(k):<{width}}")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k):<{width}}  {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                        help="samples per curve (default %(default)s)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-list-len", type=int, default=8)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="picvar", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norm", parents=[common], help="PIC norm, BV bracket and constants")
    s.add_argument("--set", required=True)
    s.add_argument("--fn")
    s.add_argument("--list", help="named list used to seed the variation search")
    s.set_defaults(run=cmd_norm)

    s = sub.add_parser("vf", parents=[common], help="variation factor of a named list")
    s.add_argument("--set", required=True)
    s.add_argument("--list")
    s.set_defaults(run=cmd_vf)

    s = sub.add_parser("homeo", parents=[common], help="homeomorphism test")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--build-map", action="store_true")
    s.add_argument("--fn")
    s.set_defaults(run=cmd_homeo)

    s = sub.add_parser("mosaic", parents=[common], help="validate or refine a mosaic")
    s.add_argument("action", choices=["validate", "refine"])
    s.add_argument("--set", required=True)
    s.set_defaults(run=cmd_mosaic)

    s = sub.add_parser("partition", parents=[common], help="split a curve's polygon")
    s.add_argument("--set", required=True)
    s.add_argument("--curve")
    s.add_argument("--point", help="x,y on the curve (default: its middle sample)")
    s.set_defaults(run=cmd_partition)

    s = sub.add_parser("report", parents=[common], help="everything, machine-readable")
    s.add_argument("--set", required=True)
    s.add_argument("--fn")
    s.add_argument("--list")
    s.set_defaults(run=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.samples < 2 or args.max_list_len < 1:
        print("error: --samples must be >= 2 and --max-list-len >= 1", file=sys.stderr)
        return 2
    try:
        code, out = args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MosaicError, GraphError, NormError, EvaluationError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _jsonable(out)
    if args.json or args.command == "report":
        print(json.dumps(out, indent=1))
    else:
        print("\n".join(_text(out)))
    return code


if __name__ == "__main__":
    sys.exit(main())
