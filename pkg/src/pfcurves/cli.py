"""Command-line entry point: one JSON document on stdout per invocation.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 non-conforming probe.
"""

from __future__ import annotations

import argparse
import json
import sys
from types import SimpleNamespace
from typing import Sequence

from . import exact, formulas, interp
from .experiments import probe_general_fibre, probe_rank_on_curve, probe_v5_fibre
from .quadrics import DEFAULT_BOX, SamplingError, parse_quadric

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_NONCONFORMING = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit with 2
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _rat_list(text: str) -> tuple:
    return tuple(exact.rat(x) for x in text.split(",") if x.strip())


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _matrix_arg(args) -> exact.Matrix:
    return exact.matrix_from_json(_load_json(args.matrix))


def _config_arg(path: str) -> interp.MarkedConfig:
    return interp.MarkedConfig.from_json(_load_json(path))


# ---------------------------------------------------------------------------
# handlers; each returns (document, exit code)


def cmd_pfaffian(args):
    m = exact.skew(_matrix_arg(args))
    if args.removed is not None:
        removed = _int_list(args.removed)
        return {"removed": removed, "pfaffian": exact.format_rat(exact.pfaffian_minor(m, removed))}, EXIT_OK
    return {"pfaffian": exact.format_rat(exact.pfaffian(m))}, EXIT_OK


def cmd_kernel(args):
    m = _matrix_arg(args)
    basis = interp.kernel_via_pfaffians(m) if args.via_pfaffians else exact.kernel_basis(m)
    return {
        "method": "pfaffians" if args.via_pfaffians else "elimination",
        "dim": len(basis),
        "kernel": [exact.vector_to_json(v) for v in basis],
    }, EXIT_OK


def cmd_interp_pn(args):
    config = _config_arg(args.config)
    return interp.interpolate_pn(config, _rat_list(args.lam)).to_json(), EXIT_OK


def cmd_fibre_pn(args):
    raw = _load_json(args.config)
    config = interp.MarkedConfig.from_json(raw)
    extra = None
    if args.extra:
        extra = _config_arg(args.extra)
    elif isinstance(raw, dict) and "extra" in raw:
        extra = interp.MarkedConfig.from_json(raw["extra"])
    fd = interp.pn_fibre(config, extra, args.n)
    doc = fd.to_json()
    doc["curves"] = [c.to_json() for c in fd.representatives]
    return doc, EXIT_OK


def cmd_build_skew(args):
    quad = parse_quadric(args.quadric)
    return interp.build_rescaled_skew(quad, _config_arg(args.config)).to_json(), EXIT_OK


def cmd_fibre_quadric(args):
    quad = parse_quadric(args.quadric)
    fd = interp.solve_quadric_fibre(quad, _config_arg(args.config))
    doc = fd.to_json()
    doc["curves"] = [c.to_json() for c in fd.representatives]
    return doc, EXIT_OK


def cmd_verify_curve(args):
    quad = parse_quadric(args.quadric)
    data = _load_json(args.curve)
    if not isinstance(data, dict):
        raise ValueError("curve JSON must be an object")
    if "config" in data and "lambda" in data:
        curve = interp.CurveMap.from_json(data)
    elif "components" in data:
        curve = SimpleNamespace(components=tuple(exact.UniPoly.from_json(p) for p in data["components"]))
    else:
        raise ValueError('curve JSON needs "config" and "lambda", or "components"')
    ok = interp.verify_on_quadric(quad, curve)
    return {"on_quadric": ok}, EXIT_OK if ok else EXIT_VERIFY


def cmd_cauchy_pf(args):
    z = _rat_list(args.z)
    quad = parse_quadric(args.quadric)
    closed = interp.cauchy_pfaffian(z)
    direct = exact.pfaffian(interp.build_rescaled_skew(quad, interp.alternating_config(quad, z)).matrix)
    doc = {
        "closed_form": exact.format_rat(closed),
        "pfaffian": exact.format_rat(direct),
        "equal": closed == direct,
    }
    return doc, EXIT_OK if closed == direct else EXIT_VERIFY


def cmd_expected_dim(args):
    return {"expected_dim": formulas.expected_dim(args.dim_x, args.anticanonical_degree, args.m)}, EXIT_OK


def cmd_bounds(args):
    b = formulas.covering_bounds(formulas.parse_kind(args.kind), args.n, args.m)
    return {"kind": formulas.parse_kind(args.kind).value, "n": args.n, "m": args.m,
            "lower": b.lower, "upper": b.upper}, EXIT_OK


def cmd_bisecants(args):
    return {"d": args.d, "g": args.g, "bisecants": formulas.bisecant_count(args.d, args.g)}, EXIT_OK


def cmd_dp_cone(args):
    c = formulas.DPClass.parse(args.cls)
    return {"class": c.to_json(), "position": formulas.dp_cone_position(c).value}, EXIT_OK


def cmd_dp_pair(args):
    if len(args.cls) != 2:
        raise UsageError("dp pair needs exactly two --class arguments")
    x, y = (formulas.DPClass.parse(c) for c in args.cls)
    return {"pairing": exact.format_rat(formulas.dp_pair(x, y))}, EXIT_OK


def cmd_dp_reduce(args):
    c = formulas.DPClass.parse(args.cls)
    return formulas.dp_reduce_to_p2(c, args.d, args.m).to_json(), EXIT_OK


def cmd_dp_quintic_table(args):
    roots = [formulas.DPClass.parse(args.root)] if args.root else formulas.dp5_roots()
    rows = []
    for r in roots:
        pairings = formulas.dp5_line_pairings(r)
        c = r + formulas.DPClass.anticanonical(5)
        rows.append({
            "root": str(r),
            "quintic": str(c),
            "pairings": {label: exact.format_rat(v) for label, v in pairings},
            "multiset": {str(k): v for k, v in formulas.multiset_counts(formulas.dp5_quintic_table(r)).items()},
            "anticanonical_degree": exact.format_rat(formulas.dp_pair(c, formulas.DPClass.anticanonical(5))),
            "genus": exact.format_rat(formulas.dp_genus(c)),
        })
    return {"roots": rows}, EXIT_OK


def cmd_dp_md(args):
    return {"delta": args.delta, "d": args.d, "m_d": formulas.dp_m_d(args.delta, args.d)}, EXIT_OK


def cmd_dp_t2009(args):
    c = formulas.DPClass.parse(args.cls)
    return {"class": c.to_json(), "condition": formulas.dp_t2009_condition(c)}, EXIT_OK


def _probe_result(report):
    return report.to_json(), EXIT_OK if report.conforming else EXIT_NONCONFORMING


def cmd_probe_general(args):
    return _probe_result(probe_general_fibre(args.n, args.d, args.trials, args.seed, box=args.box, jobs=args.jobs))


def cmd_probe_rank(args):
    return _probe_result(
        probe_rank_on_curve(args.d, args.trials, args.seed, curve=args.curve, box=args.box, jobs=args.jobs)
    )


def cmd_probe_v5(args):
    return _probe_result(
        probe_v5_fibre(args.d, args.trials, args.seed, variant=args.variant, box=args.box, jobs=args.jobs)
    )


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pfcurves", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pfaffian", help="Pfaffian of a skew matrix (or of a minor)")
    p.add_argument("--matrix", required=True, help="JSON array of Rat strings")
    p.add_argument("--removed", help="comma-separated row/column indices to delete")
    p.set_defaults(func=cmd_pfaffian)

    p = sub.add_parser("kernel", help="exact kernel basis")
    p.add_argument("--matrix", required=True)
    p.add_argument("--via-pfaffians", action="store_true", help="use Pfaffian-minor formulas (skew input)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("interp-pn", help="Lagrange interpolation in P^n")
    p.add_argument("--config", required=True)
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated coefficients")
    p.set_defaults(func=cmd_interp_pn)

    p = sub.add_parser("fibre-pn", help="curves in P^n through base and extra points")
    p.add_argument("--config", required=True)
    p.add_argument("--extra", help="configuration of extra marked points")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_fibre_pn)

    for name, func, helptext in (
        ("build-skew", cmd_build_skew, "rescaled skew matrix of a configuration"),
        ("fibre-quadric", cmd_fibre_quadric, "curves on a quadric through marked points"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--quadric", default="split:3", help="split:n or a Gram-matrix JSON file")
        p.add_argument("--config", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("verify-curve", help="check a parametrized curve lies on the quadric")
    p.add_argument("--quadric", default="split:3")
    p.add_argument("--curve", required=True)
    p.set_defaults(func=cmd_verify_curve)

    p = sub.add_parser("cauchy-pf", help="closed form against direct Pfaffian")
    p.add_argument("--z", required=True, help="comma-separated distinct parameters, even count")
    p.add_argument("--quadric", default="split:3")
    p.set_defaults(func=cmd_cauchy_pf)

    p = sub.add_parser("expected-dim", help="expected dimension of pointed stable maps")
    p.add_argument("--dim-x", type=int, required=True)
    p.add_argument("--anticanonical-degree", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_expected_dim)

    p = sub.add_parser("bounds", help="bounds on the minimal m-connecting degree")
    p.add_argument("--kind", required=True, help="pn or quadric")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bisecants", help="bisecant line count")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--g", type=int, default=0)
    p.set_defaults(func=cmd_bisecants)

    dp = sub.add_parser("dp", help="del Pezzo lattice computations")
    dsub = dp.add_subparsers(dest="dp_command", required=True, parser_class=_Parser)
    p = dsub.add_parser("cone")
    p.add_argument("--class", dest="cls", required=True, help='"delta:a:b1,b2,..."')
    p.set_defaults(func=cmd_dp_cone)
    p = dsub.add_parser("pair")
    p.add_argument("--class", dest="cls", action="append", required=True)
    p.set_defaults(func=cmd_dp_pair)
    p = dsub.add_parser("reduce")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_dp_reduce)
    p = dsub.add_parser("quintic-table")
    p.add_argument("--root", help="a root class; all twenty when omitted")
    p.set_defaults(func=cmd_dp_quintic_table)
    p = dsub.add_parser("md")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_dp_md)
    p = dsub.add_parser("t2009")
    p.add_argument("--class", dest="cls", required=True)
    p.set_defaults(func=cmd_dp_t2009)

    probe = sub.add_parser("probe", help="seeded randomized probes")
    psub = probe.add_subparsers(dest="probe_command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--box", type=int, default=DEFAULT_BOX, help="height bound for sampled rationals")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", help="write the report here instead of stdout")

    p = psub.add_parser("general-fibre")
    p.add_argument("--n", type=int, default=3)
    common(p)
    p.set_defaults(func=cmd_probe_general)
    p = psub.add_parser("rank-on-curve")
    common(p)
    p.add_argument("--curve", choices=("quartic", "cubic"), default="quartic")
    p.set_defaults(func=cmd_probe_rank)
    p = psub.add_parser("v5-fibre")
    common(p)
    p.add_argument("--variant", choices=("rat-comp", "main"), default="rat-comp")
    p.set_defaults(func=cmd_probe_v5)
    return parser


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) < 0 or getattr(args, "box", 1) < 1 or getattr(args, "jobs", 1) < 1:
            raise UsageError("--trials must be nonnegative, --box and --jobs positive")
        doc, code = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError, IndexError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = _dump(doc)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        text = _dump(doc.get("summary", {}))
    sys.stdout.write(text)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
