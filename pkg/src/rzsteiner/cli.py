"""Command-line entry point: ``rzsteiner {solve,exact,gap,components,verify,gen}``.

Exit status: 0 on success, 1 on input errors, 2 when a size guard refuses
the instance, 3 when ``verify`` finds a failing invariant.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import oracle
from .components import build_catalog
from .graph import GuardError, Instance, InstanceError, metric_closure, quasi_bipartite_b
from .instances import GeneratorSpec, generate, parse_stp, write_stp
from .report import SCHEMA, instance_digest, rational, report_dict
from .solver import certify_ratio, rz_solve

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_CHECK = 0, 1, 2, 3
FAMILIES = ("skutella", "random_bquasi", "star", "path", "fig3")


def fmt(x) -> str:
    """Exact value followed by a 6-place decimal."""
    x = Fraction(x)
    return f"{x} ({float(x):.6f})"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rzsteiner", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, r_default=3):
        src = p.add_argument_group("instance")
        src.add_argument("--input", type=Path, help="STP file to read")
        src.add_argument("--family", choices=FAMILIES + ("random",), help="generate instead of reading")
        src.add_argument("--n", type=int, default=8, help="vertex count for generated families")
        src.add_argument("--b", type=int, default=1, help="Steiner neighbourhood bound for random_bquasi")
        src.add_argument("--seed", type=int, default=0, help="generator seed")
        p.add_argument("--r", type=int, default=r_default, help="largest component size (>= 2)")
        p.add_argument("--report", type=Path, help="write a JSON report here")
        p.add_argument("--max-ground", type=int, default=oracle.MAX_GROUND,
                       help="override the partition-LP ground-set guard")

    p = sub.add_parser("solve", help="run the primal-dual algorithm")
    common(p)
    p.add_argument("--oracle", action="store_true", help="also compute opt_r to certify the ratio")
    common(sub.add_parser("exact", help="optimal and optimal r-restricted trees"))
    common(sub.add_parser("gap", help="integrality gap of the pairs-only partition LP"), r_default=5)
    common(sub.add_parser("components", help="list the component catalog"))
    common(sub.add_parser("verify", help="run the invariant suite"))
    p = sub.add_parser("gen", help="write a generated instance as STP")
    common(p)
    p.add_argument("--output", type=Path, help="STP destination (default: standard output)")
    return parser


def load_instance(args) -> Instance:
    if (args.input is None) == (args.family is None):
        raise InstanceError("give exactly one of --input and --family")
    if args.input is not None:
        try:
            text = args.input.read_text()
        except OSError as exc:
            raise InstanceError(f"cannot read {args.input}: {exc.strerror}") from None
        return parse_stp(text)
    family = "random_bquasi" if args.family == "random" else args.family
    return generate(GeneratorSpec(family=family, n=args.n, b=args.b, seed=args.seed))


def _write_json(path: Path | None, payload: dict):
    if path is not None:
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _base(inst: Instance, args) -> dict:
    return {"schema": SCHEMA, "command": args.command, "r": args.r,
            "instance": {"digest": instance_digest(inst), "nodes": inst.n,
                         "edges": len(inst.edges), "terminals": len(inst.terminals)}}


def cmd_solve(inst, args, out):
    rep = rz_solve(inst, args.r)
    if args.oracle and rep.catalog is not None:
        opt_r, tstar = oracle.optimal_r_tree(rep.catalog)
        rep.oracle = {"opt_r": opt_r, "opt_r_components": list(tstar),
                      "loss_of_opt_r_tree": oracle.tree_loss(rep.catalog, tstar)}
    bound, ok = certify_ratio(rep)
    print(f"terminals      {rep.terminal_count}   r = {rep.r}   b = {rep.b}", file=out)
    print(f"iterations     {len(rep.iterations)}", file=out)
    for it in rep.iterations:
        labels = " ".join(inst.label(t) for t in it.terminals)
        print(f"  + [{labels}]  f = {fmt(it.f)}  mst = {fmt(it.mst)}", file=out)
    print(f"cost           {fmt(rep.final_cost)}", file=out)
    if rep.raw_cost != rep.final_cost:
        print(f"raw mst cost   {fmt(rep.raw_cost)}", file=out)
    print(f"lower bound    {fmt(rep.lower_bound)}", file=out)
    print(f"ratio bound    {fmt(bound)}", file=out)
    if ok is not None:
        print(f"opt_r          {fmt(rep.oracle_opt_r)}   certified: {ok}", file=out)
    if args.report:
        args.report.write_text(json.dumps(report_dict(rep, inst), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_exact(inst, args, out):
    opt, tree = oracle.brute_force_opt(inst)
    payload = _base(inst, args)
    payload["opt"] = rational(opt)
    payload["opt_tree"] = [[u + 1, v + 1, rational(c)] for u, v, c in tree]
    print(f"opt            {fmt(opt)}", file=out)
    if len(inst.terminals) >= 2:
        catalog = build_catalog(metric_closure(inst), args.r)
        opt_r, comps = oracle.optimal_r_tree(catalog)
        payload["opt_r"] = rational(opt_r)
        payload["opt_r_components"] = [[inst.label(catalog.to_original(t)) for t in
                                        sorted(catalog.components[k].terminals)] for k in comps]
        print(f"opt_r          {fmt(opt_r)}   ({len(comps)} full components)", file=out)
    _write_json(args.report, payload)
    return EXIT_OK


def cmd_gap(inst, args, out):
    catalog = build_catalog(metric_closure(inst), args.r)
    opt_r, _ = oracle.optimal_r_tree(catalog)
    lp = oracle.solve_partition_lp(catalog, max_ground=args.max_ground)
    opt, _ = oracle.brute_force_opt(inst)
    gap = opt_r / lp.value if lp.value else None
    print(f"lp value       {fmt(lp.value)}", file=out)
    print(f"opt_r          {fmt(opt_r)}", file=out)
    print(f"opt            {fmt(opt)}", file=out)
    print(f"gap            {fmt(gap) if gap is not None else 'undefined (LP value 0)'}", file=out)
    payload = _base(inst, args)
    payload.update(lp_value=rational(lp.value), opt_r=rational(opt_r), opt=rational(opt),
                   gap=rational(gap) if gap is not None else None,
                   lp_point={f"{kind}:{key}": rational(v) for (kind, key), v in lp.point().items()})
    _write_json(args.report, payload)
    return EXIT_OK


def cmd_components(inst, args, out):
    catalog = build_catalog(metric_closure(inst), args.r)
    rows = []
    for i, K in enumerate(catalog.components):
        names = [inst.label(catalog.to_original(t)) for t in sorted(K.terminals)]
        print(f"{i:4d}  [{' '.join(names)}]  cost {fmt(K.cost)}  loss {fmt(K.loss)}", file=out)
        rows.append({"terminals": names, "cost": rational(K.cost), "loss": rational(K.loss),
                     "steiner": sorted(inst.label(catalog.to_original(s)) for s in K.steiner)})
    payload = _base(inst, args)
    payload["components"] = rows
    _write_json(args.report, payload)
    return EXIT_OK


def cmd_verify(inst, args, out):
    from .checks import run_checks
    results = run_checks(inst, args.r, max_ground=args.max_ground)
    for res in results:
        print(f"{res.status.upper():4s}  {res.name}" + (f"  [{res.detail}]" if res.detail else ""), file=out)
    payload = _base(inst, args)
    payload["checks"] = [{"name": r.name, "status": r.status, "detail": r.detail} for r in results]
    _write_json(args.report, payload)
    return EXIT_OK if all(r.ok for r in results) else EXIT_CHECK


def cmd_gen(inst, args, out):
    text = write_stp(inst, name=args.family)
    if args.output:
        args.output.write_text(text)
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "exact": cmd_exact, "gap": cmd_gap,
            "components": cmd_components, "verify": cmd_verify, "gen": cmd_gen}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.max_ground != oracle.MAX_GROUND:
        print(f"warning: partition-LP guard overridden: {oracle.MAX_GROUND} -> {args.max_ground}",
              file=sys.stderr)
    try:
        if args.r < 2:
            raise InstanceError(f"--r must be at least 2, got {args.r}")
        inst = load_instance(args)
        return COMMANDS[args.command](inst, args, out)
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InstanceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
