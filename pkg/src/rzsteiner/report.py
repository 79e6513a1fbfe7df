"""JSON run reports (schema 1).  Rationals are written as ``"p/q"`` strings."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .graph import Instance
from .instances import write_stp
from .solver import RunReport, certify_ratio

SCHEMA = 1


def rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


def instance_digest(inst: Instance) -> str:
    return "sha256:" + hashlib.sha256(write_stp(inst).encode()).hexdigest()


def _edge(inst: Instance, e) -> list:
    u, v, c = e
    return [u + 1, v + 1, rational(c)]


def report_dict(report: RunReport, inst: Instance) -> dict:
    bound, ok = certify_ratio(report)
    out = {
        "schema": SCHEMA,
        "instance": {"digest": instance_digest(inst), "nodes": inst.n, "edges": len(inst.edges),
                     "terminals": len(inst.terminals)},
        "r": report.r,
        "b": report.b,
        "catalog_size": len(report.catalog) if report.catalog is not None else 0,
        "mst_terminals": rational(report.mst0),
        "iterations": [
            {"component": it.component, "terminals": [t + 1 for t in it.terminals],
             "f": rational(it.f), "mst": rational(it.mst), "smst": rational(it.smst),
             "loss": rational(it.loss)}
            for it in report.iterations
        ],
        "raw_cost": rational(report.raw_cost),
        "pruned_cost": rational(report.pruned_cost),
        "final_cost": rational(report.final_cost),
        "final_tree": [_edge(inst, e) for e in report.final_tree],
        "lower_bound": rational(report.lower_bound),
        "dual_feasible": report.dual_feasible,
        "ratio_bound": rational(bound),
    }
    if report.oracle is not None:
        oracle = {k: (rational(v) if isinstance(v, (Fraction, int)) and not isinstance(v, bool) else v)
                  for k, v in report.oracle.items()}
        oracle["ratio_satisfied"] = ok
        out["oracle"] = oracle
    return out


def write_report(report: RunReport, inst: Instance) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report_dict(report, inst), sort_keys=True, indent=2) + "\n"
