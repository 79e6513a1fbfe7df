import json
import re
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from rzsteiner.report import SCHEMA, instance_digest, parse_rational, rational, report_dict, write_report
from rzsteiner.solver import rz_solve

from strategies import bquasi_instances

RATIONAL = re.compile(r"^-?\d+/\d+$")


@given(st.fractions())
def test_rational_round_trip(x):
    s = rational(x)
    assert RATIONAL.match(s)
    assert parse_rational(s) == x


def test_integers_are_written_with_denominator():
    assert rational(3) == "3/1"
    assert rational(Fraction(35, 4)) == "35/4"


def test_star3_report(star3):
    rep = rz_solve(star3, 3)
    doc = report_dict(rep, star3)
    assert doc["schema"] == SCHEMA
    assert doc["final_cost"] == "3/1" and doc["lower_bound"] == "2/1"
    assert doc["iterations"][0]["f"] == "1/2"
    assert doc["iterations"][0]["terminals"] == [1, 2, 3]
    assert doc["final_tree"] == [[1, 4, "1/1"], [2, 4, "1/1"], [3, 4, "1/1"]]
    assert doc["instance"]["digest"] == instance_digest(star3)
    assert "oracle" not in doc


def test_oracle_block(star3):
    rep = rz_solve(star3, 3)
    rep.oracle = {"opt_r": Fraction(3), "opt_r_components": [3]}
    doc = report_dict(rep, star3)
    assert doc["oracle"] == {"opt_r": "3/1", "opt_r_components": [3], "ratio_satisfied": True}


def all_strings(node):
    if isinstance(node, dict):
        for v in node.values():
            yield from all_strings(v)
    elif isinstance(node, list):
        for v in node:
            yield from all_strings(v)
    else:
        yield node


@given(bquasi_instances(n_max=8))
def test_reports_are_deterministic_and_exact(inst):
    text = write_report(rz_solve(inst, 3), inst)
    assert text == write_report(rz_solve(inst, 3), inst)
    doc = json.loads(text)
    # no floats anywhere: every number is an int, every value a p/q string
    assert not any(isinstance(v, float) for v in all_strings(doc))
    assert RATIONAL.match(doc["final_cost"])
