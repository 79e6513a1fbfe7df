import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rzsteiner import Instance, InstanceError, build_catalog, metric_closure
from rzsteiner.graph import edge_cost_sum, is_tree
from rzsteiner.oracle import brute_force_opt, optimal_r_tree, tree_loss
from rzsteiner.solver import (MissingOracleError, as_float, certify_ratio, rz_solve, theorem_bound,
                              tpcost_bound, tpcost_bound_check)

from strategies import bquasi_instances


def test_star3_run(star3):
    rep = rz_solve(star3, 3)
    assert rep.mst0 == 4
    assert [(it.terminals, it.f, it.mst, it.smst, it.loss) for it in rep.iterations] == \
        [((0, 1, 2), Fraction(1, 2), 3, 2, 1)]
    assert rep.final_cost == rep.raw_cost == 3
    assert rep.lower_bound == 2
    assert rep.dual_feasible
    assert sorted(rep.final_tree) == [(0, 3, 1), (1, 3, 1), (2, 3, 1)]


def test_star3_with_pairs_only(star3):
    rep = rz_solve(star3, 2)
    assert rep.iterations == [] and rep.raw_cost == 4
    # the lifted pair edges run through the centre, so the input-graph tree is the star
    assert rep.final_cost == 3


def test_path2_run(path2):
    rep = rz_solve(path2, 3)
    assert rep.iterations == [] and rep.final_cost == 5 == rep.lower_bound


def test_single_terminal_is_trivial():
    rep = rz_solve(Instance.build(2, [0], [(0, 1, 4)]), 3)
    assert rep.final_cost == 0 and rep.final_tree == ()


def test_r_below_two_is_rejected(star3):
    with pytest.raises(InstanceError):
        rz_solve(star3, 1)


def test_skutella_run(skutella):
    rep = rz_solve(skutella, 5)
    assert [it.f for it in rep.iterations] == [Fraction(1, 4), Fraction(1, 2)]
    assert rep.raw_cost == rep.final_cost == 10
    assert rep.lower_bound == 8
    assert rep.dual_feasible


def test_fig3_run(fig3):
    rep = rz_solve(fig3, 4)
    assert rep.final_cost <= rep.pruned_cost <= rep.raw_cost
    assert is_tree({v for e in rep.final_tree for v in e[:2]}, rep.final_tree)


# ------------------------------------------------------------------ bounds

def test_theorem_bound_values():
    assert theorem_bound(0) == theorem_bound(1) == Fraction(1279, 1000)
    assert theorem_bound(2) == theorem_bound(4)
    assert abs(float(theorem_bound(2)) - (1 + 1 / math.e)) < 1e-12
    with mpmath.workdps(50):
        b2 = theorem_bound(2)
        assert mpmath.mpf(b2.numerator) / b2.denominator >= 1 + 1 / mpmath.e
    assert abs(float(theorem_bound(5)) - (1 + math.log(3 - 2 / 5) / 2)) < 1e-12
    assert round(float(theorem_bound(5)), 4) == 1.4778
    assert theorem_bound(2, digits=3) == Fraction(1368, 1000)
    with pytest.raises(ValueError):
        theorem_bound(-1)


@given(st.integers(5, 400))
def test_theorem_bound_grows_towards_limit(b):
    assert theorem_bound(b) <= theorem_bound(b + 1)
    assert theorem_bound(b) < 1 + math.log(3) / 2 + 1e-12


def test_certify_ratio_needs_an_oracle(star3):
    rep = rz_solve(star3, 3)
    assert certify_ratio(rep) == (theorem_bound(1), None)
    with pytest.raises(MissingOracleError):
        certify_ratio(rep, require_oracle=True)
    rep.oracle = {"opt_r": Fraction(3)}
    assert certify_ratio(rep) == (theorem_bound(1), True)
    rep.oracle = {"opt_r": Fraction(2)}
    assert certify_ratio(rep)[1] is False


def test_tpcost_on_star3(star3):
    rep = rz_solve(star3, 3)
    check = tpcost_bound_check(rep, Fraction(3), Fraction(1))
    with mpmath.workdps(40):
        assert mpmath.almosteq(check.bound, 3 + mpmath.log(2), 1e-35)
    assert check.satisfied and check.premise


def test_tpcost_limit_cases():
    assert tpcost_bound(Fraction(7), Fraction(0), Fraction(9)) == 7
    assert tpcost_bound(Fraction(7), Fraction(2), Fraction(7)) == 7


def test_as_float():
    assert as_float(Fraction(1, 4)) == 0.25 and as_float(math.inf) == math.inf and as_float(2) == 2.0


# ------------------------------------------------------------------ properties

@settings(max_examples=50)
@given(bquasi_instances(b_max=3, n_max=9, closed=False), st.integers(2, 5))
def test_run_invariants(inst, r):
    rep = rz_solve(inst, r)
    msts = [rep.mst0] + [it.mst for it in rep.iterations]
    assert all(a > b for a, b in zip(msts, msts[1:]))
    smsts = [it.smst for it in rep.iterations]
    assert all(a >= b for a, b in zip(smsts, smsts[1:]))
    assert all(it.f < 1 for it in rep.iterations)
    assert all(it.mst == it.smst + it.loss for it in rep.iterations)
    assert rep.dual_feasible
    assert rep.final_cost <= rep.pruned_cost <= rep.raw_cost
    # the final tree lives in the input graph and spans every terminal
    assert all(inst.cost(u, v) == c for u, v, c in rep.final_tree)
    assert edge_cost_sum(rep.final_tree) == rep.final_cost
    verts = {v for e in rep.final_tree for v in e[:2]} | set(inst.terminals)
    assert is_tree(verts, rep.final_tree)
    opt_r, _ = optimal_r_tree(rep.catalog)
    assert rep.lower_bound <= opt_r <= rep.pruned_cost
    assert brute_force_opt(inst)[0] <= rep.final_cost


@settings(max_examples=40)
@given(bquasi_instances(b_max=4, n_max=9), st.integers(2, 5))
def test_tpcost_bound_holds(inst, r):
    rep = rz_solve(inst, r)
    opt_r, tstar = optimal_r_tree(rep.catalog)
    check = tpcost_bound_check(rep, opt_r, tree_loss(rep.catalog, tstar))
    assert check.satisfied


@settings(max_examples=20)
@given(bquasi_instances(b_max=3, n_max=8))
def test_runs_are_deterministic(inst):
    a, b = rz_solve(inst, 4), rz_solve(inst, 4)
    assert a.iterations == b.iterations and a.final_tree == b.final_tree


def test_unrestricted_r_collapses_to_catalog_limit(star3):
    assert rz_solve(star3, 10).r == 3
    assert build_catalog(metric_closure(star3), 10).r == 3


def test_skutella_certificates(skutella, skutella_catalog):
    rep = rz_solve(skutella, 5)
    opt_r, tstar = optimal_r_tree(skutella_catalog)
    rep.oracle = {"opt_r": opt_r}
    assert certify_ratio(rep) == (Fraction(1279, 1000), True)
    lstar = tree_loss(skutella_catalog, tstar)
    check = tpcost_bound_check(rep, opt_r, lstar)
    assert check.satisfied
    assert rep.mst0 == 14 and opt_r == 10
