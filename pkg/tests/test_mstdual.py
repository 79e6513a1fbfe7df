import itertools
import math
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rzsteiner import (DisconnectedError, Instance, Partition, add_component, bottleneck_matrix,
                       build_catalog, collection_state, dual_load, dual_load_bottleneck,
                       induced_subgraph, initial_state, is_violated, kruskal_dual, metric_closure,
                       rank_contribution, selection_value, steiner_rank)
from rzsteiner.graph import DisjointSets, edge_cost_sum, graph_loss, kruskal
from rzsteiner.mstdual import DualTimeline, intmst_sum, kruskal_timeline, mst_with, smst_drop

from strategies import bquasi_instances, connected_graphs


# ------------------------------------------------------------------ Kruskal as primal-dual

def test_triangle_timeline(triangle):
    tree, tl = kruskal_dual(triangle)
    assert tree == [(0, 1, 1), (1, 2, 2)]
    assert [(ev.rank, ev.y) for ev in tl.events] == [(3, 1), (2, 1)]
    assert tl.objective() == 2 * 1 + 1 * 1 == 3
    assert tl.total_time == 2


def test_path2_timeline(path2):
    tree, tl = kruskal_dual(path2)
    assert edge_cost_sum(tree) == 5 == tl.objective()


def test_star3_on_terminals_has_zero_duration_tie(star3_closed):
    sub = induced_subgraph(star3_closed, star3_closed.terminals)
    tree, tl = kruskal_dual(sub)
    assert edge_cost_sum(tree) == 4
    assert [(ev.rank, ev.y) for ev in tl.events] == [(3, 2), (2, 0)]
    assert tl.objective() == 2 * 2 + 1 * 0


def test_disconnected_graph_is_rejected():
    with pytest.raises(DisconnectedError):
        kruskal_dual(Instance.build(3, [0, 1], [(0, 1, 1)]))


def test_partitions_are_materialised_lazily(triangle):
    _, tl = kruskal_dual(triangle)
    parts = list(tl.partitions())
    assert [p.rank for p, _ in parts] == [3, 2]
    assert parts[1][0] == Partition.of([{0, 1}, {2}])


@given(connected_graphs(min_n=2, max_n=25))
def test_strong_duality(inst):
    tree, tl = kruskal_dual(inst)
    g = nx.Graph()
    g.add_nodes_from(range(inst.n))
    g.add_weighted_edges_from(inst.edges)
    assert tl.objective() == edge_cost_sum(tree) == nx.minimum_spanning_tree(g).size(weight="weight")
    assert all(ev.y >= 0 for ev in tl.events)
    # each tree edge is crossed by exactly the partitions before its own merge
    elapsed = Fraction(0)
    for ev in tl.events:
        elapsed += ev.y
        assert elapsed == ev.edge[2]


@given(connected_graphs(min_n=2, max_n=12))
def test_dual_is_feasible_for_every_edge(inst):
    # sum of y over partitions separating u and v never exceeds c(uv)
    _, tl = kruskal_dual(inst)
    for u, v, c in inst.edges:
        crossing = sum((y for p, y in tl.partitions() if p.block_index[u] != p.block_index[v]), Fraction(0))
        assert crossing <= c


# ------------------------------------------------------------------ rank calculus

def test_ranks_on_star3(star3):
    singletons = Partition.singletons(range(4))
    assert steiner_rank(singletons, star3.terminals) == 3
    assert steiner_rank(Partition.of([range(4)]), star3.terminals) == 1
    assert steiner_rank(Partition.of([{0, 1, 2}, {3}]), star3.terminals) == 1
    assert rank_contribution(singletons, {0, 1, 2}) == 2
    assert rank_contribution(Partition.of([range(4)]), {0, 1, 2}) == 0


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition.of([{0, 1}, {1, 2}])
    with pytest.raises(ValueError):
        Partition.of([set(), {1}])


def test_skutella_rank_contribution(skutella_catalog):
    cat = skutella_catalog
    apex = max(cat.terminals)
    # the apex with every Steiner clone in one part, each point on its own
    steiner = set(range(len(cat.terminals), cat.working_graph.n))
    pi = Partition.of([{apex} | steiner] + [{t} for t in cat.terminals if t != apex])
    for comp in cat.components:
        if comp.size == 5:
            assert rank_contribution(pi, comp) == 4


def test_crossing_edges(triangle):
    p = Partition.of([{0, 1}, {2}])
    assert sorted(p.crossing(triangle.edges)) == [(0, 2, 3), (1, 2, 2)]


# ------------------------------------------------------------------ bottleneck and dual load

def test_bottleneck_examples(triangle, path2):
    assert bottleneck_matrix(path2.edges, {0, 1}) == {(0, 1): 5}
    tree, _ = kruskal_dual(triangle)
    assert bottleneck_matrix(tree, {0, 1, 2})[(0, 2)] == 2


def test_star3_dual_load(star3_closed):
    cat = build_catalog(star3_closed, 3)
    state = initial_state(cat)
    triple = cat.components[3]
    assert dual_load(state.timeline, triple) == 4 == dual_load_bottleneck(state.tree, triple)
    assert bottleneck_matrix(state.tree, cat.terminals) == {(0, 1): 2, (0, 2): 2, (1, 2): 2}


def test_triangle_dual_load(triangle):
    tree, tl = kruskal_dual(triangle)
    assert dual_load(tl, {0, 2}) == 2 == dual_load_bottleneck(tree, {0, 2})


def test_dual_load_of_instant_merge_is_zero():
    tl = DualTimeline((0, 1, 2), frozenset({0, 1, 2}),
                      ((0, 1, Fraction(0)), (1, 2, Fraction(0))))
    assert dual_load(tl, {0, 1, 2}) == 0


@given(bquasi_instances(n_max=9), st.integers(2, 5), st.randoms(use_true_random=False))
def test_dual_load_two_ways(inst, r, rnd):
    cat = build_catalog(inst, r)
    members = set(cat.pair_indices) | {k for k in range(len(cat)) if rnd.random() < 0.3}
    state = collection_state(cat, members)
    for comp in cat.components:
        assert dual_load(state.timeline, comp) == dual_load_bottleneck(state.tree, comp)


# ------------------------------------------------------------------ states

def test_star3_state_update(star3_closed):
    cat = build_catalog(star3_closed, 3)
    state = initial_state(cat)
    assert (state.mst_cost, state.loss_cost, state.smst_value) == (4, 0, 4)
    assert is_violated(state, 3)
    assert selection_value(state, 3) == Fraction(1, 2)
    new = add_component(state, 3)
    assert (new.mst_cost, new.loss_cost, new.smst_value) == (3, 1, 2)
    assert new.members == {0, 1, 2, 3}
    with pytest.raises(ValueError):
        add_component(new, 3)


def test_collection_must_hold_every_pair(star3_closed):
    cat = build_catalog(star3_closed, 3)
    with pytest.raises(ValueError):
        collection_state(cat, [3])


def test_skutella_initial_state(skutella_catalog):
    cat = skutella_catalog
    state = initial_state(cat)
    assert state.mst_cost == 14  # 7 edges of cost 2
    cheap = [k for k, comp in enumerate(cat.components) if comp.size == 5 and comp.cost == 5]
    assert len(cheap) == 7
    for k in cheap:
        assert dual_load(state.timeline, cat.components[k]) == 8 > 5
        assert is_violated(state, k)


def test_skutella_two_components_cost_ten(skutella_catalog):
    cat = skutella_catalog
    state = initial_state(cat)
    cheap = [k for k, comp in enumerate(cat.components) if comp.size == 5 and comp.cost == 5]
    for a, b in itertools.combinations(cheap, 2):
        assert cat.components[a].steiner.isdisjoint(cat.components[b].steiner)
        both = add_component(add_component(state, a), b)
        assert both.mst_cost == 10


def test_useless_component_has_infinite_value():
    # the Steiner vertex is so expensive that its triple never helps
    inst = metric_closure(Instance.build(4, [0, 1, 2], [(0, 1, 1), (1, 2, 1), (0, 3, 9), (1, 3, 9), (2, 3, 9)]))
    cat = build_catalog(inst, 3)
    state = initial_state(cat)
    k = cat.index_of[frozenset({0, 1, 2})]
    assert not is_violated(state, k)
    assert selection_value(state, k) == math.inf


def test_exchange_is_only_an_upper_bound():
    """The MST after adding a violated K can beat ``old + c_K - load``.

    t1..t4 hang off one Steiner vertex s (costs 1, 3, 1, 1) and t1t2 costs
    5/2.  The pairs MST costs 13/2 and K = {t1..t4} (cost 6) has dual load
    13/2, but the new MST drops s-t2 for t1t2 and costs 11/2 < 6.
    """
    inst = metric_closure(Instance.build(5, range(4), [
        (0, 4, 1), (1, 4, 3), (2, 4, 1), (3, 4, 1), (0, 1, Fraction(5, 2))]))
    cat = build_catalog(inst, 4)
    state = initial_state(cat)
    k = cat.index_of[frozenset(range(4))]
    comp = cat.components[k]
    load = dual_load(state.timeline, comp)
    assert (state.mst_cost, comp.cost, load) == (Fraction(13, 2), 6, Fraction(13, 2))
    new = add_component(state, k)
    assert new.mst_cost == Fraction(11, 2) < state.mst_cost + comp.cost - load


def test_adding_a_component_can_raise_the_mst():
    # K's Steiner vertex must be spanned even when K does not help
    inst = metric_closure(Instance.build(4, [0, 1, 2], [(0, 1, 1), (1, 2, 1), (0, 3, 5), (1, 3, 5), (2, 3, 5)]))
    cat = build_catalog(inst, 3)
    state = initial_state(cat)
    k = cat.index_of[frozenset({0, 1, 2})]
    assert add_component(state, k).mst_cost > state.mst_cost


# ------------------------------------------------------------------ identities over random collections

def random_collection(cat, rnd, p=0.5):
    return set(cat.pair_indices) | {k for k in range(len(cat)) if rnd.random() < p}


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_mst_is_smst_plus_loss(inst, r, rnd):
    cat = build_catalog(inst, r)
    state = collection_state(cat, random_collection(cat, rnd))
    loss = edge_cost_sum(graph_loss(state.vertices, state.tree, cat.terminals))  # loss of the MST itself
    assert loss == state.loss_cost
    assert state.mst_cost == state.smst_value + state.loss_cost


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_each_loss_component_holds_one_terminal_cluster(inst, r, rnd):
    cat = build_catalog(inst, r)
    state = collection_state(cat, random_collection(cat, rnd))
    loss = graph_loss(state.vertices, state.tree, cat.terminals)
    merged = DisjointSets(state.vertices)
    for ev in [None, *state.timeline.events]:
        if ev is not None:
            merged.union(ev.edge[0], ev.edge[1])
        outer = DisjointSets(state.vertices)
        for v in state.vertices:
            outer.union(v, merged.find(v))
        for u, v, _ in loss:
            outer.union(u, v)
        clusters = {}
        for t in cat.terminals:
            clusters.setdefault(outer.find(t), set()).add(merged.find(t))
        assert all(len(c) == 1 for c in clusters.values())
        assert {outer.find(v) for v in state.vertices} == set(clusters)


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_improvement_iff_selection_below_one(inst, r, rnd):
    cat = build_catalog(inst, r)
    state = collection_state(cat, random_collection(cat, rnd, 0.3))
    for k in state.outside():
        drops = mst_with(state, k) < state.mst_cost
        assert drops == (selection_value(state, k) < 1)
        assert smst_drop(state, k) == state.smst_value - collection_state(cat, state.members | {k}).smst_value


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_violated_components_improve_the_tree(inst, r, rnd):
    cat = build_catalog(inst, r)
    state = collection_state(cat, random_collection(cat, rnd, 0.3))
    for k in state.outside():
        comp = cat.components[k]
        load = dual_load(state.timeline, comp)
        if load > comp.cost:
            new = add_component(state, k).mst_cost
            assert new <= state.mst_cost + comp.cost - load < state.mst_cost


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_smst_is_monotone(inst, r, rnd):
    cat = build_catalog(inst, r)
    order = [k for k in range(len(cat)) if k not in cat.pair_indices]
    rnd.shuffle(order)
    members = set(cat.pair_indices)
    last = collection_state(cat, members).smst_value
    for k in order:
        members.add(k)
        value = collection_state(cat, members).smst_value
        assert value <= last
        last = value


@given(bquasi_instances(n_max=10), st.integers(2, 5), st.randoms(use_true_random=False))
def test_contraction_inequality(inst, r, rnd):
    cat = build_catalog(inst, r)
    rest = [k for k in range(len(cat)) if k not in cat.pair_indices]
    labels = {k: rnd.randrange(4) for k in rest}
    r0 = set(cat.pair_indices) | {k for k in rest if labels[k] == 0}
    r1 = {k for k in rest if labels[k] == 1}
    r2 = {k for k in rest if labels[k] == 2}

    def smst(s):
        return collection_state(cat, s).smst_value
    assert smst(r0) - smst(r0 | r2) >= smst(r0 | r1) - smst(r0 | r1 | r2)


@given(connected_graphs(min_n=1, max_n=20))
def test_rank_integral_equals_mst(inst):
    tree = kruskal(range(inst.n), inst.edges)
    assert intmst_sum(range(inst.n), inst.edges) == edge_cost_sum(tree)


@given(connected_graphs(min_n=2, max_n=12))
def test_timeline_steiner_objective_counts_terminal_blocks(inst):
    _, tl = kruskal_timeline(range(inst.n), inst.edges, inst.terminals)
    expected = Fraction(0)
    for p, y in tl.partitions():
        expected += (steiner_rank(p, inst.terminals) - 1) * y
    assert tl.steiner_objective() == expected
    if len(inst.terminals) == inst.n:
        assert tl.steiner_objective() == tl.objective()
