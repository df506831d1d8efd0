import json
import random
import time

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oor.availability import blocking_probability
from oor.errors import TopologyError
from oor.topology import (
    FiberLink,
    Topology,
    attach_availabilities,
    enumerate_paths,
    enumerate_routes,
    load_topology,
    topology_from_dict,
    topology_to_dict,
)

PUBLISHED = (0.9, 0.85, 0.8, 0.75, 0.75, 0.7, 0.65, 0.6, 0.55, 0.55, 0.5, 0.5)


def topo(n, edges, cap=1):
    return Topology(n, tuple(FiberLink(u, v, cap) for u, v in edges))


def dp_count(n, edges, s, d):
    g = nx.DiGraph(edges)
    g.add_nodes_from(range(1, n + 1))
    ways = {v: 0 for v in g}
    ways[s] = 1
    for v in nx.topological_sort(g):
        for w in g.successors(v):
            ways[w] += ways[v]
    return ways[d]


def test_bundled_shape(topo24):
    assert topo24.node_count == 24 and len(topo24.links) == 35
    assert topo24.has_link((3, 7)) and not topo24.has_link((7, 3))


def test_bundled_twelve_paths(topo24, ens24):
    t0 = time.perf_counter()
    ens = enumerate_paths(topo24, 1, 5)
    assert time.perf_counter() - t0 < 1.0
    assert len(ens) == 12
    assert ens == enumerate_paths(topo24, 1, 5)


def test_bundled_paths_fit_capacities(topo24, ens24):
    used = {}
    for p in ens24:
        assert p.nodes[0] == 1 and p.nodes[-1] == 5
        assert len(set(p.nodes)) == len(p.nodes)
        assert all(topo24.has_link(l) for l in p.links)
        for l in p.links:
            used.setdefault(l, []).append(p.wavelength)
    for l, lams in used.items():
        assert len(lams) <= topo24.capacity[l]
        assert len(set(lams)) == len(lams)  # no wavelength clash on a fiber
        assert all(0 <= x < topo24.wavelengths_per_fiber for x in lams)


def test_bundled_paths_are_distinct_simple_routes(topo24, ens24):
    g = nx.DiGraph([l.key for l in topo24.links])
    every = {tuple(p) for p in nx.all_simple_paths(g, 1, 5)}
    assert len(every) == len(enumerate_routes(topo24, 1, 5)) == 81
    routes = [p.nodes for p in ens24]
    assert len(set(routes)) == 12 and set(routes) <= every


def test_sorted_by_hops(ens24):
    hops = [p.hops for p in ens24]
    assert hops == sorted(hops)
    keys = [(p.hops, p.nodes) for p in ens24]
    assert keys == sorted(keys)


def test_two_node_and_triangle():
    e = enumerate_paths(topo(2, [(1, 2)]), 1, 2)
    assert len(e) == 1 and e[0].hops == 0
    tri = enumerate_paths(topo(3, [(1, 2), (2, 3), (1, 3)]), 1, 3)
    assert [p.nodes for p in tri] == [(1, 3), (1, 2, 3)]


def test_capacity_limits_ensemble():
    # both routes share fiber 3-4, which carries one channel
    t = Topology(4, (FiberLink(1, 2, 1), FiberLink(1, 3, 1), FiberLink(2, 3, 1), FiberLink(3, 4, 1)))
    assert [p.nodes for p in enumerate_paths(t, 1, 4)] == [(1, 3, 4)]
    assert len(enumerate_routes(t, 1, 4)) == 2


@st.composite
def dags(draw):
    n = draw(st.integers(2, 7))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return n, edges


@settings(max_examples=60, deadline=None)
@given(dags())
def test_dag_count_matches_dp(dag):
    n, edges = dag
    want = dp_count(n, edges, 1, n)
    assert len(enumerate_routes(topo(n, edges), 1, n)) == want
    # with channels to spare every route can be lit at once
    assert len(enumerate_paths(topo(n, edges, cap=64), 1, n)) == want


def test_empty_links_valid():
    t = load_topology(json.dumps({"node_count": 3, "links": []}))
    assert t.links == () and len(enumerate_paths(t, 1, 3)) == 0


@pytest.mark.parametrize(
    "doc,frag",
    [
        ({"node_count": 24, "links": [{"from": 1, "to": 99}]}, "99"),
        ({"node_count": 3, "links": [{"from": 1}]}, "$.links[0]"),
        ({"links": []}, "node_count"),
        ({"node_count": 3, "links": [{"from": 1, "to": 2}, {"from": 1, "to": 2}]}, "duplicate"),
    ],
)
def test_validation_errors(doc, frag):
    with pytest.raises(TopologyError, match=frag.replace("[", r"\[").replace("$", r"\$")):
        topology_from_dict(doc)


def test_malformed_json_reports_position():
    with pytest.raises(TopologyError, match="line 1"):
        load_topology("{oops")


def test_roundtrip(topo24):
    assert topology_from_dict(topology_to_dict(topo24)) == topo24


def test_attach_availabilities(ens24):
    e = attach_availabilities(ens24, PUBLISHED)
    assert e.availabilities == PUBLISHED
    assert blocking_probability(attach_availabilities(ens24, [1.0] * 12)) == 0.0
    with pytest.raises(ValueError):
        attach_availabilities(ens24, [1.2] + [0.5] * 11)
    with pytest.raises(ValueError):
        attach_availabilities(ens24, [0.5])


def test_unknown_endpoint(topo24):
    with pytest.raises(ValueError):
        enumerate_paths(topo24, 1, 25)
    with pytest.raises(ValueError):
        enumerate_paths(topo24, 5, 5)
