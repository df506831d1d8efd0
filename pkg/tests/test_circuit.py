import random
from collections import Counter

import pytest

from oor.availability import blocking_probability, selection_vector
from oor.bits import Bits
from oor.circuit import (
    AccessControlSealing,
    Circuit,
    NodeRegistry,
    plan_circuit,
    setup_circuit,
    transmit,
)
from oor.errors import AccessDenied, Blocked, MisconfiguredCircuit
from oor.montecarlo import wilson_interval
from oor.topology import PathEnsemble, WavelengthPath


def single_path(nodes=(1, 2), p=1.0):
    return PathEnsemble(nodes[0], nodes[-1], (WavelengthPath(tuple(nodes), 0, p),))


def planned(ens, eta_max, seed, bits=32):
    rng = random.Random(seed)
    while True:
        try:
            return plan_circuit(ens, eta_max, rng, bits), rng
        except Blocked:
            continue


def test_single_path_eta0():
    plan, rng = planned(single_path(), 0, 1)
    assert plan.eta == 0 and plan.keyed_nodes == (2,)
    m = Bits.random(32, rng)
    out, trace = transmit(plan, m)
    assert out == m
    assert [r.payload for r in trace] == [m ^ plan.schedule.keys[0]]


def test_plan_replay(ens24):
    a, _ = planned(ens24, 9, 42)
    b, _ = planned(ens24, 9, 42)
    assert a == b


def test_one_layer_onion_only_destination_opens():
    plan, _ = planned(single_path(), 0, 3)
    reg = NodeRegistry(plan.path.nodes)
    onion = setup_circuit(plan, reg)
    with pytest.raises(AccessDenied):
        reg.issue_node(1).configure(onion)
    assert reg.issue_node(2).configure(onion) is None


def test_layers_open_in_path_order(ens24):
    for seed in range(30):
        plan, _ = planned(ens24, 9, seed)
        reg = NodeRegistry(plan.path.nodes)
        onion = setup_circuit(plan, reg)
        for i, v in enumerate(plan.keyed_nodes):
            # every other node is refused
            for other in plan.keyed_nodes[i + 1:]:
                with pytest.raises(AccessDenied):
                    reg.issue_node(other).open_layer(onion)
            cfg, onion = reg.issue_node(v).open_layer(onion)
            assert cfg.node == v and cfg.lfsr == plan.key_specs[i]
            assert cfg.wavelength == plan.wavelength
        assert onion is None


def test_foreign_registry_denied():
    plan, _ = planned(single_path(), 0, 4)
    onion = setup_circuit(plan, NodeRegistry(plan.path.nodes))
    other = NodeRegistry(plan.path.nodes, AccessControlSealing())
    with pytest.raises(AccessDenied):
        other.issue_node(2).configure(onion)


def test_eta2_delivery_and_hop_changes():
    ens = single_path(tuple(range(1, 8)))
    rng = random.Random(9)
    seen = 0
    for _ in range(200):
        plan = plan_circuit(ens, 2, rng, 64)
        m = Bits.random(64, rng)
        if m in plan.schedule.keys:
            continue
        out, trace = transmit(plan, m)
        assert out == m
        for a, b in zip(trace, trace[1:]):
            changed = a.payload != b.payload
            assert changed == (a.link[1] in plan.anonymizers)
        if plan.eta >= 1:
            assert trace[0].payload != trace[-1].payload
            seen += 1
    assert seen > 50


def test_wrong_wavelength_refused(ens24):
    plan, rng = planned(ens24, 9, 5)
    m = Bits.random(32, rng)
    with pytest.raises(MisconfiguredCircuit):
        transmit(plan, m, wavelength=plan.wavelength + 1)


def test_payload_length_checked():
    plan, _ = planned(single_path(), 0, 1)
    with pytest.raises(ValueError):
        transmit(plan, Bits(1, 8))


def test_blocked_when_nothing_up():
    with pytest.raises(Blocked):
        plan_circuit(single_path(p=0.0), 0, random.Random(0))


def test_eta_bounded_by_hops(ens24):
    rng = random.Random(11)
    for _ in range(300):
        try:
            plan = plan_circuit(ens24, 9, rng, 16)
        except Blocked:
            continue
        assert 0 <= plan.eta <= min(9, plan.path.hops)
        assert set(plan.anonymizers) <= set(plan.path.intermediates)


def test_selection_frequencies(ens24):
    rng = random.Random(2024)
    n = 10_000
    counts = Counter()
    for _ in range(n):
        try:
            plan = plan_circuit(ens24, 0, rng, 16)
        except Blocked:
            continue
        counts[plan.path.nodes] += 1
    served = sum(counts.values())
    want = [s / (1 - blocking_probability(ens24)) for s in selection_vector(ens24)]
    inside = sum(
        lo <= w <= hi
        for path, w in zip(ens24, want)
        for lo, hi in [wilson_interval(counts[path.nodes], served)]
    )
    assert inside >= 10  # 12 intervals at 95%; allow two misses


def test_circuit_reuse(ens24):
    plan, rng = planned(ens24, 9, 77)
    circ = Circuit.establish(plan)
    for _ in range(5):
        m = Bits.random(32, rng)
        if m in plan.schedule.keys:
            continue
        assert transmit(plan, m, circ)[0] == m
