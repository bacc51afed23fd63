import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slicesim.engine import RngStreams
from slicesim.topology import (CapacityExceeded, InvalidParams, NoFeasiblePlacement,
                               generate_ba_topology, place_vnfs)


def fresh_topology(seed=1, **kw):
    return generate_ba_topology(10, 2, 5, 2, RngStreams(seed).get("topology"), **kw)


def is_connected(topo):
    adj = {n: set() for n in topo.nodes}
    for u, v in topo.edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, stack = set(), [topo.nodes[0]]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        stack.extend(adj[n] - seen)
    return len(seen) == len(topo.nodes)


def test_default_generation_matches_config():
    topo = fresh_topology()
    assert len(topo.nodes) == 10
    assert len(topo.dc_ids) == 5
    assert set(topo.inp_of.values()) == {0, 1}
    assert is_connected(topo)


def test_invalid_params_rejected():
    with pytest.raises(InvalidParams):
        generate_ba_topology(3, 3, 1, 1, RngStreams(0).get("t"))


def test_degree_distribution_heavy_tailed():
    hits = 0
    for seed in range(100):
        topo = generate_ba_topology(100, 2, 5, 2, RngStreams(seed).get("topology"))
        degs = sorted(topo.degrees().values())
        if degs[-1] >= 3 * degs[len(degs) // 2]:
            hits += 1
    assert hits == 100


def test_generation_is_seed_deterministic():
    assert fresh_topology(5).edges == fresh_topology(5).edges


def test_dcs_are_highest_degree_nodes():
    topo = fresh_topology()
    deg = topo.degrees()
    dc_degrees = [deg[d] for d in topo.dc_ids]
    non_dc = [deg[n] for n in topo.nodes if n not in topo.dc_ids]
    assert min(dc_degrees) >= max(non_dc) or min(dc_degrees) == max(non_dc)


def test_can_admit_fresh_network():
    topo = fresh_topology()
    assert topo.can_admit({d: 60.0 for d in topo.dc_ids})
    assert topo.can_admit({d: 0.0 for d in topo.dc_ids})


def test_sixth_request_rejected_at_capacity():
    topo = fresh_topology()
    demand = {d: 60.0 for d in topo.dc_ids}
    for i in range(5):
        topo.allocate(i, demand)
    assert not topo.can_admit(demand)


def test_allocate_release_inverse():
    topo = fresh_topology()
    before = {d: topo.dcs[d].allocated for d in topo.dc_ids}
    topo.allocate(99, {d: 60.0 for d in topo.dc_ids})
    topo.release(99)
    assert {d: topo.dcs[d].allocated for d in topo.dc_ids} == before


def test_two_allocations_sum():
    topo = fresh_topology()
    demand = {d: 60.0 for d in topo.dc_ids}
    topo.allocate(1, demand)
    topo.allocate(2, demand)
    assert all(topo.dcs[d].allocated == 120.0 for d in topo.dc_ids)


def test_allocate_over_capacity_raises():
    topo = fresh_topology()
    topo.allocate(1, {d: 290.0 for d in topo.dc_ids})
    with pytest.raises(CapacityExceeded):
        topo.allocate(2, {d: 60.0 for d in topo.dc_ids})


@settings(deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 9),
                          st.floats(min_value=0, max_value=80)), max_size=60))
def test_ledger_consistency_random_ops(ops):
    topo = fresh_topology()
    reference = {d: {} for d in topo.dc_ids}
    for is_alloc, sid, units in ops:
        demand = {d: units for d in topo.dc_ids}
        if is_alloc and topo.can_admit(demand):
            topo.allocate(sid, demand)
            for d in topo.dc_ids:
                reference[d][sid] = reference[d].get(sid, 0.0) + units
        elif not is_alloc:
            topo.release(sid)
            for d in topo.dc_ids:
                reference[d].pop(sid, None)
        topo.check_ledgers()
    for d in topo.dc_ids:
        assert topo.dcs[d].allocated == pytest.approx(sum(reference[d].values()))


def test_first_fit_placement_uses_lowest_dcs():
    topo = fresh_topology()
    p = place_vnfs(topo, 1, 4, 60.0)
    assert [dc for _, dc in p.vnf_hosts] == topo.dc_ids[:4]


def test_placement_empty_for_zero_vnfs():
    topo = fresh_topology()
    assert place_vnfs(topo, 1, 0, 60.0).vnf_hosts == []


def test_spread_only_placement_infeasible():
    topo = fresh_topology()
    # exhaust two DCs so only 3 can host 60 more units
    for i, d in enumerate(topo.dc_ids[:2]):
        topo.allocate(100 + i, {d: 250.0})
    with pytest.raises(NoFeasiblePlacement):
        place_vnfs(topo, 1, 4, 60.0, spread_only=True)
    p = place_vnfs(topo, 1, 4, 60.0, spread_only=False)
    assert len(p.vnf_hosts) == 4  # reuses feasible DCs


def test_edge_list_export(tmp_path):
    topo = fresh_topology()
    path = tmp_path / "edges.txt"
    topo.export_edge_list(path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == len(topo.edges)
    u, v = lines[0].split()
    assert int(u) in topo.nodes and int(v) in topo.nodes
