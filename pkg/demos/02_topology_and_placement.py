"""Build the two-InP physical network and place a slice's VNF chain on it.

The substrate is a small scale-free graph (preferential attachment); the five
highest-degree nodes act as data centers with 300 processing units each. A
slice request books 60 units at every DC and its VNFs are spread first-fit
over the DCs that can host them.
"""

from slicesim.engine import RngStreams
from slicesim.topology import generate_ba_topology, place_vnfs

streams = RngStreams(7)
topo = generate_ba_topology(n=10, m=2, n_dc=5, n_inp=2,
                            stream=streams.get("topology"))

print(f"{len(topo.nodes)} nodes, {len(topo.edges)} edges")
print("degree by node:", topo.degrees())
print("DCs (top-degree nodes):", topo.dc_ids)
print("InP ownership:", topo.inp_of)

# place an 8-VNF chain for one slice booking 60 units per DC
placement = place_vnfs(topo, slice_id=0, num_vnfs=8, units_per_dc=60.0)
topo.allocate(slice_id=0, demand=placement.units_per_dc)
print("\nVNF placement (vnf index, DC):", placement.vnf_hosts)
for d in topo.dc_ids:
    dc = topo.dcs[d]
    print(f"  DC {d}: allocated {dc.allocated:.0f}/{dc.capacity:.0f}")
topo.check_ledgers()

topo.export_edge_list("/tmp/slicesim_edges.txt")
print("\nedge list written to /tmp/slicesim_edges.txt (one 'u v' pair per line)")
