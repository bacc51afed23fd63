"""Joint multi-InP physical network: BA scale-free topology, DC capacity ledgers, VNF placement."""

from dataclasses import dataclass, field


class TopologyError(Exception):
    pass


class InvalidParams(TopologyError):
    pass


class CapacityExceeded(TopologyError):
    pass


class NoFeasiblePlacement(TopologyError):
    pass


@dataclass
class DataCenter:
    id: int
    capacity: float
    allocated: float = 0.0
    allocations: dict = field(default_factory=dict)  # slice_id -> units

    @property
    def residual(self):
        return self.capacity - self.allocated


@dataclass
class Placement:
    slice_id: int
    vnf_hosts: list  # [(vnf_index, dc_id), ...]
    units_per_dc: dict  # dc_id -> units


class Topology:
    def __init__(self, nodes, edges, dc_ids, inp_of, dc_capacity=300.0):
        self.nodes = list(nodes)
        self.edges = list(edges)
        self.dc_ids = sorted(dc_ids)
        self.inp_of = dict(inp_of)
        self.dcs = {d: DataCenter(id=d, capacity=float(dc_capacity)) for d in self.dc_ids}

    def degrees(self):
        deg = {n: 0 for n in self.nodes}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def can_admit(self, demand):
        """True iff every DC named in demand has residual >= demanded units."""
        for dc_id, units in demand.items():
            if self.dcs[dc_id].residual < units:
                return False
        return True

    def allocate(self, slice_id, demand):
        if not self.can_admit(demand):
            raise CapacityExceeded(f"demand {demand} infeasible for slice {slice_id}")
        for dc_id, units in demand.items():
            dc = self.dcs[dc_id]
            dc.allocated += units
            dc.allocations[slice_id] = dc.allocations.get(slice_id, 0.0) + units

    def adjust(self, slice_id, dc_id, delta):
        """Change one slice's allocation at one DC; used by slice adaptation."""
        dc = self.dcs[dc_id]
        held = dc.allocations.get(slice_id, 0.0)
        if delta > dc.residual or held + delta < 0:
            raise CapacityExceeded(
                f"delta {delta} infeasible at DC {dc_id} (residual {dc.residual}, held {held})"
            )
        dc.allocated += delta
        dc.allocations[slice_id] = held + delta
        if dc.allocations[slice_id] == 0.0:
            del dc.allocations[slice_id]

    def release(self, slice_id):
        for dc in self.dcs.values():
            units = dc.allocations.pop(slice_id, 0.0)
            dc.allocated -= units

    def check_ledgers(self):
        for dc in self.dcs.values():
            total = sum(dc.allocations.values())
            assert abs(dc.allocated - total) < 1e-9, f"ledger drift at DC {dc.id}"
            assert -1e-9 <= dc.allocated <= dc.capacity + 1e-9, f"capacity breach at DC {dc.id}"

    def export_edge_list(self, path):
        with open(path, "w") as f:
            for u, v in self.edges:
                f.write(f"{u} {v}\n")


def generate_ba_topology(n, m, n_dc, n_inp, stream, dc_capacity=300.0):
    """Barabasi-Albert preferential attachment graph.

    Starts from a connected m-node seed (a path); each new node attaches to m
    distinct existing nodes with probability proportional to current degree.
    DCs are the n_dc highest-degree nodes; InPs partition nodes contiguously.
    """
    if not (1 <= m < n) or n_dc > n or n_inp < 1:
        raise InvalidParams(f"bad BA parameters n={n}, m={m}, n_dc={n_dc}, n_inp={n_inp}")

    edges = []
    degree = [0] * n
    # repeated-nodes list implements preferential attachment
    repeated = []
    for i in range(1, m):
        edges.append((i - 1, i))
        degree[i - 1] += 1
        degree[i] += 1
        repeated.extend([i - 1, i])
    if m == 1:
        repeated.append(0)
    for new in range(m, n):
        targets = set()
        while len(targets) < m:
            pick = repeated[int(stream.integers(0, len(repeated)))]
            targets.add(pick)
        for t in sorted(targets):
            edges.append((t, new))
            degree[t] += 1
            degree[new] += 1
            repeated.extend([t, new])

    order = sorted(range(n), key=lambda i: (-degree[i], i))
    dc_ids = sorted(order[:n_dc])
    # contiguous partition of node ids into InPs
    inp_of = {}
    per = n / n_inp
    for node in range(n):
        inp_of[node] = min(int(node / per), n_inp - 1)
    return Topology(range(n), edges, dc_ids, inp_of, dc_capacity=dc_capacity)


def place_vnfs(topology, slice_id, num_vnfs, units_per_dc, spread_only=False):
    """Deterministic first-fit placement.

    Prefers one VNF per distinct DC (ascending id); when VNFs outnumber DCs
    with sufficient residual, hosts are reused round-robin over the feasible
    set, unless spread_only forbids sharing a DC between two VNFs.
    """
    if num_vnfs == 0:
        return Placement(slice_id=slice_id, vnf_hosts=[], units_per_dc={})
    feasible = [d for d in topology.dc_ids if topology.dcs[d].residual >= units_per_dc]
    if not feasible or (spread_only and len(feasible) < num_vnfs):
        raise NoFeasiblePlacement(f"cannot host {num_vnfs} VNFs of {units_per_dc} units")
    hosts = [(k, feasible[k % len(feasible)]) for k in range(num_vnfs)]
    demand = {d: units_per_dc for d in topology.dc_ids}
    return Placement(slice_id=slice_id, vnf_hosts=hosts, units_per_dc=demand)
