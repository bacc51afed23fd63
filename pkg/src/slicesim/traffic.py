"""Tenant request processes and per-slice flow traces (Poisson arrivals, exponential service)."""

import csv
import hashlib
from dataclasses import dataclass, field

from .engine import sample_exponential


@dataclass(frozen=True)
class SliceType:
    type_id: int
    num_vnfs: int = 4
    total_flows: int = 180
    flow_arrival_interval: float = 2.0  # mean seconds between flow arrivals
    flow_service_time: float = 200.0  # mean seconds of flow service
    units_per_request_per_dc: float = 60.0

    def __post_init__(self):
        assert self.total_flows >= 0
        assert self.flow_arrival_interval > 0 and self.flow_service_time > 0


@dataclass(frozen=True)
class Tenant:
    id: str
    request_rate: float  # requests/hour
    completion_rate: float  # requests/hour
    immediate_reward: float
    slice_type: SliceType

    def __post_init__(self):
        assert self.request_rate > 0 and self.completion_rate > 0
        assert self.immediate_reward >= 0


# Table 1 flow dynamics for the two evaluated slice classes
SLICE_TYPE_1 = SliceType(type_id=1, total_flows=180, flow_arrival_interval=2.0, flow_service_time=200.0)
SLICE_TYPE_2 = SliceType(type_id=2, total_flows=60, flow_arrival_interval=5.0, flow_service_time=300.0)


def default_tenants(reward_a=2.0, reward_b=2.0, num_vnfs=4):
    t1 = SliceType(1, num_vnfs, 180, 2.0, 200.0)
    t2 = SliceType(2, num_vnfs, 60, 5.0, 300.0)
    return [
        Tenant("A", request_rate=10.0, completion_rate=6.0, immediate_reward=reward_a, slice_type=t1),
        Tenant("B", request_rate=12.0, completion_rate=6.0, immediate_reward=reward_b, slice_type=t2),
    ]


def next_request_interarrival(tenant, stream):
    """Seconds until the tenant's next slice request (rate given per hour)."""
    return sample_exponential(stream, tenant.request_rate / 3600.0)


def request_holding_time(tenant, stream):
    """Seconds the slice lives if admitted; expiry releases its resources."""
    return sample_exponential(stream, tenant.completion_rate / 3600.0)


@dataclass
class FlowTrace:
    slice_id: int
    events: list = field(default_factory=list)  # [(arrival_s, service_s), ...]

    def export_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["slice_id", "arrival_s", "service_s"])
            for a, s in self.events:
                w.writerow([self.slice_id, repr(a), repr(s)])


def generate_flow_trace(slice_type, start_time, stream, slice_id=-1):
    """Exactly total_flows arrivals after start_time, each with a drawn service time."""
    events = []
    t = start_time
    for _ in range(slice_type.total_flows):
        t += sample_exponential(stream, 1.0 / slice_type.flow_arrival_interval)
        dur = sample_exponential(stream, 1.0 / slice_type.flow_service_time)
        events.append((t, dur))
    return FlowTrace(slice_id=slice_id, events=events)


def generate_flow_arrivals(slice_type, start_time, end_time, stream, slice_id=-1):
    """Poisson flow arrivals over (start_time, end_time], one service draw each.

    Unlike generate_flow_trace this is bounded by time, not by count: a slice
    keeps receiving flows for as long as it lives.
    """
    events = []
    t = start_time
    while True:
        t += sample_exponential(stream, 1.0 / slice_type.flow_arrival_interval)
        if t > end_time:
            break
        dur = sample_exponential(stream, 1.0 / slice_type.flow_service_time)
        events.append((t, dur))
    return FlowTrace(slice_id=slice_id, events=events)


@dataclass(frozen=True)
class Request:
    index: int
    time: float
    tenant_index: int
    holding_time: float


def generate_request_trace(tenants, horizon_s, streams):
    """Merged per-tenant Poisson request streams over [0, horizon_s].

    Holding times are drawn at arrival, so the trace (and its checksum) is
    identical no matter which admission policy later consumes it.
    """
    per_tenant = []
    for ti, tenant in enumerate(tenants):
        arr = streams.get(f"requests/{tenant.id}")
        hold = streams.get(f"holding/{tenant.id}")
        t = 0.0
        while True:
            t += next_request_interarrival(tenant, arr)
            if t > horizon_s:
                break
            per_tenant.append((t, ti, request_holding_time(tenant, hold)))
    per_tenant.sort()
    return [Request(index=i, time=t, tenant_index=ti, holding_time=h)
            for i, (t, ti, h) in enumerate(per_tenant)]


def trace_checksum(trace):
    h = hashlib.sha256()
    for r in trace:
        h.update(f"{r.index},{r.time!r},{r.tenant_index},{r.holding_time!r};".encode())
    return h.hexdigest()
