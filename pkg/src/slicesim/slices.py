"""Slice instance lifecycle: flow queue dynamics, satisfaction measurement, status records."""

import csv
from collections import Counter, deque
from dataclasses import dataclass


class SliceTerminated(Exception):
    pass


@dataclass
class StatusRecord:
    time: float
    slice_id: int
    tenant_id: str
    waiting_count: int
    in_service_count: int
    allocated_units: float  # units per host DC (uniform)
    satisfaction: float


class SliceInstance:
    """A deployed VNF chain with its allocation and flow queue.

    One in-service flow holds one unit at every VNF it traverses, so a DC
    hosting k of the slice's VNFs spends k units per flow. Flow capacity is
    the minimum over host DCs of allocated/vnfs_hosted.
    """

    def __init__(self, slice_id, tenant, placement, units_per_dc, created_at, w_norm=None):
        self.slice_id = slice_id
        self.tenant = tenant
        self.placement = placement
        self.units = {dc: float(units_per_dc) for dc in placement.units_per_dc}
        self.host_dcs = sorted({dc for _, dc in placement.vnf_hosts})
        self.vnfs_at = Counter(dc for _, dc in placement.vnf_hosts)
        self.in_service = {}  # flow_id -> service end handle
        self.waiting = deque()  # (flow_id, service_duration)
        self.served_count = 0
        self.arrived_count = 0
        self.scheduled_arrivals = 0
        self.orphaned_flows = 0
        self.created_at = created_at
        self.terminated_at = None
        self.w_norm = w_norm if w_norm is not None else tenant.slice_type.total_flows
        self.pending_arrivals = []  # handles of scheduled FlowArrival events

    @property
    def active(self):
        return self.terminated_at is None

    def flow_capacity(self):
        if not self.host_dcs:
            return 0
        return int(min(self.units[d] // self.vnfs_at[d] for d in self.host_dcs))

    def admit_flow(self, flow_id, service_duration, now, schedule_end):
        """Serve the flow if a unit is free at every host DC, else queue it FIFO.

        schedule_end(flow_id, duration) must schedule the FlowServiceEnd event
        and return a cancellation handle.
        """
        if not self.active:
            raise SliceTerminated(f"slice {self.slice_id} terminated")
        self.arrived_count += 1
        if len(self.in_service) < self.flow_capacity():
            self.in_service[flow_id] = schedule_end(flow_id, service_duration)
        else:
            self.waiting.append((flow_id, service_duration))

    def end_flow(self, flow_id, schedule_end):
        if flow_id not in self.in_service:
            return
        del self.in_service[flow_id]
        self.served_count += 1
        self.promote_waiting(schedule_end)

    def promote_waiting(self, schedule_end):
        while self.waiting and len(self.in_service) < self.flow_capacity():
            fid, dur = self.waiting.popleft()
            self.in_service[fid] = schedule_end(fid, dur)

    def satisfaction(self):
        return 1.0 - min(1.0, len(self.waiting) / self.w_norm)

    def status(self, now):
        per_dc = self.units[self.host_dcs[0]] if self.host_dcs else 0.0
        return StatusRecord(
            time=now,
            slice_id=self.slice_id,
            tenant_id=self.tenant.id,
            waiting_count=len(self.waiting),
            in_service_count=len(self.in_service),
            allocated_units=per_dc,
            satisfaction=self.satisfaction(),
        )

    def check_conservation(self):
        assert self.served_count + len(self.in_service) + len(self.waiting) == self.arrived_count

    def terminate(self, topology, now):
        """Release all units, cancel pending flow events. Idempotent."""
        if not self.active:
            return
        self.terminated_at = now
        topology.release(self.slice_id)
        for handle in self.in_service.values():
            handle.cancel()
        self.in_service.clear()
        self.waiting.clear()
        for handle in self.pending_arrivals:
            handle.cancel()
        self.pending_arrivals.clear()


def record_status_tick(slices, now):
    """One StatusRecord per active slice at a measurement instant."""
    return [s.status(now) for s in slices if s.active]


def export_status_csv(records, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_s", "slice_id", "tenant", "waiting", "in_service", "satisfaction"])
        for r in records:
            w.writerow([repr(r.time), r.slice_id, r.tenant_id, r.waiting_count,
                        r.in_service_count, repr(r.satisfaction)])
