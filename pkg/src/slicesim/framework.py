"""Full simulation: admission, slice deployment, flow dynamics, measurement,
and per-slice adaptation, driven by one event engine."""

import time
from dataclasses import dataclass, field

from .agents import Experience
from .engine import Engine, EventKind
from .grm import ACCEPT, Decision
from .lrm import AdaptState, AdaptationRecord, adaptation_reward, apply_adaptation
from .slices import SliceInstance, record_status_tick
from .topology import place_vnfs
from .traffic import generate_flow_arrivals, generate_request_trace


@dataclass
class SimulationResult:
    horizon_s: float
    revenue: float = 0.0
    arrived: list = field(default_factory=lambda: [0, 0])
    accepted: list = field(default_factory=lambda: [0, 0])
    decisions: list = field(default_factory=list)
    adaptations: list = field(default_factory=list)
    status_records: list = field(default_factory=list)
    satisfaction_series: list = field(default_factory=list)  # (t, mean over active slices)
    orphaned_flows: int = 0

    @property
    def mean_satisfaction(self):
        if not self.status_records:
            return float("nan")
        return sum(r.satisfaction for r in self.status_records) / len(self.status_records)


class SlicingSimulation:
    """One seeded run of the two-layer framework.

    The admission agent decides each request; when a per-tenant adaptation
    agent is given, every active slice is revisited each adaptation period.
    """

    def __init__(self, tenants, topology, streams, admission_agent,
                 adaptation_agent=None, cost_model=None,
                 measurement_period=1.0, adaptation_period=1.0,
                 adapt_epsilon=0.0, admission_epsilon=0.0, learn=False,
                 act_stream=None, w_norm=None, keep_status_records=True,
                 spread_only=False):
        self.tenants = tenants
        self.topology = topology
        self.streams = streams
        self.admission_agent = admission_agent
        self.adaptation_agent = adaptation_agent
        self.cost_model = cost_model
        self.measurement_period = measurement_period
        self.adaptation_period = adaptation_period
        self.adapt_epsilon = adapt_epsilon
        self.admission_epsilon = admission_epsilon
        self.learn = learn
        self.act_stream = act_stream
        self.w_norm = w_norm
        self.keep_status_records = keep_status_records
        self.spread_only = spread_only

        self.engine = Engine()
        self.slices = {}
        self.counts = [0, 0]
        self.dc_capacity = next(iter(topology.dcs.values())).capacity
        self._pending_adapt = {}  # slice_id -> (enc_state, action_idx, applied_delta, record)
        self._pending_admission = None

    def _schedule_end(self, slice_inst):
        def schedule(flow_id, duration):
            return self.engine.schedule_after(
                duration, EventKind.FLOW_SERVICE_END, (slice_inst.slice_id, flow_id))
        return schedule

    def _adapt_state(self, s):
        residual = min(self.topology.dcs[d].residual for d in s.host_dcs) if s.host_dcs else 0.0
        return AdaptState(satisfaction=s.satisfaction(),
                          residual_fraction=residual / self.dc_capacity,
                          slice_type=s.tenant.slice_type.type_id)

    def run(self, horizon_s, record_decisions=True):
        trace = generate_request_trace(self.tenants, horizon_s, self.streams)
        return self.run_trace(trace, horizon_s, record_decisions=record_decisions)

    def run_trace(self, trace, horizon_s, record_decisions=True):
        result = SimulationResult(horizon_s=horizon_s)
        self._horizon = horizon_s
        for req in trace:
            self.engine.schedule(req.time, EventKind.REQUEST_ARRIVAL, (req,))
        if self.measurement_period:
            self.engine.schedule(self.measurement_period, EventKind.MEASUREMENT)

        def handler(event):
            kind = event.kind
            if kind == EventKind.REQUEST_ARRIVAL:
                self._on_request(event, result, record_decisions)
            elif kind == EventKind.REQUEST_COMPLETION:
                self._on_completion(event, result)
            elif kind == EventKind.FLOW_ARRIVAL:
                self._on_flow_arrival(event)
            elif kind == EventKind.FLOW_SERVICE_END:
                self._on_flow_end(event)
            elif kind == EventKind.MEASUREMENT:
                self._on_measurement(event, result)
            elif kind == EventKind.ADAPTATION_CHECK:
                self._on_adaptation(event, result)

        self.engine.run_until(horizon_s, handler)
        if self.learn and self._pending_admission is not None:
            s, a, r = self._pending_admission
            self.admission_agent.observe(Experience(s, a, r, s, terminal=True))
        self.topology.check_ledgers()
        return result

    def _on_request(self, event, result, record_decisions):
        (req,) = event.payload
        ti = req.tenant_index
        tenant = self.tenants[ti]
        result.arrived[ti] += 1
        state = self.admission_agent.encode(self.counts[0], self.counts[1], ti)
        demand = {d: tenant.slice_type.units_per_request_per_dc for d in self.topology.dc_ids}
        t0 = time.perf_counter_ns()
        action = self.admission_agent.act(self.counts[0], self.counts[1], ti,
                                          epsilon=self.admission_epsilon,
                                          stream=self.act_stream)
        wallclock_us = (time.perf_counter_ns() - t0) / 1000.0
        coerced = False
        reward = 0.0
        if action == ACCEPT:
            if self.topology.can_admit(demand):
                self._deploy(req, tenant, demand, event.time)
                self.counts[ti] += 1
                result.accepted[ti] += 1
                reward = tenant.immediate_reward
            else:
                coerced = True
        result.revenue += reward
        if self.learn and self._pending_admission is not None:
            s, a, r = self._pending_admission
            self.admission_agent.observe(Experience(s, a, r, state, terminal=False))
        self._pending_admission = (state, action, reward)
        if record_decisions:
            result.decisions.append(Decision(
                time=event.time, tenant=tenant.id, action=action, coerced=coerced,
                reward=reward, n_a=self.counts[0], n_b=self.counts[1],
                wallclock_us=wallclock_us))

    def _deploy(self, req, tenant, demand, now):
        units = tenant.slice_type.units_per_request_per_dc
        placement = place_vnfs(self.topology, req.index, tenant.slice_type.num_vnfs,
                               units, spread_only=self.spread_only)
        self.topology.allocate(req.index, demand)
        s = SliceInstance(req.index, tenant, placement, units, created_at=now,
                          w_norm=self.w_norm)
        self.slices[req.index] = s
        ftrace = generate_flow_arrivals(tenant.slice_type, now, self._horizon,
                                        self.streams.get(f"flows/{req.index}"),
                                        slice_id=req.index)
        s.scheduled_arrivals = len(ftrace.events)
        for fid, (arr, dur) in enumerate(ftrace.events):
            h = self.engine.schedule(arr, EventKind.FLOW_ARRIVAL, (req.index, fid, dur))
            s.pending_arrivals.append(h)
        self.engine.schedule(now + req.holding_time, EventKind.REQUEST_COMPLETION,
                             (req.index, self.tenants.index(tenant)))
        if self.adaptation_agent is not None:
            self.engine.schedule(now + self.adaptation_period,
                                 EventKind.ADAPTATION_CHECK, (req.index,))

    def _on_completion(self, event, result):
        slice_id, ti = event.payload
        s = self.slices[slice_id]
        result.orphaned_flows += max(0, s.scheduled_arrivals - s.arrived_count)
        s.terminate(self.topology, event.time)
        self.counts[ti] -= 1
        self._finalize_adaptation(slice_id, terminal=True)

    def _on_flow_arrival(self, event):
        slice_id, fid, dur = event.payload
        s = self.slices[slice_id]
        if s.active:
            s.admit_flow(fid, dur, event.time, self._schedule_end(s))
            s.check_conservation()

    def _on_flow_end(self, event):
        slice_id, fid = event.payload
        s = self.slices[slice_id]
        if s.active:
            s.end_flow(fid, self._schedule_end(s))
            s.check_conservation()

    def _on_measurement(self, event, result):
        records = record_status_tick(self.slices.values(), event.time)
        if records:
            mean = sum(r.satisfaction for r in records) / len(records)
            result.satisfaction_series.append((event.time, mean))
            if self.keep_status_records:
                result.status_records.extend(records)
        self.engine.schedule_after(self.measurement_period, EventKind.MEASUREMENT)

    def _finalize_adaptation(self, slice_id, terminal=False, next_state=None,
                             next_sat=None):
        pending = self._pending_adapt.pop(slice_id, None)
        if pending is None:
            return
        enc_state, action_idx, applied_delta, record = pending
        s = self.slices[slice_id]
        agent = self.adaptation_agent
        after_sat = next_sat if next_sat is not None else s.satisfaction()
        after = AdaptState(after_sat, 0.0, s.tenant.slice_type.type_id)
        reward = adaptation_reward(after, applied_delta, len(s.host_dcs), self.cost_model)
        record.satisfaction_after = after_sat
        record.reward = reward
        if self.learn and agent.trains:
            nxt = agent.encode(next_state) if next_state is not None else enc_state
            t0 = time.perf_counter_ns()
            agent.observe(Experience(enc_state, action_idx, reward, nxt,
                                     terminal=terminal or next_state is None))
            record.update_us = (time.perf_counter_ns() - t0) / 1000.0

    def _on_adaptation(self, event, result):
        (slice_id,) = event.payload
        s = self.slices[slice_id]
        if not s.active:
            return
        agent = self.adaptation_agent
        state = self._adapt_state(s)
        self._finalize_adaptation(slice_id, next_state=state, next_sat=state.satisfaction)
        t0 = time.perf_counter_ns()
        action_idx = agent.act(state, s, self.topology,
                               epsilon=self.adapt_epsilon, stream=self.act_stream)
        decide_us = (time.perf_counter_ns() - t0) / 1000.0
        delta = agent.deltas[action_idx]
        applied, apply_us = apply_adaptation(s, self.topology, delta,
                                             schedule_end=self._schedule_end(s))
        record = AdaptationRecord(
            time=event.time, tenant=s.tenant.id, slice_id=slice_id,
            action_index=action_idx, delta_units=applied,
            satisfaction_before=state.satisfaction, satisfaction_after=float("nan"),
            reward=float("nan"), wallclock_us=decide_us + apply_us, decide_us=decide_us)
        result.adaptations.append(record)
        self._pending_adapt[slice_id] = (agent.encode(state), action_idx, applied, record)
        self.engine.schedule_after(self.adaptation_period, EventKind.ADAPTATION_CHECK,
                                   (slice_id,))
