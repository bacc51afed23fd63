"""Local Resource Manager: slice adaptation actions, cost model, and policies."""

import csv
import time
from dataclasses import dataclass

import numpy as np

from .agents import Experience, QNetwork, QTable, ReplayBuffer, epsilon_greedy
from .topology import CapacityExceeded

NOOP = 0.0


@dataclass(frozen=True)
class AdaptCostModel:
    revenue_rate: float = 1.0  # reward per satisfaction point held, per check
    unit_cost: float = 0.01  # reward per processing unit added (summed over host DCs)
    op_cost: float = 0.1  # reward per reconfiguration event

    def __post_init__(self):
        assert self.revenue_rate >= 0 and self.unit_cost >= 0 and self.op_cost >= 0


@dataclass(frozen=True)
class AdaptState:
    satisfaction: float
    residual_fraction: float  # min residual over host DCs / DC capacity
    slice_type: int  # 1 or 2

    def encode(self):
        return (self.satisfaction, self.residual_fraction,
                1.0 if self.slice_type == 1 else 0.0,
                1.0 if self.slice_type == 2 else 0.0)

    def discretize(self, bins=10):
        b = min(bins - 1, int(self.satisfaction * bins))
        rb = min(bins - 1, int(self.residual_fraction * bins))
        return (b, rb, self.slice_type)


def adaptation_reward(after: AdaptState, delta_per_dc, n_host_dcs, model: AdaptCostModel):
    """Revenue for the satisfaction level held, minus unit cost of added units
    (additions only) and a flat cost per reconfiguration."""
    r = model.revenue_rate * after.satisfaction
    if delta_per_dc != NOOP:
        r -= model.unit_cost * max(0.0, delta_per_dc * n_host_dcs)
        r -= model.op_cost
    return r


def apply_adaptation(slice_inst, topology, delta_per_dc, schedule_end=None):
    """Apply a per-host-DC allocation delta; coerced to NoOp when infeasible.

    Validates every VNF's host before touching any ledger, then updates each
    host DC. Returns (applied delta, wallclock microseconds).
    """
    t0 = time.perf_counter_ns()
    applied = NOOP
    if delta_per_dc != NOOP and slice_inst.active:
        feasible = True
        for vnf_idx, dc_id in slice_inst.placement.vnf_hosts:
            dc = topology.dcs[dc_id]
            new_units = slice_inst.units[dc_id] + delta_per_dc
            if delta_per_dc > 0 and dc.residual < delta_per_dc:
                feasible = False
            # shrinking must not strand an in-service flow
            if new_units // slice_inst.vnfs_at[dc_id] < len(slice_inst.in_service):
                feasible = False
            if new_units < 0:
                feasible = False
        if feasible:
            for dc_id in slice_inst.host_dcs:
                try:
                    topology.adjust(slice_inst.slice_id, dc_id, delta_per_dc)
                except CapacityExceeded:
                    feasible = False
                    break
                slice_inst.units[dc_id] += delta_per_dc
            applied = delta_per_dc if feasible else NOOP
        if applied > 0 and schedule_end is not None:
            slice_inst.promote_waiting(schedule_end)
    return applied, (time.perf_counter_ns() - t0) / 1000.0


class AdaptationAgent:
    trains = False

    def __init__(self, deltas=(0.0, 10.0, 20.0, -10.0)):
        self.deltas = tuple(deltas)

    def encode(self, state: AdaptState):
        return state.encode()

    def act(self, state: AdaptState, slice_inst, topology, epsilon=0.0, stream=None):
        raise NotImplementedError

    def observe(self, exp: Experience):
        pass


class NoAdaptation(AdaptationAgent):
    def act(self, state, slice_inst, topology, epsilon=0.0, stream=None):
        return 0


class GreedyAdaptation(AdaptationAgent):
    """Reallocates whenever the remaining resources allow it, blind to
    satisfaction and to the value of the slice: largest feasible addition wins."""

    def act(self, state, slice_inst, topology, epsilon=0.0, stream=None):
        best, best_delta = 0, 0.0
        for i, d in enumerate(self.deltas):
            if d <= best_delta:
                continue
            ok = all(topology.dcs[dc].residual >= d
                     for _, dc in slice_inst.placement.vnf_hosts)
            if ok:
                best, best_delta = i, d
        return best


class DqnAdaptation(AdaptationAgent):
    trains = True

    def __init__(self, init_stream, sample_stream, deltas=(0.0, 10.0, 20.0, -10.0),
                 gamma=0.95, lr=1e-3, hidden=(64, 64), replay_capacity=10_000,
                 batch_size=32, target_sync=200, variant="dqn"):
        super().__init__(deltas)
        self.net = QNetwork(state_dim=4, n_actions=len(self.deltas), hidden=hidden,
                            init_stream=init_stream, lr=lr, gamma=gamma)
        self.buffer = ReplayBuffer(replay_capacity)
        self.batch_size = batch_size
        self.target_sync = target_sync
        self.variant = variant
        self.sample_stream = sample_stream
        self.steps = 0

    def act(self, state, slice_inst, topology, epsilon=0.0, stream=None):
        q = self.net.q_values(state.encode())
        return epsilon_greedy(q, epsilon, stream)

    def observe(self, exp: Experience):
        self.buffer.push(exp)
        if len(self.buffer) < self.batch_size:
            return
        self.net.train_step(self.buffer.sample(self.batch_size, self.sample_stream),
                            variant=self.variant)
        self.steps += 1
        if self.steps % self.target_sync == 0:
            self.net.sync_target()


class TabularAdaptation(AdaptationAgent):
    trains = True

    def __init__(self, deltas=(0.0, 10.0, 20.0, -10.0), alpha=0.1, gamma=0.95, bins=10,
                 alpha_decay_tau=200.0):
        super().__init__(deltas)
        self.table = QTable(n_actions=len(self.deltas), alpha=alpha, gamma=gamma,
                            alpha_decay_tau=alpha_decay_tau)
        self.bins = bins

    def encode(self, state):
        return state.discretize(self.bins)

    def act(self, state, slice_inst, topology, epsilon=0.0, stream=None):
        return epsilon_greedy(self.table.q_values(state.discretize(self.bins)),
                              epsilon, stream)

    def observe(self, exp: Experience):
        self.table.update(exp)


@dataclass
class AdaptationRecord:
    time: float
    tenant: str
    slice_id: int
    action_index: int
    delta_units: float
    satisfaction_before: float
    satisfaction_after: float
    reward: float
    wallclock_us: float  # decision + application
    decide_us: float
    update_us: float = 0.0


def export_adaptation_log(records, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sim_time_s", "tenant", "slice_id", "action", "delta_units",
                    "satisfaction_before", "satisfaction_after", "reward", "wallclock_us"])
        for r in records:
            w.writerow([repr(r.time), r.tenant, r.slice_id, r.action_index,
                        repr(r.delta_units), repr(r.satisfaction_before),
                        repr(r.satisfaction_after), repr(r.reward), repr(r.wallclock_us)])
