"""Global Resource Manager: admission-control environment, episode driver, agents."""

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .agents import Experience, QNetwork, QTable, ReplayBuffer, epsilon_greedy, greedy_decision
from .engine import Engine, EventKind
from .mdp import OraclePolicy, build_admission_mdp
from .topology import generate_ba_topology
from .traffic import generate_request_trace

REJECT, ACCEPT = 0, 1


class AdmissionAgent:
    """Base policy: act() picks accept/reject, observe() ingests a transition."""

    trains = False

    def encode(self, n_a, n_b, tenant_idx):
        return (n_a, n_b, tenant_idx)

    def act(self, n_a, n_b, tenant_idx, epsilon=0.0, stream=None):
        raise NotImplementedError

    def observe(self, exp: Experience):
        pass


class GreedyAdmission(AdmissionAgent):
    """Accept whenever the residual resources cover the demand; rewards ignored."""

    def __init__(self, cap):
        self.cap = cap

    def act(self, n_a, n_b, tenant_idx, epsilon=0.0, stream=None):
        return ACCEPT if greedy_decision({"slots": self.cap - n_a - n_b}, {"slots": 1}) else REJECT


class OracleAdmission(AdmissionAgent):
    def __init__(self, policy: OraclePolicy):
        self.policy = policy

    def act(self, n_a, n_b, tenant_idx, epsilon=0.0, stream=None):
        return self.policy.decide(n_a, n_b, tenant_idx)


class TabularAdmission(AdmissionAgent):
    trains = True

    def __init__(self, alpha=0.1, gamma=0.95, alpha_decay_tau=200.0):
        self.table = QTable(n_actions=2, alpha=alpha, gamma=gamma,
                            alpha_decay_tau=alpha_decay_tau)

    @staticmethod
    def encode(n_a, n_b, tenant_idx):
        return (n_a, n_b, tenant_idx)

    def act(self, n_a, n_b, tenant_idx, epsilon=0.0, stream=None):
        return epsilon_greedy(self.table.q_values(self.encode(n_a, n_b, tenant_idx)),
                              epsilon, stream)

    def observe(self, exp: Experience):
        self.table.update(exp)


class DqnAdmission(AdmissionAgent):
    trains = True

    def __init__(self, cap, init_stream, sample_stream, gamma=0.95, lr=1e-3,
                 hidden=(64, 64), replay_capacity=10_000, batch_size=32,
                 target_sync=200, variant="dqn"):
        self.cap = cap
        self.net = QNetwork(state_dim=4, n_actions=2, hidden=hidden,
                            init_stream=init_stream, lr=lr, gamma=gamma)
        self.buffer = ReplayBuffer(replay_capacity)
        self.batch_size = batch_size
        self.target_sync = target_sync
        self.variant = variant
        self.sample_stream = sample_stream
        self.steps = 0

    def encode(self, n_a, n_b, tenant_idx):
        return (n_a / self.cap, n_b / self.cap,
                1.0 if tenant_idx == 0 else 0.0, 1.0 if tenant_idx == 1 else 0.0)

    def act(self, n_a, n_b, tenant_idx, epsilon=0.0, stream=None):
        q = self.net.q_values(self.encode(n_a, n_b, tenant_idx))
        return epsilon_greedy(q, epsilon, stream)

    def observe(self, exp: Experience):
        self.buffer.push(exp)
        if len(self.buffer) < self.batch_size:
            return
        batch = self.buffer.sample(self.batch_size, self.sample_stream)
        self.net.train_step(batch, variant=self.variant)
        self.steps += 1
        if self.steps % self.target_sync == 0:
            self.net.sync_target()


@dataclass
class Decision:
    time: float
    tenant: str
    action: int
    coerced: bool
    reward: float
    n_a: int
    n_b: int
    wallclock_us: float


@dataclass
class EpisodeResult:
    revenue: float = 0.0
    horizon_s: float = 0.0
    arrived: list = field(default_factory=lambda: [0, 0])
    accepted: list = field(default_factory=lambda: [0, 0])
    decisions: list = field(default_factory=list)
    infeasible_accepts: int = 0

    @property
    def revenue_per_hour(self):
        return self.revenue / (self.horizon_s / 3600.0)


def make_topology(config_like=None, stream=None, n=10, m=2, n_dc=5, n_inp=2, dc_capacity=300.0):
    if stream is None:
        stream = np.random.default_rng(0)
    return generate_ba_topology(n, m, n_dc, n_inp, stream, dc_capacity=dc_capacity)


def run_admission_episode(agent, tenants, trace, topology, horizon_s,
                          epsilon=0.0, act_stream=None, learn=False,
                          record_decisions=False, units_per_dc=60.0,
                          on_accept=None, on_complete=None):
    """Drive the admission MDP over one pre-generated request trace.

    Every arrival triggers one accept/reject decision; accepts allocate
    units_per_dc at every DC and schedule the release at the request's
    pre-drawn holding expiry. Returns the episode's revenue and decision log.
    """
    engine = Engine()
    result = EpisodeResult(horizon_s=horizon_s)
    counts = [0, 0]
    demand = {d: units_per_dc for d in topology.dc_ids}
    last = {"sar": None}  # (state, action, reward) awaiting next decision state

    for req in trace:
        engine.schedule(req.time, EventKind.REQUEST_ARRIVAL, (req,))

    def handler(event):
        if event.kind == EventKind.REQUEST_ARRIVAL:
            (req,) = event.payload
            ti = req.tenant_index
            tenant = tenants[ti]
            result.arrived[ti] += 1
            state = agent.encode(counts[0], counts[1], ti)
            t0 = time.perf_counter_ns()
            action = agent.act(counts[0], counts[1], ti, epsilon=epsilon, stream=act_stream)
            wallclock_us = (time.perf_counter_ns() - t0) / 1000.0
            coerced = False
            reward = 0.0
            if action == ACCEPT:
                if topology.can_admit(demand):
                    topology.allocate(req.index, demand)
                    counts[ti] += 1
                    result.accepted[ti] += 1
                    reward = tenant.immediate_reward
                    engine.schedule(event.time + req.holding_time,
                                    EventKind.REQUEST_COMPLETION, (req.index, ti))
                    if on_accept is not None:
                        on_accept(req, engine.clock)
                else:
                    coerced = True
                    result.infeasible_accepts += 1
            result.revenue += reward
            if learn and last["sar"] is not None:
                s, a, r = last["sar"]
                agent.observe(Experience(s, a, r, state, terminal=False))
            last["sar"] = (state, action, reward)
            if record_decisions:
                result.decisions.append(Decision(
                    time=event.time, tenant=tenant.id, action=action, coerced=coerced,
                    reward=reward, n_a=counts[0], n_b=counts[1], wallclock_us=wallclock_us))
        elif event.kind == EventKind.REQUEST_COMPLETION:
            slice_id, ti = event.payload
            topology.release(slice_id)
            counts[ti] -= 1
            if on_complete is not None:
                on_complete(slice_id, engine.clock)

    engine.run_until(horizon_s, handler)
    if learn and last["sar"] is not None:
        s, a, r = last["sar"]
        agent.observe(Experience(s, a, r, s, terminal=True))
    topology.check_ledgers()
    return result


def train_admission_agent(agent, tenants, streams_factory, topology_factory,
                          episodes, horizon_s, eps_start=1.0, eps_final=0.05,
                          anneal_fraction=0.5, act_stream=None):
    """Train over seeded episodes with a linearly annealed exploration rate.

    Epsilon anneals from eps_start to eps_final over the first anneal_fraction
    of episodes, then stays constant.
    """
    anneal_eps = max(1, int(episodes * anneal_fraction))
    for ep in range(episodes):
        frac = min(1.0, ep / anneal_eps)
        epsilon = eps_start + (eps_final - eps_start) * frac
        streams = streams_factory(ep)
        trace = generate_request_trace(tenants, horizon_s, streams)
        run_admission_episode(agent, tenants, trace, topology_factory(), horizon_s,
                              epsilon=epsilon, act_stream=act_stream, learn=True)
    return agent


def admission_oracle(tenants, cap, gamma=0.95):
    mdp = build_admission_mdp(
        rate_a=tenants[0].request_rate, rate_b=tenants[1].request_rate,
        completion_rate=tenants[0].completion_rate, cap=cap,
        reward_a=tenants[0].immediate_reward, reward_b=tenants[1].immediate_reward,
        discount=gamma)
    return OracleAdmission(OraclePolicy(mdp))


def decision_trace_bytes(decisions):
    """Canonical serialization of what the agent chose and saw: time, tenant,
    action, coercion flag, occupancy. Excludes the collected reward (which
    changes with the reward setting by definition) and wall-clock timing, so
    traces are comparable across reward settings and across machines."""
    lines = [f"{d.time!r},{d.tenant},{d.action},{int(d.coerced)},{d.n_a},{d.n_b}"
             for d in decisions]
    return ("\n".join(lines) + "\n").encode()


def export_decision_log(decisions, path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["sim_time_s", "tenant", "action", "coerced", "reward",
                    "nA", "nB", "wallclock_us"])
        for d in decisions:
            w.writerow([repr(d.time), d.tenant, d.action, int(d.coerced),
                        repr(d.reward), d.n_a, d.n_b, repr(d.wallclock_us)])
