"""Named experiments (revenue sweep, acceptance proportions, satisfaction,
decision delay), metrics aggregation, and CSV/manifest export."""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from . import config as config_mod
from .config import ExperimentConfig
from .engine import RngStreams
from .grm import (DqnAdmission, GreedyAdmission, TabularAdmission, admission_oracle,
                  run_admission_episode, train_admission_agent)
from .framework import SlicingSimulation
from .lrm import (AdaptCostModel, DqnAdaptation, GreedyAdaptation, NoAdaptation,
                  TabularAdaptation)
from .topology import generate_ba_topology
from .traffic import SliceType, Tenant, generate_request_trace, trace_checksum

VERSION = "0.1.0"
TRAIN_MASTER_SEED = 777
TRAIN_EPISODE_SEED_BASE = 900_000


@dataclass
class MetricsReport:
    config_text: str
    seeds: tuple
    revenue_rows: list = field(default_factory=list)
    acceptance_rows: list = field(default_factory=list)
    satisfaction_rows: list = field(default_factory=list)
    satisfaction_series_rows: list = field(default_factory=list)
    delay_rows: list = field(default_factory=list)
    traffic_checksums: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


def tenants_from_config(cfg: ExperimentConfig, reward_b=None):
    t = cfg.tenants
    s = cfg.slices
    type1 = SliceType(1, s.num_vnfs, s.type1.num_flows, s.type1.flow_arrival_interval_s,
                      s.type1.flow_service_time_s, s.units_per_request_per_dc)
    type2 = SliceType(2, s.num_vnfs, s.type2.num_flows, s.type2.flow_arrival_interval_s,
                      s.type2.flow_service_time_s, s.units_per_request_per_dc)
    rb = t.reward_b if reward_b is None else reward_b
    return [
        Tenant("A", t.request_rate_a, t.completion_rate, t.reward_a, type1),
        Tenant("B", t.request_rate_b, t.completion_rate, rb, type2),
    ]


def topology_from_config(cfg, streams):
    i = cfg.infrastructure
    return generate_ba_topology(i.num_nodes, i.ba_m, i.num_dcs, i.num_inps,
                                streams.get("topology"), dc_capacity=i.dc_capacity)


def build_admission_agent(kind, cfg, tenants, train=True, variant="dqn",
                          master_seed=TRAIN_MASTER_SEED):
    """Construct (and for learners, train) an admission agent for the given tenants."""
    a = cfg.agent
    cap = cfg.concurrency_cap
    if kind == "greedy":
        return GreedyAdmission(cap)
    if kind == "oracle":
        return admission_oracle(tenants, cap, gamma=a.gamma)
    master = RngStreams(master_seed)
    if kind == "qlearn":
        agent = TabularAdmission(alpha=a.alpha, gamma=a.gamma, alpha_decay_tau=a.alpha_decay_tau)
    elif kind in ("dqn", "ddqn"):
        agent = DqnAdmission(cap, init_stream=master.get("weights"),
                             sample_stream=master.get("replay"), gamma=a.gamma,
                             lr=a.learning_rate, hidden=(a.hidden_units, a.hidden_units),
                             replay_capacity=a.replay_capacity, batch_size=a.batch_size,
                             target_sync=a.target_sync,
                             variant="double" if kind == "ddqn" else variant)
    else:
        raise ValueError(f"unknown agent kind: {kind}")
    if train:
        horizon_s = a.train_horizon_hours * 3600.0
        episodes = a.tabular_train_episodes if kind == "qlearn" else a.train_episodes
        train_admission_agent(
            agent, tenants,
            streams_factory=lambda ep: RngStreams(TRAIN_EPISODE_SEED_BASE + ep),
            topology_factory=lambda: topology_from_config(cfg, RngStreams(master_seed)),
            episodes=episodes, horizon_s=horizon_s,
            eps_start=a.eps_start, eps_final=a.eps_final,
            anneal_fraction=a.anneal_fraction,
            act_stream=master.get("exploration"))
    return agent


def evaluate_admission(agent, cfg, tenants, seed, trace=None):
    streams = RngStreams(seed)
    topology = topology_from_config(cfg, streams)
    horizon_s = cfg.run.horizon_hours * 3600.0
    if trace is None:
        trace = generate_request_trace(tenants, horizon_s, streams)
    return run_admission_episode(
        agent, tenants, trace, topology, horizon_s, epsilon=0.0,
        act_stream=streams.get("exploration"), learn=False, record_decisions=True,
        units_per_dc=cfg.slices.units_per_request_per_dc)


def experiment_revenue_sweep(cfg: ExperimentConfig, agents=("greedy", "qlearn", "dqn", "oracle"),
                             progress=None):
    """Train where applicable and evaluate every agent at each tenant-B reward,
    on paired per-seed traffic. Fills both revenue and acceptance rows."""
    report = MetricsReport(config_text=config_mod.serialize(cfg), seeds=tuple(cfg.run.seeds))
    horizon_s = cfg.run.horizon_hours * 3600.0
    # traffic depends only on rates, so traces are shared across reward values
    traces = {}
    for seed in cfg.run.seeds:
        streams = RngStreams(seed)
        trace = generate_request_trace(tenants_from_config(cfg), horizon_s, streams)
        traces[seed] = trace
        report.traffic_checksums[seed] = trace_checksum(trace)
    decision_traces = {}
    for rb in cfg.run.reward_b_sweep:
        tenants = tenants_from_config(cfg, reward_b=rb)
        for kind in agents:
            agent = build_admission_agent(kind, cfg, tenants)
            if progress:
                progress(f"{kind} agent ready at reward_b={rb}")
            for seed in cfg.run.seeds:
                res = evaluate_admission(agent, cfg, tenants, seed, trace=traces[seed])
                report.revenue_rows.append({
                    "agent": kind, "reward_b": rb, "seed": seed,
                    "revenue_total": res.revenue,
                    "revenue_per_hour": res.revenue_per_hour})
                for ti, tenant in enumerate(tenants):
                    arrived = res.arrived[ti]
                    report.acceptance_rows.append({
                        "agent": kind, "reward_b": rb, "seed": seed,
                        "tenant": tenant.id, "arrived": arrived,
                        "accepted": res.accepted[ti],
                        "fraction": res.accepted[ti] / arrived if arrived else 0.0})
                decision_traces[(kind, rb, seed)] = [
                    (d.time, d.tenant, d.action) for d in res.decisions]
    report.extras["decision_traces"] = decision_traces
    return report


def experiment_acceptance_proportions(cfg, agents=("greedy", "qlearn", "dqn", "oracle"),
                                      progress=None):
    return experiment_revenue_sweep(cfg, agents=agents, progress=progress)


def cost_model_from_config(cfg):
    ad = cfg.adaptation
    return AdaptCostModel(revenue_rate=ad.revenue_rate, unit_cost=ad.unit_cost,
                          op_cost=ad.op_cost)


def build_adaptation_agent(kind, cfg, master_seed=TRAIN_MASTER_SEED):
    ad = cfg.adaptation
    a = cfg.agent
    master = RngStreams(master_seed + 1)
    if kind == "none":
        return NoAdaptation(ad.deltas)
    if kind == "greedy":
        return GreedyAdaptation(ad.deltas)
    if kind == "qlearn":
        return TabularAdaptation(ad.deltas, alpha=a.alpha, gamma=a.gamma,
                                 alpha_decay_tau=a.alpha_decay_tau)
    if kind in ("dqn", "ddqn"):
        return DqnAdaptation(master.get("weights"), master.get("replay"),
                             deltas=ad.deltas, gamma=a.gamma, lr=a.learning_rate,
                             hidden=(a.hidden_units, a.hidden_units),
                             replay_capacity=a.replay_capacity,
                             batch_size=a.batch_size, target_sync=a.target_sync,
                             variant="double" if kind == "ddqn" else "dqn")
    raise ValueError(f"unknown adaptation agent kind: {kind}")


def make_simulation(cfg, tenants, seed, admission_agent, adaptation_agent,
                    learn=False, adapt_epsilon=0.0):
    streams = RngStreams(seed)
    topology = topology_from_config(cfg, streams)
    return SlicingSimulation(
        tenants, topology, streams, admission_agent,
        adaptation_agent=adaptation_agent,
        cost_model=cost_model_from_config(cfg),
        measurement_period=cfg.run.measurement_period_s,
        adaptation_period=cfg.adaptation.period_s,
        adapt_epsilon=adapt_epsilon, learn=learn,
        act_stream=streams.get("exploration"))


def train_adaptation_agent(agent, cfg, admission_agent, progress=None,
                           master_seed=TRAIN_MASTER_SEED):
    ad = cfg.adaptation
    tenants = tenants_from_config(cfg)
    episodes = ad.train_episodes
    for ep in range(episodes):
        frac = min(1.0, ep / max(1, int(episodes * cfg.agent.anneal_fraction)))
        epsilon = cfg.agent.eps_start + (cfg.agent.eps_final - cfg.agent.eps_start) * frac
        sim = make_simulation(cfg, tenants, TRAIN_EPISODE_SEED_BASE + 50_000 + ep,
                              admission_agent, agent, learn=True,
                              adapt_epsilon=epsilon)
        sim.run(ad.train_horizon_s, record_decisions=False)
        if progress:
            progress(f"adaptation training episode {ep + 1}/{episodes}")
    return agent


def experiment_satisfaction(cfg: ExperimentConfig, progress=None):
    """Paired-seed comparison of the intelligent framework (learned admission +
    learned adaptation) against the non-intelligent one (centralized greedy
    admission, fixed initial allocations, no adaptation feedback)."""
    report = MetricsReport(config_text=config_mod.serialize(cfg), seeds=tuple(cfg.run.seeds))
    tenants = tenants_from_config(cfg)
    horizon_s = cfg.run.satisfaction_horizon_s

    grm_dqn = build_admission_agent("dqn", cfg, tenants)
    if progress:
        progress("trained admission DQN")
    lrm_dqn = build_adaptation_agent("dqn", cfg)
    train_adaptation_agent(lrm_dqn, cfg, grm_dqn, progress=progress)
    greedy_grm = GreedyAdmission(cfg.concurrency_cap)

    modes = {
        "intelligent": (grm_dqn, lrm_dqn),
        "non_intelligent": (greedy_grm, NoAdaptation()),
    }
    for seed in cfg.run.seeds:
        streams = RngStreams(seed)
        trace = generate_request_trace(tenants, horizon_s, streams)
        report.traffic_checksums[seed] = trace_checksum(trace)
        for mode, (adm, ada) in modes.items():
            sim = make_simulation(cfg, tenants, seed, adm, ada, learn=False)
            res = sim.run_trace(trace, horizon_s, record_decisions=False)
            report.satisfaction_rows.append({
                "mode": mode, "seed": seed,
                "mean_satisfaction": res.mean_satisfaction,
                "revenue": res.revenue,
                "orphaned_flows": res.orphaned_flows})
            for t, mean in res.satisfaction_series:
                report.satisfaction_series_rows.append(
                    {"mode": mode, "seed": seed, "t_s": t, "satisfaction": mean})
        if progress:
            progress(f"satisfaction seed {seed} done")
    return report


def experiment_decision_delay(cfg: ExperimentConfig,
                              agents=("greedy", "qlearn", "dqn", "ddqn"),
                              progress=None):
    """Wall-clock adaptation decision delay per agent per VNF count.

    Runs with learning enabled so the inference+update definition includes a
    real training step for the learners.
    """
    report = MetricsReport(config_text=config_mod.serialize(cfg), seeds=tuple(cfg.run.seeds))
    horizon_s = cfg.run.satisfaction_horizon_s
    seeds = tuple(cfg.run.seeds)[:3] or (1,)
    for num_vnfs in cfg.run.vnf_sweep:
        sweep_cfg = config_mod.parse(config_mod.serialize(cfg))
        sweep_cfg.slices.num_vnfs = int(num_vnfs)
        tenants = tenants_from_config(sweep_cfg)
        for kind in agents:
            agent = build_adaptation_agent(kind, sweep_cfg)
            admission = GreedyAdmission(sweep_cfg.concurrency_cap)
            total_us, decide_us, update_us = [], [], []
            for seed in seeds:
                sim = make_simulation(sweep_cfg, tenants, seed, admission, agent,
                                      learn=agent.trains, adapt_epsilon=0.05)
                res = sim.run(horizon_s, record_decisions=False)
                for rec in res.adaptations:
                    total_us.append(rec.wallclock_us)
                    decide_us.append(rec.decide_us)
                    update_us.append(rec.update_us)
            arr = np.array(total_us)
            uarr = np.array(update_us)
            for name, samples in (("inference_only", arr),
                                  ("inference_plus_update", arr + uarr)):
                report.delay_rows.append({
                    "agent": kind, "num_vnfs": int(num_vnfs), "delay_kind": name,
                    "median_us": float(np.median(samples)),
                    "p95_us": float(np.percentile(samples, 95)),
                    "n": len(samples)})
            if progress:
                progress(f"delay {kind} num_vnfs={num_vnfs} "
                         f"median={np.median(arr):.1f}us n={len(arr)}")
    return report


def _write_csv(path, rows, header):
    try:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(row[h]) for h in header])
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def export_report(report: MetricsReport, out_dir):
    """One CSV per populated experiment section plus a reproducibility manifest."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if report.revenue_rows:
        path = os.path.join(out_dir, "revenue.csv")
        _write_csv(path, report.revenue_rows,
                   ["agent", "reward_b", "seed", "revenue_total", "revenue_per_hour"])
        written.append(path)
    if report.acceptance_rows:
        path = os.path.join(out_dir, "acceptance.csv")
        _write_csv(path, report.acceptance_rows,
                   ["agent", "reward_b", "seed", "tenant", "arrived", "accepted", "fraction"])
        written.append(path)
    if report.satisfaction_rows:
        path = os.path.join(out_dir, "satisfaction.csv")
        _write_csv(path, report.satisfaction_rows,
                   ["mode", "seed", "mean_satisfaction", "revenue", "orphaned_flows"])
        written.append(path)
    if report.satisfaction_series_rows:
        path = os.path.join(out_dir, "satisfaction_series.csv")
        _write_csv(path, report.satisfaction_series_rows,
                   ["mode", "seed", "t_s", "satisfaction"])
        written.append(path)
    if report.delay_rows:
        path = os.path.join(out_dir, "delay.csv")
        _write_csv(path, report.delay_rows,
                   ["agent", "num_vnfs", "delay_kind", "median_us", "p95_us", "n"])
        written.append(path)
    manifest = os.path.join(out_dir, "manifest.txt")
    try:
        with open(manifest, "w") as f:
            f.write(f"version = {VERSION!r}\n")
            f.write(f"seeds = {tuple(report.seeds)!r}\n")
            for seed in sorted(report.traffic_checksums):
                f.write(f"traffic_checksum[{seed}] = "
                        f"{report.traffic_checksums[seed]!r}\n")
            f.write("# --- config echo ---\n")
            f.write(report.config_text)
    except OSError as e:
        raise OSError(f"cannot write {manifest}: {e}") from e
    written.append(manifest)
    return written
