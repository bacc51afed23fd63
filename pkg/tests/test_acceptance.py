"""End-to-end acceptance suite.

Re-runs the headline experiments with the default configuration, training
included, and checks the published claims with explicit tolerances. Expect on
the order of an hour of wall-clock time; everything heavy sits in
session-scoped fixtures so each artifact is built once.

Known failure, kept on purpose: test_preference_shift_at_least_ten_points.
The revenue-optimal admission policy shifts tenant B's accepted fraction by
about 7 points between reward 1 and reward 6, and no stationary policy that
also keeps revenue at or above greedy can exceed about 9.7 points, so the
10-point bar is unreachable by a correctly trained agent (see README). The
direction and statistical significance of the shift are asserted by the
passing tests around it.
"""

import itertools
import math

import numpy as np
import pytest
from scipy import stats

from slicesim.config import ExperimentConfig
from slicesim.engine import RngStreams, sample_exponential
from slicesim.experiments import (build_admission_agent, evaluate_admission,
                                  experiment_decision_delay,
                                  experiment_satisfaction, make_simulation,
                                  tenants_from_config)
from slicesim.grm import GreedyAdmission, decision_trace_bytes
from slicesim.lrm import NoAdaptation
from slicesim.mdp import (build_admission_mdp, build_duty_cycle_mdp,
                          q_learning_values, value_iteration)
from slicesim.nn import Mlp
from slicesim.traffic import generate_request_trace

pytestmark = pytest.mark.acceptance

REWARD_SWEEP = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
SEEDS = tuple(range(1, 21))


# --------------------------------------------------------------------------
# heavy artifacts, built once per session
# --------------------------------------------------------------------------

@pytest.fixture(scope="session")
def admission_sweep():
    """For each tenant-B reward: greedy/oracle baselines plus trained DQN and
    tabular agents, each evaluated on the 20 held-out seeds."""
    out = {}
    for rb in REWARD_SWEEP:
        cfg = ExperimentConfig()
        tenants = tenants_from_config(cfg, reward_b=rb)
        row = {}
        for kind in ("greedy", "oracle", "dqn", "qlearn"):
            agent = build_admission_agent(kind, cfg, tenants)
            revs, frac_a, frac_b = [], [], []
            for seed in SEEDS:
                res = evaluate_admission(agent, cfg, tenants, seed)
                revs.append(res.revenue_per_hour)
                frac_a.append(res.accepted[0] / res.arrived[0])
                frac_b.append(res.accepted[1] / res.arrived[1])
            row[kind] = {"revs": np.array(revs),
                         "acc_a": float(np.mean(frac_a)),
                         "acc_b": float(np.mean(frac_b))}
        out[rb] = row
    return out


@pytest.fixture(scope="session")
def satisfaction_report():
    """Trains the admission DQN and the adaptation DQN, then runs the paired
    intelligent vs non-intelligent comparison over the 20 default seeds."""
    return experiment_satisfaction(ExperimentConfig())


@pytest.fixture(scope="session")
def delay_report():
    return experiment_decision_delay(ExperimentConfig())


# --------------------------------------------------------------------------
# 1. trained DQL within 5% of the exact oracle at every reward level
# --------------------------------------------------------------------------

def test_dql_within_five_percent_of_oracle(admission_sweep):
    for rb in REWARD_SWEEP:
        dqn = admission_sweep[rb]["dqn"]["revs"].mean()
        oracle = admission_sweep[rb]["oracle"]["revs"].mean()
        assert dqn >= 0.95 * oracle, (
            f"reward_b={rb}: dqn {dqn:.3f}/h < 95% of oracle {oracle:.3f}/h")


# --------------------------------------------------------------------------
# 2. revenue ordering dql >= qlearn >= greedy, significance, monotone curves
# --------------------------------------------------------------------------

def test_revenue_ordering_at_every_reward(admission_sweep):
    for rb in REWARD_SWEEP:
        g = admission_sweep[rb]["greedy"]["revs"].mean()
        q = admission_sweep[rb]["qlearn"]["revs"].mean()
        d = admission_sweep[rb]["dqn"]["revs"].mean()
        assert d >= q - 1e-9, f"reward_b={rb}: dqn {d:.3f} < qlearn {q:.3f}"
        assert q >= g - 1e-9, f"reward_b={rb}: qlearn {q:.3f} < greedy {g:.3f}"


def test_dql_significantly_beats_greedy_at_high_rewards(admission_sweep):
    for rb in (5.0, 6.0):
        d = admission_sweep[rb]["dqn"]["revs"]
        g = admission_sweep[rb]["greedy"]["revs"]
        assert d.mean() > g.mean()
        t, p = stats.ttest_rel(d, g)
        assert t > 0 and p < 0.05, f"reward_b={rb}: paired t={t:.2f} p={p:.2e}"


def test_revenue_curves_monotone_in_reward(admission_sweep):
    for kind in ("greedy", "qlearn", "dqn"):
        means = [admission_sweep[rb][kind]["revs"].mean() for rb in REWARD_SWEEP]
        for lo, hi in zip(means, means[1:]):
            assert hi >= lo - 1e-9, f"{kind} curve not monotone: {means}"


# --------------------------------------------------------------------------
# 3. greedy decisions are byte-identical across reward settings (exact)
# --------------------------------------------------------------------------

def test_greedy_decision_trace_reward_invariant():
    cfg = ExperimentConfig()
    traces = set()
    for rb in REWARD_SWEEP:
        tenants = tenants_from_config(cfg, reward_b=rb)
        res = evaluate_admission(GreedyAdmission(cfg.concurrency_cap), cfg,
                                 tenants, seed=1)
        traces.add(decision_trace_bytes(res.decisions))
    assert len(traces) == 1


# --------------------------------------------------------------------------
# 4. preference shift toward tenant B (known red, see module docstring)
# --------------------------------------------------------------------------

def test_preference_shift_at_least_ten_points(admission_sweep):
    lo = admission_sweep[1.0]["dqn"]["acc_b"]
    hi = admission_sweep[6.0]["dqn"]["acc_b"]
    assert hi - lo >= 0.10, (
        f"accepted-fraction shift for B is {100 * (hi - lo):.1f} points "
        f"({lo:.3f} -> {hi:.3f}); the optimal policy tops out near 7")


def test_preference_shift_direction_and_tenant_a_sacrifice(admission_sweep):
    """The qualitative claim behind criterion 4, asserted at the achievable
    scale: B's fraction rises by several points and A's falls."""
    assert admission_sweep[6.0]["dqn"]["acc_b"] - admission_sweep[1.0]["dqn"]["acc_b"] >= 0.05
    assert admission_sweep[6.0]["dqn"]["acc_a"] <= admission_sweep[1.0]["dqn"]["acc_a"] - 0.10


# --------------------------------------------------------------------------
# 5. intelligent vs non-intelligent satisfaction, 20 paired seeds
# --------------------------------------------------------------------------

def test_satisfaction_gain_at_least_ten_points(satisfaction_report):
    by_mode = {}
    for row in satisfaction_report.satisfaction_rows:
        by_mode.setdefault(row["mode"], []).append(row["mean_satisfaction"])
    intel = np.mean(by_mode["intelligent"])
    base = np.mean(by_mode["non_intelligent"])
    assert len(by_mode["intelligent"]) == len(SEEDS)
    assert intel - base >= 0.10, (
        f"mean satisfaction gap {100 * (intel - base):.1f} points "
        f"(intelligent {intel:.3f}, non-intelligent {base:.3f})")


# --------------------------------------------------------------------------
# 6. decision delay: sub-second medians, growth with VNF count, greedy floor
# --------------------------------------------------------------------------

def _delay_table(report, delay_kind):
    table = {}
    for row in report.delay_rows:
        if row["delay_kind"] == delay_kind:
            table[(row["agent"], row["num_vnfs"])] = row["median_us"]
    return table


def test_learner_median_delay_under_one_second(delay_report):
    medians = _delay_table(delay_report, "inference_plus_update")
    for agent in ("dqn", "ddqn"):
        for num_vnfs in (4, 8, 12, 16):
            us = medians[(agent, num_vnfs)]
            assert us < 1_000_000.0, f"{agent} at {num_vnfs} VNFs: {us:.0f}us"


def test_delay_non_decreasing_in_vnf_count(delay_report):
    medians = _delay_table(delay_report, "inference_plus_update")
    for agent in ("greedy", "qlearn", "dqn", "ddqn"):
        series = [medians[(agent, v)] for v in (4, 8, 12, 16)]
        for lo, hi in zip(series, series[1:]):
            # microsecond medians jitter; allow 10% scheduler noise
            assert hi >= 0.9 * lo, f"{agent} delay not non-decreasing: {series}"


def test_greedy_delay_below_dql(delay_report):
    medians = _delay_table(delay_report, "inference_plus_update")
    for num_vnfs in (4, 8, 12, 16):
        assert medians[("greedy", num_vnfs)] <= medians[("dqn", num_vnfs)]


# --------------------------------------------------------------------------
# 7. tabular convergence against exact values
# --------------------------------------------------------------------------

def test_q_learning_converges_on_closed_form_toy():
    mdp = build_duty_cycle_mdp()
    v_star, _ = value_iteration(mdp, tolerance=1e-12)
    assert np.allclose(v_star, 1.0 / (1.0 - mdp.discount), atol=1e-8)
    learned = q_learning_values(mdp, 1_000_000, RngStreams(11).get("probe"))
    assert np.abs(learned - v_star).max() < 1e-3


def test_q_learning_within_five_percent_on_admission_mdp():
    mdp = build_admission_mdp(rate_a=10.0, rate_b=12.0, completion_rate=6.0,
                              cap=5, reward_a=2.0, reward_b=6.0)
    v_star, _ = value_iteration(mdp, tolerance=1e-10)
    learned = q_learning_values(mdp, 1_000_000, RngStreams(12).get("probe"))
    err = np.abs(learned - v_star).max()
    assert err < 0.05 * np.abs(v_star).max(), f"{err:.3f} vs scale {np.abs(v_star).max():.2f}"


# --------------------------------------------------------------------------
# 8. analytic gradients vs central finite differences, 100 randomized nets
# --------------------------------------------------------------------------

def _finite_difference_grads(net, x, grad_out, h=1e-6):
    num_w = [np.zeros_like(w) for w in net.weights]
    num_b = [np.zeros_like(b) for b in net.biases]

    def loss():
        return float(np.sum(net.forward(x) * grad_out))

    for params, grads in ((net.weights, num_w), (net.biases, num_b)):
        for li, p in enumerate(params):
            for idx in np.ndindex(p.shape):
                orig = p[idx]
                p[idx] = orig + h
                up = loss()
                p[idx] = orig - h
                down = loss()
                p[idx] = orig
                grads[li][idx] = (up - down) / (2 * h)
    return num_w, num_b


def test_gradient_check_hundred_trials():
    stream = RngStreams(99).get("gradcheck")
    for trial in range(100):
        sizes = [int(stream.integers(2, 5)) for _ in range(3)]
        net = Mlp([sizes[0], sizes[1], sizes[2]], stream)
        x = stream.normal(size=(3, sizes[0]))
        grad_out = stream.normal(size=(3, sizes[2]))
        gw, gb = net.gradients(x, grad_out)
        nw, nb = _finite_difference_grads(net, x, grad_out)
        for analytic, numeric in zip(gw + gb, nw + nb):
            rel = np.abs(analytic - numeric).max() / max(np.abs(numeric).max(), 1e-12)
            assert rel < 1e-4, f"trial {trial}: relative error {rel:.2e}"


# --------------------------------------------------------------------------
# 9. sampler statistics and invariant fuzzing
# --------------------------------------------------------------------------

WORKLOAD_RATES = (  # every arrival/service rate the default workload uses
    10.0 / 3600.0,  # tenant A requests
    12.0 / 3600.0,  # tenant B requests
    6.0 / 3600.0,   # completions
    1.0 / 2.0,      # type-1 flow arrivals
    1.0 / 5.0,      # type-2 flow arrivals
    1.0 / 200.0,    # type-1 flow service
    1.0 / 300.0,    # type-2 flow service
)


def test_exponential_sampler_means_within_five_percent():
    for i, rate in enumerate(WORKLOAD_RATES):
        stream = RngStreams(40 + i).get("sampler")
        draws = np.array([sample_exponential(stream, rate) for _ in range(100_000)])
        assert abs(draws.mean() * rate - 1.0) < 0.05


def test_exponential_sampler_passes_ks():
    for i, rate in enumerate(WORKLOAD_RATES):
        stream = RngStreams(60 + i).get("sampler")
        draws = np.array([sample_exponential(stream, rate) for _ in range(10_000)])
        _, p = stats.kstest(draws, "expon", args=(0.0, 1.0 / rate))
        assert p >= 0.01, f"rate {rate}: KS p={p:.4f}"


def test_invariants_hold_across_ten_thousand_event_run():
    """Flow conservation is asserted inside the event handlers after every
    flow event and the capacity ledgers at the end of the run; this drives a
    default-workload run past 10^4 events and then re-audits the ledgers."""
    cfg = ExperimentConfig()
    tenants = tenants_from_config(cfg)
    # NoAdaptation keeps the residual pool free so admissions (and therefore
    # flow traffic) stay high; the eager greedy adapter would starve the run
    sim = make_simulation(cfg, tenants, seed=13, admission_agent=GreedyAdmission(5),
                          adaptation_agent=NoAdaptation())
    horizon = 6000.0
    trace = generate_request_trace(tenants, horizon, RngStreams(13))
    res = sim.run_trace(trace, horizon, record_decisions=True)
    events = (len(trace)                      # request arrivals
              + sum(res.accepted)             # completions scheduled
              + sum(s.arrived_count for s in sim.slices.values())
              + sum(s.served_count for s in sim.slices.values())
              + len(res.satisfaction_series)  # measurement ticks
              + len(res.adaptations))
    assert events >= 10_000, f"only {events} events"
    for s in sim.slices.values():
        if s.active:
            s.check_conservation()
        else:  # termination clears the queues, so only an inequality remains
            assert s.served_count <= s.arrived_count
    sim.topology.check_ledgers()
    for dc in sim.topology.dcs.values():
        assert -1e-9 <= dc.allocated <= dc.capacity + 1e-9


# --------------------------------------------------------------------------
# 10. byte-level reproducibility and cross-agent traffic pairing
# --------------------------------------------------------------------------

FAST = ["--set", "run.seeds=(1,2,3)", "--set", "run.horizon_hours=4.0",
        "--set", "run.reward_b_sweep=(2.0,6.0)"]


def test_identical_seed_config_byte_identical_csvs(tmp_path):
    from slicesim.cli import main

    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["run", "--experiment", "revenue", "--agent", "greedy",
                     "--out", str(out), *FAST]) == 0
        outs.append(out)
    for fname in ("revenue.csv", "acceptance.csv", "manifest.txt"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_traffic_checksums_identical_across_agents(tmp_path):
    from slicesim.cli import main

    manifests = []
    for agent in ("greedy", "oracle"):
        out = tmp_path / agent
        assert main(["run", "--experiment", "revenue", "--agent", agent,
                     "--out", str(out), *FAST]) == 0
        lines = (out / "manifest.txt").read_text().splitlines()
        manifests.append([ln for ln in lines if ln.startswith("traffic_checksum")])
    assert manifests[0] == manifests[1]
    assert len(manifests[0]) == 3
