"""Finite MDP solvers: discounted and average-reward value iteration, plus the
uniformized two-tenant admission model used as an exact oracle."""

from dataclasses import dataclass

import numpy as np


class NonFiniteMdp(Exception):
    pass


@dataclass
class MdpSpec:
    """Explicit finite MDP. transitions[a] is an (n_states, n_states) row-stochastic
    matrix, rewards[a] an n_states vector of expected immediate rewards."""

    states: list
    actions: list
    transitions: np.ndarray  # (n_actions, n_states, n_states)
    rewards: np.ndarray  # (n_actions, n_states)
    discount: float = 0.95

    def __post_init__(self):
        self.transitions = np.asarray(self.transitions, dtype=float)
        self.rewards = np.asarray(self.rewards, dtype=float)
        if not np.all(np.isfinite(self.transitions)) or not np.all(np.isfinite(self.rewards)):
            raise NonFiniteMdp("non-finite transition or reward entries")
        row_sums = self.transitions.sum(axis=2)
        if not np.allclose(row_sums, 1.0, atol=1e-9):
            raise NonFiniteMdp("transition rows must sum to 1")

    def index(self, state):
        if not hasattr(self, "_idx"):
            self._idx = {s: i for i, s in enumerate(self.states)}
        return self._idx[state]


def value_iteration(mdp: MdpSpec, tolerance=1e-8, max_iters=10_000_000):
    """Discounted value iteration; returns (values, greedy policy indices)."""
    gamma = mdp.discount
    v = np.zeros(len(mdp.states))
    span_tol = tolerance * (1 - gamma) / max(gamma, 1e-12)
    for _ in range(max_iters):
        q = mdp.rewards + gamma * (mdp.transitions @ v)
        v_new = q.max(axis=0)
        if np.abs(v_new - v).max() < span_tol:
            v = v_new
            break
        v = v_new
    q = mdp.rewards + gamma * (mdp.transitions @ v)
    return v, q.argmax(axis=0)


def relative_value_iteration(mdp: MdpSpec, tolerance=1e-10, max_iters=10_000_000):
    """Average-reward (unichain) relative value iteration.

    Returns (gain per step, bias values, greedy policy indices).
    """
    h = np.zeros(len(mdp.states))
    g = 0.0
    for _ in range(max_iters):
        q = mdp.rewards + mdp.transitions @ h
        h_new = q.max(axis=0)
        g = h_new[0]
        h_new = h_new - g
        if np.abs(h_new - h).max() < tolerance:
            h = h_new
            break
        h = h_new
    q = mdp.rewards + mdp.transitions @ h
    return g, h, q.argmax(axis=0)


def build_duty_cycle_mdp(birth_rate=2.0, death_rate=3.0, run_reward=1.0,
                         discount=0.95):
    """Uniformized 3-state load model (idle, busy, overloaded) where the action
    only chooses whether the machine earns its running reward this epoch.

    Load moves as a birth-death chain regardless of the action, so the optimal
    policy runs everywhere and the value function has the closed form
    V*(s) = run_reward / (1 - discount) in every state. Any max-norm deviation
    a learner shows on it is pure learning error, which makes it a sharp
    convergence probe.
    """
    lam, mu = birth_rate, death_rate
    n = 3
    uniform_rate = lam + (n - 1) * mu
    transitions = np.zeros((2, n, n))
    for s in range(n):
        p = {}
        if s < n - 1:
            p[s + 1] = lam / uniform_rate
        if s > 0:
            p[s - 1] = s * mu / uniform_rate
        p[s] = p.get(s, 0.0) + 1.0 - sum(p.values())
        for act in (0, 1):
            for s2, pr in p.items():
                transitions[act, s, s2] = pr
    rewards = np.zeros((2, n))
    rewards[1, :] = run_reward
    spec = MdpSpec(states=list(range(n)), actions=["standby", "run"],
                   transitions=transitions, rewards=rewards, discount=discount)
    spec.uniform_rate = uniform_rate
    return spec


def q_learning_values(mdp: MdpSpec, num_updates, stream, alpha=0.5,
                      alpha_decay_tau=100.0):
    """Tabular Q-learning with uniformly sampled (state, action) pairs and
    simulated next states; returns the learned greedy state values."""
    from .agents import Experience, QTable

    table = QTable(n_actions=len(mdp.actions), alpha=alpha, gamma=mdp.discount,
                   alpha_decay_tau=alpha_decay_tau)
    n = len(mdp.states)
    states = stream.integers(0, n, size=num_updates)
    actions = stream.integers(0, len(mdp.actions), size=num_updates)
    u = stream.random(size=num_updates)
    cdf = np.cumsum(mdp.transitions, axis=2)
    for s, a, x in zip(states, actions, u):
        s2 = int(np.searchsorted(cdf[a, s], x))
        table.update(Experience((int(s),), int(a), mdp.rewards[a, s], (s2,), False))
    return np.array([max(table.q_values((s,))) for s in range(n)])


ARRIVAL_NONE = -1


def build_admission_mdp(rate_a, rate_b, completion_rate, cap, reward_a, reward_b,
                        discount=0.95):
    """Uniformized admission-control MDP over occupancy plus arriving-tenant states.

    States are (n_a, n_b, arriving) with arriving in {-1: none, 0: tenant A,
    1: tenant B}; actions are 0=reject, 1=accept. Accepting when full is a
    no-op with zero reward. All rates share one unit (per hour is fine).
    """
    lam = (rate_a, rate_b)
    rew = (reward_a, reward_b)
    mu = completion_rate
    uniform_rate = rate_a + rate_b + cap * mu

    states = [(a, b, e)
              for a in range(cap + 1) for b in range(cap + 1) if a + b <= cap
              for e in (ARRIVAL_NONE, 0, 1)]
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    transitions = np.zeros((2, n, n))
    rewards = np.zeros((2, n))

    def env_step(a, b):
        out = {(a, b, 0): rate_a / uniform_rate, (a, b, 1): rate_b / uniform_rate}
        if a > 0:
            out[(a - 1, b, ARRIVAL_NONE)] = a * mu / uniform_rate
        if b > 0:
            out[(a, b - 1, ARRIVAL_NONE)] = b * mu / uniform_rate
        out[(a, b, ARRIVAL_NONE)] = out.get((a, b, ARRIVAL_NONE), 0.0) + 1.0 - sum(out.values())
        return out

    for s in states:
        a, b, e = s
        for act in (0, 1):
            if act == 1 and e != ARRIVAL_NONE and a + b < cap:
                occ = (a + 1, b) if e == 0 else (a, b + 1)
                rewards[act, idx[s]] = rew[e]
            else:
                occ = (a, b)
            for s2, p in env_step(*occ).items():
                transitions[act, idx[s], idx[s2]] += p

    spec = MdpSpec(states=states, actions=["reject", "accept"],
                   transitions=transitions, rewards=rewards, discount=discount)
    spec.uniform_rate = uniform_rate
    return spec


class OraclePolicy:
    """Average-reward-optimal admission policy from relative value iteration."""

    def __init__(self, mdp: MdpSpec, tolerance=1e-10):
        self.mdp = mdp
        self.gain_per_step, self.bias, self._policy = relative_value_iteration(mdp, tolerance)
        # gain per uniformized step times step rate = reward per unit time
        self.gain_rate = self.gain_per_step * mdp.uniform_rate

    def decide(self, n_a, n_b, arriving):
        """1 to accept, 0 to reject; arriving is tenant index 0 or 1."""
        return int(self._policy[self.mdp.index((n_a, n_b, arriving))])
