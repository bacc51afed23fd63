"""Decision policies and learners: greedy, tabular Q-learning, DQN / double DQN."""

from dataclasses import dataclass, field

import numpy as np

from .nn import Mlp


class EmptyActionSet(Exception):
    pass


class EmptyBatch(Exception):
    pass


@dataclass(frozen=True)
class Experience:
    state: tuple
    action: int
    reward: float
    next_state: tuple
    terminal: bool


class ReplayBuffer:
    """Fixed-capacity ring; eviction oldest-first, sampling uniform."""

    def __init__(self, capacity):
        self.capacity = int(capacity)
        self._items = []
        self._cursor = 0

    def __len__(self):
        return len(self._items)

    def push(self, experience):
        if len(self._items) < self.capacity:
            self._items.append(experience)
        else:
            self._items[self._cursor] = experience
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size, stream):
        idx = stream.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in idx]


def epsilon_greedy(q_values, epsilon, stream):
    """Uniform random action w.p. epsilon, else argmax (ties to lowest index)."""
    n = len(q_values)
    if n == 0:
        raise EmptyActionSet("no actions to choose from")
    if epsilon > 0 and stream.random() < epsilon:
        return int(stream.integers(0, n))
    return int(np.argmax(q_values))


class QTable:
    """Tabular Q-values over hashable discrete states; missing entries read 0.

    With alpha_decay_tau set, the step size for a state-action pair decays as
    alpha / (1 + visits / tau), which is required for convergence to the fixed
    point; tau=None keeps a constant step size.
    """

    def __init__(self, n_actions, alpha=0.1, gamma=0.95, alpha_decay_tau=None):
        self.n_actions = n_actions
        self.alpha = alpha
        self.gamma = gamma
        self.alpha_decay_tau = alpha_decay_tau
        self.table = {}
        self.visits = {}

    def q_values(self, state):
        return self.table.get(state, [0.0] * self.n_actions)

    def update(self, exp: Experience):
        q = self.table.setdefault(exp.state, [0.0] * self.n_actions)
        bootstrap = 0.0 if exp.terminal else max(self.q_values(exp.next_state))
        target = exp.reward + self.gamma * bootstrap
        alpha = self.alpha
        if self.alpha_decay_tau is not None:
            key = (exp.state, exp.action)
            n = self.visits.get(key, 0)
            self.visits[key] = n + 1
            alpha = self.alpha / (1.0 + n / self.alpha_decay_tau)
        q[exp.action] += alpha * (target - q[exp.action])

    def export_csv(self, path):
        with open(path, "w") as f:
            f.write("state,action,value\n")
            for state in sorted(self.table):
                for a, v in enumerate(self.table[state]):
                    f.write(f"\"{state}\",{a},{v!r}\n")


def q_learning_update(table: QTable, exp: Experience):
    table.update(exp)
    return table


class QNetwork:
    """Online + target MLP pair with DQN / double-DQN training steps."""

    def __init__(self, state_dim, n_actions, hidden=(64, 64), init_stream=None,
                 lr=1e-3, momentum=0.9, gamma=0.95):
        if init_stream is None:
            init_stream = np.random.default_rng(0)
        sizes = [state_dim, *hidden, n_actions]
        self.online = Mlp(sizes, init_stream)
        self.target = Mlp(sizes, init_stream)
        self.sync_target()
        self.n_actions = n_actions
        self.lr = lr
        self.momentum = momentum
        self.gamma = gamma

    def q_values(self, state):
        return self.online.forward(np.asarray(state, dtype=float))

    def sync_target(self):
        self.target.set_params(self.online.weights, self.online.biases)

    def train_step(self, batch, variant="dqn"):
        """One SGD step on mean squared TD error; returns the pre-step loss."""
        if not batch:
            raise EmptyBatch("empty training batch")
        states = np.array([e.state for e in batch], dtype=float)
        next_states = np.array([e.next_state for e in batch], dtype=float)
        actions = np.array([e.action for e in batch])
        rewards = np.array([e.reward for e in batch], dtype=float)
        live = np.array([0.0 if e.terminal else 1.0 for e in batch])

        q_next_target = self.target.forward(next_states)
        if variant == "double":
            pick = np.argmax(self.online.forward(next_states), axis=1)
            bootstrap = q_next_target[np.arange(len(batch)), pick]
        else:
            bootstrap = q_next_target.max(axis=1)
        targets = rewards + self.gamma * live * bootstrap

        q = self.online.forward(states)
        taken = q[np.arange(len(batch)), actions]
        td = taken - targets
        loss = float(np.mean(td ** 2))

        grad_out = np.zeros_like(q)
        grad_out[np.arange(len(batch)), actions] = 2.0 * td / len(batch)
        grad_w, grad_b = self.online.gradients(states, grad_out)
        self.online.sgd_step(grad_w, grad_b, self.lr, self.momentum)
        return loss

    def save(self, path):
        self.online.save(path)


def greedy_decision(residuals, demand):
    """Accept/adapt iff every named resource pool can cover the demand.

    Reward values are never consulted, so the decision trace is invariant to
    reward changes on identical traffic.
    """
    return all(residuals[k] >= demand[k] for k in demand)
