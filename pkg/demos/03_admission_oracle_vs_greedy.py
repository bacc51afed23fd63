"""Exact admission-control analysis: when does rejecting revenue pay off?

Two tenants share a 5-slot pool. A requests 10/h with reward 2, B requests
12/h with reward r_B, both complete at 6/h. We uniformize the chain and run
relative value iteration to get the revenue-maximizing policy, then compare
its long-run rate against accept-whenever-possible.

The punchline: greedy is exactly optimal until r_B reaches 5, at which point
the optimum starts turning tenant A away from a nearly-full pool to keep a
slot free for B.
"""

from slicesim.mdp import ARRIVAL_NONE, OraclePolicy, build_admission_mdp


def describe(policy, cap=5):
    rejected = []
    for na in range(cap + 1):
        for nb in range(cap + 1 - na):
            if na + nb >= cap:
                continue  # at capacity the accept action is a no-op anyway
            for tenant, label in ((0, "A"), (1, "B")):
                if policy.decide(na, nb, tenant) == 0:
                    rejected.append((na, nb, label))
    return rejected


def greedy_gain(mdp):
    # greedy = always accept; evaluate it by restricting the MDP to accept
    from slicesim.mdp import MdpSpec, relative_value_iteration

    only_accept = MdpSpec(states=mdp.states, actions=["accept"],
                          transitions=mdp.transitions[1:2], rewards=mdp.rewards[1:2],
                          discount=mdp.discount)
    g, _, _ = relative_value_iteration(only_accept)
    return g * mdp.uniform_rate


print(f"{'r_B':>4} {'greedy /h':>10} {'optimal /h':>10} {'lift':>6}  rejections")
for rb in (1.0, 2.0, 3.0, 4.0, 5.0, 6.0):
    mdp = build_admission_mdp(rate_a=10.0, rate_b=12.0, completion_rate=6.0,
                              cap=5, reward_a=2.0, reward_b=rb)
    oracle = OraclePolicy(mdp)
    g_greedy = greedy_gain(mdp)
    lift = oracle.gain_rate / g_greedy - 1.0
    rej = describe(oracle)
    rej_str = ", ".join(f"({a},{b}){t}" for a, b, t in rej) or "none (greedy is optimal)"
    print(f"{rb:4.0f} {g_greedy:10.3f} {oracle.gain_rate:10.3f} {100 * lift:5.1f}%  {rej_str}")
