"""Experience-utilization policies for stochastic environments.

Two ways of turning a store of pull outcomes into the next action:

* simple replay: act on the single most recent outcome (stay on the arm
  after a success, switch uniformly away after a failure);
* statistical discovery: aggregate every stored outcome into per-arm
  value estimates and play epsilon-greedy on them.

Replay reflects whatever the last, possibly atypical, experience said;
the aggregate estimates capture the underlying probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import substream
from .simenv import BanditEnv, pull

POLICY_KINDS = ("replay", "eps-greedy")
EPSILON_DEFAULT = 0.1


@dataclass
class ArmStats:
    """Per-arm pull counts and cumulative rewards."""

    pulls: np.ndarray
    total_reward: np.ndarray

    @classmethod
    def zeros(cls, n_arms: int) -> "ArmStats":
        return cls(
            pulls=np.zeros(n_arms, dtype=np.int64),
            total_reward=np.zeros(n_arms, dtype=np.float64),
        )

    def record(self, arm_index: int, reward: float) -> None:
        self.pulls[arm_index] += 1
        self.total_reward[arm_index] += reward


@dataclass(frozen=True)
class Outcome:
    arm_index: int
    success: bool
    reward: float
    step: int


@dataclass
class ReplayState:
    last: Outcome | None = None


@dataclass
class EpsGreedyState:
    stats: ArmStats
    epsilon: float = EPSILON_DEFAULT

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


def replay_choose(
    state: ReplayState, n_arms: int, rng: np.random.Generator
) -> tuple[int, np.random.Generator]:
    """Win-stay, lose-shift on the most recent outcome.

    No history yet: uniform over all arms. After a success: the same arm.
    After a failure: uniform over the other arms.
    """
    if n_arms < 2:
        raise ValueError("replay needs at least 2 arms to switch between")
    if state.last is None:
        return int(rng.integers(n_arms)), rng
    if state.last.success:
        return state.last.arm_index, rng
    shift = 1 + int(rng.integers(n_arms - 1))
    return (state.last.arm_index + shift) % n_arms, rng


def discover(stats: ArmStats) -> np.ndarray:
    """Per-arm sample-mean value estimates; unpulled arms estimate 0."""
    pulled = stats.pulls > 0
    estimates = np.zeros(len(stats.pulls), dtype=np.float64)
    np.divide(stats.total_reward, stats.pulls, out=estimates, where=pulled)
    return estimates


def eps_greedy_choose(
    state: EpsGreedyState, rng: np.random.Generator
) -> tuple[int, np.random.Generator]:
    """Exploit the argmax estimate with probability 1 - epsilon.

    Otherwise explore uniformly among the remaining (non-argmax) arms.
    Estimate ties resolve to the lowest arm index.
    """
    n_arms = len(state.stats.pulls)
    if n_arms < 2:
        raise ValueError("epsilon-greedy needs at least 2 arms")
    best = int(np.argmax(discover(state.stats)))
    if rng.random() >= state.epsilon:
        return best, rng
    shift = 1 + int(rng.integers(n_arms - 1))
    return (best + shift) % n_arms, rng


@dataclass
class BanditResult:
    policy: str
    mean_reward_per_step: np.ndarray
    per_trial_totals: np.ndarray
    epsilon: float | None = None

    def mean_reward(self, start: int = 0, stop: int | None = None) -> float:
        return float(self.mean_reward_per_step[start:stop].mean())


def run_bandit(
    env: BanditEnv,
    policy_kind: str,
    horizon: int,
    n_trials: int,
    seed: int,
    epsilon: float = EPSILON_DEFAULT,
) -> BanditResult:
    """Run one policy for ``n_trials`` independent trials of ``horizon`` steps.

    Each trial starts from a fresh policy state and its own RNG substream
    (seed + trial index), so adding trials never perturbs earlier ones.
    Returns the per-step reward averaged across trials and each trial's
    cumulative total.
    """
    if policy_kind not in POLICY_KINDS:
        raise ValueError(f"unknown policy {policy_kind!r}; expected one of {POLICY_KINDS}")
    if horizon < 1 or n_trials < 1:
        raise ValueError("horizon and n_trials must both be >= 1")

    n_arms = len(env.arms)
    rewards = np.zeros((n_trials, horizon), dtype=np.float64)
    for trial in range(n_trials):
        rng = substream(seed, f"bandit/{policy_kind}", trial)
        replay_state = ReplayState()
        greedy_state = EpsGreedyState(stats=ArmStats.zeros(n_arms), epsilon=epsilon)
        for step in range(horizon):
            if policy_kind == "replay":
                arm, rng = replay_choose(replay_state, n_arms, rng)
            else:
                arm, rng = eps_greedy_choose(greedy_state, rng)
            success, reward, rng = pull(env, arm, rng)
            if policy_kind == "replay":
                replay_state.last = Outcome(arm, success, reward, step)
            else:
                greedy_state.stats.record(arm, reward)
            rewards[trial, step] = reward

    return BanditResult(
        policy=policy_kind,
        mean_reward_per_step=rewards.mean(axis=0),
        per_trial_totals=rewards.sum(axis=1),
        epsilon=epsilon if policy_kind == "eps-greedy" else None,
    )
