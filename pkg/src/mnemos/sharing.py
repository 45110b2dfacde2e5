"""Multi-agent experience sharing versus solo collection.

K agents work through per-agent shuffled task streams, one task each
per round, appending their successful trajectories to a shared pool
that every later-acting agent can draw on. The solo baseline is one
agent processing the same K*N tasks in the interleaved round order,
drawing only on its own pool.

Shared and solo runs for the same seed are coupled by construction:
they consume the identical task order and the identical outcome RNG
stream, so their rule-possession sets coincide exactly after round r
versus question K*r. The runs differ only in the plotted statistic
(the last-ordered agent's personal running rate per round, versus the
solo agent's overall running rate), which is where the K-fold speedup
shows up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .rng import substream
from .simenv import (
    P_BASE_DEFAULT,
    P_BOOST_DEFAULT,
    RULE_UNIVERSE_DEFAULT,
    SharingTask,
    rule_token,
    success_model,
)
from .store import Experience, Fact, MemoryEntry, MemoryStore, Provenance, store_entry


@dataclass(frozen=True)
class TrajectoryRecord:
    agent: int
    q_id: str
    rule_id: int
    success: bool
    round: int


@dataclass
class Pool:
    """Append-only trajectory pool backed by a memory store.

    mode is bookkeeping only; shared pools receive records from every
    agent, private pools from a single one. Records are stored as raw
    experiences whose single fact carries the rule token, so possession
    checks go through the ordinary relevance machinery.
    """

    mode: str = "shared"
    store: MemoryStore = field(default_factory=MemoryStore)

    def __post_init__(self):
        if self.mode not in ("shared", "private"):
            raise ValueError(f"pool mode must be shared or private, got {self.mode!r}")

    def add(self, record: TrajectoryRecord) -> None:
        outcome = "success" if record.success else "failure"
        fact = Fact(
            id=len(self.store),
            tokens=frozenset([rule_token(record.rule_id), outcome]),
        )
        experience = Experience(
            doc_id=f"traj-a{record.agent}-{record.q_id}",
            facts=(fact,),
            provenance=Provenance(str(record.agent), record.q_id, record.round),
        )
        self.store = store_entry(self.store, MemoryEntry(experience))

    def possessed_rules(self) -> set[int]:
        rules = set()
        for entry in self.store.entries:
            for fact in entry.facts:
                for token in fact.tokens:
                    if token.startswith("rule"):
                        rules.add(int(token[4:]))
        return rules


@dataclass(frozen=True)
class Schedule:
    """Per-agent task streams plus the shuffled agent order of each round."""

    agent_tasks: tuple[tuple[SharingTask, ...], ...]
    round_orders: tuple[tuple[int, ...], ...]

    def interleaved(self) -> list[tuple[int, SharingTask]]:
        """The solo ordering: round by round, in each round's agent order."""
        out = []
        for r, order in enumerate(self.round_orders):
            for agent in order:
                out.append((agent, self.agent_tasks[agent][r]))
        return out


def build_schedule(k_agents: int, n_rounds: int, rule_universe: int, seed: int) -> Schedule:
    """Draw each agent's task stream and the per-round agent shuffles."""
    if k_agents < 1 or n_rounds < 1 or rule_universe < 1:
        raise ValueError("k_agents, n_rounds and rule_universe must all be >= 1")
    agent_tasks = []
    for agent in range(k_agents):
        rng = substream(seed, "sharing/tasks", agent)
        rules = rng.integers(0, rule_universe, size=n_rounds)
        tasks = [
            SharingTask(q_id=f"a{agent}q{j}", rule_id=int(rules[j]))
            for j in range(n_rounds)
        ]
        rng.shuffle(tasks)
        agent_tasks.append(tuple(tasks))
    order_rng = substream(seed, "sharing/rounds")
    round_orders = tuple(
        tuple(int(a) for a in order_rng.permutation(k_agents)) for _ in range(n_rounds)
    )
    return Schedule(agent_tasks=tuple(agent_tasks), round_orders=round_orders)


@dataclass(frozen=True)
class SharingParams:
    p_base: float = P_BASE_DEFAULT
    p_boost: float = P_BOOST_DEFAULT
    rule_universe: int = RULE_UNIVERSE_DEFAULT
    share_failures: bool = False


@dataclass
class SharingResult:
    """Success-rate series plus diagnostics.

    ``outcomes`` holds every task's success flag in processing order
    (round-major for shared runs), which is what couples a shared run to
    its solo twin: same seed, same task order, same outcome sequence.
    """

    series: np.ndarray
    pool: Pool
    outcomes: np.ndarray = None
    pooled_series: np.ndarray | None = None


def run_shared(
    k_agents: int,
    n_rounds: int,
    params: SharingParams,
    seed: int,
    track_pooled_rate: bool = False,
) -> SharingResult:
    """K agents, one task each per round, sharing successful trajectories.

    Within a round agents act sequentially in that round's shuffled
    order, so each sees everything stored by earlier rounds and by the
    agents before it this round. The series holds, per round, the
    last-ordered agent's running success rate over its own tasks.
    """
    schedule = build_schedule(k_agents, n_rounds, params.rule_universe, seed)
    pool = Pool(mode="shared")
    rng = substream(seed, "sharing/outcomes")
    agent_successes = np.zeros(k_agents, dtype=np.int64)
    total_successes = 0
    series = np.zeros(n_rounds, dtype=np.float64)
    pooled = np.zeros(n_rounds, dtype=np.float64) if track_pooled_rate else None
    outcomes = np.zeros(n_rounds * k_agents, dtype=bool)

    step = 0
    for r, order in enumerate(schedule.round_orders):
        for agent in order:
            task = schedule.agent_tasks[agent][r]
            success, rng = success_model(
                task, pool.store, rng, p_base=params.p_base, p_boost=params.p_boost
            )
            outcomes[step] = success
            step += 1
            agent_successes[agent] += success
            total_successes += success
            if success or params.share_failures:
                pool.add(TrajectoryRecord(agent, task.q_id, task.rule_id, success, r))
        last_agent = order[-1]
        series[r] = agent_successes[last_agent] / (r + 1)
        if pooled is not None:
            pooled[r] = total_successes / ((r + 1) * k_agents)

    return SharingResult(series=series, pool=pool, outcomes=outcomes, pooled_series=pooled)


def run_solo(
    k_agents: int,
    n_rounds: int,
    params: SharingParams,
    seed: int,
) -> SharingResult:
    """One agent processing all K*N tasks in the interleaved order, alone.

    Uses the same schedule and the same outcome stream as run_shared for
    this seed, which couples the two runs outcome-for-outcome.
    """
    schedule = build_schedule(k_agents, n_rounds, params.rule_universe, seed)
    pool = Pool(mode="private")
    rng = substream(seed, "sharing/outcomes")
    successes = 0
    stream = schedule.interleaved()
    series = np.zeros(len(stream), dtype=np.float64)
    outcomes = np.zeros(len(stream), dtype=bool)

    for i, (_agent, task) in enumerate(stream):
        success, rng = success_model(
            task, pool.store, rng, p_base=params.p_base, p_boost=params.p_boost
        )
        outcomes[i] = success
        successes += success
        if success or params.share_failures:
            round_index = i // k_agents
            pool.add(TrajectoryRecord(0, task.q_id, task.rule_id, success, round_index))
        series[i] = successes / (i + 1)

    return SharingResult(series=series, pool=pool, outcomes=outcomes)


def replicate(
    run: Callable[[int], np.ndarray],
    times: int,
    seeds: Sequence[int] | None = None,
) -> np.ndarray:
    """Pointwise mean of ``run(seed)`` over the replication seeds."""
    if times < 1:
        raise ValueError("times must be >= 1")
    if seeds is None:
        seeds = range(times)
    seeds = list(seeds)
    if len(seeds) != times:
        raise ValueError(f"expected {times} seeds, got {len(seeds)}")
    return np.mean([np.asarray(run(s), dtype=np.float64) for s in seeds], axis=0)


def questions_to_rate(series: np.ndarray, target: float) -> int | None:
    """1-based index where the series first reaches ``target``, or None."""
    hits = np.nonzero(np.asarray(series) >= target)[0]
    return int(hits[0]) + 1 if len(hits) else None
