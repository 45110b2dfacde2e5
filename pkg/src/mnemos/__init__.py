"""mnemos: experience-memory substrate and deterministic experiment harness.

The library compares two ways of persisting agent experiences (raw
storage with on-demand extraction versus extraction at acquisition
time), two ways of using stochastic experiences (single-outcome replay
versus statistical aggregation), and two ways of collecting them (solo
versus a shared multi-agent pool), all over seeded synthetic
environments with no model dependencies.
"""

from .insight import (
    ArmStats,
    BanditResult,
    EpsGreedyState,
    Outcome,
    ReplayState,
    discover,
    eps_greedy_choose,
    replay_choose,
    run_bandit,
)
from .minimality import (
    SizeReport,
    Task,
    ZeroLossViolation,
    build_ets_zero_loss,
    check_minimality,
)
from .paradigms import (
    Answer,
    Budget,
    RunMetrics,
    extract,
    generate_answer,
    run_ets,
    run_stone,
    sufficient,
)
from .rng import substream
from .sharing import (
    Pool,
    Schedule,
    SharingParams,
    SharingResult,
    TrajectoryRecord,
    build_schedule,
    questions_to_rate,
    replicate,
    run_shared,
    run_solo,
)
from .simenv import (
    Arm,
    BanditEnv,
    Corpus,
    Document,
    Question,
    SharingTask,
    default_bandit_env,
    gen_corpus,
    pull,
    retrieve_ext,
    rule_token,
    success_model,
    validate_corpus,
)
from .store import (
    Experience,
    Fact,
    FactId,
    Fragment,
    MemoryEntry,
    MemoryStore,
    Provenance,
    recall_all,
    relevance,
    search_best,
    size_units,
    store_entry,
)

__version__ = "0.1.0"
