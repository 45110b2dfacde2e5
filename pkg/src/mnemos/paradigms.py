"""Two storage-paradigm engines over the same store, corpus and budget.

Both engines run the same per-question loop: search memory, check
sufficiency, and either answer or spend one budget unit on an external
retrieval and store what it yielded. They differ only in what they
store:

* raw mode keeps the entire retrieved experience and extracts the
  task-relevant part on demand at every use;
* extract-at-acquisition mode keeps only the fragment relevant to the
  question that triggered the retrieval.

The budget guard is ``remaining < 0``, taken literally from the
experiment protocol, so effective retrieval capacity is
``initial_budget + 1`` and the counter bottoms out at -1. Passing
``strict_budget=True`` switches the guard to ``remaining <= 0`` for a
capacity of exactly ``initial_budget``. The answerer is an oracle:
correct iff the presented information contains the target fact, never
otherwise. This isolates the effect of the storage paradigm from
answer-generation noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .simenv import Corpus, Question, retrieve_ext
from .store import (
    Experience,
    FactId,
    Fragment,
    MemoryEntry,
    MemoryStore,
    search_best,
    size_units,
    store_entry,
)

# The per-question loop settles in at most two passes (miss-retrieve,
# then hit); anything longer indicates an environment bug.
_LOOP_CAP = 3


@dataclass(frozen=True)
class Budget:
    """Retrieval budget; decremented only by external retrievals."""

    remaining: int

    def spend(self) -> "Budget":
        return Budget(self.remaining - 1)

    def exhausted(self, strict: bool = False) -> bool:
        return self.remaining <= 0 if strict else self.remaining < 0


@dataclass(frozen=True)
class Answer:
    q_id: str
    produced_fact: FactId | None


@dataclass(frozen=True)
class QuestionRecord:
    q_id: str
    correct: bool
    budget_after: int
    retrievals_so_far: int
    store_size_units: int


@dataclass
class RunMetrics:
    """Per-question time series emitted by one engine run.

    ``final_store`` and ``retrieved`` are diagnostics: the memory as it
    stood after the run and every experience the run acquired, in order.
    """

    records: list[QuestionRecord] = field(default_factory=list)
    final_store: MemoryStore = field(default_factory=MemoryStore)
    retrieved: list[Experience] = field(default_factory=list)

    @property
    def cumulative_correct(self) -> np.ndarray:
        return np.cumsum([r.correct for r in self.records])

    @property
    def total_correct(self) -> int:
        return sum(r.correct for r in self.records)

    @property
    def total_retrievals(self) -> int:
        return self.records[-1].retrievals_so_far if self.records else 0


def extract(
    source: MemoryEntry | Experience | Fragment | None, question: Question
) -> Fragment | None:
    """Keep the facts most relevant to the question.

    Returns the facts whose token overlap with the query is positive and
    maximal, or None when nothing overlaps ("no useful information").
    Idempotent: re-extracting a fragment with the same question returns
    an identical fragment.
    """
    if source is None:
        return None
    facts = source.facts
    scores = [len(fact.tokens & question.query_tokens) for fact in facts]
    top = max(scores)
    if top == 0:
        return None
    kept = tuple(fact for fact, s in zip(facts, scores) if s == top)
    return Fragment(facts=kept, source_task=question.q_id)


def sufficient(info: Fragment | None, question: Question) -> bool:
    """True iff the information in hand contains the answering fact."""
    if info is None:
        return False
    return any(fact.id == question.target for fact in info.facts)


def generate_answer(question: Question, info: Fragment | None) -> Answer:
    """Oracle answerer: the target if the info suffices, otherwise nothing.

    The simulator never hallucinates; an unanswerable state yields an
    absent fact, which scores as incorrect.
    """
    produced = question.target if sufficient(info, question) else None
    return Answer(q_id=question.q_id, produced_fact=produced)


def _validate_run_args(corpus, question_order, initial_budget):
    if initial_budget < 0:
        raise ValueError("initial_budget must be >= 0")
    known = {q.q_id for q in corpus.questions}
    for q in question_order:
        if q.q_id not in known:
            raise ValueError(f"question {q.q_id} does not belong to the corpus")


def _run_engine(
    corpus: Corpus,
    question_order: list[Question],
    initial_budget: int,
    raw_storage: bool,
    strict_budget: bool,
) -> RunMetrics:
    _validate_run_args(corpus, question_order, initial_budget)
    memory = MemoryStore()
    budget = Budget(initial_budget)
    retrievals = 0
    metrics = RunMetrics()

    for question in question_order:
        for _ in range(_LOOP_CAP):
            found = search_best(memory, question.query_tokens)
            if raw_storage:
                # Raw entries are distilled on demand, at every use.
                info = extract(found, question)
            else:
                # Memory already holds fragments; use the hit directly.
                info = found.payload if found is not None else None
            if budget.exhausted(strict_budget) or sufficient(info, question):
                answer = generate_answer(question, info)
                break
            budget = budget.spend()
            experience = retrieve_ext(corpus, question, step=retrievals)
            retrievals += 1
            metrics.retrieved.append(experience)
            if raw_storage:
                memory = store_entry(memory, MemoryEntry(experience))
            else:
                fragment = extract(experience, question)
                if fragment is not None:
                    memory = store_entry(memory, MemoryEntry(fragment))
        else:
            raise RuntimeError(
                f"question {question.q_id} did not settle within {_LOOP_CAP} passes"
            )
        metrics.records.append(
            QuestionRecord(
                q_id=question.q_id,
                correct=answer.produced_fact == question.target,
                budget_after=budget.remaining,
                retrievals_so_far=retrievals,
                store_size_units=size_units(memory),
            )
        )

    metrics.final_store = memory
    return metrics


def run_stone(
    corpus: Corpus,
    question_order: list[Question],
    initial_budget: int,
    strict_budget: bool = False,
) -> RunMetrics:
    """Run the raw-storage engine: store whole experiences, extract on demand."""
    return _run_engine(corpus, question_order, initial_budget, True, strict_budget)


def run_ets(
    corpus: Corpus,
    question_order: list[Question],
    initial_budget: int,
    strict_budget: bool = False,
) -> RunMetrics:
    """Run the extract-at-acquisition engine: store only the current question's fragment."""
    return _run_engine(corpus, question_order, initial_budget, False, strict_budget)
