"""Deterministic synthetic environments for the experiment runners.

Three environments, all seeded and bit-reproducible:

* a fact-based QA corpus with an external retrieval step, for the
  storage-paradigm comparison;
* a stochastic multi-armed bandit, for the insight-policy comparison;
* a rule-tagged task stream, for the memory-sharing comparison.

Corpus construction guarantees the unique-answer property by giving
every fact a marker token that no other fact carries: any query built
from a fact's own tokens that includes the marker scores strictly
higher on that fact than on any other fact in the corpus. Validity is
therefore certain, not statistical.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .rng import substream
from .store import Experience, Fact, FactId, MemoryStore, Provenance

# Shared filler vocabulary; fillers add texture to token sets but are
# never load-bearing for answer uniqueness.
FILLER_VOCAB = (
    "refund policy days leave travel expense claim approval remote office "
    "badge security parking vacation sick overtime payroll bonus holiday "
    "meeting dress laptop email printer software license training onboarding "
    "contract salary review promotion transfer shift schedule lunch desk "
    "visitor invoice receipt audit budget compliance insurance benefits "
    "equipment access support request"
).split()

P_BASE_DEFAULT = 0.3
P_BOOST_DEFAULT = 0.9
RULE_UNIVERSE_DEFAULT = 25


@dataclass(frozen=True)
class Document:
    doc_id: str
    facts: tuple[Fact, ...]


@dataclass(frozen=True)
class Question:
    q_id: str
    query_tokens: frozenset[str]
    target: FactId


@dataclass(frozen=True)
class Corpus:
    docs: tuple[Document, ...]
    questions: tuple[Question, ...]
    seed: int


def gen_corpus(
    n_docs: int, facts_per_doc: int, questions_per_doc: int, seed: int
) -> Corpus:
    """Generate a corpus of documents and questions with unique answers.

    Each fact carries a unique marker token, a per-document topic token,
    and a few filler words. Each question targets a distinct fact and its
    query is a subset of the target's tokens that includes the marker, so
    the target is the strict argmax of token overlap over all facts.

    Identical arguments produce byte-identical corpora.
    """
    if n_docs < 1 or facts_per_doc < 1 or questions_per_doc < 1:
        raise ValueError("corpus dimensions must all be >= 1")
    if questions_per_doc > facts_per_doc:
        raise ValueError(
            f"questions_per_doc ({questions_per_doc}) cannot exceed "
            f"facts_per_doc ({facts_per_doc}): targets must be distinct"
        )

    rng = substream(seed, "corpus")
    docs = []
    questions = []
    q_counter = itertools.count()
    for d in range(n_docs):
        topic = f"topic{d}"
        facts = []
        for i in range(facts_per_doc):
            fact_id = d * facts_per_doc + i
            n_fillers = int(rng.integers(2, 5))
            fillers = rng.choice(len(FILLER_VOCAB), size=n_fillers, replace=False)
            tokens = frozenset(
                [f"mark{fact_id}", topic] + [FILLER_VOCAB[j] for j in fillers]
            )
            facts.append(Fact(id=fact_id, tokens=tokens))
        doc = Document(doc_id=f"doc{d}", facts=tuple(facts))
        docs.append(doc)

        target_slots = rng.choice(facts_per_doc, size=questions_per_doc, replace=False)
        for slot in target_slots:
            fact = doc.facts[int(slot)]
            extra_pool = sorted(fact.tokens - {f"mark{fact.id}", topic})
            n_extra = int(rng.integers(0, min(2, len(extra_pool)) + 1))
            picked = rng.choice(len(extra_pool), size=n_extra, replace=False)
            query = frozenset(
                [f"mark{fact.id}", topic] + [extra_pool[j] for j in picked]
            )
            questions.append(
                Question(q_id=f"q{next(q_counter)}", query_tokens=query, target=fact.id)
            )

    return Corpus(docs=tuple(docs), questions=tuple(questions), seed=seed)


def validate_corpus(corpus: Corpus) -> None:
    """Exhaustively check corpus invariants; raises AssertionError on defect.

    For every question, the argmax of token overlap over all facts in the
    corpus must be the target, uniquely; targets must be pairwise distinct
    and each must belong to exactly one document.
    """
    all_facts = [fact for doc in corpus.docs for fact in doc.facts]
    owners: dict[FactId, str] = {}
    for doc in corpus.docs:
        for fact in doc.facts:
            assert fact.id not in owners, f"fact {fact.id} appears in two documents"
            owners[fact.id] = doc.doc_id

    seen_targets = set()
    for q in corpus.questions:
        assert q.target in owners, f"{q.q_id} targets unknown fact {q.target}"
        assert q.target not in seen_targets, f"duplicate target {q.target}"
        seen_targets.add(q.target)
        scores = {fact.id: len(fact.tokens & q.query_tokens) for fact in all_facts}
        target_score = scores.pop(q.target)
        best_other = max(scores.values(), default=-1)
        assert target_score > best_other, (
            f"{q.q_id}: target fact {q.target} scores {target_score}, "
            f"another fact ties or beats it at {best_other}"
        )


_retrieval_steps = itertools.count()


def retrieve_ext(
    corpus: Corpus,
    question: Question,
    agent_id: str = "external",
    step: int | None = None,
) -> Experience:
    """Fetch the document answering ``question`` as a fresh experience.

    Retrieval always succeeds and returns exactly the right document;
    budget, not precision, is the contended resource in the experiments.
    Content depends only on (corpus, question); provenance carries a
    step counter (auto-advanced when ``step`` is not given).
    """
    known = {q.q_id for q in corpus.questions}
    if question.q_id not in known:
        raise ValueError(f"question {question.q_id} does not belong to this corpus")
    for doc in corpus.docs:
        if any(fact.id == question.target for fact in doc.facts):
            if step is None:
                step = next(_retrieval_steps)
            return Experience(
                doc_id=doc.doc_id,
                facts=doc.facts,
                provenance=Provenance(agent_id, question.q_id, step),
            )
    raise ValueError(f"no document contains fact {question.target}")


@dataclass(frozen=True)
class Arm:
    success_prob: float
    reward: float


@dataclass(frozen=True)
class BanditEnv:
    arms: tuple[Arm, ...]
    rng_seed: int


def default_bandit_env(seed: int = 0) -> BanditEnv:
    """Three-arm configuration with expected values 0.8, 1.0 and 1.2.

    These are declared defaults for curve separation, not ground truth
    from any external source; comparisons between policies never depend
    on the particular numbers.
    """
    return BanditEnv(
        arms=(Arm(0.8, 1.0), Arm(0.5, 2.0), Arm(0.1, 12.0)),
        rng_seed=seed,
    )


def pull(
    env: BanditEnv, arm_index: int, rng: np.random.Generator
) -> tuple[bool, float, np.random.Generator]:
    """Pull one arm: success with its probability, full reward or zero."""
    if not 0 <= arm_index < len(env.arms):
        raise IndexError(f"arm {arm_index} out of range 0..{len(env.arms) - 1}")
    arm = env.arms[arm_index]
    success = bool(rng.random() < arm.success_prob)
    reward = arm.reward if success else 0.0
    return success, reward, rng


@dataclass(frozen=True)
class SharingTask:
    q_id: str
    rule_id: int


def rule_token(rule_id: int) -> str:
    """Token under which a rule is findable in a memory store."""
    return f"rule{rule_id}"


def success_model(
    task: SharingTask,
    pool: MemoryStore,
    rng: np.random.Generator,
    p_base: float = P_BASE_DEFAULT,
    p_boost: float = P_BOOST_DEFAULT,
) -> tuple[bool, np.random.Generator]:
    """Succeed with p_boost when the pool holds the task's rule, else p_base.

    Exactly one uniform draw is consumed per call, so coupled runs over
    the same task order consume identical RNG streams.
    """
    wanted = frozenset([rule_token(task.rule_id)])
    possessed = any(
        fact.tokens & wanted for entry in pool.entries for fact in entry.facts
    )
    p = p_boost if possessed else p_base
    success = bool(rng.random() < p)
    return success, rng
