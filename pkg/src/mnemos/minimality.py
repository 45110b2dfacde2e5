"""Executable size comparison: raw storage vs. zero-loss extraction.

Under the requirement that nothing potentially useful for any future
task may be discarded, an extract-at-acquisition store must keep one
extraction per future task, and those extractions may overlap. Raw
storage keeps each unit exactly once. This module builds both stores
for randomized (experience, task set) pairs and checks that the raw
store is never larger, measured in facts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .paradigms import extract
from .rng import substream
from .store import (
    Experience,
    Fact,
    FactId,
    MemoryEntry,
    MemoryStore,
    Provenance,
    size_units,
    store_entry,
)


@dataclass(frozen=True)
class Task:
    """A future task: a query with the same extraction rule as the engines."""

    q_id: str
    query_tokens: frozenset[str]


TaskSet = tuple[Task, ...]


class ZeroLossViolation(ValueError):
    """Some fact is useful to no task, so zero-loss extraction cannot hold."""

    def __init__(self, uncovered: tuple[FactId, ...]):
        self.uncovered = uncovered
        super().__init__(
            f"facts {list(uncovered)} are useful to no task; "
            "an extract-at-acquisition store discarding them loses information"
        )


@dataclass(frozen=True)
class SizeReport:
    case_index: int
    size_stone: int
    size_ets: int
    holds: bool
    overlapping: bool

    @property
    def strict(self) -> bool:
        return self.size_ets > self.size_stone


def build_ets_zero_loss(experience: Experience, tasks: TaskSet) -> MemoryStore:
    """Store one extracted fragment per task, overlaps preserved.

    Requires every fact of the experience to be useful to at least one
    task; otherwise zero loss is unsatisfiable and ZeroLossViolation is
    raised, naming the uncovered facts.
    """
    fragments = [extract(experience, task) for task in tasks]
    covered = {
        fact.id for frag in fragments if frag is not None for fact in frag.facts
    }
    uncovered = tuple(f.id for f in experience.facts if f.id not in covered)
    if uncovered:
        raise ZeroLossViolation(uncovered)
    ets = MemoryStore()
    for frag in fragments:
        if frag is not None:
            ets = store_entry(ets, MemoryEntry(frag))
    return ets


def build_stone(experience: Experience) -> MemoryStore:
    """Store the experience raw, as a single entry."""
    return store_entry(MemoryStore(), MemoryEntry(experience))


def compare_sizes(
    experience: Experience, tasks: TaskSet, case_index: int = 0
) -> SizeReport:
    stone = build_stone(experience)
    ets = build_ets_zero_loss(experience, tasks)
    coverage_counts: dict[FactId, int] = {}
    for task in tasks:
        frag = extract(experience, task)
        if frag is None:
            continue
        for fact in frag.facts:
            coverage_counts[fact.id] = coverage_counts.get(fact.id, 0) + 1
    return SizeReport(
        case_index=case_index,
        size_stone=size_units(stone),
        size_ets=size_units(ets),
        holds=size_units(stone) <= size_units(ets),
        overlapping=any(c >= 2 for c in coverage_counts.values()),
    )


def gen_case(
    rng, case_index: int, force_overlap: bool | None = None
) -> tuple[Experience, TaskSet]:
    """One random covering case: every fact assigned to at least one task.

    Fact tokens encode task membership directly (token ``need<t>`` marks
    usefulness to task t, whose query is exactly that token), so each
    task's extraction returns its member facts and nothing else. With
    ``force_overlap`` True some fact belongs to two tasks; False yields a
    partition; None flips a coin.
    """
    n_facts = int(rng.integers(1, 11))
    n_tasks = int(rng.integers(1, min(5, n_facts) + 1))
    if force_overlap is None:
        force_overlap = bool(rng.random() < 0.5) and n_tasks >= 2

    memberships: list[set[int]] = [set() for _ in range(n_facts)]
    assignment = rng.permutation(n_facts)
    for t in range(n_tasks):
        memberships[int(assignment[t])].add(t)
    for i in range(n_facts):
        if not memberships[i]:
            memberships[i].add(int(rng.integers(n_tasks)))
    if force_overlap and n_tasks >= 2:
        lucky = int(rng.integers(n_facts))
        current = next(iter(memberships[lucky]))
        other = (current + 1 + int(rng.integers(n_tasks - 1))) % n_tasks
        memberships[lucky].add(other)

    facts = tuple(
        Fact(id=i, tokens=frozenset([f"unit{i}"] + [f"need{t}" for t in memberships[i]]))
        for i in range(n_facts)
    )
    experience = Experience(
        doc_id=f"case{case_index}",
        facts=facts,
        provenance=Provenance("generator", f"case{case_index}", case_index),
    )
    tasks = tuple(
        Task(q_id=f"case{case_index}t{t}", query_tokens=frozenset([f"need{t}"]))
        for t in range(n_tasks)
    )
    return experience, tasks


def check_minimality(n_cases: int, seed: int) -> list[SizeReport]:
    """Compare store sizes over randomized covering cases.

    Raises AssertionError with the full case inputs if any case has the
    raw store larger than the zero-loss extraction store; a failure here
    would falsify the implementation, not the size relation.
    """
    if n_cases < 1:
        raise ValueError("n_cases must be >= 1")
    rng = substream(seed, "minimality")
    reports = []
    for i in range(n_cases):
        experience, tasks = gen_case(rng, i)
        report = compare_sizes(experience, tasks, case_index=i)
        if not report.holds:
            raise AssertionError(
                f"size relation violated on case {i}: raw={report.size_stone} "
                f"extracted={report.size_ets}\nexperience={experience}\ntasks={tasks}"
            )
        reports.append(report)
    return reports
