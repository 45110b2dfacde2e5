"""Append-only experience memory with token-overlap relevance search.

A store holds two kinds of entries over the same fact vocabulary:

* raw experiences, snapshots of everything an acquisition returned, and
* extracted fragments, the subset of an experience judged useful for one
  task at acquisition time.

Relevance is exact token overlap (an integer), so every search result is
deterministic and auditable. Stores are persistent values: appending
returns a new store and never mutates the old one, which keeps the
append-only invariant trivially true and makes runs safe to replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Union

FactId = int


@dataclass(frozen=True)
class Fact:
    """One atomic unit of information: an id plus its token set."""

    id: FactId
    tokens: frozenset[str]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"fact {self.id} has an empty token set")


@dataclass(frozen=True)
class Provenance:
    agent_id: str
    task_id: str
    step: int


@dataclass(frozen=True)
class Experience:
    """Immutable snapshot of an acquired document (ordered facts)."""

    doc_id: str
    facts: tuple[Fact, ...]
    provenance: Provenance

    def __post_init__(self):
        if not self.facts:
            raise ValueError(f"experience {self.doc_id} has no facts")


@dataclass(frozen=True)
class Fragment:
    """Non-empty subset of some experience's facts, kept for one task."""

    facts: tuple[Fact, ...]
    source_task: str

    def __post_init__(self):
        if not self.facts:
            raise ValueError("fragment has no facts")


Payload = Union[Experience, Fragment]


@dataclass(frozen=True)
class MemoryEntry:
    """A stored unit: raw experience or extracted fragment.

    ``insertion_index`` is assigned by the store at append time; entries
    built by hand before storing carry the placeholder -1.
    """

    payload: Payload
    insertion_index: int = -1

    @property
    def is_raw(self) -> bool:
        return isinstance(self.payload, Experience)

    @property
    def facts(self) -> tuple[Fact, ...]:
        return self.payload.facts


@dataclass(frozen=True)
class MemoryStore:
    """Append-only sequence of memory entries."""

    entries: tuple[MemoryEntry, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[MemoryEntry]:
        return iter(self.entries)


def store_entry(store: MemoryStore, entry: MemoryEntry | Payload) -> MemoryStore:
    """Append ``entry`` and return the extended store.

    The entry receives the next insertion index regardless of what it
    carried before; the input store is left untouched. Duplicates are
    stored as distinct entries (no deduplication).
    """
    if not isinstance(entry, MemoryEntry):
        entry = MemoryEntry(payload=entry)
    indexed = replace(entry, insertion_index=len(store.entries))
    return MemoryStore(entries=store.entries + (indexed,))


def _check_query(query_tokens: frozenset[str] | set[str]) -> frozenset[str]:
    if not query_tokens:
        raise ValueError("empty query: malformed task")
    return frozenset(query_tokens)


def relevance(entry: MemoryEntry, query_tokens: frozenset[str] | set[str]) -> int:
    """Best per-fact token overlap between the entry and the query."""
    query = _check_query(query_tokens)
    return max(len(fact.tokens & query) for fact in entry.facts)


def search_best(
    store: MemoryStore, query_tokens: frozenset[str] | set[str]
) -> MemoryEntry | None:
    """Single most relevant entry, or None if nothing scores above zero.

    Ties go to the earliest insertion index; scanning in insertion order
    with a strict ``>`` makes that automatic.
    """
    query = _check_query(query_tokens)
    best: MemoryEntry | None = None
    best_score = 0
    for entry in store.entries:
        score = max(len(fact.tokens & query) for fact in entry.facts)
        if score > best_score:
            best = entry
            best_score = score
    return best


def recall_all(
    store: MemoryStore, query_tokens: frozenset[str] | set[str]
) -> list[MemoryEntry]:
    """Every entry with any useful information (overlap > 0), in insertion order."""
    query = _check_query(query_tokens)
    return [
        entry
        for entry in store.entries
        if any(fact.tokens & query for fact in entry.facts)
    ]


def size_units(store: MemoryStore) -> int:
    """Total stored fact count, summed over all entries."""
    return sum(len(entry.facts) for entry in store.entries)
