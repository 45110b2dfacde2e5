"""Store contract: append/index semantics, overlap relevance, recall, sizing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mnemos.store import (
    Experience,
    Fact,
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


def fact(i, *tokens):
    return Fact(id=i, tokens=frozenset(tokens))


def raw(doc_id, *facts):
    return MemoryEntry(
        Experience(doc_id=doc_id, facts=tuple(facts), provenance=Provenance("t", "t", 0))
    )


def frag(task, *facts):
    return MemoryEntry(Fragment(facts=tuple(facts), source_task=task))


class TestStoreEntry:
    def test_empty_store_base_case(self):
        s = store_entry(MemoryStore(), raw("a", fact(0, "x")))
        assert len(s) == 1
        assert s.entries[0].insertion_index == 0

    def test_counter_increments(self):
        s = MemoryStore()
        for i in range(3):
            s = store_entry(s, raw(f"d{i}", fact(i, "x")))
        s = store_entry(s, frag("t", fact(9, "y")))
        assert len(s) == 4
        assert s.entries[3].insertion_index == 3

    def test_no_dedup_on_identical_entries(self):
        entry = raw("a", fact(0, "x"))
        s = store_entry(store_entry(MemoryStore(), entry), entry)
        assert len(s) == 2
        assert s.entries[0].insertion_index == 0
        assert s.entries[1].insertion_index == 1

    def test_prior_store_untouched(self):
        s1 = store_entry(MemoryStore(), raw("a", fact(0, "x")))
        s2 = store_entry(s1, raw("b", fact(1, "y")))
        assert len(s1) == 1
        assert s2.entries[: len(s1.entries)] == s1.entries


class TestRelevance:
    def test_overlap_counted_brute_force(self):
        entry = raw("a", fact(0, "refund", "policy", "days"))
        query = frozenset(["refund", "days"])
        # independent oracle: plain set intersection per fact
        expected = max(len(f.tokens & query) for f in entry.facts)
        assert expected == 2
        assert relevance(entry, query) == 2

    def test_disjoint_query_scores_zero(self):
        entry = raw("a", fact(0, "refund", "policy"))
        assert relevance(entry, frozenset(["travel"])) == 0

    def test_entry_holding_answer_scores_its_overlap(self):
        answer = fact(1, "mark1", "topic0", "days")
        entry = raw("a", fact(0, "topic0", "refund"), answer)
        query = frozenset(["mark1", "topic0"])
        assert relevance(entry, query) >= len(query & answer.tokens)

    def test_empty_query_rejected(self):
        entry = raw("a", fact(0, "x"))
        with pytest.raises(ValueError, match="malformed"):
            relevance(entry, frozenset())

    def test_multi_fact_entry_takes_max_not_sum(self):
        entry = raw("a", fact(0, "x", "y"), fact(1, "x", "z"))
        assert relevance(entry, frozenset(["x", "y", "z"])) == 2


class TestSearchBest:
    def test_empty_store_absent(self):
        assert search_best(MemoryStore(), frozenset(["x"])) is None

    def test_highest_score_wins(self):
        s = store_entry(MemoryStore(), raw("hi", fact(0, "a", "b", "c")))
        s = store_entry(s, raw("lo", fact(1, "a", "z", "w")))
        query = frozenset(["a", "b", "c"])
        scores = [relevance(e, query) for e in s.entries]
        assert scores == [3, 1]
        assert search_best(s, query).payload.doc_id == "hi"

    def test_tie_breaks_to_smallest_insertion_index(self):
        s = MemoryStore()
        for i in range(4):
            s = store_entry(s, raw(f"pad{i}", fact(100 + i, "pad")))
        s = store_entry(s, raw("first", fact(0, "a", "b", "q1")))  # index 4
        s = store_entry(s, raw("pad4", fact(200, "pad")))
        s = store_entry(s, raw("pad5", fact(201, "pad")))
        s = store_entry(s, raw("second", fact(1, "a", "b", "q2")))  # index 7
        query = frozenset(["a", "b"])
        tied = [e.insertion_index for e in s.entries if relevance(e, query) == 2]
        assert tied == [4, 7]
        assert search_best(s, query).insertion_index == 4

    def test_zero_score_is_absent_not_an_entry(self):
        s = store_entry(MemoryStore(), raw("a", fact(0, "x")))
        assert search_best(s, frozenset(["unrelated"])) is None


class TestRecallAll:
    def test_filters_by_positive_score_in_insertion_order(self):
        s = MemoryStore()
        matching = {"m0", "m2", "m4"}
        for i in range(5):
            tokens = ("hit", f"f{i}") if f"m{i}" in matching else (f"f{i}",)
            s = store_entry(s, raw(f"m{i}", fact(i, *tokens)))
        query = frozenset(["hit"])
        expected = [e for e in s.entries if max(len(f.tokens & query) for f in e.facts) > 0]
        got = recall_all(s, query)
        assert got == expected
        assert [e.payload.doc_id for e in got] == ["m0", "m2", "m4"]

    def test_no_match_empty(self):
        s = store_entry(MemoryStore(), raw("a", fact(0, "x")))
        assert recall_all(s, frozenset(["y"])) == []

    def test_all_match_identity(self):
        s = MemoryStore()
        for i in range(3):
            s = store_entry(s, raw(f"d{i}", fact(i, "joint")))
        assert recall_all(s, frozenset(["joint"])) == list(s.entries)


class TestSizeUnits:
    def test_empty(self):
        assert size_units(MemoryStore()) == 0

    def test_single_raw_counts_all_facts(self):
        s = store_entry(
            MemoryStore(), raw("a", *[fact(i, f"t{i}") for i in range(4)])
        )
        assert size_units(s) == 4

    def test_additive_over_entries(self):
        s = store_entry(
            MemoryStore(), raw("a", *[fact(i, f"t{i}") for i in range(4)])
        )
        s = store_entry(s, frag("task", fact(9, "y")))
        assert size_units(s) == 5


# Property suite: hypothesis drives random construction orders and queries.

tokens_st = st.frozensets(st.sampled_from("abcdefgh"), min_size=1, max_size=4)


@st.composite
def payloads(draw):
    n = draw(st.integers(1, 3))
    facts = tuple(
        Fact(id=draw(st.integers(0, 999)), tokens=draw(tokens_st)) for _ in range(n)
    )
    if draw(st.booleans()):
        return Experience(
            doc_id=f"d{draw(st.integers(0, 99))}",
            facts=facts,
            provenance=Provenance("h", "h", 0),
        )
    return Fragment(facts=facts, source_task="h")


@given(st.lists(payloads(), max_size=8), tokens_st)
@settings(max_examples=200)
def test_search_best_member_of_recall_all(items, query):
    s = MemoryStore()
    for p in items:
        s = store_entry(s, MemoryEntry(p))
    best = search_best(s, query)
    recalled = recall_all(s, query)
    if best is None:
        assert all(relevance(e, query) == 0 for e in s.entries)
    else:
        assert best in recalled
        top = max(relevance(e, query) for e in s.entries)
        assert relevance(best, query) == top
        assert best.insertion_index == min(
            e.insertion_index for e in s.entries if relevance(e, query) == top
        )


@given(st.lists(payloads(), max_size=8), tokens_st)
@settings(max_examples=100)
def test_queries_are_pure_and_appends_preserve_prefix(items, query):
    s = MemoryStore()
    snapshots = [s.entries]
    for p in items:
        s = store_entry(s, MemoryEntry(p))
        snapshots.append(s.entries)
    for earlier, later in zip(snapshots, snapshots[1:]):
        assert later[: len(earlier)] == earlier
    assert search_best(s, query) == search_best(s, query)
    assert recall_all(s, query) == recall_all(s, query)
    assert size_units(s) == size_units(s)
    if len(s):
        assert relevance(s.entries[0], query) == relevance(s.entries[0], query)


def test_tie_break_depends_only_on_insertion_order():
    a = raw("a", fact(0, "q", "u1"))
    b = raw("b", fact(1, "q", "u2"))
    query = frozenset(["q"])

    def winner(order):
        s = MemoryStore()
        for e in order:
            s = store_entry(s, e)
        return search_best(s, query).payload.doc_id

    assert winner([a, b]) == "a"
    assert winner([b, a]) == "b"
    # same construction order, same answer, every time
    assert winner([a, b]) == winner([a, b]) == "a"
