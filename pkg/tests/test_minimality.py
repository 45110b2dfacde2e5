"""Size comparison: zero-loss extraction stores vs. raw storage."""

import pytest

from mnemos.minimality import (
    Task,
    ZeroLossViolation,
    build_ets_zero_loss,
    build_stone,
    check_minimality,
    compare_sizes,
    gen_case,
)
from mnemos.paradigms import extract
from mnemos.rng import substream
from mnemos.store import Experience, Fact, Provenance, size_units


def _experience(memberships):
    """Facts tagged with the tasks that need them; task t queries need<t>."""
    facts = tuple(
        Fact(id=i, tokens=frozenset([f"unit{i}"] + [f"need{t}" for t in tasks]))
        for i, tasks in enumerate(memberships)
    )
    return Experience(doc_id="e", facts=facts, provenance=Provenance("t", "t", 0))


def _tasks(n):
    return tuple(Task(q_id=f"t{t}", query_tokens=frozenset([f"need{t}"])) for t in range(n))


class TestBuildEtsZeroLoss:
    def test_overlap_on_middle_fact(self):
        # tasks cover facts {0,1} and {1,2}: fact 1 is stored twice
        exp = _experience([{0}, {0, 1}, {1}])
        ets = build_ets_zero_loss(exp, _tasks(2))
        assert size_units(ets) == 4
        assert size_units(build_stone(exp)) == 3

    def test_single_task_covering_everything_is_equality(self):
        exp = _experience([{0}, {0}, {0}])
        ets = build_ets_zero_loss(exp, _tasks(1))
        assert size_units(ets) == size_units(build_stone(exp)) == 3

    def test_partition_is_equality(self):
        exp = _experience([{0}, {1}, {1}, {2}])
        ets = build_ets_zero_loss(exp, _tasks(3))
        assert size_units(ets) == size_units(build_stone(exp)) == 4

    def test_uncovered_fact_reported(self):
        exp = _experience([{0}, set(), {1}])  # fact 1 useful to nobody
        with pytest.raises(ZeroLossViolation) as err:
            build_ets_zero_loss(exp, _tasks(2))
        assert err.value.uncovered == (1,)

    def test_one_entry_per_task_overlaps_preserved(self):
        exp = _experience([{0, 1}, {0, 1}])
        ets = build_ets_zero_loss(exp, _tasks(2))
        assert len(ets) == 2
        assert size_units(ets) == 4


class TestCheckMinimality:
    def test_hundred_random_cases_all_hold(self):
        reports = check_minimality(100, seed=0)
        assert len(reports) == 100
        assert all(r.holds for r in reports)

    def test_strictness_tracks_overlap(self):
        reports = check_minimality(300, seed=1)
        for r in reports:
            assert r.strict == r.overlapping
        assert any(r.strict for r in reports)
        assert any(not r.strict for r in reports)

    def test_validation(self):
        with pytest.raises(ValueError):
            check_minimality(0, seed=0)


class TestGeneratedCases:
    def test_sizes_match_brute_force(self):
        rng = substream(3, "cases")
        for i in range(50):
            exp, tasks = gen_case(rng, i)
            report = compare_sizes(exp, tasks, i)
            # oracle: raw size is the fact count; extraction-store size is
            # the sum of per-task extraction sizes, recomputed directly
            assert report.size_stone == len(exp.facts)
            per_task = [extract(exp, t) for t in tasks]
            assert report.size_ets == sum(
                len(f.facts) for f in per_task if f is not None
            )
            assert report.size_stone <= report.size_ets

    def test_forced_overlap_is_strict(self):
        rng = substream(4, "cases")
        found = 0
        for i in range(40):
            exp, tasks = gen_case(rng, i, force_overlap=True)
            if len(tasks) < 2:
                continue
            report = compare_sizes(exp, tasks, i)
            assert report.strict
            found += 1
        assert found > 10

    def test_forced_partition_is_equality(self):
        rng = substream(5, "cases")
        for i in range(40):
            exp, tasks = gen_case(rng, i, force_overlap=False)
            report = compare_sizes(exp, tasks, i)
            assert not report.strict
            assert report.size_stone == report.size_ets
