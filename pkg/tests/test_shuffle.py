from collections import Counter
from itertools import permutations

import numpy as np
import pytest

from cocite import (
    build_groups,
    preservation_report,
    repcs_shuffle,
    umsj_shuffle,
)
from cocite.impact import chi2_sf
from cocite.synth import SynthConfig, generate

YEARED_REFS = {
    "r80a": (1980, "J-A", "s"), "r80b": (1980, "J-B", "s"), "r80c": (1980, "J-C", "s"),
    "r82a": (1982, "J-A", "s"), "r82b": (1982, "J-B", "s"),
}


@pytest.fixture
def yeared_corpus(make_corpus):
    return make_corpus(
        pubs=[
            ("p1", "J-X", ["r80a", "r80b", "r82a"], 0),
            ("p2", "J-X", ["r80c", "r82b"], 0),
        ],
        refs=YEARED_REFS,
    )


def test_groups_partition_by_reference_year(yeared_corpus):
    plan = build_groups(yeared_corpus)
    assert [(g.year, len(g)) for g in plan] == [(1980, 3), (1982, 2)]
    for g in plan:
        assert len(g.slots()) == len(g.tokens())


def test_local_groups_partition_citation_multiset(yeared_corpus):
    plan = build_groups(yeared_corpus)
    tokens = Counter()
    for g in plan:
        tokens.update(g.tokens())
    cited = Counter(rid for p in yeared_corpus.publications for rid in p.refs)
    assert tokens == cited


def test_global_pool_token_can_enter_groups(make_corpus):
    refs = dict(YEARED_REFS)
    refs["extra80"] = (1980, "J-Z", "s")
    pool = make_corpus(
        pubs=[
            ("p1", "J-X", ["r80a", "r80b", "r82a"], 0),
            ("p2", "J-X", ["r80c", "r82b"], 0),
            ("q1", "J-X", ["extra80", "r80a"], 0),
        ],
        refs=refs,
        background_tag="global",
    )
    corpus = make_corpus(
        pubs=[
            ("p1", "J-X", ["r80a", "r80b", "r82a"], 0),
            ("p2", "J-X", ["r80c", "r82b"], 0),
        ],
        refs=YEARED_REFS,
    )
    plan = build_groups(corpus, pool)
    assert plan.background == "global"
    group_1980 = next(g for g in plan if g.year == 1980)
    assert "extra80" in group_1980.tokens()
    # Some seed hands the pool-only token to an analyzed publication.
    seen = False
    for seed in range(40):
        shuffled = repcs_shuffle(plan, seed).corpus
        if any("extra80" in p.refs for p in shuffled.publications):
            seen = True
            break
    assert seen


def test_pool_must_contain_corpus_publications(make_corpus, yeared_corpus):
    pool = make_corpus(
        pubs=[("other", "J-X", ["r80a", "r80b"], 0)],
        refs=YEARED_REFS,
        background_tag="global",
    )
    with pytest.raises(ValueError, match="not in the substitution pool"):
        build_groups(yeared_corpus, pool)


def test_single_slot_group_is_fixed_point(make_corpus):
    corpus = make_corpus(
        pubs=[("p1", "J-X", ["r80a", "r82a"], 0)],
        refs=YEARED_REFS,
    )
    plan = build_groups(corpus)
    outcome = repcs_shuffle(plan, 123)
    assert outcome.corpus.publications[0].refs == ("r80a", "r82a")
    assert outcome.fixed_points == 2
    assert outcome.deleted_pubs == []


def test_repcs_permutations_are_uniform(make_corpus):
    refs = {
        "x1": (2000, "A", "s"), "x2": (2000, "B", "s"), "x3": (2000, "C", "s"),
        "y1": (1999, "D", "s"), "y2": (1999, "E", "s"), "y3": (1999, "F", "s"),
    }
    corpus = make_corpus(
        pubs=[
            ("p1", "J", ["x1", "y1"], 0),
            ("p2", "J", ["x2", "y2"], 0),
            ("p3", "J", ["x3", "y3"], 0),
        ],
        refs=refs,
    )
    plan = build_groups(corpus)
    counts = Counter()
    trials = 10_000
    for seed in range(trials):
        shuffled = repcs_shuffle(plan, seed).corpus
        counts[tuple(p.refs[1] for p in shuffled.publications)] += 1
    assert set(counts) == set(permutations(["y1", "y2", "y3"]))
    expected = trials / 6
    for perm in counts:
        assert abs(counts[perm] / trials - 1 / 6) < 0.02
    stat = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2_sf(stat, 5) > 0.001


def test_duplicate_accumulation_deletes_publication(make_corpus):
    refs = {
        "A": (2000, "JA", "s"), "B": (2000, "JB", "s"), "C": (2000, "JC", "s"),
    }
    corpus = make_corpus(
        pubs=[("p1", "J", ["A", "B"], 0), ("p2", "J", ["C", "A"], 0)],
        refs=refs,
    )
    plan = build_groups(corpus)
    hit = None
    for seed in range(200):
        outcome = repcs_shuffle(plan, seed)
        if outcome.deleted_pubs:
            hit = outcome
            break
    assert hit is not None, "no seed produced a duplicate in 200 tries"
    surviving = {p.pub_id for p in hit.corpus.publications}
    assert surviving == {"p1", "p2"} - set(hit.deleted_pubs)
    for p in hit.corpus.publications:
        assert len(set(p.refs)) == len(p.refs)
    report = preservation_report(corpus, hit)
    assert report.publication_delta == len(hit.deleted_pubs)
    assert report.all_preserved


def test_umsj_applies_single_admissible_swap(make_corpus):
    refs = {
        "A": (2000, "JA", "s"), "B": (2000, "JB", "s"),
        "C": (1999, "JC", "s"), "D": (1999, "JD", "s"),
    }
    corpus = make_corpus(
        pubs=[("p1", "J", ["A", "C"], 0), ("p2", "J", ["B", "D"], 0)],
        refs=refs,
    )
    outcome = umsj_shuffle(build_groups(corpus), 1)
    by_id = {p.pub_id: p for p in outcome.corpus.publications}
    assert by_id["p1"].refs == ("B", "D")
    assert by_id["p2"].refs == ("A", "C")
    assert outcome.deleted_pubs == []
    # The second slot of each group can only swap back; it exhausts retries.
    assert outcome.retry_exhausted == 2


def test_umsj_all_swaps_rejected_leaves_corpus_unchanged(make_corpus):
    # Both publications cite the same two references, so each group's two
    # tokens are identical and every swap would restore an original.
    refs = {"A": (2000, "JA", "s"), "E": (1999, "JE", "s")}
    corpus = make_corpus(
        pubs=[("p1", "J", ["A", "E"], 0), ("p2", "J", ["A", "E"], 0)],
        refs=refs,
    )
    outcome = umsj_shuffle(build_groups(corpus), 7, max_retries=10)
    by_id = {p.pub_id: p for p in outcome.corpus.publications}
    assert by_id["p1"].refs == ("A", "E")
    assert by_id["p2"].refs == ("A", "E")
    assert outcome.retry_exhausted == 4
    assert outcome.fixed_points == 4


def test_umsj_never_creates_duplicates(make_corpus):
    # Shared references across publications make duplicate-creating swaps
    # available in every group; all of them must be rejected.
    refs = {
        "A": (2000, "JA", "s"), "B": (2000, "JB", "s"), "C": (2000, "JC", "s"),
    }
    corpus = make_corpus(
        pubs=[("p1", "J", ["A", "B"], 0), ("p2", "J", ["A", "C"], 0)],
        refs=refs,
    )
    plan = build_groups(corpus)
    for seed in range(50):
        outcome = umsj_shuffle(plan, seed)
        assert outcome.deleted_pubs == []
        for p in outcome.corpus.publications:
            assert len(set(p.refs)) == len(p.refs)
        report = preservation_report(corpus, outcome)
        assert report.all_preserved


def test_both_algorithms_preserve_group_token_multisets():
    result = generate(SynthConfig(n_disciplines=2, pubs_per_discipline=600,
                                  ref_pool_per_discipline=1000, seed=31))
    corpus = result.pool
    assert corpus.n_citations() >= 9000
    plan = build_groups(corpus)
    idx = plan.index
    for outcome in (repcs_shuffle(plan, 5), umsj_shuffle(plan, 5)):
        for g in plan:
            before = np.sort(idx.slot_ref[g.slot_indices])
            after = np.sort(outcome._assignment[g.slot_indices])
            assert np.array_equal(before, after)


def test_preservation_sweep_small():
    result = generate(SynthConfig(n_disciplines=2, pubs_per_discipline=500,
                                  ref_pool_per_discipline=900, seed=17))
    corpus = result.pool
    assert len(corpus.publications) == 1000
    plan = build_groups(corpus)
    for seed in range(100):
        outcome = repcs_shuffle(plan, seed)
        report = preservation_report(corpus, outcome)
        assert report.all_preserved
        assert report.pubs_with_refcount_delta == 0
        assert report.pubs_with_year_histogram_delta == 0


def test_shuffle_determinism():
    result = generate(SynthConfig(n_disciplines=2, pubs_per_discipline=60,
                                  ref_pool_per_discipline=200, seed=9))
    plan = build_groups(result.pool)
    a = repcs_shuffle(plan, 11, sim_index=3)
    b = repcs_shuffle(plan, 11, sim_index=3)
    c = repcs_shuffle(plan, 11, sim_index=4)
    assert np.array_equal(a._assignment, b._assignment)
    assert a.corpus == b.corpus
    assert not np.array_equal(a._assignment, c._assignment)


def test_pool_slice_year_must_match(make_corpus, yeared_corpus):
    pool = make_corpus(
        pubs=[("p1", "J-X", ["r80a", "r80b", "r82a"], 0),
              ("p2", "J-X", ["r80c", "r82b"], 0)],
        refs=YEARED_REFS,
        slice_year=1996,
    )
    with pytest.raises(ValueError, match="slice year"):
        build_groups(yeared_corpus, pool)
