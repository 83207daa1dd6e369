import json
import logging
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from docmap.annotation import (
    benjamini_hochberg,
    hypergeom_sf,
    keyword_presence,
    label_clusters,
    read_labels,
    write_labels,
)
from docmap.errors import ContractError
from docmap.extraction import KeywordSet, ScoredKeyword


def exact_sf(k, K, n, N):
    """Big-integer rational tail sum."""
    num = sum(math.comb(K, i) * math.comb(N - K, n - i) for i in range(k, min(K, n) + 1))
    return Fraction(num, math.comb(N, n))


class TestHypergeom:
    def test_hand_value(self):
        assert exact_sf(4, 4, 5, 10) == Fraction(6, 252)
        assert abs(hypergeom_sf(4, 4, 5, 10) - 6 / 252) < 1e-12

    def test_enrichment_example(self):
        exact = exact_sf(8, 10, 10, 100)
        assert abs(hypergeom_sf(8, 10, 10, 100) - float(exact)) < 1e-15
        assert abs(float(exact) - 1.0463475563841825e-08) < 1e-20

    @pytest.mark.parametrize("K,n,N", [(0, 0, 0), (3, 5, 10), (10, 10, 10), (0, 7, 9)])
    def test_k_zero_is_one(self, K, n, N):
        assert hypergeom_sf(0, K, n, N) == 1.0

    @pytest.mark.parametrize("K,N", [(0, 5), (3, 5), (5, 5), (12, 40)])
    def test_census_is_one(self, K, N):
        assert hypergeom_sf(K, K, N, N) == 1.0

    @pytest.mark.parametrize("args", [(-1, 2, 3, 5), (4, 3, 5, 10), (3, 3, 2, 10), (1, 2, 3, 2),
                                      (0, 6, 3, 5)])
    def test_contract(self, args):
        with pytest.raises(ContractError):
            hypergeom_sf(*args)

    def test_sweep_small(self):
        for N in range(26):
            for K in range(N + 1):
                for n in range(N + 1):
                    prev = 1.0
                    for k in range(min(K, n) + 1):
                        got = hypergeom_sf(k, K, n, N)
                        assert abs(got - float(exact_sf(k, K, n, N))) < 1e-10
                        assert got <= prev + 1e-15
                        prev = got

    def test_scipy_agreement_large(self):
        stats = pytest.importorskip("scipy.stats")
        rng = random.Random(7)
        for _ in range(300):
            N = rng.randint(50, 20000)
            K = rng.randint(0, N)
            n = rng.randint(0, N)
            k = rng.randint(0, min(K, n))
            ref = stats.hypergeom.sf(k - 1, N, K, n)
            assert hypergeom_sf(k, K, n, N) == pytest.approx(ref, rel=1e-7, abs=1e-300)


def test_benjamini_hochberg_hand():
    assert benjamini_hochberg([0.01, 0.04, 0.03]) == pytest.approx([0.03, 0.04, 0.04])
    assert benjamini_hochberg([]) == []


def ks(doc_id, *texts):
    return KeywordSet(doc_id, "yake", [ScoredKeyword(t, 0.0, i + 1) for i, t in enumerate(texts)])


class TestPresence:
    def test_counts(self):
        p = keyword_presence([ks("a", "aging", "mice"), ks("b", "aging")])
        assert p == {"aging": {"a", "b"}, "mice": {"a"}}

    def test_duplicate_id(self):
        with pytest.raises(ContractError):
            keyword_presence([ks("a", "x"), ks("a", "y")])


def corpus_100(extra_in_cluster=None):
    """100 docs; docs 0..9 form cluster 0, the rest cluster 1."""
    assignments = {f"d{i:03d}": (0 if i < 10 else 1) for i in range(100)}
    presence = {"aging": {f"d{i:03d}" for i in list(range(8)) + [50, 51]}}
    if extra_in_cluster:
        presence.update(extra_in_cluster)
    return presence, assignments


class TestLabels:
    def test_enrichment_example_selected(self):
        presence, assignments = corpus_100()
        labels = label_clusters(presence, assignments)
        (kw,) = labels[0]
        assert (kw.text, kw.k, kw.n, kw.K, kw.N) == ("aging", 8, 10, 10, 100)
        assert kw.p_value == pytest.approx(float(exact_sf(8, 10, 10, 100)), rel=1e-12)
        assert labels[1] == []

    def test_truncates_to_five(self):
        extra = {f"kw{j}": {f"d{i:03d}" for i in range(10 - j % 3)} | {f"d{90 + j:03d}"}
                 for j in range(7)}
        presence, assignments = corpus_100(extra)
        assert len([1 for t, ids in presence.items()
                    if hypergeom_sf(len(ids & {f"d{i:03d}" for i in range(10)}), len(ids), 10, 100) < 0.05]) == 8
        labels = label_clusters(presence, assignments)
        assert len(labels[0]) == 5
        keys = [(kw.p_value, -kw.k, kw.text) for kw in labels[0]]
        assert keys == sorted(keys)

    def test_cluster_is_whole_corpus(self):
        assignments = {f"d{i}": 0 for i in range(20)}
        presence = {"x": {"d1", "d2"}, "y": {f"d{i}" for i in range(20)}}
        labels = label_clusters(presence, assignments)
        assert labels == {0: []}

    def test_empty_cluster_skipped(self, caplog):
        presence, assignments = corpus_100()
        with caplog.at_level(logging.WARNING):
            labels = label_clusters(presence, assignments, clusters=[0, 7])
        assert 7 not in labels and 0 in labels
        assert "empty" in caplog.text

    def test_alpha_contract(self):
        presence, assignments = corpus_100()
        for alpha in (0.0, 1.0, 1.5):
            with pytest.raises(ContractError):
                label_clusters(presence, assignments, alpha=alpha)

    def test_unassigned_in_background(self):
        presence, assignments = corpus_100()
        for i in range(50, 100):
            assignments[f"d{i:03d}"] = -1
        kw = label_clusters(presence, assignments)[0][0]
        assert kw.N == 100

    def test_rename_invariance(self):
        presence, assignments = corpus_100({"mice": {"d001", "d002", "d003", "d060"}})
        rename = {d: f"x{99 - int(d[1:])}" for d in assignments}
        p2 = {t: {rename[d] for d in ids} for t, ids in presence.items()}
        a2 = {rename[d]: c for d, c in assignments.items()}
        assert label_clusters(presence, assignments) == label_clusters(p2, a2)

    def test_fdr_never_adds_labels(self):
        # "marginal" has p ~ 0.049; twenty in-cluster singletons with K=30 have p ~ 0.98
        extra = {"marginal": {"d000", "d001", "d020", "d021"}}
        for j in range(20):
            extra[f"noise{j:02d}"] = {"d002"} | {f"d{30 + i:03d}" for i in range(29)}
        presence, assignments = corpus_100(extra)
        raw = label_clusters(presence, assignments, top_m=100)
        adj = label_clusters(presence, assignments, top_m=100, fdr=True)
        assert {kw.text for kw in adj[0]} <= {kw.text for kw in raw[0]}
        assert "marginal" in {kw.text for kw in raw[0]}
        assert [kw.text for kw in adj[0]] == ["aging"]

    @given(st.lists(st.tuples(st.integers(0, 3), st.sets(st.integers(0, 29), min_size=1)),
                    min_size=1, max_size=12))
    def test_label_invariants(self, drawn):
        assignments = {f"d{i}": i % 4 - (1 if i % 7 == 0 else 0) for i in range(30)}
        presence = {f"kw{j}": {f"d{i}" for i in ids} for j, (_, ids) in enumerate(drawn)}
        for c, kws in label_clusters(presence, assignments).items():
            members = {d for d, cc in assignments.items() if cc == c}
            assert len(kws) <= 5
            for kw in kws:
                assert kw.p_value < 0.05
                assert kw.k * kw.N >= kw.K * kw.n
                assert 1 <= kw.k <= min(kw.n, kw.K)
                assert presence[kw.text] & members
            keys = [(kw.p_value, -kw.k, kw.text) for kw in kws]
            assert keys == sorted(keys)


def test_labels_json_round_trip(tmp_path):
    presence, assignments = corpus_100()
    labels = label_clusters(presence, assignments)
    write_labels(labels, tmp_path / "labels.json")
    payload = json.loads((tmp_path / "labels.json").read_text())
    assert payload[0]["cluster"] == 0
    assert set(payload[0]["labels"][0]) == {"text", "p", "k", "n", "K", "N"}
    assert read_labels(tmp_path / "labels.json") == labels
