import random

import pytest

from oracles import brute_force_repeated_strings, reference_pruner
from wenkit import Corpus, PseudoWord, extract_repeated_strings, make_doc, prune_subsumed
from wenkit.fixtures import random_cjk_corpus


def sentence_texts(corpus):
    out = []
    for doc in corpus.docs():
        for seg in doc.sentences:
            out.append(doc.body[seg.start : seg.end])
    return out


class TestExtraction:
    def test_repeated_bigram_only(self):
        corpus = Corpus([make_doc("m", "民主，民主。")])
        words = extract_repeated_strings(corpus, min_len=2, max_len=2, min_freq=2)
        assert {(w.surface, w.total_freq) for w in words} == {("民主", 2)}

    def test_empty_corpus(self):
        assert extract_repeated_strings(Corpus([]), min_len=2, max_len=4) == []

    def test_hard_cap(self):
        corpus = Corpus([make_doc("m", "甲乙" * 10)])
        with pytest.raises(ValueError, match="hard cap"):
            extract_repeated_strings(corpus, min_len=2, max_len=9)

    def test_min_freq_floor(self):
        corpus = Corpus([make_doc("m", "甲乙丙")])
        with pytest.raises(ValueError, match="min_freq"):
            extract_repeated_strings(corpus, min_len=2, max_len=2, min_freq=1)

    def test_strings_never_cross_sentence_boundaries(self):
        corpus = Corpus([make_doc("m", "甲乙。丙甲乙。丙")])
        words = extract_repeated_strings(corpus, min_len=2, max_len=3, min_freq=2)
        surfaces = {w.surface for w in words}
        assert "甲乙" in surfaces
        assert all("。" not in s for s in surfaces)
        assert "乙丙" not in surfaces  # only forms across the boundary

    def test_matches_brute_force_enumeration(self):
        for seed in range(6):
            corpus = random_cjk_corpus(seed, 3, doc_len=(200, 500), alphabet_size=12)
            words = extract_repeated_strings(corpus, min_len=2, max_len=8, min_freq=2)
            got = {w.surface: w.total_freq for w in words}
            expected = brute_force_repeated_strings(sentence_texts(corpus), 2, 8, 2)
            assert got == expected

    def test_doc_freq(self):
        corpus = Corpus([make_doc("a", "甲乙甲乙"), make_doc("b", "甲乙")])
        words = {w.surface: w for w in extract_repeated_strings(corpus, min_len=2, max_len=2)}
        assert words["甲乙"].total_freq == 3
        assert words["甲乙"].doc_freq == 2

    def test_substring_frequency_monotonic(self):
        corpus = random_cjk_corpus(17, 4, doc_len=(200, 400), alphabet_size=10)
        words = extract_repeated_strings(corpus, min_len=2, max_len=6, min_freq=2)
        freq = {w.surface: w.total_freq for w in words}
        for s in freq:
            for t in freq:
                if s != t and s in t:
                    assert freq[s] >= freq[t]

    def test_order_independent_of_ingestion(self):
        docs = [d for d in random_cjk_corpus(23, 5, alphabet_size=8).docs()]
        a = extract_repeated_strings(Corpus(docs), min_len=2, max_len=4)
        b = extract_repeated_strings(Corpus(docs[::-1]), min_len=2, max_len=4)
        assert [(w.surface, w.total_freq) for w in a] == [(w.surface, w.total_freq) for w in b]

    def test_output_sorted_freq_desc_then_codepoint(self):
        corpus = random_cjk_corpus(31, 4, alphabet_size=8)
        words = extract_repeated_strings(corpus, min_len=2, max_len=4)
        keys = [(-w.total_freq, w.surface) for w in words]
        assert keys == sorted(keys)


class TestPruning:
    def test_always_embedded_variants_collapse(self):
        cands = [
            PseudoWord("德模克拉西", 3, 1),
            PseudoWord("模克拉西", 3, 1),
            PseudoWord("模克", 3, 1),
        ]
        kept = prune_subsumed(cands)
        assert [w.surface for w in kept] == ["德模克拉西"]

    def test_unequal_counts_both_retained(self):
        cands = [PseudoWord("民主", 5, 1), PseudoWord("民", 9, 1)]
        assert {w.surface for w in prune_subsumed(cands)} == {"民主", "民"}

    def test_never_removes_strictly_more_frequent_string(self):
        corpus = random_cjk_corpus(41, 4, alphabet_size=8)
        words = extract_repeated_strings(corpus, min_len=2, max_len=6)
        freq = {w.surface: w.total_freq for w in words}
        kept = {w.surface for w in prune_subsumed(words)}
        for s, c in freq.items():
            if all(c > ct for t, ct in freq.items() if s != t and s in t):
                assert s in kept

    def test_matches_reference_pruner(self):
        for seed in range(5):
            corpus = random_cjk_corpus(seed + 100, 3, doc_len=(150, 350), alphabet_size=9)
            words = extract_repeated_strings(corpus, min_len=2, max_len=6)
            kept = {w.surface for w in prune_subsumed(words)}
            expected = reference_pruner([(w.surface, w.total_freq) for w in words])
            assert kept == expected
