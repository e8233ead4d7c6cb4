import random

import pytest

from oracles import naive_count, naive_count_range
from wenkit import (
    Bucketing,
    Corpus,
    KeywordSet,
    PartialDate,
    collocation_timeseries,
    keyword_timeseries,
    make_doc,
    normalized_event_rate,
    period_collocation_table,
    power_proxy,
    presence_matrix,
)
from wenkit.fixtures import random_cjk_corpus
from wenkit.temporal import PresenceMatrix, chapter_label


def dated(doc_id, body, year):
    return make_doc(doc_id, body, date=PartialDate(year))


class TestKeywordTimeseries:
    def test_year_buckets(self):
        corpus = Corpus([dated("a", "主權主權", 1900), dated("b", "主權", 1901)])
        series = keyword_timeseries(corpus, KeywordSet.of("主權"), Bucketing.year())
        assert dict(series.points) == {1900: 2, 1901: 1}

    def test_surface_union_additivity(self):
        corpus = Corpus([dated("a", "笑道之後又笑著", 1900)])
        both = keyword_timeseries(corpus, KeywordSet("smile", ("笑道", "笑著")), Bucketing.year())
        one = keyword_timeseries(corpus, KeywordSet.of("笑道"), Bucketing.year())
        two = keyword_timeseries(corpus, KeywordSet.of("笑著"), Bucketing.year())
        assert both.total == one.total + two.total == 2

    def test_undated_docs_excluded_and_reported(self):
        corpus = Corpus([dated("a", "主權", 1900), make_doc("b", "主權")])
        series = keyword_timeseries(corpus, KeywordSet.of("主權"), Bucketing.year())
        assert series.total == 1
        assert series.skipped_undated == 1

    def test_chapter_bucketing_requires_chapter_structure(self):
        corpus = Corpus([make_doc("a", "主權"), make_doc("b", "主權")])
        with pytest.raises(ValueError):
            keyword_timeseries(corpus, KeywordSet.of("主權"), Bucketing.chapter())

    def test_per_chapter_counts_match_naive_scan(self, drc_small):
        corpus = drc_small.corpus
        doc = corpus.doc(drc_small.doc_id)
        series = keyword_timeseries(corpus, KeywordSet.of("寶玉"), Bucketing.chapter())
        for i, chapter in enumerate(doc.chapters, start=1):
            expected = naive_count_range(doc.body, "寶玉", chapter.start, chapter.end)
            assert series.value(i) == expected

    def test_conservation(self):
        corpus = random_cjk_corpus(60, 20, dated=True)
        surface = corpus.doc(corpus.doc_ids()[0]).body[:2]
        series = keyword_timeseries(corpus, KeywordSet.of(surface), Bucketing.year())
        dated_ids = [d.doc_id for d in corpus.docs() if d.date.year is not None]
        assert series.total == corpus.count(surface, doc_ids=dated_ids)

    def test_monotone_under_corpus_growth(self):
        corpus = random_cjk_corpus(61, 10, dated=True, alphabet_size=10)
        surface = corpus.doc(corpus.doc_ids()[0]).body[:2]
        kw = KeywordSet.of(surface)
        before = keyword_timeseries(corpus, kw, Bucketing.year())
        grown = corpus.add(dated("extra", surface * 3, 1900))
        after = keyword_timeseries(grown, kw, Bucketing.year())
        for key, count in before.points.items():
            if key != 1900:
                assert after.value(key) == count
        assert after.value(1900) >= before.value(1900)


class TestCollocation:
    def test_single_sentence_pair(self):
        corpus = Corpus([dated("a", "平等與強權", 1900)])
        series = collocation_timeseries(
            corpus, [KeywordSet.of("平等"), KeywordSet.of("強權")], "sentence", Bucketing.year()
        )
        assert series.total == 1

    def test_window_counts_at_most_once(self):
        corpus = Corpus([dated("a", "平等平等強權強權平等。", 1900)])
        series = collocation_timeseries(
            corpus, [KeywordSet.of("平等"), KeywordSet.of("強權")], "sentence", Bucketing.year()
        )
        assert series.total == 1

    def test_symmetry(self):
        corpus = random_cjk_corpus(70, 15, dated=True, alphabet_size=8)
        body = corpus.doc(corpus.doc_ids()[0]).body
        a = KeywordSet.of(body[0])
        b = KeywordSet.of(body[1])
        if a.surfaces == b.surfaces:
            b = KeywordSet.of(body[2])
        ab = collocation_timeseries(corpus, [a, b], "sentence", Bucketing.year())
        ba = collocation_timeseries(corpus, [b, a], "sentence", Bucketing.year())
        assert dict(ab.points) == dict(ba.points)

    def test_identical_shared_surface_rejected(self):
        corpus = Corpus([dated("a", "甲乙", 1900)])
        with pytest.raises(ValueError, match="share the surface"):
            collocation_timeseries(
                corpus,
                [KeywordSet("x", ("甲", "乙")), KeywordSet("y", ("乙",))],
                "sentence",
                Bucketing.year(),
            )

    def test_overlapping_surfaces_flagged(self):
        corpus = Corpus([dated("a", "甲乙丙", 1900)])
        series = collocation_timeseries(
            corpus,
            [KeywordSet.of("甲乙"), KeywordSet.of("乙")],
            "sentence",
            Bucketing.year(),
        )
        assert series.meta["surface_overlap"] is True

    def test_trigram_membership(self):
        corpus = Corpus([dated("a", "甲乙丙。甲乙。", 1900)])
        members = [KeywordSet.of("甲"), KeywordSet.of("乙"), KeywordSet.of("丙")]
        series = collocation_timeseries(corpus, members, "sentence", Bucketing.year())
        assert series.total == 1

    def test_char_window_blocks(self):
        corpus = Corpus([dated("a", "甲乙丙丁甲戊", 1900)])
        # blocks of 2: 甲乙 | 丙丁 | 甲戊
        series = collocation_timeseries(
            corpus, [KeywordSet.of("甲"), KeywordSet.of("戊")], 2, Bucketing.year()
        )
        assert series.total == 1

    def test_matches_per_sentence_brute_force(self):
        for seed in range(4):
            corpus = random_cjk_corpus(seed + 80, 12, dated=True, alphabet_size=6)
            chars = sorted({ch for d in corpus.docs() for ch in d.body if ch not in "。！？；"})
            a, b = KeywordSet.of(chars[0]), KeywordSet.of(chars[1])
            series = collocation_timeseries(corpus, [a, b], "sentence", Bucketing.year())
            expected: dict[int, int] = {}
            for doc in corpus.docs():
                if doc.date.year is None:
                    continue
                hits = 0
                for seg in doc.sentences:
                    text = doc.body[seg.start : seg.end]
                    if chars[0] in text and chars[1] in text:
                        hits += 1
                if hits:
                    expected[doc.date.year] = expected.get(doc.date.year, 0) + hits
            assert dict(series.points) == expected


class TestPeriodCollocationTable:
    def test_hand_constructed_ground_truth(self):
        corpus = Corpus(
            [
                dated("a", "平等與西人。平等與西人。強權無平等。", 1899),
                dated("b", "平等之權力。權力與平等。西人已去。", 1905),
                dated("c", "平等者眾生。", 1920),
            ]
        )
        table = period_collocation_table(
            corpus,
            KeywordSet.of("平等"),
            [(1898, 1900), (1901, 1914), (1915, 1924)],
            top_k=5,
        )
        assert table.rows == (
            ("平等與西人", (2, 0, 0)),
            ("權力", (0, 2, 0)),
        )

    def test_row_shape_matches_periods(self):
        corpus = Corpus([dated("a", "平等與西人。平等與西人。", 1899)])
        table = period_collocation_table(corpus, KeywordSet.of("平等"), [(1898, 1900)], top_k=3)
        assert all(len(counts) == 1 for _, counts in table.rows)

    def test_top_k_limits_rows(self):
        corpus = Corpus(
            [dated("a", "平等甲甲。平等甲甲。平等乙乙。平等乙乙。平等丙丙。平等丙丙。", 1899)]
        )
        table = period_collocation_table(corpus, KeywordSet.of("平等"), [(1898, 1900)], top_k=2)
        assert len(table.rows) == 2


class TestNormalizedEventRate:
    def test_one_of_three(self):
        corpus = Corpus(
            [make_doc("d", "第一回\n寶玉來了。寶玉笑道好。寶玉去了。", chapter_pattern=r"第一回")]
        )
        series = normalized_event_rate(
            corpus, KeywordSet.of("寶玉"), KeywordSet.of("笑道"), Bucketing.chapter()
        )
        assert series.rate(1) == pytest.approx(1 / 3)

    def test_absent_subject_rate_is_null_not_zero(self):
        corpus = Corpus(
            [make_doc("d", "第一回\n無人笑道。第二回\n寶玉笑道。", chapter_pattern=r"第[一二]回")]
        )
        series = normalized_event_rate(
            corpus, KeywordSet.of("寶玉"), KeywordSet.of("笑道"), Bucketing.chapter()
        )
        assert series.rate(1) is None
        assert series.rate(2) == 1.0

    def test_gap_allows_intervening_characters(self):
        corpus = Corpus([make_doc("d", "第一回\n寶玉又笑道。", chapter_pattern=r"第一回")])
        strict = normalized_event_rate(
            corpus, KeywordSet.of("寶玉"), KeywordSet.of("笑道"), Bucketing.chapter(), gap=0
        )
        loose = normalized_event_rate(
            corpus, KeywordSet.of("寶玉"), KeywordSet.of("笑道"), Bucketing.chapter(), gap=1
        )
        assert strict.rate(1) == 0.0
        assert loose.rate(1) == 1.0

    def test_event_must_stay_in_sentence(self):
        corpus = Corpus([make_doc("d", "第一回\n這是寶玉。笑道而去。", chapter_pattern=r"第一回")])
        series = normalized_event_rate(
            corpus, KeywordSet.of("寶玉"), KeywordSet.of("笑道"), Bucketing.chapter(), gap=1
        )
        assert series.rate(1) == 0.0

    def test_gap_bound(self):
        corpus = Corpus([make_doc("d", "第一回\n甲。", chapter_pattern=r"第一回")])
        with pytest.raises(ValueError):
            normalized_event_rate(
                corpus, KeywordSet.of("甲"), KeywordSet.of("乙"), Bucketing.chapter(), gap=6
            )

    def test_numerators_match_concatenated_scan(self, drc_small):
        corpus = drc_small.corpus
        doc = corpus.doc(drc_small.doc_id)
        for subject in drc_small.subjects:
            series = normalized_event_rate(
                corpus, subject, drc_small.smile_words, Bucketing.chapter()
            )
            name = subject.surfaces[0]
            for i, chapter in enumerate(doc.chapters, start=1):
                expected = naive_count_range(doc.body, name + "笑道", chapter.start, chapter.end)
                assert series.numerators.get(i, 0) == expected

    def test_numerator_never_exceeds_denominator(self, drc_small):
        corpus = drc_small.corpus
        for subject in drc_small.subjects:
            series = normalized_event_rate(
                corpus, subject, drc_small.smile_words, Bucketing.chapter()
            )
            for key in series.domain:
                assert series.numerators.get(key, 0) <= series.denominators.get(key, 0)


class TestPresenceMatrix:
    def test_single_chapter_entity(self):
        corpus = Corpus(
            [make_doc("d", "第一回\n妖怪來了。第二回\n平安無事。", chapter_pattern=r"第[一二]回")]
        )
        matrix = presence_matrix(corpus, "d", [KeywordSet.of("妖怪")])
        assert matrix.row("妖怪") == (1, 0)
        assert matrix.chapter_labels[0] == "d001"

    def test_rows_independent(self, jttw_small):
        corpus = jttw_small.corpus
        both = presence_matrix(corpus, jttw_small.doc_id, list(jttw_small.monsters[:2]))
        solo = presence_matrix(corpus, jttw_small.doc_id, [jttw_small.monsters[0]])
        assert both.cells[0] == solo.cells[0]

    def test_counts_match_naive_scans(self, jttw_small):
        corpus = jttw_small.corpus
        doc = corpus.doc(jttw_small.doc_id)
        entities = list(jttw_small.monsters[:3]) + [jttw_small.monk]
        matrix = presence_matrix(corpus, jttw_small.doc_id, entities)
        for entity, cells in zip(matrix.entities, matrix.cells):
            for chapter, got in zip(doc.chapters, cells):
                expected = sum(
                    naive_count_range(doc.body, s, chapter.start, chapter.end)
                    for s in entity.surfaces
                )
                assert got == expected

    def test_requires_chapters(self):
        corpus = Corpus([make_doc("d", "妖怪。")])
        with pytest.raises(ValueError, match="chapter"):
            presence_matrix(corpus, "d", [KeywordSet.of("妖怪")])

    def test_chapter_label_scheme(self):
        assert chapter_label(1) == "d001"
        assert chapter_label(120) == "d120"


def _matrix(labels_cells, chapters):
    entities = tuple(KeywordSet.of(label) for label in labels_cells)
    cells = tuple(tuple(labels_cells[label]) for label in labels_cells)
    assert all(len(c) == chapters for c in cells)
    return PresenceMatrix("doc", entities, cells)


class TestPowerProxy:
    def test_max_rule(self):
        monsters = _matrix({"妖一": [1, 1, 0]}, 3)
        masters = _matrix({"師三": [1, 0, 0], "師七": [0, 1, 0]}, 3)
        result = power_proxy(monsters, masters, {"師三": 3, "師七": 7})
        assert result[0].proxy == 7
        assert result[0].supporting_chapters == (2,)

    def test_no_co_present_master(self):
        monsters = _matrix({"妖一": [1, 0]}, 2)
        masters = _matrix({"師三": [0, 1]}, 2)
        result = power_proxy(monsters, masters, {"師三": 3})
        assert result[0].proxy == 0

    def test_missing_rank_rejected(self):
        monsters = _matrix({"妖一": [1]}, 1)
        masters = _matrix({"師三": [1]}, 1)
        with pytest.raises(ValueError, match="rank"):
            power_proxy(monsters, masters, {})

    def test_three_by_three_hand_enumeration(self):
        monsters = _matrix({"妖甲": [1, 0, 0], "妖乙": [0, 1, 1], "妖丙": [0, 0, 1]}, 3)
        masters = _matrix({"師甲": [1, 1, 0], "師乙": [0, 1, 0], "師丙": [0, 0, 1]}, 3)
        ranks = {"師甲": 2, "師乙": 5, "師丙": 4}
        result = power_proxy(monsters, masters, ranks)
        # 妖甲 sees 師甲 only (2); 妖乙 sees 師甲/師乙 (5) and 師丙 (4) -> 5;
        # 妖丙 sees 師丙 (4).
        assert [(e.label, e.proxy) for e in result] == [("妖乙", 5), ("妖丙", 4), ("妖甲", 2)]
        assert set(result[0].co_present_masters) == {"師丙", "師甲", "師乙"}
