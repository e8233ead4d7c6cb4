import random
from dataclasses import replace

import pytest

from wenkit import (
    DisambigConfig,
    NameRecord,
    SourceRef,
    block_pairs,
    compare_pair,
    run_disambiguation,
    verdict,
)
from wenkit.disambig import Judgment, dump_judgments, load_judgments


def record(record_id="r0", name="王臣", **kwargs):
    return NameRecord(record_id=record_id, name=name, **kwargs)


class TestBlocking:
    def test_twenty_nine_records_form_406_pairs(self):
        records = [record(f"r{i}") for i in range(29)]
        assert len(block_pairs(records)) == 29 * 28 // 2 == 406

    def test_distinct_names_form_no_pairs(self):
        records = [record("r0", "王臣"), record("r1", "王佐"), record("r2", "李白")]
        assert block_pairs(records) == []

    def test_matches_brute_force_double_loop(self):
        rng = random.Random(4)
        names = ["王臣", "王佐", "李白", "杜甫"]
        records = [record(f"r{i:03d}", rng.choice(names)) for i in range(100)]
        got = {(a.record_id, b.record_id) for a, b in block_pairs(records)}
        expected = set()
        for i in range(len(records)):
            for j in range(i + 1, len(records)):
                if records[i].name == records[j].name:
                    expected.add(tuple(sorted((records[i].record_id, records[j].record_id))))
        assert got == expected


FULL = dict(
    birth_place="龍川縣",
    entry_into_office="進士",
    office_posting="知縣",
    alternate_names=frozenset({"子安"}),
    service_location="宜寧縣",
    service_period=(1700, 1705),
)


class TestComparePair:
    def test_identical_records_score_one(self):
        a = record("r0", **FULL)
        b = record("r1", **FULL)
        pair = compare_pair(a, b)
        present = [f for f in pair.factoids if f.score is not None]
        assert all(f.score == 1.0 for f in present)
        assert pair.total == 1.0
        assert pair.verdict == "Same"

    def test_temporal_veto_overrides_everything(self):
        a = record("r0", **{**FULL, "service_period": (1650, 1655)})
        b = record("r1", **{**FULL, "service_period": (1850, 1860)})
        pair = compare_pair(a, b)
        assert pair.veto is not None
        assert pair.verdict == "Different"

    def test_hand_computed_weighted_total(self, demo_gazetteer):
        # Shared alternate name, sibling birth places, overlapping periods,
        # offices and entries and service locations missing on one side.
        a = record(
            "r0",
            birth_place="龍川縣",
            alternate_names=frozenset({"子安"}),
            service_period=(1700, 1705),
        )
        b = record(
            "r1",
            birth_place="惠川縣",
            alternate_names=frozenset({"子安", "幼平"}),
            service_period=(1703, 1710),
        )
        pair = compare_pair(a, b, gazetteer=demo_gazetteer)
        # (3*1.0 + 2*0.5 + 2*1.0) / (3 + 2 + 2)
        assert pair.total == pytest.approx(6 / 7)

    def test_name_mismatch_rejected(self):
        with pytest.raises(ValueError, match="different names"):
            compare_pair(record("r0", "王臣"), record("r1", "王佐"))

    def test_period_decay(self):
        a = record("r0", service_period=(1700, 1705), office_posting="知縣")
        b = record("r1", service_period=(1720, 1725), office_posting="知縣")
        pair = compare_pair(a, b)
        period = next(f for f in pair.factoids if f.factoid == "service_period")
        assert period.score == pytest.approx(1 - 15 / 30)

    def test_symmetry(self, demo_gazetteer, difangzhi):
        rng = random.Random(8)
        pairs = block_pairs(list(difangzhi.records))
        for a, b in rng.sample(pairs, min(60, len(pairs))):
            ab = compare_pair(a, b, gazetteer=difangzhi.gazetteer)
            ba = compare_pair(b, a, gazetteer=difangzhi.gazetteer)
            assert ab == ba

    def test_self_similarity(self, difangzhi):
        for rec in difangzhi.records[:40]:
            pair = compare_pair(rec, rec)
            assert pair.total == 1.0

    def test_monotonic_in_factoid_scores(self):
        # Raising one factoid from mismatch to match never lowers the total.
        base = record("r0", **FULL)
        worse = record("r1", **{**FULL, "office_posting": "知府"})
        better = record("r1", **FULL)
        assert compare_pair(base, better).total >= compare_pair(base, worse).total

    def test_name_only_pair_non_comparable(self):
        pair = compare_pair(record("r0"), record("r1"))
        assert pair.total is None
        assert pair.verdict == "NonComparable"

    def test_veto_stable_under_factoid_removal(self):
        a = record("r0", **{**FULL, "service_period": (1600, 1610)})
        b = record("r1", **{**FULL, "service_period": (1800, 1810)})
        assert compare_pair(a, b).verdict == "Different"
        stripped_a = replace(a, alternate_names=frozenset(), birth_place=None)
        stripped_b = replace(b, alternate_names=frozenset(), birth_place=None)
        assert compare_pair(stripped_a, stripped_b).verdict == "Different"

    def test_same_book_flag(self):
        a = record("r0", **FULL, source=SourceRef(book_id="b1"))
        b = record("r1", **FULL, source=SourceRef(book_id="b1"))
        assert compare_pair(a, b).verdict == "Same"
        config = DisambigConfig(same_book_auto_different=True)
        assert compare_pair(a, b, config).verdict == "Different"


class TestVerdict:
    def test_total_above_t_same(self):
        pair = compare_pair(record("r0", **FULL), record("r1", **FULL))
        assert pair.total == 1.0
        assert verdict(pair, DisambigConfig(t_same=0.8)) == "Same"

    def test_review_band(self):
        a = record("r0", office_posting="知縣", entry_into_office="進士")
        b = record("r1", office_posting="知縣", entry_into_office="舉人")
        pair = compare_pair(a, b)
        assert pair.total == 0.5
        assert pair.verdict == "Review"

    def test_low_total_is_different(self):
        a = record("r0", office_posting="知縣")
        b = record("r1", office_posting="知府")
        pair = compare_pair(a, b)
        assert pair.total == 0.0
        assert pair.verdict == "Different"

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            DisambigConfig(t_same=0.3, t_diff=0.8)

    def test_every_pair_gets_exactly_one_verdict(self, difangzhi):
        report = run_disambiguation(list(difangzhi.records)[:80], gazetteer=difangzhi.gazetteer)
        assert sum(report.verdict_histogram.values()) == len(report.pairs)


class TestRunDisambiguation:
    def test_empty_records(self):
        report = run_disambiguation([])
        assert report.pairs == ()
        assert report.review_queue == ()

    def test_planted_clusters_recovered(self, difangzhi):
        report = run_disambiguation(list(difangzhi.records), gazetteer=difangzhi.gazetteer)
        truth = difangzhi.truth
        tp = fp = fn = 0
        for pair in report.pairs:
            same_truth = truth[pair.a_id] == truth[pair.b_id]
            same_pred = pair.verdict == "Same"
            if same_pred and same_truth:
                tp += 1
            elif same_pred and not same_truth:
                fp += 1
            elif same_truth and not same_pred:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 1.0
        recall = tp / (tp + fn) if tp + fn else 1.0
        assert precision >= 0.9
        assert recall >= 0.9

    def test_review_queue_most_ambiguous_first(self, difangzhi):
        config = DisambigConfig()
        report = run_disambiguation(list(difangzhi.records), config, difangzhi.gazetteer)
        midpoint = (config.t_same + config.t_diff) / 2
        by_id = {p.pair_id: p for p in report.pairs}
        distances = [abs(by_id[pid].total - midpoint) for pid in report.review_queue]
        assert distances == sorted(distances)

    def test_deterministic(self, difangzhi):
        a = run_disambiguation(list(difangzhi.records), gazetteer=difangzhi.gazetteer)
        b = run_disambiguation(list(difangzhi.records), gazetteer=difangzhi.gazetteer)
        assert a == b

    def test_nonzero_counts_both_reported(self, difangzhi):
        report = run_disambiguation(list(difangzhi.records)[:60], gazetteer=difangzhi.gazetteer)
        assert report.nonzero_factoid_pairs >= report.nonzero_total_pairs


class TestJudgments:
    def test_roundtrip(self, tmp_path):
        judgments = [
            Judgment("a|b", "same", "clear match"),
            Judgment("c|d", "unsure"),
        ]
        path = tmp_path / "judgments.jsonl"
        dump_judgments(judgments, path)
        loaded = load_judgments(path)
        assert loaded == {"a|b": judgments[0], "c|d": judgments[1]}

    def test_later_lines_win(self, tmp_path):
        path = tmp_path / "judgments.jsonl"
        path.write_text(
            '{"pair_id": "a|b", "verdict": "same"}\n'
            '{"pair_id": "a|b", "verdict": "different"}\n',
            encoding="utf-8",
        )
        assert load_judgments(path)["a|b"].verdict == "different"

    def test_unknown_verdict_rejected(self):
        with pytest.raises(ValueError):
            Judgment("a|b", "maybe")
