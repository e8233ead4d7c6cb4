import pytest

from wenkit import Corpus, PhonoInventory, make_doc
from wenkit.translit import (
    Candidate,
    PipelineConfig,
    candidate_features,
    evaluate,
    filter_contrast,
    filter_phonotactic,
    generate_candidates,
    rank_candidates,
    run_pipeline,
    train_context_model,
)


def surfaces(cands):
    return {c.surface for c in cands}


class TestGeneration:
    def test_planted_twice_is_generated(self):
        corpus = Corpus([make_doc("d", "甲德謨克乙。丙德謨克丁。")])
        cands = generate_candidates(corpus)
        assert "德謨克" in surfaces(cands)

    def test_planted_once_is_absent(self):
        corpus = Corpus([make_doc("d", "甲德謨克乙。丙戊己庚。")])
        cands = generate_candidates(corpus)
        assert "德謨克" not in surfaces(cands)

    def test_gold_completeness_gate(self, hgtz):
        cands = surfaces(generate_candidates(hgtz.corpus))
        for word in hgtz.planted:
            assert hgtz.corpus.count(word) >= 2
            assert word in cands

    def test_candidate_states_start_generated(self):
        corpus = Corpus([make_doc("d", "甲乙。甲乙。")])
        assert all(c.filter_state == "generated" for c in generate_candidates(corpus))


class TestCandidateStates:
    def test_transitions_are_one_way(self):
        cand = Candidate("甲乙", 3)
        cand.drop("contrast")
        assert cand.filter_state == "dropped_by:contrast"
        with pytest.raises(ValueError):
            cand.drop("phonotactic")
        with pytest.raises(ValueError):
            cand.survive()

    def test_dropped_candidates_never_carry_scores(self):
        cand = Candidate("甲乙", 3)
        cand.drop("contrast")
        assert cand.rank_score is None
        with pytest.raises(ValueError):
            cand.set_rank_score(1.0)


class TestContrastFilter:
    def test_absent_from_contrast_kept(self):
        corpus = Corpus([make_doc("d", "德模克。德模克。")])
        contrast = Corpus([make_doc("c", "之乎者也。")])
        cands = [Candidate("德模克", 2)]
        kept = filter_contrast(cands, corpus, contrast)
        assert surfaces(kept) == {"德模克"}

    def test_equal_relative_frequency_dropped_at_threshold_one(self):
        corpus = Corpus([make_doc("d", "甲乙丙丁。甲乙戊己。")])  # 甲乙 twice in 10 chars
        contrast = Corpus([make_doc("c", "甲乙庚辛。甲乙壬癸。")])  # same density
        cands = [Candidate("甲乙", 2)]
        kept = filter_contrast(cands, corpus, contrast, ratio_threshold=1.0)
        assert kept == []
        assert cands[0].filter_state == "dropped_by:contrast"

    def test_hand_computed_ratio_boundary(self):
        # Target density 2/10; contrast density 1/10: kept at threshold 1.0,
        # dropped at threshold 0.5.
        corpus = Corpus([make_doc("d", "甲乙丙丁。甲乙戊己。")])
        contrast = Corpus([make_doc("c", "甲乙庚辛。壬癸子丑。")])
        kept = filter_contrast([Candidate("甲乙", 2)], corpus, contrast, ratio_threshold=1.0)
        assert surfaces(kept) == {"甲乙"}
        dropped = filter_contrast([Candidate("甲乙", 2)], corpus, contrast, ratio_threshold=0.5)
        assert dropped == []

    def test_empty_contrast_is_identity_with_warning(self):
        corpus = Corpus([make_doc("d", "甲乙。甲乙。")])
        cands = [Candidate("甲乙", 2)]
        with pytest.warns(UserWarning, match="contrast"):
            kept = filter_contrast(cands, corpus, Corpus([]))
        assert kept == cands


class TestPhonotacticFilter:
    def test_full_inventory_word_kept(self):
        inventory = PhonoInventory({ch: 1.0 for ch in "德模克拉西"})
        cands = [Candidate("德模克拉西", 3)]
        kept = filter_phonotactic(cands, inventory, min_fraction=0.5)
        assert surfaces(kept) == {"德模克拉西"}
        assert inventory.fraction("德模克拉西") == 1.0

    def test_zero_inventory_word_dropped(self):
        inventory = PhonoInventory({"爾": 1.0})
        cands = [Candidate("之乎者也", 3)]
        assert filter_phonotactic(cands, inventory, min_fraction=0.5) == []
        assert cands[0].filter_state == "dropped_by:phonotactic"

    def test_three_of_five_fraction(self):
        inventory = PhonoInventory({ch: 1.0 for ch in "德模克"})
        cands = [Candidate("德模克乎也", 3)]
        kept = filter_phonotactic(cands, inventory, min_fraction=0.5)
        assert surfaces(kept) == {"德模克乎也"}  # fraction 0.6

    def test_default_inventory_loads(self):
        inventory = PhonoInventory.default()
        assert inventory.fraction("德模克拉西") == 1.0


def separable_corpus():
    # Positives always followed by 夫, negatives always followed by 主;
    # identical lengths, frequencies, and left contexts.
    sentences = []
    positives = ["爾斯", "亞里", "克拉"]
    negatives = ["甲乙", "丙丁", "戊己"]
    for word in positives:
        sentences += [f"之{word}夫。"] * 2
    for word in negatives:
        sentences += [f"之{word}主。"] * 2
    return Corpus([make_doc("d", "".join(sentences))]), positives, negatives


class TestContextModel:
    def test_separating_feature_gets_largest_weight(self):
        corpus, positives, negatives = separable_corpus()
        inventory = PhonoInventory({ch: 1.0 for ch in "爾斯亞里克拉甲乙丙丁戊己"})
        survivors = [Candidate(s, 2, "survived") for s in positives + negatives]
        model = train_context_model(corpus, set(positives), survivors, inventory)
        top_feature, _ = model.heaviest_features(1)[0]
        assert top_feature in ("R1=夫", "R1=主")

    def test_training_order_independent(self):
        corpus, positives, negatives = separable_corpus()
        inventory = PhonoInventory({ch: 1.0 for ch in "爾斯亞里克拉甲乙丙丁戊己"})
        forward = [Candidate(s, 2, "survived") for s in positives + negatives]
        backward = [Candidate(s, 2, "survived") for s in (positives + negatives)[::-1]]
        m1 = train_context_model(corpus, set(positives), forward, inventory)
        m2 = train_context_model(corpus, set(positives), backward, inventory)
        assert m1 == m2

    def test_no_negatives_rejected(self):
        corpus, positives, _ = separable_corpus()
        inventory = PhonoInventory({"爾": 1.0})
        survivors = [Candidate(s, 2, "survived") for s in positives]
        with pytest.raises(ValueError, match="negative"):
            train_context_model(corpus, set(positives), survivors, inventory)

    def test_unseen_features_use_default_weight(self):
        corpus, positives, negatives = separable_corpus()
        inventory = PhonoInventory({"爾": 1.0})
        survivors = [Candidate(s, 2, "survived") for s in positives + negatives]
        model = train_context_model(corpus, set(positives), survivors, inventory)
        assert model.score({"L1=從未見過": 1.0}) == model.bias


class TestRanking:
    def test_high_weight_context_ranks_first(self):
        corpus, positives, negatives = separable_corpus()
        inventory = PhonoInventory({ch: 1.0 for ch in "爾斯亞里克拉甲乙丙丁戊己"})
        survivors = [Candidate(s, 2, "survived") for s in positives + negatives]
        model = train_context_model(corpus, set(positives), survivors, inventory)
        ranked = rank_candidates(corpus, model, survivors, inventory)
        assert surfaces(ranked[: len(positives)]) == set(positives)

    def test_tie_broken_by_frequency(self):
        corpus = Corpus([make_doc("d", "甲乙。甲乙。甲乙。丙丁。丙丁。")])
        from wenkit.translit import ContextModel

        model = ContextModel(weights={})
        a = Candidate("甲乙", 3, "survived")
        b = Candidate("丙丁", 2, "survived")
        ranked = rank_candidates(corpus, model, [b, a], PhonoInventory({"爾": 1.0}))
        assert [c.surface for c in ranked] == ["甲乙", "丙丁"]

    def test_matches_score_then_sort_reference(self, hgtz):
        config = PipelineConfig(epochs=60)
        result = run_pipeline(hgtz.corpus, hgtz.contrast, hgtz.gold_spans, config)
        inventory = config.inventory()
        expected = sorted(
            result.survivors,
            key=lambda c: (
                -result.model.score(
                    candidate_features(hgtz.corpus, c.surface, c.total_freq, inventory)
                ),
                -c.total_freq,
                c.surface,
            ),
        )
        assert [c.surface for c in result.ranked] == [c.surface for c in expected]


class TestEvaluate:
    def test_gold_subset_of_survivors_gives_full_recall(self):
        survivors = [Candidate(s, 2, "survived") for s in ("甲乙", "丙丁")]
        report = evaluate(survivors, survivors, {"甲乙", "丙丁"}, ks=(2,))
        assert report.recall == 1.0

    def test_precision_at_two(self):
        ranked = [Candidate(s, 2, "survived") for s in ("甲甲", "丙丙", "乙乙")]
        report = evaluate(ranked, ranked, {"甲甲", "乙乙"}, ks=(2,))
        assert report.precision_at[2] == 0.5

    def test_oversized_k_flagged(self):
        ranked = [Candidate("甲乙", 2, "survived")]
        report = evaluate(ranked, ranked, {"甲乙"}, ks=(5,))
        assert report.precision_at[5] == 1.0
        assert 5 in report.truncated

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            evaluate([], [], set())


class TestPipeline:
    def test_stage_outputs_are_subsets(self, hgtz):
        result = run_pipeline(hgtz.corpus, hgtz.contrast, hgtz.gold_spans, PipelineConfig(epochs=60))
        generated = surfaces(result.candidates)
        survivors = surfaces(result.survivors)
        assert survivors <= generated
        assert result.stage_counts["after_phonotactic"] <= result.stage_counts["after_contrast"]
        assert result.stage_counts["after_contrast"] <= result.stage_counts["generated"]

    def test_planted_words_survive_and_rank_high(self, hgtz):
        result = run_pipeline(hgtz.corpus, hgtz.contrast, hgtz.gold_spans, PipelineConfig())
        gold = set(hgtz.planted)
        assert result.report.recall >= 0.9
        assert result.report.precision_at[50] >= 0.8

    def test_deterministic_end_to_end(self, hgtz):
        config = PipelineConfig(epochs=60)
        a = run_pipeline(hgtz.corpus, hgtz.contrast, hgtz.gold_spans, config)
        b = run_pipeline(hgtz.corpus, hgtz.contrast, hgtz.gold_spans, config)
        assert [c.surface for c in a.ranked] == [c.surface for c in b.ranked]
        assert [c.rank_score for c in a.ranked] == [c.rank_score for c in b.ranked]
        assert a.report == b.report

    def test_pipeline_without_gold_ranks_by_frequency(self, hgtz):
        result = run_pipeline(hgtz.corpus, hgtz.contrast, None, PipelineConfig())
        freqs = [c.total_freq for c in result.ranked]
        assert freqs == sorted(freqs, reverse=True)

    def test_config_roundtrip(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"min_freq": 3, "precision_ks": [10, 20]}', encoding="utf-8")
        config = PipelineConfig.load(path)
        assert config.min_freq == 3
        assert config.precision_ks == (10, 20)
        with pytest.raises(ValueError, match="unknown"):
            path.write_text('{"bogus": 1}', encoding="utf-8")
            PipelineConfig.load(path)
