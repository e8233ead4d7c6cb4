"""Transliteration-candidate pipeline: generate, filter, rank, evaluate.

Candidates are frequent repeated strings. A contrast filter removes strings
that are common in a reference corpus of ordinary prose, a phonotactic
filter keeps strings built from characters typical of sound transcription,
and a linear context model trained on expert-marked spans ranks the
survivors. Every stage only narrows its input, so recall can never rise
after a filter.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from math import log2
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .corpus import Corpus
from .ngrams import extract_repeated_strings, prune_subsumed

FILTER_CONTRAST = "contrast"
FILTER_PHONOTACTIC = "phonotactic"


@dataclass
class Candidate:
    """A candidate string and its one-way progress through the pipeline."""

    surface: str
    total_freq: int
    filter_state: str = "generated"
    rank_score: Optional[float] = None

    def drop(self, filter_id: str) -> None:
        if self.filter_state != "generated":
            raise ValueError(f"cannot drop candidate in state {self.filter_state!r}")
        self.filter_state = f"dropped_by:{filter_id}"
        self.rank_score = None

    def survive(self) -> None:
        if self.filter_state != "generated":
            raise ValueError(f"cannot mark {self.filter_state!r} candidate survived")
        self.filter_state = "survived"

    def set_rank_score(self, score: float) -> None:
        if self.filter_state != "survived":
            raise ValueError("rank scores belong to survivors only")
        self.rank_score = score


@dataclass(frozen=True)
class PhonoInventory:
    """Characters commonly used for sound transcription, with weights."""

    weights: Mapping[str, float]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("empty inventory")
        for ch, w in self.weights.items():
            if not 0 <= w <= 1:
                raise ValueError(f"weight out of range for {ch!r}: {w}")

    def fraction(self, surface: str) -> float:
        return sum(self.weights.get(ch, 0.0) for ch in surface) / len(surface)

    @classmethod
    def load(cls, path: Path | str) -> "PhonoInventory":
        weights = {}
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter="\t")
            for row in reader:
                weights[row["char"]] = float(row["weight"])
        return cls(weights)

    @classmethod
    def default(cls) -> "PhonoInventory":
        text = resources.files("wenkit.data").joinpath("phono_inventory.tsv").read_text("utf-8")
        weights = {}
        for line in text.splitlines()[1:]:
            if line.strip():
                ch, w = line.split("\t")
                weights[ch] = float(w)
        return cls(weights)


def generate_candidates(
    corpus: Corpus,
    *,
    min_freq: int = 2,
    min_len: int = 2,
    max_len: int = 8,
) -> list[Candidate]:
    """Repeated strings in the band, pruned of always-embedded substrings."""
    words = prune_subsumed(
        extract_repeated_strings(corpus, min_len=min_len, max_len=max_len, min_freq=min_freq)
    )
    return [Candidate(w.surface, w.total_freq) for w in words]


def filter_contrast(
    candidates: Sequence[Candidate],
    corpus: Corpus,
    contrast_corpus: Optional[Corpus],
    ratio_threshold: float = 1.0,
) -> list[Candidate]:
    """Drop candidates at least as dense in the contrast corpus.

    Densities are counts per corpus character. With an empty contrast
    corpus the filter keeps everything and warns.
    """
    alive = [c for c in candidates if c.filter_state == "generated"]
    if contrast_corpus is None or contrast_corpus.char_total == 0:
        warnings.warn("empty contrast corpus, contrast filter is a no-op")
        return alive
    target_chars = corpus.char_total
    contrast_chars = contrast_corpus.char_total
    kept = []
    for cand in alive:
        target_rel = cand.total_freq / target_chars
        contrast_rel = contrast_corpus.count(cand.surface) / contrast_chars
        if contrast_rel >= ratio_threshold * target_rel:
            cand.drop(FILTER_CONTRAST)
        else:
            kept.append(cand)
    return kept


def filter_phonotactic(
    candidates: Sequence[Candidate],
    inventory: PhonoInventory,
    min_fraction: float = 0.5,
) -> list[Candidate]:
    """Keep candidates whose weighted inventory fraction meets the floor."""
    if not 0 <= min_fraction <= 1:
        raise ValueError("min_fraction must lie in [0, 1]")
    kept = []
    for cand in candidates:
        if cand.filter_state != "generated":
            continue
        if inventory.fraction(cand.surface) >= min_fraction:
            kept.append(cand)
        else:
            cand.drop(FILTER_PHONOTACTIC)
    return kept


# -- context model --------------------------------------------------------------


def candidate_features(
    corpus: Corpus,
    surface: str,
    freq: int,
    inventory: PhonoInventory,
) -> dict[str, float]:
    """Categorical features of a candidate aggregated over its occurrences.

    Context characters two positions either side become bag-of-context
    fractions; length, inventory-fraction band, and log-frequency band are
    one-hot. Document edges contribute sentinel characters.
    """
    matches = corpus.find(surface)
    feats: dict[str, float] = {}
    if matches:
        share = 1.0 / len(matches)
        for m in matches:
            body = corpus.doc(m.doc_id).body
            l1 = body[m.start - 1] if m.start >= 1 else "^"
            l2 = body[m.start - 2] if m.start >= 2 else "^"
            r1 = body[m.end] if m.end < len(body) else "$"
            r2 = body[m.end + 1] if m.end + 1 < len(body) else "$"
            for key in (f"L1={l1}", f"L2={l2}", f"R1={r1}", f"R2={r2}"):
                feats[key] = feats.get(key, 0.0) + share
    feats[f"len={len(surface)}"] = 1.0
    band = min(int(inventory.fraction(surface) * 4), 3)
    feats[f"inv={band}"] = 1.0
    feats[f"logf={int(log2(max(freq, 1)))}"] = 1.0
    return feats


@dataclass(frozen=True)
class ContextModel:
    """Linear scorer over categorical context features."""

    weights: Mapping[str, float]
    bias: float = 0.0
    default_weight: float = 0.0

    def score(self, features: Mapping[str, float]) -> float:
        return self.bias + sum(
            self.weights.get(f, self.default_weight) * v for f, v in features.items()
        )

    def heaviest_features(self, top: int = 10) -> list[tuple[str, float]]:
        return sorted(self.weights.items(), key=lambda kv: (-abs(kv[1]), kv[0]))[:top]


def train_context_model(
    corpus: Corpus,
    gold_surfaces: Iterable[str],
    survivors: Sequence[Candidate],
    inventory: PhonoInventory,
    *,
    epochs: int = 300,
    learning_rate: float = 0.5,
    l2: float = 1e-3,
) -> ContextModel:
    """Logistic regression separating marked spans from other survivors.

    Examples are sorted before training and the gradient is full-batch, so
    the result is independent of input order and bitwise reproducible.
    """
    gold = {s for s in gold_surfaces}
    if not gold:
        raise ValueError("no gold surfaces to train on")
    positives = sorted(s for s in gold if corpus.count(s) > 0)
    negatives = sorted({c.surface for c in survivors} - gold)
    if not negatives:
        raise ValueError("degenerate training set: no negative examples")
    if not positives:
        raise ValueError("degenerate training set: no positive examples occur in the corpus")

    freq = {c.surface: c.total_freq for c in survivors}
    examples = []
    for label, surfaces in ((1.0, positives), (0.0, negatives)):
        for s in surfaces:
            f = freq.get(s, corpus.count(s))
            examples.append((label, candidate_features(corpus, s, f, inventory)))

    feature_names = sorted({f for _, feats in examples for f in feats})
    index = {f: i for i, f in enumerate(feature_names)}
    x = np.zeros((len(examples), len(feature_names)))
    y = np.zeros(len(examples))
    for row, (label, feats) in enumerate(examples):
        y[row] = label
        for f, v in feats.items():
            x[row, index[f]] = v

    w = np.zeros(len(feature_names))
    b = 0.0
    n = len(examples)
    for _ in range(epochs):
        z = x @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y
        w -= learning_rate * (x.T @ err / n + l2 * w)
        b -= learning_rate * float(err.mean())
    return ContextModel(
        weights={f: float(w[i]) for f, i in index.items()},
        bias=float(b),
    )


def rank_candidates(
    corpus: Corpus,
    model: ContextModel,
    survivors: Sequence[Candidate],
    inventory: PhonoInventory,
) -> list[Candidate]:
    """Survivors in descending score order; ties by frequency then surface."""
    for cand in survivors:
        feats = candidate_features(corpus, cand.surface, cand.total_freq, inventory)
        cand.set_rank_score(model.score(feats))
    return sorted(survivors, key=lambda c: (-c.rank_score, -c.total_freq, c.surface))


# -- evaluation -----------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    survivors: int
    recall: float
    precision_at: Mapping[int, float]
    truncated: frozenset[int]  # k values computed over a shorter prefix


def evaluate(
    ranked: Sequence[Candidate],
    survivors: Sequence[Candidate],
    gold: set[str],
    ks: Sequence[int] = (50, 100, 500),
) -> EvalReport:
    """Recall over survivors plus precision at each ranked cutoff."""
    if not gold:
        raise ValueError("empty gold set")
    survivor_surfaces = {c.surface for c in survivors}
    recall = len(survivor_surfaces & gold) / len(gold)
    precision_at = {}
    truncated = set()
    for k in ks:
        prefix = [c.surface for c in ranked[:k]]
        if len(ranked) < k:
            truncated.add(k)
        if prefix:
            precision_at[k] = sum(1 for s in prefix if s in gold) / len(prefix)
        else:
            precision_at[k] = 0.0
    return EvalReport(len(survivors), recall, precision_at, frozenset(truncated))


# -- gold spans and configuration ----------------------------------------------


@dataclass(frozen=True)
class GoldSpan:
    surface: str
    doc_id: str
    start: int
    end: int


def load_gold_spans(path: Path | str) -> list[GoldSpan]:
    """Gold span table: surface, doc_id, start, end, tab separated."""
    spans = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        for row in reader:
            spans.append(GoldSpan(row["surface"], row["doc_id"], int(row["start"]), int(row["end"])))
    return spans


def dump_gold_spans(spans: Sequence[GoldSpan], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["surface", "doc_id", "start", "end"])
        for s in spans:
            writer.writerow([s.surface, s.doc_id, s.start, s.end])


@dataclass(frozen=True)
class PipelineConfig:
    min_freq: int = 2
    min_len: int = 2
    max_len: int = 8
    contrast_ratio: float = 1.0
    phono_min_fraction: float = 0.5
    precision_ks: tuple[int, ...] = (50, 100, 500)
    seed: int = 0
    epochs: int = 300
    learning_rate: float = 0.5
    l2: float = 1e-3
    inventory_path: Optional[str] = None

    @classmethod
    def load(cls, path: Path | str) -> "PipelineConfig":
        data = json.loads(Path(path).read_text("utf-8"))
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown pipeline config keys: {sorted(unknown)}")
        if "precision_ks" in data:
            data["precision_ks"] = tuple(data["precision_ks"])
        return cls(**data)

    def inventory(self) -> PhonoInventory:
        if self.inventory_path:
            return PhonoInventory.load(self.inventory_path)
        return PhonoInventory.default()


@dataclass(frozen=True)
class PipelineResult:
    candidates: tuple[Candidate, ...]
    survivors: tuple[Candidate, ...]
    ranked: tuple[Candidate, ...]
    report: Optional[EvalReport]
    model: Optional[ContextModel]
    stage_counts: Mapping[str, int]


def run_pipeline(
    corpus: Corpus,
    contrast_corpus: Optional[Corpus],
    gold_spans: Optional[Sequence[GoldSpan]],
    config: Optional[PipelineConfig] = None,
) -> PipelineResult:
    """Run generation, both filters, ranking, and evaluation end to end."""
    if config is None:
        config = PipelineConfig()
    inventory = config.inventory()
    candidates = generate_candidates(
        corpus, min_freq=config.min_freq, min_len=config.min_len, max_len=config.max_len
    )
    stage_counts = {"generated": len(candidates)}
    after_contrast = filter_contrast(candidates, corpus, contrast_corpus, config.contrast_ratio)
    stage_counts["after_contrast"] = len(after_contrast)
    after_phono = filter_phonotactic(after_contrast, inventory, config.phono_min_fraction)
    stage_counts["after_phonotactic"] = len(after_phono)
    for cand in after_phono:
        cand.survive()

    model = None
    ranked: list[Candidate] = []
    report = None
    if gold_spans:
        gold = {s.surface for s in gold_spans}
        model = train_context_model(
            corpus, gold, after_phono, inventory,
            epochs=config.epochs, learning_rate=config.learning_rate, l2=config.l2,
        )
        ranked = rank_candidates(corpus, model, after_phono, inventory)
        report = evaluate(ranked, after_phono, gold, config.precision_ks)
    else:
        ranked = sorted(after_phono, key=lambda c: (-c.total_freq, c.surface))
        for cand in ranked:
            cand.set_rank_score(float(cand.total_freq))

    return PipelineResult(
        candidates=tuple(candidates),
        survivors=tuple(after_phono),
        ranked=tuple(ranked),
        report=report,
        model=model,
        stage_counts=stage_counts,
    )
