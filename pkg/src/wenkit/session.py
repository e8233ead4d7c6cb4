"""Persistent iterative research sessions: keyword lists, marked statements,
keyword suggestions harvested from marked neighborhoods, and answer metrics.

A session is bound to one corpus generation. Every mutation appends to an
audit log; replaying the log against the same generation reproduces the
session state exactly. Sessions persist as versioned JSON files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .concordance import KwicHit
from .corpus import Corpus
from .ngrams import _wordable_runs
from .temporal import KeywordSet

SCHEMA_VERSION = 1
PROVENANCES = ("seed", "suggested", "manual")
MARK_LABELS = ("relevant", "irrelevant", "answer")
RATIO_EPSILON = 1e-9


def default_stoplist() -> frozenset[str]:
    text = resources.files("wenkit.data").joinpath("stoplist.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


@dataclass(frozen=True)
class KeywordEntry:
    surface: str
    provenance: str  # seed | suggested | manual

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance: {self.provenance}")


@dataclass(frozen=True)
class MarkedStatement:
    """A human judgment attached to one concordance hit."""

    doc_id: str
    start: int
    end: int
    surface: str
    label: str  # relevant | irrelevant | answer
    note: str = ""
    answer_surface: Optional[str] = None

    def __post_init__(self):
        if self.label not in MARK_LABELS:
            raise ValueError(f"unknown mark label: {self.label}")
        if self.label == "answer" and not self.answer_surface:
            raise ValueError("answer marks need a non-empty answer_surface")


class StaleGenerationError(RuntimeError):
    """Mutation attempted on a session bound to a different corpus generation."""


class Session:
    """Single-writer research session over one corpus generation."""

    def __init__(self, session_id: str, generation: str):
        self.session_id = session_id
        self.generation = generation
        self.keyword_lists: dict[str, list[KeywordEntry]] = {}
        self.marks: list[MarkedStatement] = []
        self.audit: list[dict] = []
        self._log("create", session_id=session_id, generation=generation)

    def _log(self, action: str, **params) -> None:
        self.audit.append({"seq": len(self.audit) + 1, "action": action, **params})

    def check_generation(self, corpus: Corpus) -> None:
        if corpus.generation != self.generation:
            raise StaleGenerationError(
                f"session {self.session_id} is bound to generation "
                f"{self.generation}, corpus is {corpus.generation}"
            )

    # -- keywords ---------------------------------------------------------

    def add_keywords(self, list_name: str, surfaces: Iterable[str], provenance: str) -> list[str]:
        """Add surfaces to a named list; provenance is immutable once set.

        Returns the surfaces actually added (already-present ones are
        skipped, keeping their original provenance).
        """
        entries = self.keyword_lists.setdefault(list_name, [])
        existing = self.all_surfaces()
        added = []
        for surface in surfaces:
            if not surface:
                raise ValueError("empty keyword surface")
            if surface in existing:
                continue
            entries.append(KeywordEntry(surface, provenance))
            existing.add(surface)
            added.append(surface)
        if added:
            self._log("add_keywords", list=list_name, surfaces=added, provenance=provenance)
        return added

    def all_surfaces(self) -> set[str]:
        return {e.surface for entries in self.keyword_lists.values() for e in entries}

    def keyword_set(self, list_name: str) -> KeywordSet:
        entries = self.keyword_lists.get(list_name)
        if not entries:
            raise KeyError(f"no keywords in list {list_name!r}")
        return KeywordSet(list_name, tuple(e.surface for e in entries))

    # -- searches and marks -------------------------------------------------

    def record_search(self, surfaces: Iterable[str], hit_count: int) -> None:
        self._log("search", surfaces=list(surfaces), hits=hit_count)

    def add_mark(
        self,
        corpus: Corpus,
        hit: KwicHit,
        label: str,
        *,
        note: str = "",
        answer_surface: Optional[str] = None,
    ) -> MarkedStatement:
        """Mark a hit; the hit must reference real text matching its surface."""
        self.check_generation(corpus)
        doc = corpus.doc(hit.doc_id)
        if not 0 <= hit.start < hit.end <= len(doc.body):
            raise ValueError(f"mark span [{hit.start}, {hit.end}) outside document")
        if doc.body[hit.start : hit.end] != hit.surface:
            raise ValueError("mark span does not match its surface text")
        mark = MarkedStatement(
            doc_id=hit.doc_id,
            start=hit.start,
            end=hit.end,
            surface=hit.surface,
            label=label,
            note=note,
            answer_surface=answer_surface,
        )
        self.marks.append(mark)
        self._log(
            "mark",
            doc_id=mark.doc_id,
            start=mark.start,
            end=mark.end,
            surface=mark.surface,
            label=mark.label,
            note=mark.note,
            answer_surface=mark.answer_surface,
        )
        return mark

    # -- persistence --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "session_id": self.session_id,
            "generation": self.generation,
            "keyword_lists": {
                name: [{"surface": e.surface, "provenance": e.provenance} for e in entries]
                for name, entries in self.keyword_lists.items()
            },
            "marks": [
                {
                    "doc_id": m.doc_id,
                    "start": m.start,
                    "end": m.end,
                    "surface": m.surface,
                    "label": m.label,
                    "note": m.note,
                    "answer_surface": m.answer_surface,
                }
                for m in self.marks
            ],
            # Copied so a snapshot stays immutable while the session moves on.
            "audit": [dict(entry) for entry in self.audit],
        }

    def save(self, path: Path | str) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported session schema: {data.get('schema')}")
        session = cls.__new__(cls)
        session.session_id = data["session_id"]
        session.generation = data["generation"]
        session.keyword_lists = {
            name: [KeywordEntry(e["surface"], e["provenance"]) for e in entries]
            for name, entries in data["keyword_lists"].items()
        }
        session.marks = [
            MarkedStatement(
                doc_id=m["doc_id"],
                start=m["start"],
                end=m["end"],
                surface=m["surface"],
                label=m["label"],
                note=m.get("note", ""),
                answer_surface=m.get("answer_surface"),
            )
            for m in data["marks"]
        ]
        session.audit = data["audit"]
        return session

    @classmethod
    def load(cls, path: Path | str) -> "Session":
        return cls.from_dict(json.loads(Path(path).read_text("utf-8")))

    @classmethod
    def replay(cls, audit: list[dict]) -> "Session":
        """Rebuild a session from its append-only audit log."""
        if not audit or audit[0]["action"] != "create":
            raise ValueError("audit log must start with a create entry")
        head = audit[0]
        session = cls(head["session_id"], head["generation"])
        for entry in audit[1:]:
            action = entry["action"]
            if action == "add_keywords":
                entries = session.keyword_lists.setdefault(entry["list"], [])
                existing = session.all_surfaces()
                for surface in entry["surfaces"]:
                    if surface not in existing:
                        entries.append(KeywordEntry(surface, entry["provenance"]))
                        existing.add(surface)
            elif action == "search":
                pass
            elif action == "mark":
                session.marks.append(
                    MarkedStatement(
                        doc_id=entry["doc_id"],
                        start=entry["start"],
                        end=entry["end"],
                        surface=entry["surface"],
                        label=entry["label"],
                        note=entry.get("note", ""),
                        answer_surface=entry.get("answer_surface"),
                    )
                )
            else:
                raise ValueError(f"unknown audit action: {action}")
            session.audit.append(entry)
        # Drop the synthetic create entry emitted by __init__ and keep the
        # original log verbatim.
        session.audit = list(audit)
        return session


# -- keyword suggestion -----------------------------------------------------


@dataclass(frozen=True)
class Suggestion:
    surface: str
    score: float
    neighborhood_freq: int


@dataclass(frozen=True)
class SuggestionResult:
    status: str  # ok | no-relevant-marks
    items: tuple[Suggestion, ...]


def _neighborhood_sentences(session: Session, corpus: Corpus) -> list:
    seen = set()
    segments = []
    for mark in session.marks:
        if mark.label not in ("relevant", "answer"):
            continue
        si = corpus.sentence_index_at(mark.doc_id, mark.start)
        key = (mark.doc_id, si)
        if key in seen:
            continue
        seen.add(key)
        segments.append(corpus.doc(mark.doc_id).sentences[si])
    return segments


def suggest_keywords(
    session: Session,
    corpus: Corpus,
    *,
    top_k: int = 20,
    min_len: int = 1,
    max_len: int = 4,
    stoplist: Optional[frozenset[str]] = None,
) -> SuggestionResult:
    """Rank neighborhood strings by contrast against the corpus background.

    The neighborhood is the set of sentences holding relevant/answer marks.
    Score is neighborhood frequency divided by the string's corpus-relative
    frequency (plus a small epsilon), which surfaces locally salient terms
    and suppresses ubiquitous function strings. Existing session keywords
    and stoplisted strings are never suggested.
    """
    segments = _neighborhood_sentences(session, corpus)
    if not segments:
        return SuggestionResult("no-relevant-marks", ())
    if stoplist is None:
        stoplist = default_stoplist()

    # Neighborhoods are tiny, so enumerate every in-run substring directly
    # (frequency floor 1, unlike corpus-scale extraction).
    from collections import Counter

    neighborhood: Counter = Counter()
    for seg in segments:
        text = corpus.doc(seg.doc_id).body[seg.start : seg.end]
        for run in _wordable_runs(text):
            n = len(run)
            for k in range(min_len, min(max_len, n) + 1):
                for i in range(n - k + 1):
                    neighborhood[run[i : i + k]] += 1

    excluded = session.all_surfaces()
    total_chars = corpus.char_total
    items = []
    for surface, freq in neighborhood.items():
        if surface in excluded or surface in stoplist:
            continue
        background = corpus.count(surface) / total_chars if total_chars else 0.0
        items.append(Suggestion(surface, freq / (background + RATIO_EPSILON), freq))
    items.sort(key=lambda s: (-s.score, -s.neighborhood_freq, s.surface))
    return SuggestionResult("ok", tuple(items[:top_k]))


# -- reporting ----------------------------------------------------------------


@dataclass(frozen=True)
class SessionReport:
    answers: tuple[str, ...]
    precision: Optional[float]
    recall: Optional[float]
    gold_size: Optional[int]


def load_gold_answers(path: Path | str) -> set[str]:
    """Gold answer file: one surface per line, UTF-8."""
    text = Path(path).read_text("utf-8")
    gold = {line.strip() for line in text.splitlines() if line.strip()}
    if not gold:
        raise ValueError(f"gold file {path} holds no answers")
    return gold


def session_report(session: Session, gold: Optional[set[str]] = None) -> SessionReport:
    """Distinct answers plus precision/recall against an optional gold set.

    Precision over an empty answer set is undefined (None, never 0).
    """
    answers = tuple(sorted({m.answer_surface for m in session.marks if m.label == "answer"}))
    if gold is None:
        return SessionReport(answers, None, None, None)
    correct = len(set(answers) & gold)
    precision = correct / len(answers) if answers else None
    recall = correct / len(gold)
    return SessionReport(answers, precision, recall, len(gold))


@dataclass(frozen=True)
class SessionHealth:
    """Gaps worth surfacing: silent keywords and unmarked chapters."""

    keywords_without_hits: tuple[str, ...]
    unmarked_chapters: dict[str, tuple[int, ...]]  # doc_id -> 1-based chapters


def session_health(session: Session, corpus: Corpus) -> SessionHealth:
    silent = tuple(
        sorted(s for s in session.all_surfaces() if corpus.count(s) == 0)
    )
    unmarked: dict[str, tuple[int, ...]] = {}
    marked_positions: dict[str, list[int]] = {}
    for mark in session.marks:
        marked_positions.setdefault(mark.doc_id, []).append(mark.start)
    for doc in corpus.docs():
        if not doc.chapters:
            continue
        positions = marked_positions.get(doc.doc_id, [])
        missing = []
        for i, chapter in enumerate(doc.chapters, start=1):
            if not any(chapter.start <= p < chapter.end for p in positions):
                missing.append(i)
        if missing:
            unmarked[doc.doc_id] = tuple(missing)
    return SessionHealth(silent, unmarked)
