"""Bucketed frequency, collocation, normalized-rate, and presence analyses.

All operations are pure queries over an immutable corpus generation. The
counting substrate is the corpus index; every series conserves totals
(sum over buckets equals the whole-scope count for the same definition).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .corpus import Corpus, CorpusDoc, Segment
from .ngrams import extract_repeated_strings, prune_subsumed

MAX_EVENT_GAP = 5


@dataclass(frozen=True)
class KeywordSet:
    """A labeled set of surface variants counted as one keyword."""

    label: str
    surfaces: tuple[str, ...]

    def __post_init__(self):
        if not self.surfaces:
            raise ValueError("keyword set needs at least one surface")
        if len(set(self.surfaces)) != len(self.surfaces):
            raise ValueError("duplicate surfaces in keyword set")
        if any(not s for s in self.surfaces):
            raise ValueError("empty surface in keyword set")

    @classmethod
    def of(cls, *surfaces: str, label: Optional[str] = None) -> "KeywordSet":
        return cls(label or surfaces[0], tuple(surfaces))


@dataclass(frozen=True)
class Bucketing:
    """How counts are grouped: by year, month, chapter, or explicit periods."""

    kind: str  # year | month | chapter | periods
    periods: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("year", "month", "chapter", "periods"):
            raise ValueError(f"unknown bucketing kind: {self.kind}")
        if self.kind == "periods":
            if not self.periods:
                raise ValueError("period bucketing needs at least one period")
            prev_end = None
            for start, end in self.periods:
                if start > end:
                    raise ValueError(f"bad period [{start}, {end}]")
                if prev_end is not None and start <= prev_end:
                    raise ValueError("periods must be ordered and non-overlapping")
                prev_end = end
        elif self.periods:
            raise ValueError(f"periods given for {self.kind} bucketing")

    @classmethod
    def year(cls) -> "Bucketing":
        return cls("year")

    @classmethod
    def month(cls) -> "Bucketing":
        return cls("month")

    @classmethod
    def chapter(cls) -> "Bucketing":
        return cls("chapter")

    @classmethod
    def of_periods(cls, periods: Iterable[tuple[int, int]]) -> "Bucketing":
        return cls("periods", tuple(tuple(p) for p in periods))

    def doc_bucket(self, doc: CorpusDoc):
        """Bucket key for a dated document, or None when out of reach."""
        date = doc.date
        if self.kind == "year":
            return date.year
        if self.kind == "month":
            if date.year is None or date.month is None:
                return None
            return (date.year, date.month)
        if self.kind == "periods":
            if date.year is None:
                return None
            for start, end in self.periods:
                if start <= date.year <= end:
                    return (start, end)
            return None
        raise ValueError("chapter bucketing has no per-document bucket")


def bucket_label(bucketing: Bucketing, key) -> str:
    if bucketing.kind == "year":
        return str(key)
    if bucketing.kind == "month":
        return f"{key[0]:04d}-{key[1]:02d}"
    if bucketing.kind == "chapter":
        return chapter_label(key)
    return f"{key[0]}-{key[1]}"


def chapter_label(index: int) -> str:
    """Chapter axis labels: chapter 1 is 'd001'."""
    return f"d{index:03d}"


@dataclass(frozen=True)
class TimeSeries:
    bucketing: Bucketing
    points: Mapping[object, int]
    domain: tuple
    skipped_undated: int = 0
    meta: Mapping[str, object] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.points.values())

    def value(self, key) -> int:
        return self.points.get(key, 0)

    def labeled_points(self) -> list[tuple[str, int]]:
        return [(bucket_label(self.bucketing, k), self.value(k)) for k in self.domain]


@dataclass(frozen=True)
class CollocationTable:
    anchor: KeywordSet
    periods: tuple[tuple[int, int], ...]
    rows: tuple[tuple[str, tuple[int, ...]], ...]
    window: str = "sentence"
    arity: int = 2


@dataclass(frozen=True)
class RateSeries:
    """Event counts normalized by subject-appearance counts per bucket.

    A bucket where the subject never appears has an undefined rate (None),
    which is distinct from a zero rate.
    """

    bucketing: Bucketing
    domain: tuple
    numerators: Mapping[object, int]
    denominators: Mapping[object, int]
    skipped_undated: int = 0

    def rate(self, key) -> Optional[float]:
        den = self.denominators.get(key, 0)
        if den == 0:
            return None
        return self.numerators.get(key, 0) / den

    def rates(self) -> list[tuple[str, Optional[float]]]:
        return [(bucket_label(self.bucketing, k), self.rate(k)) for k in self.domain]


@dataclass(frozen=True)
class PresenceMatrix:
    doc_id: str
    entities: tuple[KeywordSet, ...]
    cells: tuple[tuple[int, ...], ...]  # [entity][chapter]

    @property
    def chapter_count(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    @property
    def chapter_labels(self) -> tuple[str, ...]:
        return tuple(chapter_label(i + 1) for i in range(self.chapter_count))

    def row(self, label: str) -> tuple[int, ...]:
        for ent, cells in zip(self.entities, self.cells):
            if ent.label == label:
                return cells
        raise KeyError(f"no entity labeled {label!r}")

    def present(self, entity_index: int, chapter_index: int) -> bool:
        return self.cells[entity_index][chapter_index] > 0


Window = Union[str, int]  # "sentence" or a character-block width


def _year_domain(keys: Iterable[int]) -> tuple:
    keys = [k for k in keys]
    if not keys:
        return ()
    return tuple(range(min(keys), max(keys) + 1))


def _month_domain(keys: Iterable[tuple[int, int]]) -> tuple:
    keys = list(keys)
    if not keys:
        return ()
    lo, hi = min(keys), max(keys)
    out = []
    y, m = lo
    while (y, m) <= hi:
        out.append((y, m))
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return tuple(out)


def _make_domain(bucketing: Bucketing, keys: Iterable) -> tuple:
    if bucketing.kind == "year":
        return _year_domain(keys)
    if bucketing.kind == "month":
        return _month_domain(keys)
    if bucketing.kind == "periods":
        return bucketing.periods
    raise ValueError("chapter domains come from the document")


def _single_chaptered_doc(corpus: Corpus, doc_ids: Optional[Iterable[str]]) -> CorpusDoc:
    ids = corpus.doc_ids() if doc_ids is None else list(doc_ids)
    if len(ids) != 1:
        raise ValueError("chapter bucketing requires a single-document scope")
    doc = corpus.doc(ids[0])
    if not doc.chapters:
        raise ValueError(f"document {doc.doc_id} has no chapter structure")
    return doc


def keyword_timeseries(
    corpus: Corpus,
    kw: KeywordSet,
    bucketing: Bucketing,
    *,
    doc_ids: Optional[Iterable[str]] = None,
) -> TimeSeries:
    """Per-bucket overlapping occurrence counts, summed over surfaces."""
    if bucketing.kind == "chapter":
        doc = _single_chaptered_doc(corpus, doc_ids)
        points = {}
        for i, chapter in enumerate(doc.chapters, start=1):
            c = sum(corpus.count(s, segments=[chapter]) for s in kw.surfaces)
            if c:
                points[i] = c
        domain = tuple(range(1, len(doc.chapters) + 1))
        return TimeSeries(bucketing, points, domain)

    points: dict = {}
    skipped = 0
    for doc in corpus.docs():
        if doc_ids is not None and doc.doc_id not in set(doc_ids):
            continue
        key = bucketing.doc_bucket(doc)
        if key is None:
            skipped += 1
            continue
        c = sum(corpus.count(s, doc_ids=[doc.doc_id]) for s in kw.surfaces)
        if c:
            points[key] = points.get(key, 0) + c
    domain = _make_domain(bucketing, points.keys())
    return TimeSeries(bucketing, points, domain, skipped_undated=skipped)


def _doc_windows(doc: CorpusDoc, window: Window) -> list[Segment]:
    if window == "sentence":
        return list(doc.sentences)
    if isinstance(window, int):
        if window < 1:
            raise ValueError("character window must be at least 1")
        n = len(doc.body)
        return [
            Segment(doc.doc_id, i, min(i + window, n), "chunk")
            for i in range(0, n, window)
        ]
    raise ValueError(f"unknown window: {window!r}")


def _window_hits(corpus: Corpus, doc: CorpusDoc, members: Sequence[KeywordSet], window: Window) -> int:
    """Number of windows in doc containing every member at least once."""
    windows = _doc_windows(doc, window)
    if not windows:
        return 0
    starts = [w.start for w in windows]
    member_windows = []
    for member in members:
        hit: set[int] = set()
        for surface in member.surfaces:
            for m in corpus.find(surface, doc_ids=[doc.doc_id]):
                wi = bisect_right(starts, m.start) - 1
                if wi >= 0 and m.end <= windows[wi].end:
                    hit.add(wi)
        member_windows.append(hit)
    return len(set.intersection(*member_windows))


def _check_members(members: Sequence[KeywordSet]) -> bool:
    """Reject identical shared surfaces; flag substring overlaps."""
    if not 2 <= len(members) <= 3:
        raise ValueError("collocation takes two or three keyword sets")
    overlap = False
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            for sa in a.surfaces:
                for sb in b.surfaces:
                    if sa == sb:
                        raise ValueError(f"members share the surface {sa!r}")
                    if sa in sb or sb in sa:
                        overlap = True
    return overlap


def collocation_timeseries(
    corpus: Corpus,
    members: Sequence[KeywordSet],
    window: Window,
    bucketing: Bucketing,
    *,
    doc_ids: Optional[Iterable[str]] = None,
) -> TimeSeries:
    """Windows containing every member, bucketed by the document's date.

    A window counts at most once per unordered member set regardless of
    how often the members repeat inside it.
    """
    overlap = _check_members(members)
    meta = {"arity": len(members), "surface_overlap": overlap}

    if bucketing.kind == "chapter":
        doc = _single_chaptered_doc(corpus, doc_ids)
        points = {}
        for i, chapter in enumerate(doc.chapters, start=1):
            sub = _chapter_window_hits(corpus, doc, chapter, members, window)
            if sub:
                points[i] = sub
        domain = tuple(range(1, len(doc.chapters) + 1))
        return TimeSeries(bucketing, points, domain, meta=meta)

    points = {}
    skipped = 0
    for doc in corpus.docs():
        if doc_ids is not None and doc.doc_id not in set(doc_ids):
            continue
        key = bucketing.doc_bucket(doc)
        if key is None:
            skipped += 1
            continue
        c = _window_hits(corpus, doc, members, window)
        if c:
            points[key] = points.get(key, 0) + c
    domain = _make_domain(bucketing, points.keys())
    return TimeSeries(bucketing, points, domain, skipped_undated=skipped, meta=meta)


def _chapter_window_hits(
    corpus: Corpus,
    doc: CorpusDoc,
    chapter: Segment,
    members: Sequence[KeywordSet],
    window: Window,
) -> int:
    windows = [
        w for w in _doc_windows(doc, window)
        if w.start >= chapter.start and w.end <= chapter.end
    ]
    if not windows:
        return 0
    starts = [w.start for w in windows]
    member_windows = []
    for member in members:
        hit: set[int] = set()
        for surface in member.surfaces:
            for m in corpus.find(surface, segments=[chapter]):
                wi = bisect_right(starts, chapter.start + m.start) - 1
                if wi >= 0 and chapter.start + m.end <= windows[wi].end:
                    hit.add(wi)
        member_windows.append(hit)
    return len(set.intersection(*member_windows))


def period_collocation_table(
    corpus: Corpus,
    anchor: KeywordSet,
    periods: Iterable[tuple[int, int]],
    top_k: int,
    *,
    min_len: int = 2,
    max_len: int = 8,
    min_freq: int = 2,
    doc_ids: Optional[Iterable[str]] = None,
) -> CollocationTable:
    """Per-period co-occurrence counts for strings collocating with anchor.

    Candidate collocates are the repeated strings found inside sentences
    that contain the anchor, pruned of subsumed variants and of the anchor
    surfaces themselves. Rows rank by their peak-period count.
    """
    bucketing = Bucketing.of_periods(periods)
    if top_k < 1:
        raise ValueError("top_k must be at least 1")

    anchor_sentences: list[tuple[Segment, Optional[tuple[int, int]]]] = []
    for doc in corpus.docs():
        if doc_ids is not None and doc.doc_id not in set(doc_ids):
            continue
        period = bucketing.doc_bucket(doc)
        sent_starts = [s.start for s in doc.sentences]
        hit_idx: set[int] = set()
        for surface in anchor.surfaces:
            for m in corpus.find(surface, doc_ids=[doc.doc_id]):
                si = bisect_right(sent_starts, m.start) - 1
                if si >= 0 and m.end <= doc.sentences[si].end:
                    hit_idx.add(si)
        for si in sorted(hit_idx):
            anchor_sentences.append((doc.sentences[si], period))

    segments = [seg for seg, _ in anchor_sentences]
    if not segments:
        return CollocationTable(anchor, bucketing.periods, ())
    candidates = prune_subsumed(
        extract_repeated_strings(
            corpus, min_len=min_len, max_len=max_len, min_freq=min_freq,
            segments=segments,
        )
    )
    anchor_set = set(anchor.surfaces)

    period_index = {p: i for i, p in enumerate(bucketing.periods)}
    seg_period = [(seg, period_index.get(period)) for seg, period in anchor_sentences]

    rows = []
    for cand in candidates:
        if cand.surface in anchor_set:
            continue
        counts = [0] * len(bucketing.periods)
        for seg, pi in seg_period:
            if pi is None:
                continue
            if corpus.count(cand.surface, segments=[seg]) > 0:
                counts[pi] += 1
        if any(counts):
            rows.append((cand.surface, tuple(counts)))
    rows.sort(key=lambda r: (-max(r[1]), r[0]))
    return CollocationTable(anchor, bucketing.periods, tuple(rows[:top_k]))


def normalized_event_rate(
    corpus: Corpus,
    subject: KeywordSet,
    event_words: KeywordSet,
    bucketing: Bucketing,
    *,
    gap: int = 0,
    doc_ids: Optional[Iterable[str]] = None,
) -> RateSeries:
    """Rate of subject appearances immediately followed by an event word.

    The denominator counts every subject occurrence in the bucket; the
    numerator counts those followed within `gap` characters by an event
    word inside the same sentence. The numerator can never exceed the
    denominator, so rates stay in [0, 1] where defined.
    """
    if not 0 <= gap <= MAX_EVENT_GAP:
        raise ValueError(f"gap must be in [0, {MAX_EVENT_GAP}]")

    if bucketing.kind == "chapter":
        doc = _single_chaptered_doc(corpus, doc_ids)
        docs = [doc]
        domain = tuple(range(1, len(doc.chapters) + 1))
    else:
        docs = [
            d for d in corpus.docs()
            if doc_ids is None or d.doc_id in set(doc_ids)
        ]
        domain = None

    numerators: dict = {}
    denominators: dict = {}
    skipped = 0
    for doc in docs:
        if bucketing.kind == "chapter":
            chapter_starts = [c.start for c in doc.chapters]
        else:
            key = bucketing.doc_bucket(doc)
            if key is None:
                skipped += 1
                continue
        sent_starts = [s.start for s in doc.sentences]
        body = doc.body
        for surface in subject.surfaces:
            for m in corpus.find(surface, doc_ids=[doc.doc_id]):
                if bucketing.kind == "chapter":
                    ci = bisect_right(chapter_starts, m.start) - 1
                    if ci < 0 or m.start >= doc.chapters[ci].end:
                        continue  # outside any chapter
                    key = ci + 1
                denominators[key] = denominators.get(key, 0) + 1
                si = bisect_right(sent_starts, m.start) - 1
                if si < 0:
                    continue
                sent = doc.sentences[si]
                if m.end > sent.end:
                    continue
                followed = False
                for d in range(gap + 1):
                    p = m.end + d
                    for ev in event_words.surfaces:
                        if p + len(ev) <= sent.end and body.startswith(ev, p):
                            followed = True
                            break
                    if followed:
                        break
                if followed:
                    numerators[key] = numerators.get(key, 0) + 1
    if domain is None:
        domain = _make_domain(bucketing, denominators.keys())
    return RateSeries(bucketing, domain, numerators, denominators, skipped_undated=skipped)


def presence_matrix(
    corpus: Corpus,
    doc_id: str,
    entities: Sequence[KeywordSet],
) -> PresenceMatrix:
    """Per-entity, per-chapter occurrence counts for one chaptered document."""
    doc = corpus.doc(doc_id)
    if not doc.chapters:
        raise ValueError(f"document {doc_id} has no chapter segmentation")
    if not entities:
        raise ValueError("at least one entity required")
    cells = []
    for entity in entities:
        row = []
        for chapter in doc.chapters:
            row.append(sum(corpus.count(s, segments=[chapter]) for s in entity.surfaces))
        cells.append(tuple(row))
    return PresenceMatrix(doc_id, tuple(entities), tuple(cells))


@dataclass(frozen=True)
class PowerProxyEntry:
    label: str
    proxy: int
    co_present_masters: tuple[str, ...]
    supporting_chapters: tuple[int, ...]  # 1-based chapters backing the proxy


def power_proxy(
    monsters: PresenceMatrix,
    masters: PresenceMatrix,
    master_ranks: Mapping[str, int],
) -> list[PowerProxyEntry]:
    """Rank one entity group by the strongest co-present entity of another.

    An entity's proxy score is the maximum rank among rank-bearing entities
    that share at least one chapter with it; entities sharing no chapter
    score zero. Ties break by the number of co-present rank-bearers, then
    by label.
    """
    if monsters.chapter_count != masters.chapter_count:
        raise ValueError("presence matrices cover different chapter axes")
    for ent in masters.entities:
        if ent.label not in master_ranks:
            raise ValueError(f"missing rank for {ent.label!r}")
        if master_ranks[ent.label] < 1:
            raise ValueError(f"rank for {ent.label!r} must be positive")

    entries = []
    for mi, monster in enumerate(monsters.entities):
        present = {c for c in range(monsters.chapter_count) if monsters.present(mi, c)}
        co_present = []
        for ki, master in enumerate(masters.entities):
            shared = {c for c in present if masters.present(ki, c)}
            if shared:
                co_present.append((master.label, master_ranks[master.label], shared))
        if co_present:
            proxy = max(rank for _, rank, _ in co_present)
            supporting = sorted(
                {c + 1 for _, rank, shared in co_present if rank == proxy for c in shared}
            )
        else:
            proxy = 0
            supporting = []
        entries.append(
            PowerProxyEntry(
                label=monster.label,
                proxy=proxy,
                co_present_masters=tuple(sorted(label for label, _, _ in co_present)),
                supporting_chapters=tuple(supporting),
            )
        )
    entries.sort(key=lambda e: (-e.proxy, -len(e.co_present_masters), e.label))
    return entries
