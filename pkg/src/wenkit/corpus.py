"""Corpus ingestion, normalization, segmentation, and exact occurrence counting.

Documents are normalized once (NFC) at ingest and never mutated afterwards.
A corpus is an immutable collection of documents plus a character-position
index; any update produces a new corpus generation.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from array import array
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

# Characters that end a sentence. Closing quotes/brackets and any directly
# following delimiters attach to the sentence they terminate.
SENTENCE_DELIMITERS = "。！？；\n"  # 。！？； and newline
TRAILING_CLOSERS = "」』”’〉》）】〕"  # 」』”’〉》）】〕

DEFAULT_CHUNK_SIZE = 40

_CJK_RANGES = (
    (0x3400, 0x4DBF),   # extension A
    (0x4E00, 0x9FFF),   # unified ideographs
    (0xF900, 0xFAFF),   # compatibility ideographs
    (0x20000, 0x2A6DF),  # extension B
    (0x2A700, 0x2EBEF),
)


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def is_wordable(ch: str) -> bool:
    """True for characters that may occur inside an extracted string.

    Punctuation, separators, and control characters act as hard boundaries
    for string extraction (but not for raw occurrence counting).
    """
    return unicodedata.category(ch)[0] not in "PZC"


def normalize_text(text: str) -> str:
    """Canonical normalization applied exactly once at ingest (NFC only)."""
    return unicodedata.normalize("NFC", text)


class EncodingError(ValueError):
    """Raised when raw bytes do not decode as UTF-8."""

    def __init__(self, byte_offset: int, reason: str):
        super().__init__(f"invalid UTF-8 at byte offset {byte_offset}: {reason}")
        self.byte_offset = byte_offset


@dataclass(frozen=True, order=True)
class PartialDate:
    """A date with optional precision: year, year-month, or full date.

    Year may be negative (BCE). Invariants: day requires month, month
    requires year.
    """

    year: Optional[int] = None
    month: Optional[int] = None
    day: Optional[int] = None

    def __post_init__(self):
        if self.day is not None and self.month is None:
            raise ValueError("day requires month")
        if self.month is not None and self.year is None:
            raise ValueError("month requires year")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if self.day is not None and not 1 <= self.day <= 31:
            raise ValueError(f"day out of range: {self.day}")

    @classmethod
    def parse(cls, text: Optional[str]) -> "PartialDate":
        """Parse 'YYYY', 'YYYY-MM', or 'YYYY-MM-DD' (year may carry a sign)."""
        if text is None or text == "":
            return cls()
        m = re.fullmatch(r"(-?\d{1,5})(?:-(\d{1,2})(?:-(\d{1,2}))?)?", text.strip())
        if not m:
            raise ValueError(f"unparseable date: {text!r}")
        year = int(m.group(1))
        month = int(m.group(2)) if m.group(2) else None
        day = int(m.group(3)) if m.group(3) else None
        return cls(year, month, day)

    def __str__(self) -> str:
        if self.year is None:
            return ""
        out = f"{self.year:04d}" if self.year >= 0 else f"-{-self.year:04d}"
        if self.month is not None:
            out += f"-{self.month:02d}"
        if self.day is not None:
            out += f"-{self.day:02d}"
        return out


@dataclass(frozen=True)
class Segment:
    """A half-open character range [start, end) within one document body."""

    doc_id: str
    start: int
    end: int
    kind: str  # sentence | chapter | chunk

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad segment range [{self.start}, {self.end})")


@dataclass(frozen=True)
class DocMeta:
    doc_id: str
    title: str = ""
    collection: str = ""
    date: PartialDate = field(default_factory=PartialDate)
    chapter_pattern: Optional[str] = None
    chapter_offsets: Optional[Sequence[tuple[int, int]]] = None
    chunk_size: int = DEFAULT_CHUNK_SIZE


def segment_sentences(doc_id: str, body: str, chunk_size: int = DEFAULT_CHUNK_SIZE) -> tuple[Segment, ...]:
    """Partition a body into sentence segments.

    Each segment runs up to and including its delimiter plus any directly
    following delimiters and closing quotes/brackets, so the concatenation
    of all segments reconstructs the body exactly. Bodies without any
    sentence delimiter fall back to fixed-length chunks.
    """
    n = len(body)
    if n == 0:
        return ()
    if not any(ch in SENTENCE_DELIMITERS for ch in body):
        return tuple(
            Segment(doc_id, i, min(i + chunk_size, n), "chunk")
            for i in range(0, n, chunk_size)
        )
    segments = []
    start = 0
    i = 0
    boundary_chars = SENTENCE_DELIMITERS + TRAILING_CLOSERS
    while i < n:
        if body[i] in SENTENCE_DELIMITERS:
            j = i + 1
            while j < n and body[j] in boundary_chars:
                j += 1
            segments.append(Segment(doc_id, start, j, "sentence"))
            start = j
            i = j
        else:
            i += 1
    if start < n:
        segments.append(Segment(doc_id, start, n, "sentence"))
    return tuple(segments)


def _chapters_from_pattern(doc_id: str, body: str, pattern: str) -> tuple[Segment, ...]:
    starts = [m.start() for m in re.finditer(pattern, body)]
    if not starts:
        return ()
    bounds = starts + [len(body)]
    return tuple(
        Segment(doc_id, bounds[k], bounds[k + 1], "chapter")
        for k in range(len(starts))
        if bounds[k] < bounds[k + 1]
    )


def _chapters_from_offsets(doc_id: str, body: str, offsets: Sequence[tuple[int, int]]) -> tuple[Segment, ...]:
    prev_end = -1
    chapters = []
    for start, end in offsets:
        if not 0 <= start < end <= len(body):
            raise ValueError(f"chapter range [{start}, {end}) outside body of length {len(body)}")
        if start < prev_end:
            raise ValueError(f"overlapping or unordered chapter range at [{start}, {end})")
        prev_end = end
        chapters.append(Segment(doc_id, start, end, "chapter"))
    return tuple(chapters)


@dataclass(frozen=True)
class CorpusDoc:
    """A dated, sourced text with sentence and chapter segmentation."""

    doc_id: str
    title: str
    collection: str
    date: PartialDate
    body: str
    sentences: tuple[Segment, ...]
    chapters: tuple[Segment, ...]

    @property
    def char_count(self) -> int:
        return len(self.body)

    @property
    def cjk_count(self) -> int:
        return sum(1 for ch in self.body if is_cjk(ch))


def ingest_document(raw: bytes, meta: DocMeta) -> CorpusDoc:
    """Decode, normalize, and segment one document.

    Rejects invalid UTF-8 (with the offending byte offset) and overlapping
    chapter ranges.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(exc.start, exc.reason) from None
    body = normalize_text(text)
    sentences = segment_sentences(meta.doc_id, body, meta.chunk_size)
    if meta.chapter_offsets is not None:
        chapters = _chapters_from_offsets(meta.doc_id, body, meta.chapter_offsets)
    elif meta.chapter_pattern is not None:
        chapters = _chapters_from_pattern(meta.doc_id, body, meta.chapter_pattern)
    else:
        chapters = ()
    return CorpusDoc(
        doc_id=meta.doc_id,
        title=meta.title,
        collection=meta.collection,
        date=meta.date,
        body=body,
        sentences=sentences,
        chapters=chapters,
    )


def make_doc(
    doc_id: str,
    body: str,
    *,
    title: str = "",
    collection: str = "",
    date: Optional[PartialDate] = None,
    chapter_pattern: Optional[str] = None,
    chapter_offsets: Optional[Sequence[tuple[int, int]]] = None,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> CorpusDoc:
    """Convenience wrapper over ingest_document for already-decoded text."""
    meta = DocMeta(
        doc_id=doc_id,
        title=title,
        collection=collection,
        date=date or PartialDate(),
        chapter_pattern=chapter_pattern,
        chapter_offsets=chapter_offsets,
        chunk_size=chunk_size,
    )
    return ingest_document(body.encode("utf-8"), meta)


@dataclass(frozen=True)
class Match:
    doc_id: str
    start: int
    end: int


class Corpus:
    """Immutable set of documents with an exact-substring position index.

    The index stores sorted global positions for every single character and
    every character bigram over the concatenation of all bodies (separated
    by NUL, which never occurs in normalized text). A query of length one
    is answered from the unigram table; longer queries take the candidate
    positions of their first bigram and verify the remainder in place.
    Counting is overlapping. Once built, the corpus is safe for unlimited
    concurrent readers; adding a document builds a new generation.
    """

    def __init__(self, docs: Iterable[CorpusDoc]):
        self._docs: dict[str, CorpusDoc] = {}
        for doc in docs:
            if doc.doc_id in self._docs:
                raise ValueError(f"duplicate doc_id: {doc.doc_id}")
            self._docs[doc.doc_id] = doc
        self._order = list(self._docs)
        self._offsets: dict[str, int] = {}
        parts = []
        pos = 0
        for doc_id in self._order:
            self._offsets[doc_id] = pos
            body = self._docs[doc_id].body
            parts.append(body)
            pos += len(body) + 1  # +1 for the NUL separator
        self._blob = "\x00".join(parts)
        if len(self._blob) >= 2**31:
            raise ValueError("corpus exceeds the 2^31-character index limit")
        self._build_index()
        self._generation = self._hash_generation()

    def _build_index(self) -> None:
        uni: dict[str, list[int]] = {}
        bi: dict[str, list[int]] = {}
        blob = self._blob
        for doc_id in self._order:
            off = self._offsets[doc_id]
            body = self._docs[doc_id].body
            for i in range(len(body)):
                g = off + i
                uni.setdefault(body[i], []).append(g)
                if i + 1 < len(body):
                    bi.setdefault(blob[g : g + 2], []).append(g)
        self._uni = {k: array("i", v) for k, v in uni.items()}
        self._bi = {k: array("i", v) for k, v in bi.items()}

    def _hash_generation(self) -> str:
        h = hashlib.sha256()
        for doc_id in self._order:
            doc = self._docs[doc_id]
            h.update(doc_id.encode("utf-8"))
            h.update(b"\x00")
            h.update(doc.body.encode("utf-8"))
            h.update(str(doc.date).encode("utf-8"))
            h.update(b"\x01")
        return h.hexdigest()[:16]

    @classmethod
    def build(cls, docs: Iterable[CorpusDoc]) -> "Corpus":
        return cls(docs)

    def add(self, doc: CorpusDoc) -> "Corpus":
        """Return a new corpus generation containing the extra document."""
        return Corpus(list(self._docs.values()) + [doc])

    @property
    def generation(self) -> str:
        return self._generation

    def __len__(self) -> int:
        return len(self._docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._docs

    def doc(self, doc_id: str) -> CorpusDoc:
        if doc_id not in self._docs:
            raise KeyError(f"unknown doc_id: {doc_id}")
        return self._docs[doc_id]

    def docs(self) -> Iterator[CorpusDoc]:
        for doc_id in self._order:
            yield self._docs[doc_id]

    def doc_ids(self) -> list[str]:
        return list(self._order)

    @property
    def char_total(self) -> int:
        return sum(d.char_count for d in self._docs.values())

    @property
    def cjk_total(self) -> int:
        return sum(d.cjk_count for d in self._docs.values())

    # -- occurrence search ------------------------------------------------

    def _ranges(
        self,
        doc_ids: Optional[Iterable[str]],
        segments: Optional[Iterable[Segment]],
    ) -> list[tuple[str, int, int]]:
        """Resolve a scope to (doc_id, global_lo, global_hi) half-open ranges."""
        if segments is not None:
            out = []
            for seg in segments:
                off = self._offsets[seg.doc_id]
                body_len = len(self._docs[seg.doc_id].body)
                if seg.end > body_len:
                    raise ValueError(f"segment end {seg.end} beyond body length {body_len}")
                out.append((seg.doc_id, off + seg.start, off + seg.end))
            return out
        ids = self._order if doc_ids is None else list(doc_ids)
        out = []
        for doc_id in ids:
            doc = self.doc(doc_id)
            off = self._offsets[doc_id]
            out.append((doc_id, off, off + len(doc.body)))
        return out

    def _positions_in(self, query: str, lo: int, hi: int) -> list[int]:
        """Global start positions of query fully inside [lo, hi)."""
        m = len(query)
        last_start = hi - m
        if last_start < lo:
            return []
        if m == 1:
            arr = self._uni.get(query)
            if arr is None:
                return []
            a = bisect_left(arr, lo)
            b = bisect_right(arr, last_start)
            return list(arr[a:b])
        arr = self._bi.get(query[:2])
        if arr is None:
            return []
        a = bisect_left(arr, lo)
        b = bisect_right(arr, last_start)
        blob = self._blob
        return [p for p in arr[a:b] if blob.startswith(query, p)]

    def count(
        self,
        query: str,
        *,
        doc_ids: Optional[Iterable[str]] = None,
        segments: Optional[Iterable[Segment]] = None,
    ) -> int:
        """Overlapping occurrence count of query within the given scope."""
        if not query:
            raise ValueError("empty query")
        total = 0
        for _, lo, hi in self._ranges(doc_ids, segments):
            total += len(self._positions_in(query, lo, hi))
        return total

    def find(
        self,
        query: str,
        *,
        doc_ids: Optional[Iterable[str]] = None,
        segments: Optional[Iterable[Segment]] = None,
    ) -> list[Match]:
        """All matches of query in scope, in document then position order."""
        if not query:
            raise ValueError("empty query")
        m = len(query)
        hits = []
        for doc_id, lo, hi in self._ranges(doc_ids, segments):
            off = self._offsets[doc_id]
            for p in self._positions_in(query, lo, hi):
                hits.append(Match(doc_id, p - off, p - off + m))
        return hits

    def sentence_index_at(self, doc_id: str, pos: int) -> int:
        """Index of the sentence segment containing character position pos."""
        doc = self.doc(doc_id)
        starts = [s.start for s in doc.sentences]
        i = bisect_right(starts, pos) - 1
        if i < 0 or pos >= doc.sentences[i].end:
            raise ValueError(f"position {pos} not inside any sentence of {doc_id}")
        return i
