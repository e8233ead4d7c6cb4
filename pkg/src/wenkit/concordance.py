"""Keyword-in-context search over a corpus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .corpus import Corpus
from .temporal import KeywordSet

DEFAULT_CONTEXT_WIDTH = 30


@dataclass(frozen=True)
class KwicHit:
    """One occurrence with clamped left/right context (never padded)."""

    doc_id: str
    start: int
    end: int
    surface: str
    left: str
    right: str
    sentence_index: int


def kwic_search(
    corpus: Corpus,
    kw: KeywordSet,
    *,
    context_width: int = DEFAULT_CONTEXT_WIDTH,
    doc_ids: Optional[Iterable[str]] = None,
) -> list[KwicHit]:
    """One hit per occurrence of any surface, in document then text order."""
    if context_width < 0:
        raise ValueError("context_width must be non-negative")
    ids = corpus.doc_ids() if doc_ids is None else list(doc_ids)
    hits = []
    for doc_id in ids:
        doc = corpus.doc(doc_id)
        body = doc.body
        doc_hits = []
        for surface in kw.surfaces:
            for m in corpus.find(surface, doc_ids=[doc_id]):
                doc_hits.append((m.start, m.end, surface))
        doc_hits.sort()
        for start, end, surface in doc_hits:
            try:
                sent = corpus.sentence_index_at(doc_id, start)
            except ValueError:
                sent = -1
            hits.append(
                KwicHit(
                    doc_id=doc_id,
                    start=start,
                    end=end,
                    surface=surface,
                    left=body[max(0, start - context_width) : start],
                    right=body[end : end + context_width],
                    sentence_index=sent,
                )
            )
    return hits
