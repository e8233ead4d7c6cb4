"""Frequent repeated-string extraction over sentence-bounded text runs.

Extraction finds every character string in a length band whose overlapping
occurrence count meets a frequency floor. Candidate strings never cross
sentence-segment boundaries nor punctuation, so counting operates on the
maximal "wordable" runs inside each sentence segment.

Complexity budget: extraction grows candidates length by length, counting
a (k+1)-gram only at positions where the k-gram starting there already met
the floor. Memory is bounded by the frequent-set size per length, never by
the number of distinct substrings, which keeps the default band feasible
on corpora in the 10^8-character range (the dominant cost is the initial
bigram count, one dict update per corpus position).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import Corpus, Segment, is_wordable

HARD_LENGTH_CAP = 8


@dataclass(frozen=True)
class PseudoWord:
    """A repeated character string with its corpus statistics."""

    surface: str
    total_freq: int
    doc_freq: int

    @property
    def length(self) -> int:
        return len(self.surface)


def _wordable_runs(text: str) -> list[str]:
    runs = []
    start = None
    for i, ch in enumerate(text):
        if is_wordable(ch):
            if start is None:
                start = i
        else:
            if start is not None:
                runs.append(text[start:i])
                start = None
    if start is not None:
        runs.append(text[start:])
    return runs


def _scope_pieces(
    corpus: Corpus,
    doc_ids: Optional[Iterable[str]],
    segments: Optional[Iterable[Segment]],
) -> list[tuple[str, str]]:
    """(doc_id, run_text) pieces for the requested scope."""
    pieces = []
    if segments is not None:
        for seg in segments:
            body = corpus.doc(seg.doc_id).body
            for run in _wordable_runs(body[seg.start : seg.end]):
                pieces.append((seg.doc_id, run))
        return pieces
    ids = corpus.doc_ids() if doc_ids is None else list(doc_ids)
    for doc_id in ids:
        doc = corpus.doc(doc_id)
        for seg in doc.sentences:
            for run in _wordable_runs(doc.body[seg.start : seg.end]):
                pieces.append((doc_id, run))
    return pieces


def extract_repeated_strings(
    corpus: Corpus,
    *,
    min_len: int = 2,
    max_len: int = 8,
    min_freq: int = 2,
    doc_ids: Optional[Iterable[str]] = None,
    segments: Optional[Iterable[Segment]] = None,
    hard_cap: int = HARD_LENGTH_CAP,
) -> list[PseudoWord]:
    """All strings in the length band with overlapping count >= min_freq.

    Output is sorted by total frequency descending, ties by surface
    codepoint order, so repeated runs are bit-exact.
    """
    if not 1 <= min_len <= max_len:
        raise ValueError(f"invalid length band [{min_len}, {max_len}]")
    if max_len > hard_cap:
        raise ValueError(f"max_len {max_len} beyond hard cap {hard_cap}")
    if min_freq < 2:
        raise ValueError(f"min_freq must be at least 2, got {min_freq}")

    pieces = _scope_pieces(corpus, doc_ids, segments)

    totals: dict[str, Counter] = {}
    doc_freq: dict[str, Counter] = {}

    # Positions (piece index, char index) whose k-gram met the floor; used
    # to grow (k+1)-grams without re-scanning everything.
    survivors: Optional[list[tuple[int, int]]] = None
    for k in range(min_len, max_len + 1):
        counts: Counter = Counter()
        last_doc: dict[str, str] = {}
        dfreq: Counter = Counter()
        positions: list[tuple[int, int]] = []
        if survivors is None:
            candidates = (
                (pi, ci)
                for pi, (_, run) in enumerate(pieces)
                for ci in range(len(run) - k + 1)
            )
        else:
            candidates = iter(survivors)
        for pi, ci in candidates:
            doc_id, run = pieces[pi]
            if ci + k > len(run):
                continue
            gram = run[ci : ci + k]
            counts[gram] += 1
            if last_doc.get(gram) != doc_id:
                last_doc[gram] = doc_id
                dfreq[gram] += 1
            positions.append((pi, ci))
        frequent = {g for g, c in counts.items() if c >= min_freq}
        totals[k] = Counter({g: counts[g] for g in frequent})
        doc_freq[k] = Counter({g: dfreq[g] for g in frequent})
        survivors = [
            (pi, ci) for pi, ci in positions if pieces[pi][1][ci : ci + k] in frequent
        ]
        if not survivors:
            for k2 in range(k + 1, max_len + 1):
                totals[k2] = Counter()
                doc_freq[k2] = Counter()
            break

    out = [
        PseudoWord(g, totals[k][g], doc_freq[k][g])
        for k in range(min_len, max_len + 1)
        for g in totals.get(k, ())
    ]
    out.sort(key=lambda p: (-p.total_freq, p.surface))
    return out


def prune_subsumed(candidates: Sequence[PseudoWord]) -> list[PseudoWord]:
    """Drop strings that never occur outside some retained superstring.

    A string is subsumed when a strictly longer candidate contains it with
    the same total frequency. Frequencies are monotone under substring, so
    only candidates in the same frequency class can subsume each other.
    """
    by_freq: dict[int, list[PseudoWord]] = {}
    for cand in candidates:
        by_freq.setdefault(cand.total_freq, []).append(cand)
    kept: list[PseudoWord] = []
    for group in by_freq.values():
        group.sort(key=lambda p: (-len(p.surface), p.surface))
        for i, cand in enumerate(group):
            subsumed = any(
                len(other.surface) > len(cand.surface) and cand.surface in other.surface
                for other in group[:i]
            )
            if not subsumed:
                kept.append(cand)
    kept.sort(key=lambda p: (-p.total_freq, p.surface))
    return kept
