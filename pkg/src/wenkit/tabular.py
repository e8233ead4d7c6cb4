"""Delimited-table and JSON-object export for every analysis result.

Tables are tab separated with a header row and newline endings so repeated
runs are byte identical. Undefined rates export as empty cells in tables
and null in JSON, never as zero.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Sequence

from .disambig import DisambigReport, PairScore
from .ngrams import PseudoWord
from .temporal import (
    CollocationTable,
    PresenceMatrix,
    RateSeries,
    TimeSeries,
    bucket_label,
)
from .translit import Candidate, EvalReport


def _write(path: Path | str, lines: Sequence[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path: Path | str, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _fmt_rate(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


# -- time series ---------------------------------------------------------------


def timeseries_rows(series: TimeSeries) -> list[tuple[str, int]]:
    return series.labeled_points()


def write_timeseries(series: TimeSeries, path: Path | str) -> None:
    lines = ["bucket\tcount"]
    lines += [f"{label}\t{count}" for label, count in timeseries_rows(series)]
    _write(path, lines)


def timeseries_payload(series: TimeSeries) -> dict:
    return {
        "bucketing": series.bucketing.kind,
        "points": [
            {"bucket": label, "count": count} for label, count in timeseries_rows(series)
        ],
        "total": series.total,
        "skipped_undated": series.skipped_undated,
        "meta": dict(series.meta),
    }


# -- rate series ----------------------------------------------------------------


def write_rateseries(series: RateSeries, path: Path | str) -> None:
    lines = ["bucket\tnumerator\tdenominator\trate"]
    for key in series.domain:
        label = bucket_label(series.bucketing, key)
        num = series.numerators.get(key, 0)
        den = series.denominators.get(key, 0)
        lines.append(f"{label}\t{num}\t{den}\t{_fmt_rate(series.rate(key))}")
    _write(path, lines)


def rateseries_payload(series: RateSeries) -> dict:
    points = []
    for key in series.domain:
        points.append(
            {
                "bucket": bucket_label(series.bucketing, key),
                "numerator": series.numerators.get(key, 0),
                "denominator": series.denominators.get(key, 0),
                "rate": series.rate(key),
            }
        )
    return {"bucketing": series.bucketing.kind, "points": points}


# -- collocation tables ------------------------------------------------------------


def write_collocation_table(table: CollocationTable, path: Path | str) -> None:
    header = "collocate\t" + "\t".join(f"{s}-{e}" for s, e in table.periods)
    lines = [header]
    for surface, counts in table.rows:
        lines.append(surface + "\t" + "\t".join(str(c) for c in counts))
    _write(path, lines)


def collocation_table_payload(table: CollocationTable) -> dict:
    return {
        "anchor": table.anchor.label,
        "periods": [f"{s}-{e}" for s, e in table.periods],
        "rows": [
            {"collocate": surface, "counts": list(counts)} for surface, counts in table.rows
        ],
    }


# -- presence matrices ---------------------------------------------------------------


def write_presence_matrix(matrix: PresenceMatrix, path: Path | str) -> None:
    lines = ["entity\t" + "\t".join(matrix.chapter_labels)]
    for entity, cells in zip(matrix.entities, matrix.cells):
        lines.append(entity.label + "\t" + "\t".join(str(c) for c in cells))
    _write(path, lines)


def presence_matrix_payload(matrix: PresenceMatrix) -> dict:
    return {
        "doc_id": matrix.doc_id,
        "chapters": list(matrix.chapter_labels),
        "rows": [
            {"entity": entity.label, "counts": list(cells)}
            for entity, cells in zip(matrix.entities, matrix.cells)
        ],
    }


# -- pseudo-words ----------------------------------------------------------------------


def write_pseudowords(words: Sequence[PseudoWord], path: Path | str) -> None:
    lines = ["surface\tlength\ttotal_freq\tdoc_freq"]
    lines += [f"{w.surface}\t{w.length}\t{w.total_freq}\t{w.doc_freq}" for w in words]
    _write(path, lines)


def pseudowords_payload(words: Sequence[PseudoWord]) -> list[dict]:
    return [
        {"surface": w.surface, "length": w.length, "total_freq": w.total_freq, "doc_freq": w.doc_freq}
        for w in words
    ]


# -- transliteration results ---------------------------------------------------------


def write_ranked_candidates(ranked: Sequence[Candidate], path: Path | str) -> None:
    lines = ["rank\tsurface\ttotal_freq\tscore"]
    for i, cand in enumerate(ranked, start=1):
        lines.append(f"{i}\t{cand.surface}\t{cand.total_freq}\t{repr(cand.rank_score)}")
    _write(path, lines)


def eval_report_payload(report: EvalReport) -> dict:
    return {
        "survivors": report.survivors,
        "recall": report.recall,
        "precision_at": {str(k): v for k, v in sorted(report.precision_at.items())},
        "truncated_ks": sorted(report.truncated),
    }


# -- disambiguation -----------------------------------------------------------------


def pair_payload(pair: PairScore) -> dict:
    return {
        "pair_id": pair.pair_id,
        "a": pair.a_id,
        "b": pair.b_id,
        "name": pair.name,
        "factoids": [
            {"factoid": f.factoid, "score": f.score, "evidence": f.evidence}
            for f in pair.factoids
        ],
        "total": pair.total,
        "veto": pair.veto,
        "verdict": pair.verdict,
    }


def disambig_report_payload(report: DisambigReport) -> dict:
    return {
        "pair_count": len(report.pairs),
        "verdicts": dict(report.verdict_histogram),
        "nonzero_total_pairs": report.nonzero_total_pairs,
        "nonzero_factoid_pairs": report.nonzero_factoid_pairs,
        "review_queue": list(report.review_queue),
    }


def write_review_queue(report: DisambigReport, path: Path | str) -> None:
    by_id = {p.pair_id: p for p in report.pairs}
    lines = ["pair_id\tname\ttotal"]
    for pair_id in report.review_queue:
        pair = by_id[pair_id]
        lines.append(f"{pair_id}\t{pair.name}\t{repr(pair.total)}")
    _write(path, lines)
