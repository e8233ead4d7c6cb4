"""Corpus file formats.

Two input shapes are supported:

*  A directory of UTF-8 text files plus a ``manifest.jsonl`` sidecar, one
   JSON object per document::

       {"id": "jttw", "file": "jttw.txt", "title": "...", "collection": "...",
        "date": "1592", "chapter_pattern": "..."}

*  A line-delimited ``.jsonl`` file where each line is one document::

       {"id": "...", "title": "...", "collection": "...", "date": "1901-05",
        "body": "...", "chapter_pattern": "...", "chapter_offsets": [[0, 120]]}

``chapter_offsets`` wins over ``chapter_pattern`` when both are present.
Writing always emits explicit offsets, so a written corpus reloads with an
identical generation id.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import Corpus, CorpusDoc, DocMeta, PartialDate, ingest_document


def _doc_from_record(record: dict, body: bytes) -> CorpusDoc:
    offsets = record.get("chapter_offsets")
    meta = DocMeta(
        doc_id=record["id"],
        title=record.get("title", ""),
        collection=record.get("collection", ""),
        date=PartialDate.parse(record.get("date")),
        chapter_pattern=None if offsets else record.get("chapter_pattern"),
        chapter_offsets=[tuple(o) for o in offsets] if offsets else None,
        chunk_size=record.get("chunk_size", 40),
    )
    return ingest_document(body, meta)


def load_corpus(path: Path | str) -> Corpus:
    path = Path(path)
    if path.is_dir():
        manifest = path / "manifest.jsonl"
        if not manifest.exists():
            raise FileNotFoundError(f"{manifest} (corpus directories need a manifest.jsonl)")
        docs = []
        for i, line in enumerate(manifest.read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            record = json.loads(line)
            if "id" not in record or "file" not in record:
                raise ValueError(f"{manifest}:{i}: manifest records need id and file")
            docs.append(_doc_from_record(record, (path / record["file"]).read_bytes()))
        return Corpus(docs)
    if path.suffix != ".jsonl":
        raise ValueError(f"corpus input must be a directory or a .jsonl file, got {path}")
    docs = []
    for i, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        record = json.loads(line)
        if "id" not in record or "body" not in record:
            raise ValueError(f"{path}:{i}: corpus records need id and body")
        docs.append(_doc_from_record(record, record["body"].encode("utf-8")))
    return Corpus(docs)


def write_corpus(corpus: Corpus, path: Path | str) -> None:
    """Write one document per line with explicit chapter offsets."""
    lines = []
    for doc in corpus.docs():
        record = {
            "id": doc.doc_id,
            "title": doc.title,
            "collection": doc.collection,
            "date": str(doc.date),
            "body": doc.body,
        }
        if doc.chapters:
            record["chapter_offsets"] = [[c.start, c.end] for c in doc.chapters]
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
