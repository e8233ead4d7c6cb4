"""HTTP JSON service over the analytics core.

Every endpoint answers UTF-8 JSON, echoes the corpus generation it served,
and paginates list results. Analytics queries run lock-free over immutable
corpora; session and judgment writes serialize per resource and persist to
the data directory, which is the only state that survives restarts.
"""

from __future__ import annotations

import json
import threading
import uuid
from collections import defaultdict
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from .concordance import KwicHit, kwic_search
from .corpus import Corpus
from .disambig import (
    DisambigConfig,
    DisambigReport,
    Judgment,
    NameRecord,
    dump_judgments,
    load_judgments,
    run_disambiguation,
)
from .gazetteer import Gazetteer
from .ngrams import extract_repeated_strings, prune_subsumed
from .session import (
    Session,
    StaleGenerationError,
    session_health,
    session_report,
    suggest_keywords,
)
from .tabular import (
    collocation_table_payload,
    eval_report_payload,
    pair_payload,
    presence_matrix_payload,
    pseudowords_payload,
    rateseries_payload,
    timeseries_payload,
)
from .temporal import (
    Bucketing,
    KeywordSet,
    collocation_timeseries,
    keyword_timeseries,
    normalized_event_rate,
    period_collocation_table,
    presence_matrix,
)
from .translit import GoldSpan, PipelineConfig, PipelineResult, run_pipeline


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"error": code, "message": message})


def _paginate(items: list, page: int, page_size: int) -> dict:
    start = (page - 1) * page_size
    return {
        "items": items[start : start + page_size],
        "total": len(items),
        "page": page,
        "page_size": page_size,
    }


class AppState:
    """Server-side resources: corpora, record sets, sessions, runs."""

    def __init__(
        self,
        corpora: dict[str, Corpus],
        data_dir: Path,
        records: Optional[dict[str, list[NameRecord]]] = None,
        gazetteers: Optional[dict[str, Gazetteer]] = None,
        gold_spans: Optional[dict[str, list[GoldSpan]]] = None,
    ):
        self.corpora = corpora
        self.data_dir = Path(data_dir)
        self.records = records or {}
        self.gazetteers = gazetteers or {}
        self.gold_spans = gold_spans or {}
        self.sessions: dict[str, Session] = {}
        self.session_corpus: dict[str, str] = {}
        self.translit_runs: dict[str, tuple[str, PipelineResult]] = {}
        self.disambig_runs: dict[str, tuple[DisambigReport, dict[str, NameRecord]]] = {}
        self._session_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
        self._judgment_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)
        self._store_lock = threading.Lock()
        (self.data_dir / "sessions").mkdir(parents=True, exist_ok=True)
        (self.data_dir / "judgments").mkdir(parents=True, exist_ok=True)
        self._load_persisted_sessions()

    def _load_persisted_sessions(self) -> None:
        for path in sorted((self.data_dir / "sessions").glob("*.json")):
            data = json.loads(path.read_text("utf-8"))
            session = Session.from_dict(data)
            self.sessions[session.session_id] = session
            self.session_corpus[session.session_id] = data.get("corpus_name", "")

    def corpus(self, name: str) -> Corpus:
        if name not in self.corpora:
            raise _error(404, "unknown-corpus", f"no corpus named {name!r}")
        return self.corpora[name]

    def session(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise _error(404, "unknown-session", f"no session {session_id!r}")
        return self.sessions[session_id]

    def session_lock(self, session_id: str) -> threading.Lock:
        return self._session_locks[session_id]

    def persist_session(self, session_id: str) -> None:
        session = self.sessions[session_id]
        payload = session.to_dict()
        payload["corpus_name"] = self.session_corpus.get(session_id, "")
        path = self.data_dir / "sessions" / f"{session_id}.json"
        path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    def judgment_file(self, run_id: str) -> Path:
        return self.data_dir / "judgments" / f"{run_id}.jsonl"

    def load_run_judgments(self, run_id: str) -> dict[str, Judgment]:
        path = self.judgment_file(run_id)
        if not path.exists():
            return {}
        return load_judgments(path)


# -- request models ---------------------------------------------------------------


class KeywordSetModel(BaseModel):
    label: str = ""
    surfaces: list[str]

    def to_keyword_set(self) -> KeywordSet:
        label = self.label or (self.surfaces[0] if self.surfaces else "")
        try:
            return KeywordSet(label, tuple(self.surfaces))
        except ValueError as exc:
            raise _error(422, "bad-keyword-set", str(exc))


class BucketingModel(BaseModel):
    kind: str = "year"
    periods: list[tuple[int, int]] = Field(default_factory=list)

    def to_bucketing(self) -> Bucketing:
        try:
            if self.kind == "periods":
                return Bucketing.of_periods(self.periods)
            return Bucketing(self.kind)
        except ValueError as exc:
            raise _error(422, "bad-bucketing", str(exc))


class TimeseriesRequest(BaseModel):
    keywords: KeywordSetModel
    bucketing: BucketingModel = Field(default_factory=BucketingModel)
    doc_ids: Optional[list[str]] = None


class CollocationRequest(BaseModel):
    members: list[KeywordSetModel]
    window: str | int = "sentence"
    bucketing: BucketingModel = Field(default_factory=BucketingModel)


class PeriodTableRequest(BaseModel):
    anchor: KeywordSetModel
    periods: list[tuple[int, int]]
    top_k: int = 20
    min_freq: int = 2
    min_len: int = 2
    max_len: int = 8


class RateRequest(BaseModel):
    subject: KeywordSetModel
    events: KeywordSetModel
    bucketing: BucketingModel = Field(default_factory=lambda: BucketingModel(kind="chapter"))
    gap: int = 0
    doc_ids: Optional[list[str]] = None


class PresenceRequest(BaseModel):
    doc_id: str
    entities: list[KeywordSetModel]


class PseudowordRequest(BaseModel):
    min_len: int = 2
    max_len: int = 8
    min_freq: int = 2
    prune: bool = True
    limit: int = 200


class SessionCreateRequest(BaseModel):
    corpus: str
    session_id: Optional[str] = None


class KeywordAddRequest(BaseModel):
    list_name: str = "seeds"
    surfaces: list[str]
    provenance: str = "manual"


class SessionSearchRequest(BaseModel):
    surfaces: list[str]
    context_width: int = 30
    page: int = 1
    page_size: int = 50


class MarkRequest(BaseModel):
    doc_id: str
    start: int
    end: int
    surface: str
    label: str
    note: str = ""
    answer_surface: Optional[str] = None


class ReportRequest(BaseModel):
    gold: Optional[list[str]] = None


class TranslitRunRequest(BaseModel):
    corpus: str
    contrast: Optional[str] = None
    gold: Optional[str] = None  # name of a registered gold-span set
    config: dict = Field(default_factory=dict)


class DisambigRunRequest(BaseModel):
    records: str  # name of a registered record set
    gazetteer: Optional[str] = None
    config: dict = Field(default_factory=dict)


class JudgmentRequest(BaseModel):
    pair_id: str
    verdict: str
    note: str = ""


def _hit_payload(hit: KwicHit) -> dict:
    return {
        "doc_id": hit.doc_id,
        "start": hit.start,
        "end": hit.end,
        "surface": hit.surface,
        "left": hit.left,
        "right": hit.right,
        "sentence_index": hit.sentence_index,
    }


def _record_payload(record: NameRecord) -> dict:
    return {
        "record_id": record.record_id,
        "name": record.name,
        "birth_place": record.birth_place,
        "entry_into_office": record.entry_into_office,
        "office_posting": record.office_posting,
        "alternate_names": sorted(record.alternate_names),
        "service_location": record.service_location,
        "service_period": list(record.service_period) if record.service_period else None,
        "source": {
            "book_id": record.source.book_id,
            "pub_place": record.source.pub_place,
            "book_year": record.source.book_year,
        },
    }


def _session_payload(state: AppState, session: Session) -> dict:
    corpus_name = state.session_corpus.get(session.session_id, "")
    live = (
        corpus_name in state.corpora
        and state.corpora[corpus_name].generation == session.generation
    )
    return {
        "session": session.to_dict(),
        "corpus": corpus_name,
        "live": live,
    }


def create_app(state: AppState, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="wenkit", version="0.1.0")

    # -- corpora ------------------------------------------------------------

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/corpora")
    def list_corpora(page: int = Query(1, ge=1), page_size: int = Query(50, ge=1, le=500)):
        items = []
        for name in sorted(state.corpora):
            corpus = state.corpora[name]
            items.append(
                {
                    "name": name,
                    "generation": corpus.generation,
                    "documents": len(corpus),
                    "characters": corpus.char_total,
                    "cjk_characters": corpus.cjk_total,
                }
            )
        return _paginate(items, page, page_size)

    @app.get("/corpora/{name}")
    def corpus_stats(name: str, page: int = Query(1, ge=1), page_size: int = Query(50, ge=1, le=500)):
        corpus = state.corpus(name)
        docs = [
            {
                "doc_id": d.doc_id,
                "title": d.title,
                "collection": d.collection,
                "date": str(d.date),
                "characters": d.char_count,
                "chapters": len(d.chapters),
                "sentences": len(d.sentences),
            }
            for d in corpus.docs()
        ]
        out = _paginate(docs, page, page_size)
        out.update(
            {
                "name": name,
                "generation": corpus.generation,
                "characters": corpus.char_total,
                "cjk_characters": corpus.cjk_total,
            }
        )
        return out

    @app.get("/corpora/{name}/kwic")
    def kwic(
        name: str,
        q: list[str] = Query(...),
        width: int = Query(30, ge=0, le=200),
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
    ):
        corpus = state.corpus(name)
        kw = KeywordSetModel(surfaces=q).to_keyword_set()
        hits = kwic_search(corpus, kw, context_width=width)
        out = _paginate([_hit_payload(h) for h in hits], page, page_size)
        out["generation"] = corpus.generation
        return out

    @app.post("/corpora/{name}/timeseries")
    def timeseries(name: str, req: TimeseriesRequest):
        corpus = state.corpus(name)
        try:
            series = keyword_timeseries(
                corpus,
                req.keywords.to_keyword_set(),
                req.bucketing.to_bucketing(),
                doc_ids=req.doc_ids,
            )
        except (ValueError, KeyError) as exc:
            raise _error(422, "bad-request", str(exc))
        return {"generation": corpus.generation, "series": timeseries_payload(series)}

    @app.post("/corpora/{name}/collocations")
    def collocations(name: str, req: CollocationRequest):
        corpus = state.corpus(name)
        window = req.window
        if isinstance(window, str) and window.startswith("char"):
            window = int(window[4:])
        try:
            series = collocation_timeseries(
                corpus,
                [m.to_keyword_set() for m in req.members],
                window,
                req.bucketing.to_bucketing(),
            )
        except (ValueError, KeyError) as exc:
            raise _error(422, "bad-request", str(exc))
        return {"generation": corpus.generation, "series": timeseries_payload(series)}

    @app.post("/corpora/{name}/period-table")
    def period_table(name: str, req: PeriodTableRequest):
        corpus = state.corpus(name)
        try:
            table = period_collocation_table(
                corpus,
                req.anchor.to_keyword_set(),
                [tuple(p) for p in req.periods],
                req.top_k,
                min_freq=req.min_freq,
                min_len=req.min_len,
                max_len=req.max_len,
            )
        except (ValueError, KeyError) as exc:
            raise _error(422, "bad-request", str(exc))
        return {"generation": corpus.generation, "table": collocation_table_payload(table)}

    @app.post("/corpora/{name}/rates")
    def rates(name: str, req: RateRequest):
        corpus = state.corpus(name)
        try:
            series = normalized_event_rate(
                corpus,
                req.subject.to_keyword_set(),
                req.events.to_keyword_set(),
                req.bucketing.to_bucketing(),
                gap=req.gap,
                doc_ids=req.doc_ids,
            )
        except (ValueError, KeyError) as exc:
            raise _error(422, "bad-request", str(exc))
        return {"generation": corpus.generation, "series": rateseries_payload(series)}

    @app.post("/corpora/{name}/presence")
    def presence(name: str, req: PresenceRequest):
        corpus = state.corpus(name)
        try:
            matrix = presence_matrix(
                corpus, req.doc_id, [e.to_keyword_set() for e in req.entities]
            )
        except (ValueError, KeyError) as exc:
            raise _error(422, "bad-request", str(exc))
        return {"generation": corpus.generation, "matrix": presence_matrix_payload(matrix)}

    @app.post("/corpora/{name}/pseudowords")
    def pseudowords(name: str, req: PseudowordRequest):
        corpus = state.corpus(name)
        try:
            words = extract_repeated_strings(
                corpus, min_len=req.min_len, max_len=req.max_len, min_freq=req.min_freq
            )
        except ValueError as exc:
            raise _error(422, "bad-request", str(exc))
        if req.prune:
            words = prune_subsumed(words)
        return {
            "generation": corpus.generation,
            "total": len(words),
            "items": pseudowords_payload(words[: req.limit]),
        }

    # -- sessions -------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(req: SessionCreateRequest):
        corpus = state.corpus(req.corpus)
        with state._store_lock:
            session_id = req.session_id or f"s-{uuid.uuid4().hex[:12]}"
            if session_id in state.sessions:
                raise _error(409, "session-exists", f"session {session_id!r} already exists")
            session = Session(session_id, corpus.generation)
            state.sessions[session_id] = session
            state.session_corpus[session_id] = req.corpus
            state.persist_session(session_id)
        return _session_payload(state, session)

    @app.get("/sessions")
    def list_sessions(page: int = Query(1, ge=1), page_size: int = Query(50, ge=1, le=500)):
        items = [
            {
                "session_id": sid,
                "corpus": state.session_corpus.get(sid, ""),
                "generation": state.sessions[sid].generation,
                "marks": len(state.sessions[sid].marks),
            }
            for sid in sorted(state.sessions)
        ]
        return _paginate(items, page, page_size)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        with state.session_lock(session_id):
            return _session_payload(state, state.session(session_id))

    def _live_corpus_for(session_id: str) -> Corpus:
        session = state.session(session_id)
        corpus_name = state.session_corpus.get(session_id, "")
        if corpus_name not in state.corpora:
            raise _error(409, "stale-generation", "session corpus is no longer loaded")
        corpus = state.corpora[corpus_name]
        if corpus.generation != session.generation:
            raise _error(409, "stale-generation", "session is bound to an older corpus generation")
        return corpus

    @app.post("/sessions/{session_id}/keywords")
    def add_keywords(session_id: str, req: KeywordAddRequest):
        with state.session_lock(session_id):
            session = state.session(session_id)
            _live_corpus_for(session_id)
            try:
                added = session.add_keywords(req.list_name, req.surfaces, req.provenance)
            except ValueError as exc:
                raise _error(422, "bad-request", str(exc))
            state.persist_session(session_id)
            return {
                "generation": session.generation,
                "added": added,
                "session": session.to_dict(),
            }

    @app.post("/sessions/{session_id}/search")
    def session_search(session_id: str, req: SessionSearchRequest):
        with state.session_lock(session_id):
            session = state.session(session_id)
            corpus = _live_corpus_for(session_id)
            kw = KeywordSetModel(surfaces=req.surfaces).to_keyword_set()
            hits = kwic_search(corpus, kw, context_width=req.context_width)
            session.record_search(req.surfaces, len(hits))
            state.persist_session(session_id)
            out = _paginate([_hit_payload(h) for h in hits], req.page, req.page_size)
            out["generation"] = corpus.generation
            return out

    @app.post("/sessions/{session_id}/marks", status_code=201)
    def add_mark(session_id: str, req: MarkRequest):
        with state.session_lock(session_id):
            session = state.session(session_id)
            corpus = _live_corpus_for(session_id)
            hit = KwicHit(req.doc_id, req.start, req.end, req.surface, "", "", -1)
            try:
                mark = session.add_mark(
                    corpus, hit, req.label, note=req.note, answer_surface=req.answer_surface
                )
            except StaleGenerationError as exc:
                raise _error(409, "stale-generation", str(exc))
            except (ValueError, KeyError) as exc:
                raise _error(422, "bad-mark", str(exc))
            state.persist_session(session_id)
            return {
                "generation": corpus.generation,
                "marks": len(session.marks),
                "mark_index": len(session.marks) - 1,
            }

    @app.get("/sessions/{session_id}/suggestions")
    def suggestions(session_id: str, top_k: int = Query(20, ge=1, le=200)):
        with state.session_lock(session_id):
            session = state.session(session_id)
            corpus = _live_corpus_for(session_id)
            result = suggest_keywords(session, corpus, top_k=top_k)
            return {
                "generation": corpus.generation,
                "status": result.status,
                "items": [
                    {
                        "surface": s.surface,
                        "score": s.score,
                        "neighborhood_freq": s.neighborhood_freq,
                    }
                    for s in result.items
                ],
            }

    @app.post("/sessions/{session_id}/report")
    def report(session_id: str, req: ReportRequest):
        with state.session_lock(session_id):
            session = state.session(session_id)
            gold = set(req.gold) if req.gold else None
            rep = session_report(session, gold)
            return {
                "generation": session.generation,
                "answers": list(rep.answers),
                "precision": rep.precision,
                "recall": rep.recall,
                "gold_size": rep.gold_size,
            }

    @app.get("/sessions/{session_id}/health")
    def health_panel(session_id: str):
        with state.session_lock(session_id):
            session = state.session(session_id)
            corpus = _live_corpus_for(session_id)
            health = session_health(session, corpus)
            return {
                "generation": corpus.generation,
                "keywords_without_hits": list(health.keywords_without_hits),
                "keyword_hits": {
                    surface: corpus.count(surface)
                    for surface in sorted(session.all_surfaces())
                },
                "unmarked_chapters": {
                    doc: list(chapters) for doc, chapters in health.unmarked_chapters.items()
                },
            }

    # -- transliteration -------------------------------------------------------

    @app.post("/translit/runs", status_code=201)
    def translit_run(req: TranslitRunRequest):
        corpus = state.corpus(req.corpus)
        contrast = state.corpora.get(req.contrast) if req.contrast else None
        if req.contrast and contrast is None:
            raise _error(404, "unknown-corpus", f"no corpus named {req.contrast!r}")
        gold = None
        if req.gold is not None:
            if req.gold not in state.gold_spans:
                raise _error(404, "unknown-gold", f"no gold-span set named {req.gold!r}")
            gold = state.gold_spans[req.gold]
        try:
            config = PipelineConfig(**req.config) if req.config else PipelineConfig()
        except TypeError as exc:
            raise _error(422, "bad-config", str(exc))
        result = run_pipeline(corpus, contrast, gold, config)
        run_id = f"t-{uuid.uuid4().hex[:12]}"
        state.translit_runs[run_id] = (req.corpus, result)
        return {
            "run_id": run_id,
            "generation": corpus.generation,
            "stages": dict(result.stage_counts),
            "report": eval_report_payload(result.report) if result.report else None,
        }

    @app.get("/translit/runs/{run_id}/ranked")
    def translit_ranked(
        run_id: str, page: int = Query(1, ge=1), page_size: int = Query(50, ge=1, le=500)
    ):
        if run_id not in state.translit_runs:
            raise _error(404, "unknown-run", f"no transliteration run {run_id!r}")
        corpus_name, result = state.translit_runs[run_id]
        items = [
            {
                "rank": i + 1,
                "surface": c.surface,
                "total_freq": c.total_freq,
                "score": c.rank_score,
            }
            for i, c in enumerate(result.ranked)
        ]
        out = _paginate(items, page, page_size)
        out["generation"] = state.corpus(corpus_name).generation
        return out

    # -- disambiguation ----------------------------------------------------------

    @app.post("/disambig/runs", status_code=201)
    def disambig_run(req: DisambigRunRequest):
        if req.records not in state.records:
            raise _error(404, "unknown-records", f"no record set named {req.records!r}")
        gazetteer = None
        if req.gazetteer is not None:
            if req.gazetteer not in state.gazetteers:
                raise _error(404, "unknown-gazetteer", f"no gazetteer named {req.gazetteer!r}")
            gazetteer = state.gazetteers[req.gazetteer]
        try:
            config = DisambigConfig(**req.config) if req.config else DisambigConfig()
        except (TypeError, ValueError) as exc:
            raise _error(422, "bad-config", str(exc))
        records = state.records[req.records]
        report = run_disambiguation(records, config, gazetteer)
        run_id = f"d-{uuid.uuid4().hex[:12]}"
        state.disambig_runs[run_id] = (report, {r.record_id: r for r in records})
        return {
            "run_id": run_id,
            "pairs": len(report.pairs),
            "verdicts": dict(report.verdict_histogram),
            "nonzero_total_pairs": report.nonzero_total_pairs,
            "nonzero_factoid_pairs": report.nonzero_factoid_pairs,
            "review_queue_size": len(report.review_queue),
        }

    def _disambig_run(run_id: str) -> tuple[DisambigReport, dict[str, NameRecord]]:
        if run_id not in state.disambig_runs:
            raise _error(404, "unknown-run", f"no disambiguation run {run_id!r}")
        return state.disambig_runs[run_id]

    @app.get("/disambig/runs/{run_id}/review-queue")
    def review_queue(
        run_id: str, page: int = Query(1, ge=1), page_size: int = Query(20, ge=1, le=200)
    ):
        report, records_by_id = _disambig_run(run_id)
        judged = state.load_run_judgments(run_id)
        by_id = {p.pair_id: p for p in report.pairs}
        items = []
        for pid in report.review_queue:
            if pid in judged:
                continue
            pair = by_id[pid]
            payload = pair_payload(pair)
            payload["records"] = [
                _record_payload(records_by_id[pair.a_id]),
                _record_payload(records_by_id[pair.b_id]),
            ]
            items.append(payload)
        out = _paginate(items, page, page_size)
        out["judged"] = len(judged)
        return out

    @app.post("/disambig/runs/{run_id}/judgments", status_code=201)
    def submit_judgment(run_id: str, req: JudgmentRequest):
        report, _records = _disambig_run(run_id)
        pair_ids = {p.pair_id for p in report.pairs}
        if req.pair_id not in pair_ids:
            raise _error(422, "unknown-pair", f"pair {req.pair_id!r} is not part of this run")
        try:
            judgment = Judgment(req.pair_id, req.verdict, req.note)
        except ValueError as exc:
            raise _error(422, "bad-judgment", str(exc))
        with state._judgment_locks[run_id]:
            judged = state.load_run_judgments(run_id)
            judged[judgment.pair_id] = judgment
            dump_judgments(judged.values(), state.judgment_file(run_id))
        return {"judged": len(judged)}

    @app.get("/disambig/runs/{run_id}/judgments")
    def export_judgments(run_id: str):
        _disambig_run(run_id)
        judged = state.load_run_judgments(run_id)
        return {
            "items": [
                {"pair_id": j.pair_id, "verdict": j.verdict, "note": j.note}
                for j in sorted(judged.values(), key=lambda j: j.pair_id)
            ],
            "total": len(judged),
        }

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
