"""Batch command line over the analytics core.

Exit codes: 0 success, 2 usage errors, 3 missing or unreadable inputs,
4 schema or validation failures, 5 refusal to overwrite an existing output
without --force. Failures emit one machine-readable JSON line on stderr.
Every job is deterministic: identical inputs and seed give byte-identical
outputs.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import fixtures as fx
from .corpus import EncodingError
from .corpusio import load_corpus, write_corpus
from .disambig import DisambigConfig, load_records, run_disambiguation
from .gazetteer import Gazetteer
from .ngrams import extract_repeated_strings, prune_subsumed
from .concordance import kwic_search
from .tabular import (
    disambig_report_payload,
    eval_report_payload,
    pair_payload,
    presence_matrix_payload,
    rateseries_payload,
    timeseries_payload,
    write_collocation_table,
    write_presence_matrix,
    write_pseudowords,
    write_ranked_candidates,
    write_rateseries,
    write_review_queue,
    write_timeseries,
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
from .translit import PipelineConfig, dump_gold_spans, load_gold_spans, run_pipeline
from .tabular import write_json

EXIT_MISSING_INPUT = 3
EXIT_SCHEMA = 4
EXIT_EXISTS = 5


class CliError(Exception):
    def __init__(self, code: int, error: str, message: str):
        super().__init__(message)
        self.code = code
        self.error = error
        self.message = message


def _emit_error(error: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": error, "message": message}, ensure_ascii=False) + "\n")


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CliError as exc:
            _emit_error(exc.error, exc.message)
            sys.exit(exc.code)
        except FileNotFoundError as exc:
            _emit_error("missing-input", str(exc))
            sys.exit(EXIT_MISSING_INPUT)
        except EncodingError as exc:
            _emit_error("bad-encoding", str(exc))
            sys.exit(EXIT_SCHEMA)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            _emit_error("invalid-input", str(exc))
            sys.exit(EXIT_SCHEMA)

    return wrapper


def _fresh(path: Path | str, force: bool) -> Path:
    path = Path(path)
    if path.exists() and not force:
        raise CliError(EXIT_EXISTS, "output-exists", f"{path} exists, pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _fresh_dir(path: Path | str, force: bool, names: list[str]) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    for name in names:
        if (out / name).exists() and not force:
            raise CliError(
                EXIT_EXISTS, "output-exists", f"{out / name} exists, pass --force to overwrite"
            )
    return out


def _tsv_cell(text: str) -> str:
    """Free-text cells must not break the row grid."""
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _parse_periods(text: str) -> list[tuple[int, int]]:
    periods = []
    for part in text.split(","):
        start, _, end = part.strip().partition("-")
        if not end:
            raise CliError(EXIT_SCHEMA, "bad-periods", f"period {part!r} is not START-END")
        periods.append((int(start), int(end)))
    return periods


def _parse_keyword(spec: str, default_label: str = "") -> KeywordSet:
    label, sep, rest = spec.partition("=")
    if not sep:
        return KeywordSet(default_label or spec, tuple(spec.split("|")))
    return KeywordSet(label, tuple(rest.split("|")))


def _bucketing(bucket: str, periods: str | None) -> Bucketing:
    if bucket == "periods":
        if not periods:
            raise CliError(EXIT_SCHEMA, "bad-periods", "period bucketing needs --periods")
        return Bucketing.of_periods(_parse_periods(periods))
    return Bucketing(bucket)


@click.group()
@click.version_option()
def main():
    """Corpus analytics for historical and literary Chinese texts."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def ingest(input_path: Path, out_path: Path, force: bool):
    """Normalize a corpus into the line-delimited store format."""
    out = _fresh(out_path, force)
    corpus = load_corpus(input_path)
    write_corpus(corpus, out)
    click.echo(
        json.dumps(
            {
                "documents": len(corpus),
                "characters": corpus.char_total,
                "cjk_characters": corpus.cjk_total,
                "generation": corpus.generation,
            },
            ensure_ascii=False,
        )
    )


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--surface", "-s", "surfaces", multiple=True, required=True)
@click.option("--label", default="")
@click.option("--bucket", type=click.Choice(["year", "month", "chapter", "periods"]), default="year")
@click.option("--periods", default=None)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--json", "json_path", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def freq(corpus_path, surfaces, label, bucket, periods, out_path, json_path, force):
    """Bucketed keyword frequency series."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    kw = KeywordSet(label or surfaces[0], tuple(surfaces))
    series = keyword_timeseries(corpus, kw, _bucketing(bucket, periods))
    write_timeseries(series, out)
    if json_path:
        write_json(_fresh(json_path, force), timeseries_payload(series))


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--member", "members", multiple=True, required=True, help="label=surf|surf")
@click.option("--window", default="sentence", help="sentence or charN")
@click.option("--bucket", type=click.Choice(["year", "month", "chapter", "periods"]), default="year")
@click.option("--periods", default=None)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--json", "json_path", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def colloc(corpus_path, members, window, bucket, periods, out_path, json_path, force):
    """Windows where every member keyword set co-occurs, bucketed by date."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    member_sets = [_parse_keyword(m, f"m{i}") for i, m in enumerate(members)]
    win = int(window[4:]) if window.startswith("char") else window
    series = collocation_timeseries(corpus, member_sets, win, _bucketing(bucket, periods))
    write_timeseries(series, out)
    if json_path:
        write_json(_fresh(json_path, force), timeseries_payload(series))


@main.command("period-table")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--anchor", required=True, help="label=surf|surf")
@click.option("--periods", required=True)
@click.option("--top-k", default=20, type=int)
@click.option("--min-freq", default=2, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def period_table(corpus_path, anchor, periods, top_k, min_freq, out_path, force):
    """Per-period collocation frequency table for one anchor keyword."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    table = period_collocation_table(
        corpus, _parse_keyword(anchor), _parse_periods(periods), top_k, min_freq=min_freq
    )
    write_collocation_table(table, out)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--min-len", default=2, type=int)
@click.option("--max-len", default=8, type=int)
@click.option("--min-freq", default=2, type=int)
@click.option("--prune/--no-prune", default=True)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def pseudowords(corpus_path, min_len, max_len, min_freq, prune, out_path, force):
    """Frequent repeated strings, sorted by frequency then surface."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    words = extract_repeated_strings(corpus, min_len=min_len, max_len=max_len, min_freq=min_freq)
    if prune:
        words = prune_subsumed(words)
    write_pseudowords(words, out)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--surface", "-s", "surfaces", multiple=True, required=True)
@click.option("--width", default=30, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def kwic(corpus_path, surfaces, width, out_path, force):
    """Keyword-in-context hits with clamped contexts."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    hits = kwic_search(corpus, KeywordSet(surfaces[0], tuple(surfaces)), context_width=width)
    lines = ["doc_id\tstart\tend\tleft\tmatch\tright"]
    lines += [
        f"{h.doc_id}\t{h.start}\t{h.end}\t{_tsv_cell(h.left)}\t{_tsv_cell(h.surface)}\t{_tsv_cell(h.right)}"
        for h in hits
    ]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--subject", required=True, help="label=surf|surf")
@click.option("--event", "events", multiple=True, required=True)
@click.option("--gap", default=0, type=int)
@click.option("--bucket", type=click.Choice(["year", "month", "chapter"]), default="chapter")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--json", "json_path", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def rate(corpus_path, subject, events, gap, bucket, out_path, json_path, force):
    """Appearance-normalized event rate per bucket (undefined, not zero)."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    series = normalized_event_rate(
        corpus,
        _parse_keyword(subject),
        KeywordSet(events[0], tuple(events)),
        Bucketing(bucket),
        gap=gap,
    )
    write_rateseries(series, out)
    if json_path:
        write_json(_fresh(json_path, force), rateseries_payload(series))


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--doc", "doc_id", required=True)
@click.option("--entity", "entities", multiple=True, required=True, help="label=surf|surf")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--json", "json_path", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def presence(corpus_path, doc_id, entities, out_path, json_path, force):
    """Entity-by-chapter occurrence matrix with d001-style columns."""
    out = _fresh(out_path, force)
    corpus = load_corpus(corpus_path)
    matrix = presence_matrix(corpus, doc_id, [_parse_keyword(e) for e in entities])
    write_presence_matrix(matrix, out)
    if json_path:
        write_json(_fresh(json_path, force), presence_matrix_payload(matrix))


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--contrast", "contrast_path", type=click.Path(path_type=Path), default=None)
@click.option("--gold", "gold_path", type=click.Path(path_type=Path), default=None)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def translit(corpus_path, contrast_path, gold_path, config_path, out_dir, force):
    """Candidate generation, filtering, ranking, and evaluation."""
    out = _fresh_dir(out_dir, force, ["ranked.tsv", "report.json"])
    corpus = load_corpus(corpus_path)
    contrast = load_corpus(contrast_path) if contrast_path else None
    gold = load_gold_spans(gold_path) if gold_path else None
    config = PipelineConfig.load(config_path) if config_path else PipelineConfig()
    result = run_pipeline(corpus, contrast, gold, config)
    write_ranked_candidates(result.ranked, out / "ranked.tsv")
    write_json(
        out / "report.json",
        {
            "stages": dict(result.stage_counts),
            "survivors": len(result.survivors),
            "evaluation": eval_report_payload(result.report) if result.report else None,
        },
    )


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(path_type=Path))
@click.option("--gazetteer", "gazetteer_path", type=click.Path(path_type=Path), default=None)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def disambig(records_path, gazetteer_path, config_path, out_dir, force):
    """Same-name pair scoring with verdicts and a review queue."""
    out = _fresh_dir(out_dir, force, ["report.json", "review_queue.tsv", "pairs.jsonl"])
    records = load_records(records_path)
    gazetteer = Gazetteer.load(gazetteer_path) if gazetteer_path else None
    config = DisambigConfig.load(config_path) if config_path else DisambigConfig()
    report = run_disambiguation(records, config, gazetteer)
    write_json(out / "report.json", disambig_report_payload(report))
    write_review_queue(report, out / "review_queue.tsv")
    with open(out / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for pair in report.pairs:
            fh.write(json.dumps(pair_payload(pair), ensure_ascii=False, sort_keys=True) + "\n")


@main.command("chart-data")
@click.option("--preset", type=click.Choice(["drc-smiles", "jttw-monsters", "jttw-masters"]), required=True)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--doc", "doc_id", default=None)
@click.option("--entity", "entities", multiple=True, help="override the preset entity list")
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--force", is_flag=True)
@guarded
def chart_data(preset, corpus_path, doc_id, entities, out_dir, force):
    """Chart-ready per-chapter data files for the bundled analyses."""
    corpus = load_corpus(corpus_path)
    if doc_id is None:
        ids = corpus.doc_ids()
        if len(ids) != 1:
            raise CliError(EXIT_SCHEMA, "ambiguous-doc", "pass --doc for multi-document corpora")
        doc_id = ids[0]

    if preset == "drc-smiles":
        out = _fresh_dir(out_dir, force, ["drc_smiles.tsv", "drc_smiles.json"])
        subjects = [_parse_keyword(e) for e in entities] or [
            KeywordSet.of("寶玉"), KeywordSet.of("黛玉"), KeywordSet.of("寶釵")
        ]
        event = KeywordSet.of("笑道")
        series = {
            s.label: normalized_event_rate(corpus, s, event, Bucketing.chapter(), doc_ids=[doc_id])
            for s in subjects
        }
        chapters = len(corpus.doc(doc_id).chapters)
        header = ["chapter"]
        for label in series:
            header += [f"{label}_raw", f"{label}_rate"]
        lines = ["\t".join(header)]
        for i in range(1, chapters + 1):
            row = [f"d{i:03d}"]
            for label, s in series.items():
                rate_value = s.rate(i)
                row.append(str(s.numerators.get(i, 0)))
                row.append("" if rate_value is None else repr(rate_value))
            lines.append("\t".join(row))
        (out / "drc_smiles.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        write_json(
            out / "drc_smiles.json",
            {label: rateseries_payload(s) for label, s in series.items()},
        )
        return

    names = {
        "jttw-monsters": [KeywordSet.of(n) for n in fx._JTTW_MONSTERS],
        "jttw-masters": [KeywordSet.of(n) for n in fx._JTTW_MASTERS],
    }[preset]
    if entities:
        names = [_parse_keyword(e) for e in entities]
    stem = preset.replace("-", "_")
    out = _fresh_dir(out_dir, force, [f"{stem}.tsv", f"{stem}.json"])
    matrix = presence_matrix(corpus, doc_id, names)
    write_presence_matrix(matrix, out / f"{stem}.tsv")
    write_json(out / f"{stem}.json", presence_matrix_payload(matrix))


@main.command()
@click.option(
    "--kind",
    type=click.Choice(["jttw", "drc", "hgtz", "difangzhi", "gazetteer", "dated"]),
    required=True,
)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=None, type=int)
@click.option("--chapters", default=None, type=int)
@click.option("--force", is_flag=True)
@guarded
def fixtures(kind, out_dir, seed, chapters, force):
    """Materialize deterministic synthetic fixtures as loadable files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "jttw":
        args = {} if seed is None else {"seed": seed}
        if chapters:
            args["chapters"] = chapters
        fixture = fx.jttw_like(**args)
        write_corpus(fixture.corpus, _fresh(out / "jttw.jsonl", force))
    elif kind == "drc":
        args = {} if seed is None else {"seed": seed}
        if chapters:
            args["chapters"] = chapters
        fixture = fx.drc_like(**args)
        write_corpus(fixture.corpus, _fresh(out / "drc.jsonl", force))
    elif kind == "hgtz":
        fixture = fx.hgtz_like(**({} if seed is None else {"seed": seed}))
        write_corpus(fixture.corpus, _fresh(out / "hgtz.jsonl", force))
        write_corpus(fixture.contrast, _fresh(out / "hgtz_contrast.jsonl", force))
        dump_gold_spans(fixture.gold_spans, _fresh(out / "hgtz_gold.tsv", force))
    elif kind == "difangzhi":
        fixture = fx.difangzhi_fixture(**({} if seed is None else {"seed": seed}))
        from .disambig import dump_records

        dump_records(fixture.records, _fresh(out / "records.tsv", force))
        fixture.gazetteer.dump(_fresh(out / "gazetteer.tsv", force))
        write_json(_fresh(out / "truth.json", force), fixture.truth)
    elif kind == "gazetteer":
        fx.demo_gazetteer().dump(_fresh(out / "places.tsv", force))
    elif kind == "dated":
        corpus = fx.dated_demo_corpus(**({} if seed is None else {"seed": seed}))
        write_corpus(corpus, _fresh(out / "dated.jsonl", force))


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8600, type=int)
@click.option("--corpus", "corpora", multiple=True, help="name=path, repeatable")
@click.option("--data-dir", default="./wenkit-data", type=click.Path(path_type=Path))
@guarded
def serve(config_path, host, port, corpora, data_dir):
    """Run the HTTP JSON service (and the UI when configured)."""
    import uvicorn

    from .service import AppState, create_app

    config = {}
    if config_path:
        config = json.loads(Path(config_path).read_text("utf-8"))
    host = config.get("host", host)
    port = config.get("port", port)
    data_dir = Path(config.get("data_dir", data_dir))

    corpus_paths = dict(config.get("corpora", {}))
    for spec in corpora:
        name, _, path = spec.partition("=")
        if not path:
            raise CliError(EXIT_SCHEMA, "bad-corpus-spec", f"{spec!r} is not name=path")
        corpus_paths[name] = path

    loaded = {name: load_corpus(path) for name, path in corpus_paths.items()}
    records = {
        name: load_records(path) for name, path in config.get("records", {}).items()
    }
    gazetteers = {
        name: Gazetteer.load(path) for name, path in config.get("gazetteers", {}).items()
    }
    gold = {
        name: load_gold_spans(path) for name, path in config.get("gold_spans", {}).items()
    }
    ui_dir = config.get("ui_dir")
    state = AppState(loaded, data_dir, records, gazetteers, gold)
    app = create_app(state, Path(ui_dir) if ui_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
