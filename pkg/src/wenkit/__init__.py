"""wenkit: corpus analytics for historical and literary Chinese texts.

Core surface: corpus storage and counting, repeated-string extraction,
temporal and collocation analyses, concordance sessions, transliteration
candidate filtering and ranking, gazetteer relations, and same-name record
disambiguation, all exposed through a batch CLI and an HTTP JSON service.
"""

from .concordance import KwicHit, kwic_search
from .corpus import (
    Corpus,
    CorpusDoc,
    DocMeta,
    EncodingError,
    Match,
    PartialDate,
    Segment,
    ingest_document,
    make_doc,
)
from .disambig import (
    DisambigConfig,
    DisambigReport,
    Judgment,
    NameRecord,
    PairScore,
    SourceRef,
    block_pairs,
    compare_pair,
    run_disambiguation,
    verdict,
)
from .gazetteer import Gazetteer, Place, PlaceRelation, haversine_km
from .ngrams import PseudoWord, extract_repeated_strings, prune_subsumed
from .session import (
    MarkedStatement,
    Session,
    SessionReport,
    session_health,
    session_report,
    suggest_keywords,
)
from .temporal import (
    Bucketing,
    CollocationTable,
    KeywordSet,
    PresenceMatrix,
    RateSeries,
    TimeSeries,
    collocation_timeseries,
    keyword_timeseries,
    normalized_event_rate,
    period_collocation_table,
    power_proxy,
    presence_matrix,
)
from .translit import (
    Candidate,
    ContextModel,
    EvalReport,
    PhonoInventory,
    PipelineConfig,
    evaluate,
    filter_contrast,
    filter_phonotactic,
    generate_candidates,
    rank_candidates,
    run_pipeline,
    train_context_model,
)

__version__ = "0.1.0"
