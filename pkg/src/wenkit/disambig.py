"""Same-name record disambiguation: blocking, factoid comparison, verdicts.

Two records sharing a name string are compared factoid by factoid (service
period, birth and service places, office posting, entry into office,
alternate names, and optionally the source book's publication place). The
weighted mean over factoids present on both sides gives a similarity total
in [0, 1]; a large temporal gap vetoes the pair outright. Marginal totals
land in a human-review band rather than being forced to a decision.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .gazetteer import Gazetteer, PlaceRelation

FACTOIDS = (
    "service_period",
    "birth_place",
    "service_location",
    "office_posting",
    "entry_into_office",
    "alternate_names",
    "source_pub_place",
)

DEFAULT_WEIGHTS = {
    "alternate_names": 3.0,
    "birth_place": 2.0,
    "service_period": 2.0,
    "service_location": 2.0,
    "office_posting": 1.0,
    "entry_into_office": 1.0,
    "source_pub_place": 0.0,  # weak prior, off by default
}


@dataclass(frozen=True)
class SourceRef:
    book_id: str = ""
    pub_place: str = ""
    book_year: Optional[int] = None


@dataclass(frozen=True)
class NameRecord:
    record_id: str
    name: str
    birth_place: Optional[str] = None
    entry_into_office: Optional[str] = None
    office_posting: Optional[str] = None
    alternate_names: frozenset[str] = frozenset()
    service_location: Optional[str] = None
    service_period: Optional[tuple[int, int]] = None
    source: SourceRef = field(default_factory=SourceRef)

    def __post_init__(self):
        if not self.name:
            raise ValueError("record name must be non-empty")
        if self.service_period is not None and self.service_period[0] > self.service_period[1]:
            raise ValueError(f"service period start after end in {self.record_id}")


@dataclass(frozen=True)
class DisambigConfig:
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    t_same: float = 0.8
    t_diff: float = 0.3
    temporal_decay_years: float = 30.0
    temporal_veto_years: float = 120.0
    near_threshold_km: float = 30.0
    containment_level_decay: float = 0.75
    same_book_auto_different: bool = False

    def __post_init__(self):
        if not 0 <= self.t_diff < self.t_same <= 1:
            raise ValueError("thresholds must satisfy 0 <= t_diff < t_same <= 1")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be non-negative")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("at least one weight must be positive")
        unknown = set(self.weights) - set(FACTOIDS)
        if unknown:
            raise ValueError(f"unknown factoids in weights: {sorted(unknown)}")

    @classmethod
    def load(cls, path: Path | str) -> "DisambigConfig":
        data = json.loads(Path(path).read_text("utf-8"))
        weights = dict(DEFAULT_WEIGHTS)
        weights.update(data.get("weights", {}))
        return cls(
            weights=weights,
            t_same=data.get("t_same", 0.8),
            t_diff=data.get("t_diff", 0.3),
            temporal_decay_years=data.get("temporal_decay_years", 30.0),
            temporal_veto_years=data.get("temporal_veto_years", 120.0),
            near_threshold_km=data.get("near_threshold_km", 30.0),
            containment_level_decay=data.get("containment_level_decay", 0.75),
            same_book_auto_different=data.get("same_book_auto_different", False),
        )


@dataclass(frozen=True)
class FactoidScore:
    factoid: str
    score: Optional[float]  # None when missing on either side
    evidence: str = ""


@dataclass(frozen=True)
class PairScore:
    a_id: str
    b_id: str
    name: str
    factoids: tuple[FactoidScore, ...]
    total: Optional[float]  # None when no shared factoid beyond the name
    veto: Optional[str]
    verdict: str  # Same | Different | Review | NonComparable

    @property
    def pair_id(self) -> str:
        return f"{self.a_id}|{self.b_id}"


def block_pairs(records: Sequence[NameRecord]) -> list[tuple[NameRecord, NameRecord]]:
    """Unordered pairs of records sharing an identical name string."""
    by_name: dict[str, list[NameRecord]] = {}
    for record in records:
        by_name.setdefault(record.name, []).append(record)
    pairs = []
    for name in sorted(by_name):
        group = sorted(by_name[name], key=lambda r: r.record_id)
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                pairs.append((group[i], group[j]))
    return pairs


def _period_gap(a: tuple[int, int], b: tuple[int, int]) -> float:
    """Zero on overlap, else the distance between the closed intervals."""
    if a[1] >= b[0] and b[1] >= a[0]:
        return 0.0
    return float(b[0] - a[1]) if a[1] < b[0] else float(a[0] - b[1])


def _relation_score(relation: PlaceRelation, config: DisambigConfig) -> float:
    if relation.kind == "identical":
        return 1.0
    if relation.kind in ("contains", "contained_by"):
        return config.containment_level_decay ** relation.levels
    if relation.kind in ("sibling", "near"):
        return 0.5
    return 0.0


def _place_score(
    name_a: str,
    name_b: str,
    gazetteer: Optional[Gazetteer],
    config: DisambigConfig,
) -> tuple[float, str]:
    """Best score over candidate place pairings (optimistic matching)."""
    if name_a == name_b:
        return 1.0, "identical name"
    if gazetteer is None:
        return 0.0, "no gazetteer"
    candidates_a = gazetteer.resolve_name(name_a)
    candidates_b = gazetteer.resolve_name(name_b)
    if not candidates_a or not candidates_b:
        return 0.0, "unresolved name"
    best = 0.0
    best_evidence = "unrelated"
    for pa in candidates_a:
        for pb in candidates_b:
            relation = gazetteer.classify_relation(pa, pb, config.near_threshold_km)
            score = _relation_score(relation, config)
            if score > best:
                best = score
                if relation.kind in ("contains", "contained_by"):
                    best_evidence = f"containment depth {relation.levels}"
                elif relation.kind == "near":
                    best_evidence = f"within {relation.distance_km:.1f} km"
                else:
                    best_evidence = relation.kind
    return best, best_evidence


def compare_pair(
    a: NameRecord,
    b: NameRecord,
    config: Optional[DisambigConfig] = None,
    gazetteer: Optional[Gazetteer] = None,
) -> PairScore:
    """Score every shared factoid and derive the verdict.

    Symmetric in its arguments. A factoid missing on either side stays out
    of the weighted total entirely; a temporal gap beyond the veto span
    forces the verdict to Different no matter what the other factoids say.
    """
    if config is None:
        config = DisambigConfig()
    if a.name != b.name:
        raise ValueError(f"cannot compare records with different names: {a.name!r} vs {b.name!r}")

    scores: list[FactoidScore] = []
    veto: Optional[str] = None

    if a.service_period is not None and b.service_period is not None:
        gap = _period_gap(a.service_period, b.service_period)
        value = max(0.0, 1.0 - gap / config.temporal_decay_years)
        evidence = "periods overlap" if gap == 0 else f"gap of {gap:.0f} years"
        scores.append(FactoidScore("service_period", value, evidence))
        if gap > config.temporal_veto_years:
            veto = f"temporal gap {gap:.0f} years exceeds {config.temporal_veto_years:.0f}"
    else:
        scores.append(FactoidScore("service_period", None, "missing"))

    for factoid, val_a, val_b in (
        ("birth_place", a.birth_place, b.birth_place),
        ("service_location", a.service_location, b.service_location),
    ):
        if val_a and val_b:
            value, evidence = _place_score(val_a, val_b, gazetteer, config)
            scores.append(FactoidScore(factoid, value, evidence))
        else:
            scores.append(FactoidScore(factoid, None, "missing"))

    for factoid, val_a, val_b in (
        ("office_posting", a.office_posting, b.office_posting),
        ("entry_into_office", a.entry_into_office, b.entry_into_office),
    ):
        if val_a and val_b:
            match = val_a == val_b
            scores.append(FactoidScore(factoid, 1.0 if match else 0.0, "exact match" if match else "mismatch"))
        else:
            scores.append(FactoidScore(factoid, None, "missing"))

    if a.alternate_names and b.alternate_names:
        shared = a.alternate_names & b.alternate_names
        scores.append(
            FactoidScore(
                "alternate_names",
                1.0 if shared else 0.0,
                f"shared: {'/'.join(sorted(shared))}" if shared else "disjoint",
            )
        )
    else:
        scores.append(FactoidScore("alternate_names", None, "missing"))

    if a.source.pub_place and b.source.pub_place:
        value, evidence = _place_score(a.source.pub_place, b.source.pub_place, gazetteer, config)
        scores.append(FactoidScore("source_pub_place", value, evidence))
    else:
        scores.append(FactoidScore("source_pub_place", None, "missing"))

    weight_sum = 0.0
    weighted = 0.0
    for fs in scores:
        w = config.weights.get(fs.factoid, 0.0)
        if fs.score is not None and w > 0:
            weight_sum += w
            weighted += w * fs.score
    total = weighted / weight_sum if weight_sum > 0 else None

    if config.same_book_auto_different and a.source.book_id and a.source.book_id == b.source.book_id:
        veto = veto or f"same source book {a.source.book_id}"

    a_id, b_id = sorted((a.record_id, b.record_id))
    pair = PairScore(a_id, b_id, a.name, tuple(scores), total, veto, "")
    return replace(pair, verdict=verdict(pair, config))


def verdict(pair: PairScore, config: Optional[DisambigConfig] = None) -> str:
    """Partition a scored pair: veto, non-comparable, same, different, review."""
    if config is None:
        config = DisambigConfig()
    if pair.veto is not None:
        return "Different"
    if pair.total is None:
        return "NonComparable"
    if pair.total >= config.t_same:
        return "Same"
    if pair.total <= config.t_diff:
        return "Different"
    return "Review"


@dataclass(frozen=True)
class DisambigReport:
    pairs: tuple[PairScore, ...]
    verdict_histogram: Mapping[str, int]
    nonzero_total_pairs: int      # total strictly above zero
    nonzero_factoid_pairs: int    # at least one present factoid above zero
    review_queue: tuple[str, ...]  # pair ids, most ambiguous first


def run_disambiguation(
    records: Sequence[NameRecord],
    config: Optional[DisambigConfig] = None,
    gazetteer: Optional[Gazetteer] = None,
) -> DisambigReport:
    """Block, score, and classify every same-name pair.

    The review queue orders Review pairs by distance from the middle of the
    review band, most ambiguous first, with pair ids breaking ties so runs
    are deterministic.
    """
    if config is None:
        config = DisambigConfig()
    pairs = [compare_pair(a, b, config, gazetteer) for a, b in block_pairs(records)]
    histogram: dict[str, int] = {"Same": 0, "Different": 0, "Review": 0, "NonComparable": 0}
    for pair in pairs:
        histogram[pair.verdict] += 1
    nonzero_total = sum(1 for p in pairs if p.total is not None and p.total > 0)
    nonzero_factoid = sum(
        1 for p in pairs if any(fs.score is not None and fs.score > 0 for fs in p.factoids)
    )
    midpoint = (config.t_same + config.t_diff) / 2
    review = sorted(
        (p for p in pairs if p.verdict == "Review"),
        key=lambda p: (abs((p.total or 0.0) - midpoint), p.pair_id),
    )
    return DisambigReport(
        pairs=tuple(pairs),
        verdict_histogram=histogram,
        nonzero_total_pairs=nonzero_total,
        nonzero_factoid_pairs=nonzero_factoid,
        review_queue=tuple(p.pair_id for p in review),
    )


# -- record and judgment files ------------------------------------------------

_RECORD_COLUMNS = (
    "record_id", "name", "birth_place", "entry_into_office", "office_posting",
    "alternate_names", "service_location", "service_start", "service_end",
    "book_id", "book_pub_place", "book_year",
)


def _record_from_fields(row: Mapping[str, str]) -> NameRecord:
    period = None
    if str(row.get("service_start", "")).strip() and str(row.get("service_end", "")).strip():
        period = (int(row["service_start"]), int(row["service_end"]))
    alt = frozenset(v for v in str(row.get("alternate_names", "")).split("|") if v)
    year = str(row.get("book_year", "")).strip()
    return NameRecord(
        record_id=row["record_id"],
        name=row["name"],
        birth_place=row.get("birth_place") or None,
        entry_into_office=row.get("entry_into_office") or None,
        office_posting=row.get("office_posting") or None,
        alternate_names=alt,
        service_location=row.get("service_location") or None,
        service_period=period,
        source=SourceRef(
            book_id=row.get("book_id", "") or "",
            pub_place=row.get("book_pub_place", "") or "",
            book_year=int(year) if year else None,
        ),
    )


def load_records(path: Path | str) -> list[NameRecord]:
    """Load records from a TSV table or a JSONL file (one record per line)."""
    path = Path(path)
    text = path.read_text("utf-8")
    if path.suffix == ".jsonl":
        records = []
        for i, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(_record_from_fields(json.loads(line)))
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise ValueError(f"{path}:{i}: bad record: {exc}") from None
        return records
    reader = csv.DictReader(text.splitlines(), delimiter="\t")
    if reader.fieldnames is None or "record_id" not in reader.fieldnames:
        raise ValueError(f"{path}: missing record_id column")
    return [_record_from_fields(row) for row in reader]


def dump_records(records: Sequence[NameRecord], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(_RECORD_COLUMNS)
        for r in records:
            writer.writerow([
                r.record_id, r.name, r.birth_place or "", r.entry_into_office or "",
                r.office_posting or "", "|".join(sorted(r.alternate_names)),
                r.service_location or "",
                r.service_period[0] if r.service_period else "",
                r.service_period[1] if r.service_period else "",
                r.source.book_id, r.source.pub_place,
                r.source.book_year if r.source.book_year is not None else "",
            ])


@dataclass(frozen=True)
class Judgment:
    pair_id: str
    verdict: str  # same | different | unsure
    note: str = ""

    def __post_init__(self):
        if self.verdict not in ("same", "different", "unsure"):
            raise ValueError(f"unknown judgment verdict: {self.verdict}")


def load_judgments(path: Path | str) -> dict[str, Judgment]:
    """Judgment file: one JSON object per line; later lines win per pair."""
    out: dict[str, Judgment] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        j = Judgment(data["pair_id"], data["verdict"], data.get("note", ""))
        out[j.pair_id] = j
    return out


def dump_judgments(judgments: Iterable[Judgment], path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for j in sorted(judgments, key=lambda j: j.pair_id):
            fh.write(json.dumps(
                {"pair_id": j.pair_id, "verdict": j.verdict, "note": j.note},
                ensure_ascii=False,
            ) + "\n")
