"""Deterministic synthetic fixtures for tests, demos, and benchmarks.

Every generator takes a seed and produces byte-identical output for the
same arguments. The novel-scale generators build stand-in editions with
the same shape as the public-domain originals (chapter markers, entity
mention patterns, event phrasing); real editions can be dropped in through
the ordinary corpus formats whenever they are available, and each fixture
records its provenance as a synthetic edition in the document collection
field.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import Corpus, CorpusDoc, PartialDate, make_doc
from .disambig import NameRecord, SourceRef
from .gazetteer import Gazetteer, Place
from .temporal import KeywordSet
from .translit import GoldSpan

CHAPTER_PATTERN = r"第[一二三四五六七八九十百零]+回"

_CN_DIGITS = "零一二三四五六七八九"


def cn_num(n: int) -> str:
    """Chinese numerals for 1..199, enough for chapter headers."""
    if not 1 <= n <= 199:
        raise ValueError(f"unsupported numeral: {n}")
    if n >= 100:
        out = _CN_DIGITS[n // 100] + "百"
        rem = n % 100
        if rem == 0:
            return out
        if rem < 10:
            return out + "零" + _CN_DIGITS[rem]
        return out + _CN_DIGITS[rem // 10] + "十" + (_CN_DIGITS[rem % 10] if rem % 10 else "")
    if n >= 10:
        tens, ones = divmod(n, 10)
        out = (_CN_DIGITS[tens] if tens > 1 else "") + "十"
        return out + (_CN_DIGITS[ones] if ones else "")
    return _CN_DIGITS[n]


def _noise_alphabet(rng: random.Random, size: int, exclude: str = "") -> list[str]:
    """Sample distinct ideographs, avoiding every excluded character."""
    banned = set(exclude) | set(_CN_DIGITS) | {"第", "回", "百"}
    pool = [chr(cp) for cp in range(0x4E00, 0x4E00 + 4000) if chr(cp) not in banned]
    return rng.sample(pool, size)


def _noise_sentence(rng: random.Random, alphabet: Sequence[str], lo: int = 6, hi: int = 16) -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi))) + "。"


# -- generic randomized corpora ------------------------------------------------


def random_cjk_corpus(
    seed: int,
    n_docs: int,
    *,
    doc_len: tuple[int, int] = (80, 150),
    alphabet_size: int = 30,
    punctuated: bool = True,
    dated: bool = False,
    year_range: tuple[int, int] = (1830, 1930),
) -> Corpus:
    """Random ideograph documents over a small alphabet (matches are common)."""
    rng = random.Random(seed)
    alphabet = _noise_alphabet(rng, alphabet_size)
    docs = []
    for i in range(n_docs):
        length = rng.randint(*doc_len)
        chars = []
        for j in range(length):
            if punctuated and j and rng.random() < 0.08:
                chars.append(rng.choice("。！？；"))
            else:
                chars.append(rng.choice(alphabet))
        date = PartialDate(rng.randint(*year_range)) if dated else PartialDate()
        docs.append(make_doc(f"r{i:04d}", "".join(chars), collection="synthetic-random", date=date))
    return Corpus(docs)


# -- novel-scale fixtures --------------------------------------------------------


@dataclass(frozen=True)
class JttwFixture:
    corpus: Corpus
    doc_id: str
    monk: KeywordSet
    monsters: tuple[KeywordSet, ...]
    masters: tuple[KeywordSet, ...]
    master_ranks: dict[str, int]
    eaters: tuple[str, ...]  # monster labels given capture-and-eat statements


_JTTW_MONSTERS = ("白骨精", "黑熊精", "紅孩兒", "蜘蛛精", "黃袍怪", "金角大王", "牛魔王", "九頭蟲")
_JTTW_MASTERS = ("太上老君", "觀音菩薩", "靈吉菩薩", "鎮元大仙", "菩提祖師")
_JTTW_RANKS = {"太上老君": 9, "觀音菩薩": 8, "靈吉菩薩": 5, "鎮元大仙": 6, "菩提祖師": 7}
_EAT_TEMPLATES = ("把唐僧蒸了吃", "要捉唐僧來吃", "將唐僧煮了吃")


def jttw_like(
    seed: int = 11,
    *,
    chapters: int = 100,
    cjk_per_chapter: int = 7130,
) -> JttwFixture:
    """A hundred-chapter stand-in novel with planted entity appearances.

    Monsters and masters occupy deterministic chapter blocks, and every
    third monster carries capture-and-eat statements about the monk so the
    mark-and-suggest workflow has real material to find.
    """
    rng = random.Random(seed)
    planted = "唐僧三藏" + "".join(_JTTW_MONSTERS) + "".join(_JTTW_MASTERS) + "".join(_EAT_TEMPLATES)
    alphabet = _noise_alphabet(rng, 60, exclude=planted)

    monster_blocks = {}
    for i, name in enumerate(_JTTW_MONSTERS):
        start = rng.randint(1, max(1, chapters - 8))
        monster_blocks[name] = range(start, min(chapters, start + rng.randint(2, 6)) + 1)
    master_blocks = {}
    for name in _JTTW_MASTERS:
        anchor = rng.choice(list(monster_blocks[rng.choice(_JTTW_MONSTERS)]))
        start = max(1, anchor - rng.randint(0, 2))
        master_blocks[name] = range(start, min(chapters, start + rng.randint(1, 4)) + 1)

    eaters = tuple(name for i, name in enumerate(_JTTW_MONSTERS) if i % 3 == 0)

    parts = []
    for ch in range(1, chapters + 1):
        parts.append(f"第{cn_num(ch)}回\n")
        mentions = []
        for name, block in monster_blocks.items():
            if ch in block:
                mentions.extend([name] * rng.randint(2, 6))
                if name in eaters:
                    mentions.append(name + rng.choice(_EAT_TEMPLATES))
        for name, block in master_blocks.items():
            if ch in block:
                mentions.extend([name] * rng.randint(1, 4))
        mentions.extend(["唐僧"] * rng.randint(3, 8))
        if rng.random() < 0.3:
            mentions.append("三藏")
        rng.shuffle(mentions)

        cjk = sum(len(m) for m in mentions)
        sentences = []
        for mention in mentions:
            lead = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 6)))
            tail = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 6)))
            if mention.endswith(("吃",)):
                sentences.append(lead + mention + "。")
                cjk += len(lead)
            else:
                sentences.append(lead + mention + tail + "。")
                cjk += len(lead) + len(tail)
        while cjk < cjk_per_chapter:
            s = _noise_sentence(rng, alphabet)
            sentences.append(s)
            cjk += len(s) - 1
        rng.shuffle(sentences)
        parts.append("".join(sentences) + "\n")

    doc = make_doc(
        "jttw",
        "".join(parts),
        title="西遊記（合成本）",
        collection="synthetic-edition",
        chapter_pattern=CHAPTER_PATTERN,
    )
    return JttwFixture(
        corpus=Corpus([doc]),
        doc_id="jttw",
        monk=KeywordSet("唐僧", ("唐僧", "三藏")),
        monsters=tuple(KeywordSet(n, (n,)) for n in _JTTW_MONSTERS),
        masters=tuple(KeywordSet(n, (n,)) for n in _JTTW_MASTERS),
        master_ranks=dict(_JTTW_RANKS),
        eaters=eaters,
    )


@dataclass(frozen=True)
class DrcFixture:
    corpus: Corpus
    doc_id: str
    subjects: tuple[KeywordSet, ...]
    smile_words: KeywordSet


# Appearance volume and smile propensity diverge on purpose: the character
# who appears most is not the one who smiles most per appearance.
_DRC_PROFILE = {
    "寶玉": (15, 30, 0.35),
    "黛玉": (8, 18, 0.45),
    "寶釵": (4, 10, 0.70),
}


def drc_like(seed: int = 22, *, chapters: int = 120, cjk_per_chapter: int = 2400) -> DrcFixture:
    """A 120-chapter stand-in novel with name-followed-by-smile events."""
    rng = random.Random(seed)
    planted = "寶玉黛玉寶釵笑道"
    alphabet = _noise_alphabet(rng, 60, exclude=planted)

    parts = []
    for ch in range(1, chapters + 1):
        parts.append(f"第{cn_num(ch)}回\n")
        sentences = []
        cjk = 0
        for name, (lo, hi, smile_p) in _DRC_PROFILE.items():
            for _ in range(rng.randint(lo, hi)):
                lead = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 5)))
                tail = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 6)))
                if rng.random() < smile_p:
                    sentences.append(lead + name + "笑道" + tail + "。")
                else:
                    sentences.append(lead + name + tail + "。")
                cjk += len(sentences[-1]) - 1
        while cjk < cjk_per_chapter:
            s = _noise_sentence(rng, alphabet)
            sentences.append(s)
            cjk += len(s) - 1
        rng.shuffle(sentences)
        parts.append("".join(sentences) + "\n")

    doc = make_doc(
        "drc",
        "".join(parts),
        title="紅樓夢（合成本）",
        collection="synthetic-edition",
        chapter_pattern=CHAPTER_PATTERN,
    )
    return DrcFixture(
        corpus=Corpus([doc]),
        doc_id="drc",
        subjects=tuple(KeywordSet(n, (n,)) for n in _DRC_PROFILE),
        smile_words=KeywordSet("笑道", ("笑道",)),
    )


# -- transliteration fixture -----------------------------------------------------


@dataclass(frozen=True)
class HgtzFixture:
    corpus: Corpus
    contrast: Corpus
    gold_spans: tuple[GoldSpan, ...]
    planted: tuple[str, ...]
    markers: tuple[str, ...]


_TRANSLIT_CHARS = "爾斯亞里克拉西德模巴加答臘弗甸羅尼倫敦馬丹頓蘭葡萄俄挪奧匈魯墨哥費納撒彌薩諸塞耶穌"
_MARKERS = ("曰", "號", "名")


def hgtz_like(
    seed: int = 33,
    *,
    n_words: int = 50,
    n_docs: int = 24,
    context_regularity: float = 1.0,
) -> HgtzFixture:
    """A corpus with planted transliterations in regular textual contexts.

    Planted words are built from transliteration-typical characters and
    share no bigram with each other, occur three to six times each, and are
    preceded by a cycling marker character on a `context_regularity`
    fraction of occurrences. The contrast corpus shares the background
    vocabulary and common phrases but holds no planted word.
    """
    rng = random.Random(seed)
    translit_pool = list(_TRANSLIT_CHARS)
    alphabet = _noise_alphabet(rng, 120, exclude=_TRANSLIT_CHARS + "".join(_MARKERS))

    words: list[str] = []
    used_bigrams: set[str] = set()
    while len(words) < n_words:
        length = rng.randint(3, 5)
        word = "".join(rng.choice(translit_pool) for _ in range(length))
        bigrams = {word[i : i + 2] for i in range(length - 1)}
        if len(bigrams) < length - 1 or bigrams & used_bigrams:
            continue
        if any(word in w or w in word for w in words):
            continue
        used_bigrams |= bigrams
        words.append(word)

    common_phrases = []
    for _ in range(12):
        common_phrases.append("".join(rng.choice(alphabet) for _ in range(rng.randint(2, 4))))

    # Schedule each planted occurrence: (word, marked?) with cycling markers.
    occurrences: list[tuple[str, Optional[str]]] = []
    for word in words:
        freq = rng.randint(3, 6)
        marked = round(freq * context_regularity)
        for k in range(freq):
            marker = _MARKERS[k % len(_MARKERS)] if k < marked else None
            occurrences.append((word, marker))
    rng.shuffle(occurrences)

    per_doc: list[list[tuple[str, Optional[str]]]] = [[] for _ in range(n_docs)]
    for i, occ in enumerate(occurrences):
        per_doc[i % n_docs].append(occ)

    docs = []
    gold: list[GoldSpan] = []
    for d in range(n_docs):
        doc_id = f"hgtz{d:03d}"
        text_parts: list[str] = []
        pos = 0
        spans_here: list[tuple[str, int]] = []

        def emit(s: str) -> None:
            nonlocal pos
            text_parts.append(s)
            pos += len(s)

        for word, marker in per_doc[d]:
            emit(_noise_sentence(rng, alphabet, 4, 10))
            lead = "".join(rng.choice(alphabet) for _ in range(rng.randint(3, 7)))
            tail = "".join(rng.choice(alphabet) for _ in range(rng.randint(3, 7)))
            emit(lead + (marker or rng.choice(alphabet)))
            spans_here.append((word, pos))
            emit(word)
            emit(tail + "。")
        for _ in range(rng.randint(6, 12)):
            if rng.random() < 0.5:
                phrase = rng.choice(common_phrases)
                emit("".join(rng.choice(alphabet) for _ in range(3)) + phrase + "。")
            else:
                emit(_noise_sentence(rng, alphabet, 4, 10))
        body = "".join(text_parts)
        docs.append(make_doc(doc_id, body, collection="synthetic-translit", date=PartialDate(1841)))
        for word, start in spans_here:
            gold.append(GoldSpan(word, doc_id, start, start + len(word)))

    contrast_docs = []
    for d in range(max(4, n_docs // 2)):
        text_parts = []
        for _ in range(rng.randint(30, 50)):
            if rng.random() < 0.4:
                phrase = rng.choice(common_phrases)
                text_parts.append("".join(rng.choice(alphabet) for _ in range(3)) + phrase + "。")
            else:
                text_parts.append(_noise_sentence(rng, alphabet, 4, 10))
        contrast_docs.append(make_doc(f"plain{d:03d}", "".join(text_parts), collection="synthetic-contrast"))

    return HgtzFixture(
        corpus=Corpus(docs),
        contrast=Corpus(contrast_docs),
        gold_spans=tuple(gold),
        planted=tuple(words),
        markers=_MARKERS,
    )


# -- record-linkage fixture -------------------------------------------------------


@dataclass(frozen=True)
class DifangzhiFixture:
    records: tuple[NameRecord, ...]
    truth: dict[str, str]  # record_id -> person_id
    gazetteer: Gazetteer


_SURNAMES = "王李張劉陳楊趙黃周吳"
_GIVEN = "臣佐明德安國忠孝仁義禮智信文武"
_STYLE_CHARS = "子伯仲叔季公卿甫彥士若元長幼景淵敬修遠瞻"
_ENTRIES = ("進士", "舉人", "貢生", "監生")
_OFFICES = ("知縣", "知府", "縣丞", "教諭", "主簿")
_PREFECTURE_STEMS = ("雲", "嵐", "澤", "霞", "嶺")


def _fixture_gazetteer(rng: random.Random) -> tuple[Gazetteer, list[str]]:
    places = []
    county_names = []
    for pi, stem in enumerate(_PREFECTURE_STEMS):
        pref_id = f"pref{pi}"
        lat = 25.0 + pi * 4.0
        lon = 105.0 + pi * 5.0
        places.append(Place(pref_id, f"{stem}州府", coordinates=(lat, lon)))
        for ci, suffix in enumerate("東南西北"):
            name = f"{stem}{suffix}縣"
            places.append(
                Place(
                    f"{pref_id}c{ci}",
                    name,
                    parent=pref_id,
                    coordinates=(lat + ci * 0.2, lon + ci * 0.2),
                )
            )
            county_names.append(name)
    return Gazetteer(places), county_names


def difangzhi_fixture(seed: int = 44, *, n_records: int = 200) -> DifangzhiFixture:
    """Officer records with planted duplicate clusters and known truth.

    Records of one person share places and near-identical service periods;
    records of distinct same-name persons differ in every factoid and sit
    decades apart, some beyond the temporal veto span.
    """
    rng = random.Random(seed)
    gazetteer, counties = _fixture_gazetteer(rng)
    by_prefecture: dict[str, list[str]] = {}
    for name in counties:
        by_prefecture.setdefault(name[0], []).append(name)

    records: list[NameRecord] = []
    truth: dict[str, str] = {}
    person_no = 0
    style_pool = [a + b for a in _STYLE_CHARS for b in _STYLE_CHARS if a != b]
    rng.shuffle(style_pool)

    while len(records) < n_records:
        name = rng.choice(_SURNAMES) + rng.choice(_GIVEN) + rng.choice(_GIVEN)
        n_persons = 2 if rng.random() < 0.5 else 1
        base_year = rng.randint(1400, 1600)
        for p in range(n_persons):
            person_no += 1
            person_id = f"p{person_no:04d}"
            stem = rng.choice(_PREFECTURE_STEMS)
            birth = rng.choice(by_prefecture[stem])
            service = rng.choice(counties)
            alt = frozenset({style_pool.pop()})
            entry = rng.choice(_ENTRIES)
            office = rng.choice(_OFFICES)
            # Push sibling persons far apart in time and space.
            year = base_year + p * rng.randint(150, 260)
            span = rng.randint(2, 8)
            for r in range(rng.randint(1, 3)):
                record_id = f"r{len(records):04d}"
                shift = rng.randint(-2, 2)
                missing = rng.random()
                records.append(
                    NameRecord(
                        record_id=record_id,
                        name=name,
                        birth_place=birth,
                        entry_into_office=None if missing < 0.10 else entry,
                        office_posting=None if 0.10 <= missing < 0.20 else office,
                        alternate_names=frozenset() if 0.20 <= missing < 0.28 else alt,
                        service_location=service,
                        service_period=(year + shift, year + shift + span),
                        source=SourceRef(
                            book_id=f"book{rng.randint(0, 30):02d}",
                            pub_place=rng.choice(counties),
                            book_year=year + rng.randint(5, 60),
                        ),
                    )
                )
                truth[record_id] = person_id
                if len(records) >= n_records:
                    break
            if len(records) >= n_records:
                break

    return DifangzhiFixture(tuple(records), truth, gazetteer)


# -- gazetteer of documented example relations ------------------------------------


def demo_gazetteer() -> Gazetteer:
    """Hand-written places covering the documented relation cases.

    Includes two counties under one Qing prefecture (siblings), a county
    inside another prefecture (containment), city coordinates for distance
    checks, an ambiguous name, and a period-bounded entry.
    """
    return Gazetteer(
        [
            Place("huizhou-fu", "惠州府", valid_period=(1644, 1911), coordinates=(23.08, 114.4)),
            Place("longchuan", "龍川縣", parent="huizhou-fu", valid_period=(1644, 1911), coordinates=(24.1, 115.26)),
            Place("huichuan", "惠川縣", parent="huizhou-fu", valid_period=(1644, 1911)),
            Place("chuzhou-fu", "處州府", valid_period=(1644, 1911), coordinates=(28.45, 119.92)),
            Place("yining", "宜寧縣", parent="chuzhou-fu", valid_period=(1644, 1911)),
            Place("beijing", "北京", variants=frozenset({"京師"}), coordinates=(39.9042, 116.4074)),
            Place("shanghai", "上海", coordinates=(31.2304, 121.4737)),
            Place("anfu-jx", "安福縣", parent="chuzhou-fu", coordinates=(27.39, 114.62)),
            Place("anfu-hu", "安福縣", parent="huizhou-fu", coordinates=(26.57, 111.6)),
        ]
    )


# -- dated keyword demo corpus -----------------------------------------------------


def dated_demo_corpus(seed: int = 55) -> Corpus:
    """Small dated corpus with period-dependent collocations for demos."""
    rng = random.Random(seed)
    anchor = "平等"
    period_collocates = {
        (1898, 1900): ["西人", "強權", "萬國"],
        (1901, 1914): ["權力", "立憲", "君主"],
        (1915, 1924): ["同胞", "眾生"],
    }
    alphabet = _noise_alphabet(rng, 50, exclude=anchor + "".join(c for cs in period_collocates.values() for c in cs))
    docs = []
    i = 0
    for (start, end), collocates in period_collocates.items():
        for year in range(start, end + 1):
            sentences = []
            for _ in range(rng.randint(3, 6)):
                mate = rng.choice(collocates)
                pad = "".join(rng.choice(alphabet) for _ in range(rng.randint(2, 5)))
                sentences.append(anchor + pad + mate + "。")
            for _ in range(rng.randint(2, 5)):
                sentences.append(_noise_sentence(rng, alphabet))
            rng.shuffle(sentences)
            docs.append(
                make_doc(
                    f"d{i:04d}",
                    "".join(sentences),
                    collection="synthetic-dated",
                    date=PartialDate(year),
                )
            )
            i += 1
    return Corpus(docs)
