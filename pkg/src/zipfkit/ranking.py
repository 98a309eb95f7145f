"""Frequency tables and rank-frequency distributions."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import Executor
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, InputError
from .lexicon import PosTag, TaggedToken
from .text_ingest import TokenStream


@dataclass(frozen=True)
class FrequencyTable:
    """Word counts of one sample (a text or a corpus).

    ``fingerprint`` is the preprocessing fingerprint of the stream(s) the
    counts came from; ``None`` means "no tokens seen yet" and merges with
    anything.
    """

    counts: Mapping[str, int] = field(default_factory=dict)
    fingerprint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("frequency tables hold positive counts only")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, word: str) -> int:
        return self.counts[word]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencyTable):
            return NotImplemented
        return self.counts == other.counts and self.fingerprint == other.fingerprint


def count_frequencies(stream: TokenStream | Iterable[str]) -> FrequencyTable:
    fp = stream.fingerprint if isinstance(stream, TokenStream) else None
    return FrequencyTable(Counter(stream), fp)


def merge_tables(tables: Iterable[FrequencyTable]) -> FrequencyTable:
    """Pointwise sum of counts.

    Raises ConfigError when the tables come from different preprocessing
    configurations.
    """
    tables = list(tables)
    fps = {t.fingerprint for t in tables if t.fingerprint is not None and t.counts}
    if len(fps) > 1:
        raise ConfigError(f"cannot merge tables built under different configurations: {sorted(fps)}")
    merged: Counter = Counter()
    for t in tables:
        merged.update(t.counts)
    fp = fps.pop() if fps else next((t.fingerprint for t in tables if t.fingerprint), None)
    return FrequencyTable(merged, fp)


def count_sharded(stream: TokenStream, n_shards: int = 4, executor: Executor | None = None) -> FrequencyTable:
    """Count ``stream`` in contiguous shards and merge the partial tables."""
    words = stream.words
    bounds = np.linspace(0, len(words), n_shards + 1).astype(int)
    shards = [TokenStream(words[a:b], stream.fingerprint) for a, b in zip(bounds[:-1], bounds[1:])]
    mapper = executor.map if executor is not None else map
    return reduce(lambda a, b: merge_tables([a, b]), mapper(count_frequencies, shards), FrequencyTable({}, stream.fingerprint))


@dataclass(frozen=True)
class RankEntry:
    rank: int
    word: str
    frequency: float


class RankedDistribution:
    """Words sorted by descending frequency; rank 1 is the most frequent.

    Ties are ordered by word, ascending. ``real_valued`` marks synthetic
    distributions whose frequencies are exact reals rather than counts; those
    only need positive frequencies, so that noise can be added to a model
    curve without re-sorting it.
    """

    def __init__(
        self,
        words: Sequence[str],
        frequencies,
        fingerprint: str | None = None,
        real_valued: bool = False,
        label: str | None = None,
    ):
        freqs = np.asarray(frequencies, dtype=float if real_valued else np.int64)
        if freqs.ndim != 1 or len(freqs) != len(words):
            raise ValueError("words and frequencies must be 1-D and of equal length")
        if len(freqs) and freqs.min() <= 0:
            raise ValueError("frequencies must be positive")
        if not real_valued and np.any(np.diff(freqs) > 0):
            raise ValueError("counts must be non-increasing in rank")
        freqs.setflags(write=False)
        self.words = tuple(words)
        self.frequencies = freqs
        self.fingerprint = fingerprint
        self.real_valued = real_valued
        self.label = label

    @property
    def vocabulary(self) -> int:
        return len(self.words)

    @property
    def total(self):
        s = self.frequencies.sum()
        return float(s) if self.real_valued else int(s)

    @property
    def ranks(self) -> np.ndarray:
        return np.arange(1, self.vocabulary + 1)

    def __len__(self) -> int:
        return self.vocabulary

    def __iter__(self):
        for r, (w, f) in enumerate(zip(self.words, self.frequencies.tolist()), 1):
            yield RankEntry(r, w, f)

    def entries(self) -> list[RankEntry]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankedDistribution):
            return NotImplemented
        return (
            self.words == other.words
            and np.array_equal(self.frequencies, other.frequencies)
            and self.real_valued == other.real_valued
        )

    def __repr__(self) -> str:
        return f"RankedDistribution(V={self.vocabulary}, total={self.total})"

    def scaled(self, factor: float) -> "RankedDistribution":
        return RankedDistribution(self.words, self.frequencies * float(factor), self.fingerprint, True, self.label)

    def to_table(self) -> FrequencyTable:
        if self.real_valued:
            raise ValueError("real-valued distributions have no integer counts")
        return FrequencyTable(dict(zip(self.words, self.frequencies.tolist())), self.fingerprint)


def rank(table: FrequencyTable | Mapping[str, int]) -> RankedDistribution:
    if isinstance(table, FrequencyTable):
        counts, fp = table.counts, table.fingerprint
    else:
        counts, fp = dict(table), None
    items = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return RankedDistribution([w for w, _ in items], [c for _, c in items], fp)


def rank_stream(stream: TokenStream | Iterable[str]) -> RankedDistribution:
    return rank(count_frequencies(stream))


def class_sub_ranking(tagged: Iterable[TaggedToken], pos: PosTag | str, form: str = "surface") -> RankedDistribution:
    """Token-level ranking of one part of speech."""
    pos = PosTag(pos)
    if form not in ("surface", "lemma"):
        raise ConfigError(f"form must be 'surface' or 'lemma', not {form!r}")
    return rank(Counter(getattr(t, form) for t in tagged if t.pos is pos))


def extract_sub_ranking(dist: RankedDistribution, words: Iterable[str]) -> RankedDistribution:
    """Pick the given words out of ``dist`` and re-rank them.

    Each word keeps its full global count, i.e. the class assignment is made
    per word type rather than per token.
    """
    wanted = set(words)
    keep = [i for i, w in enumerate(dist.words) if w in wanted]
    return RankedDistribution(
        [dist.words[i] for i in keep], dist.frequencies[keep], dist.fingerprint, dist.real_valued, dist.label
    )


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def distribution_csv(dist: RankedDistribution) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["rank", "word", "frequency"])
    for e in dist:
        out.writerow([e.rank, e.word, _fmt(e.frequency)])
    return buf.getvalue()


def write_csv(dist: RankedDistribution, path: str | Path) -> None:
    Path(path).write_text(distribution_csv(dist), encoding="utf-8")


def read_csv(path: str | Path) -> RankedDistribution:
    """Read a ``rank,word,frequency`` CSV. Lines starting with ``#`` are skipped."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read distribution {path}: {exc}") from exc
    if not rows or rows[0] != ["rank", "word", "frequency"]:
        raise InputError(f"{path}: expected header rank,word,frequency")
    body = rows[1:]
    real = any(not f.isdigit() for _, _, f in body)
    freqs = [float(f) if real else int(f) for _, _, f in body]
    return RankedDistribution([w for _, w, _ in body], freqs, real_valued=real)


def distribution_json(dist: RankedDistribution) -> dict:
    return {
        "total": dist.total,
        "vocabulary": dist.vocabulary,
        "fingerprint": dist.fingerprint,
        "real_valued": dist.real_valued,
        "entries": [[e.rank, e.word, e.frequency] for e in dist],
    }


def write_json(dist: RankedDistribution, path: str | Path) -> None:
    Path(path).write_text(json.dumps(distribution_json(dist), ensure_ascii=False) + "\n", encoding="utf-8")
