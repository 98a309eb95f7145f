"""Multi-text corpora: manifests, matched-size trimming, distribution comparison."""

from __future__ import annotations

import configparser
import csv
import enum
import hashlib
import io
import json
import logging
import math
import urllib.request
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigError, InputError, NumericError
from .fitting import MIN_DECADES, FitWindow, fit_power_law
from .lexicon import Lexicon, lemmatize, tag_tokens
from .ranking import FrequencyTable, RankedDistribution, count_frequencies, merge_tables
from .text_ingest import (
    Dictionary,
    FilterPolicy,
    TokenizationRules,
    TokenStream,
    _combine,
    apply_dictionary_filter,
    read_raw_text,
    tokenize,
)

log = logging.getLogger(__name__)


class Origin(str, enum.Enum):
    NATIVE = "native"
    TRANSLATED = "translated"


class TrimPolicy(str, enum.Enum):
    WHOLE_TEXTS = "whole-texts"
    TRUNCATE_LAST = "truncate-last"


@dataclass(frozen=True)
class TextDescriptor:
    path: Path
    id: str
    author: str = "unknown"
    language: str = "und"
    origin: Origin = Origin.NATIVE
    translator: str | None = None
    source_language: str | None = None
    url: str | None = None
    sha256: str | None = None
    max_tokens: int | None = None  # set by trim_to_size(truncate-last)

    def __post_init__(self):
        if self.origin is Origin.TRANSLATED and self.source_language is None:
            raise ConfigError(f"text {self.id}: translated texts need source_language (may be 'unknown')")


@dataclass(frozen=True)
class CorpusManifest:
    name: str
    texts: tuple[TextDescriptor, ...]
    target_size: int | None = None

    def __post_init__(self):
        if not self.texts:
            raise ConfigError(f"corpus {self.name}: manifest lists no texts")
        ids = [t.id for t in self.texts]
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        if dupes:
            raise ConfigError(f"corpus {self.name}: duplicate text ids {dupes}")


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read an INI manifest.

    ``[corpus]`` holds ``name`` and optional ``target_size``; each
    ``[text:<id>]`` section describes one text. Relative paths are resolved
    against the manifest's directory.
    """
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    head = parser["corpus"] if parser.has_section("corpus") else {}
    texts = []
    for section in parser.sections():
        if not section.startswith("text:"):
            continue
        s = parser[section]
        tid = section[len("text:"):].strip()
        if "path" not in s:
            raise ConfigError(f"{path}: [{section}] has no path")
        p = Path(s["path"])
        try:
            origin = Origin(s.get("origin", "native"))
        except ValueError:
            raise ConfigError(f"{path}: [{section}] origin must be native or translated") from None
        texts.append(
            TextDescriptor(
                path=p if p.is_absolute() else path.parent / p,
                id=tid,
                author=s.get("author", "unknown"),
                language=s.get("language", "und"),
                origin=origin,
                translator=s.get("translator"),
                source_language=s.get("source_language"),
                url=s.get("url"),
                sha256=s.get("sha256") or None,
                max_tokens=int(s["max_tokens"]) if "max_tokens" in s else None,
            )
        )
    target = head.get("target_size")
    return CorpusManifest(head.get("name", path.stem), tuple(texts), int(target) if target else None)


def manifest_to_ini(manifest: CorpusManifest) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser["corpus"] = {"name": manifest.name}
    if manifest.target_size is not None:
        parser["corpus"]["target_size"] = str(manifest.target_size)
    for t in manifest.texts:
        sec = {"path": str(t.path), "author": t.author, "language": t.language, "origin": t.origin.value}
        for key in ("translator", "source_language", "url", "sha256", "max_tokens"):
            value = getattr(t, key)
            if value is not None:
                sec[key] = str(value)
        parser[f"text:{t.id}"] = sec
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that turns a text file into the tokens that get counted."""

    rules: TokenizationRules = field(default_factory=TokenizationRules)
    dictionary: Dictionary | None = None
    filter_policy: FilterPolicy = FilterPolicy.KEEP_MISSES
    lexicon: Lexicon | None = None
    form: str = "surface"

    def __post_init__(self):
        if self.form not in ("surface", "lemma"):
            raise ConfigError(f"form must be surface or lemma, not {self.form!r}")
        if self.form == "lemma" and self.lexicon is None:
            raise ConfigError("lemma counts need a lexicon")

    def stream(self, descriptor: TextDescriptor) -> TokenStream:
        raw = read_raw_text(descriptor.path, descriptor.language, descriptor.id)
        stream, _ = tokenize(raw, self.rules)
        if self.dictionary is not None:
            stream, _ = apply_dictionary_filter(stream, self.dictionary, self.filter_policy)
        if self.form == "lemma":
            tagged, _ = tag_tokens(stream, self.lexicon)
            stream = lemmatize(tagged, _combine(stream.fingerprint, self.lexicon.fingerprint()))
        if descriptor.max_tokens is not None:
            stream = stream.truncated(descriptor.max_tokens)
        return stream


def _per_text(manifest: CorpusManifest, config: PipelineConfig, fn):
    results, failures = {}, []
    for t in manifest.texts:
        try:
            results[t.id] = fn(config.stream(t))
        except InputError as exc:
            failures.append(f"{t.id}: {exc}")
    if failures:
        raise InputError(f"corpus {manifest.name}: {len(failures)} unreadable text(s)\n  " + "\n  ".join(failures))
    return results


def text_sizes(manifest: CorpusManifest, config: PipelineConfig | None = None) -> dict[str, int]:
    return _per_text(manifest, config or PipelineConfig(), len)


def build_corpus(manifest: CorpusManifest, config: PipelineConfig | None = None) -> FrequencyTable:
    """Count every text with one pipeline and merge the tables."""
    tables = _per_text(manifest, config or PipelineConfig(), count_frequencies)
    for tid, table in tables.items():
        log.info("%s/%s: %d tokens", manifest.name, tid, table.total)
    return merge_tables(tables.values())


def trim_to_size(
    manifest: CorpusManifest,
    target: int,
    policy: TrimPolicy | str = TrimPolicy.WHOLE_TEXTS,
    sizes: Mapping[str, int] | None = None,
    config: PipelineConfig | None = None,
) -> tuple[CorpusManifest, int]:
    """Cut a manifest down to about ``target`` tokens, in manifest order.

    ``whole-texts`` keeps texts while the running total stays <= target and
    stops at the first text that would overshoot. ``truncate-last`` also
    keeps a prefix of that text so the total equals ``target``. Returns the
    new manifest and the shortfall (0 for truncate-last). Token counts are
    measured with ``config`` unless ``sizes`` are given.
    """
    policy = TrimPolicy(policy)
    sizes = dict(sizes) if sizes is not None else text_sizes(manifest, config)
    available = sum(sizes[t.id] for t in manifest.texts)
    if target > available:
        raise ConfigError(f"corpus {manifest.name}: target {target} exceeds the {available} tokens available")
    kept, total = [], 0
    for t in manifest.texts:
        n = sizes[t.id]
        if total + n <= target:
            kept.append(t)
            total += n
            continue
        if policy is TrimPolicy.TRUNCATE_LAST and target > total:
            kept.append(replace(t, max_tokens=target - total))
            total = target
        break
    if not kept:
        raise ConfigError(f"corpus {manifest.name}: first text alone exceeds target {target}; use truncate-last")
    return replace(manifest, texts=tuple(kept), target_size=target), target - total


@dataclass(frozen=True)
class ComparisonReport:
    grid: np.ndarray
    delta: np.ndarray
    divergence_rank: int | None
    decade_alphas: dict[str, tuple[float, float]]
    threshold: float
    total_a: float
    total_b: float
    label_a: str = "A"
    label_b: str = "B"

    @property
    def tail_sign(self) -> int | None:
        """Sign of the gap beyond the divergence rank: +1 when B decays faster."""
        if self.divergence_rank is None:
            return None
        tail = self.delta[self.grid >= self.divergence_rank]
        return int(np.sign(np.median(tail)))

    def to_dict(self) -> dict:
        return {
            "label_a": self.label_a,
            "label_b": self.label_b,
            "normalization": "both distributions divided by their own token totals before differencing",
            "total_a": self.total_a,
            "total_b": self.total_b,
            "threshold": self.threshold,
            "divergence_rank": self.divergence_rank,
            "tail_sign": self.tail_sign,
            "decade_alphas": {k: list(v) for k, v in self.decade_alphas.items()},
            "grid": self.grid.tolist(),
            "delta": self.delta.tolist(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["rank", "delta"])
        for r, d in zip(self.grid.tolist(), self.delta.tolist()):
            out.writerow([r, repr(d)])
        return buf.getvalue()


def rank_grid(max_rank: int, per_decade: int = 20) -> np.ndarray:
    if max_rank < 1:
        return np.empty(0, dtype=int)
    n = int(math.floor(math.log10(max_rank) * per_decade)) + 1
    return np.unique(np.rint(np.logspace(0, math.log10(max_rank), n)).astype(int))


def compare(
    dist_a: RankedDistribution,
    dist_b: RankedDistribution,
    per_decade: int = 20,
    threshold: float = 0.05,
) -> ComparisonReport:
    """Log-frequency gap ``log10 fA(r)/NA - log10 fB(r)/NB`` on a log-spaced rank grid.

    The divergence rank is the first grid rank from which ``|gap|`` stays
    above ``threshold`` all the way to the last common rank.
    """
    if dist_a.vocabulary == 0 or dist_b.vocabulary == 0:
        raise NumericError("cannot compare empty distributions")
    if threshold <= 0:
        raise ConfigError("threshold must be positive")
    grid = rank_grid(min(dist_a.vocabulary, dist_b.vocabulary), per_decade)
    if grid.size == 0:
        raise NumericError("rank grid is empty")
    na, nb = float(dist_a.total), float(dist_b.total)
    fa = dist_a.frequencies[grid - 1].astype(float) / na
    fb = dist_b.frequencies[grid - 1].astype(float) / nb
    delta = np.log10(fa) - np.log10(fb)

    above = np.abs(delta) > threshold
    # suffix-all: above from index i to the end
    persistent = np.logical_and.accumulate(above[::-1])[::-1]
    hits = np.flatnonzero(persistent)
    divergence = int(grid[hits[0]]) if hits.size else None

    v = min(dist_a.vocabulary, dist_b.vocabulary)
    alphas = {}
    for k in range(int(math.log10(v)) + 1):
        w = FitWindow(10**k, min(10 ** (k + 1), v)) if 10**k < v else None
        if w is None or w.decades < MIN_DECADES or w.r_hi - w.r_lo < 2:
            continue
        alphas[str(w)] = (fit_power_law(dist_a, w).alpha, fit_power_law(dist_b, w).alpha)
    return ComparisonReport(
        grid, delta, divergence, alphas, threshold, na, nb, dist_a.label or "A", dist_b.label or "B"
    )


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_manifest(manifest: CorpusManifest, overwrite: bool = False, timeout: float = 60.0) -> list[str]:
    """Download every text that has a ``url`` to its ``path`` and verify ``sha256``.

    Returns one status line per text. A checksum mismatch deletes the file
    and raises InputError; a missing checksum only logs the computed one.
    """
    status = []
    for t in manifest.texts:
        if t.url is None:
            status.append(f"{t.id}: no url, skipped")
            continue
        if t.path.exists() and not overwrite:
            status.append(f"{t.id}: present")
        else:
            t.path.parent.mkdir(parents=True, exist_ok=True)
            try:
                with urllib.request.urlopen(t.url, timeout=timeout) as resp:
                    t.path.write_bytes(resp.read())
            except OSError as exc:
                raise InputError(f"{t.id}: download from {t.url} failed: {exc}") from exc
            status.append(f"{t.id}: downloaded")
        digest = sha256_file(t.path)
        if t.sha256 and digest != t.sha256.lower():
            t.path.unlink()
            raise InputError(f"{t.id}: checksum mismatch (expected {t.sha256}, got {digest})")
        if not t.sha256:
            log.warning("%s: no checksum in manifest; sha256=%s", t.id, digest)
    return status


def comparison_json(report: ComparisonReport) -> str:
    return json.dumps(report.to_dict(), indent=2)
