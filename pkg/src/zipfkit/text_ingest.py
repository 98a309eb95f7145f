"""Turn raw text into case-folded word tokens.

Non-word strings (anything containing a digit, or symbol-only strings such
as ``$$`` or ``+``) are erased and recorded so they can be reviewed by hand.
A dictionary filter flags (and optionally drops) tokens that are not known
words.
"""

from __future__ import annotations

import configparser
import csv
import enum
import hashlib
import json
import unicodedata
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import regex

from .errors import ConfigError, InputError

APOSTROPHES = "'’"
HYPHENS = "-‐"

_GUTENBERG_START = regex.compile(r"^\*\*\* ?START OF (THE|THIS) PROJECT GUTENBERG.*$", regex.M | regex.I)
_GUTENBERG_END = regex.compile(r"^\*\*\* ?END OF (THE|THIS) PROJECT GUTENBERG.*$", regex.M | regex.I)


class Reason(str, enum.Enum):
    NON_WORD = "non-word"
    DICTIONARY_MISS = "dictionary-miss"


class FilterPolicy(str, enum.Enum):
    DROP_MISSES = "drop-misses"
    KEEP_MISSES = "keep-misses"
    REVIEW_ONLY = "review-only"


@dataclass(frozen=True)
class RawText:
    id: str
    language: str
    body: str

    def __post_init__(self):
        if not self.id:
            raise InputError("text id must be non-empty")


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


@dataclass(frozen=True)
class RejectRecord:
    original: str
    position: int
    reason: Reason


@dataclass(frozen=True)
class TokenizationRules:
    """Knobs of the tokenizer. The defaults are the documented behaviour."""

    normalization: str = "NFC"
    case_fold: bool = True
    keep_apostrophes: bool = True
    keep_hyphens: bool = True
    strip_gutenberg_boilerplate: bool = True

    def __post_init__(self):
        if self.normalization not in ("NFC", "NFKC"):
            raise ConfigError(f"unsupported normalization form {self.normalization!r}")

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_dict(self) -> dict:
        return asdict(self)


def load_rules(path: str | Path) -> TokenizationRules:
    """Read tokenization rules from an INI file with a ``[tokenization]`` section."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise InputError(f"cannot read rules file {path}: {exc}") from exc
    if not parser.has_section("tokenization"):
        return TokenizationRules()
    section = parser["tokenization"]
    known = TokenizationRules.__dataclass_fields__
    unknown = set(section) - set(known)
    if unknown:
        raise ConfigError(f"unknown tokenization keys: {sorted(unknown)}")
    kwargs = {}
    for key in section:
        if key == "normalization":
            kwargs[key] = section[key].strip().upper()
        else:
            try:
                kwargs[key] = section.getboolean(key)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    return TokenizationRules(**kwargs)


@dataclass(frozen=True)
class TokenStream:
    """Ordered word tokens of one text.

    ``fingerprint`` identifies the preprocessing that produced the words, so
    that counts built under different settings are never merged.
    """

    words: tuple[str, ...]
    fingerprint: str | None = None
    text_id: str | None = None

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def __getitem__(self, i):
        return self.words[i]

    def tokens(self) -> list[Token]:
        return [Token(w, i) for i, w in enumerate(self.words)]

    def truncated(self, n: int) -> "TokenStream":
        return TokenStream(self.words[:n], self.fingerprint, self.text_id)

    def to_text(self) -> str:
        return " ".join(self.words)


def decode_utf8(data: bytes, source: str = "<bytes>") -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{source}: invalid UTF-8 at byte offset {exc.start}") from exc


def read_raw_text(path: str | Path, language: str = "und", text_id: str | None = None) -> RawText:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    body = decode_utf8(data, str(path))
    if body.startswith("﻿"):
        body = body[1:]
    return RawText(text_id or path.stem, language, body)


def strip_gutenberg(body: str) -> str:
    """Cut a Project Gutenberg header/footer if both markers are present."""
    start = _GUTENBERG_START.search(body)
    if not start:
        return body
    end = _GUTENBERG_END.search(body, start.end())
    return body[start.end(): end.start() if end else len(body)]


def _word_pattern(rules: TokenizationRules) -> regex.Pattern:
    joiners = (APOSTROPHES if rules.keep_apostrophes else "") + (HYPHENS if rules.keep_hyphens else "")
    core = r"[\p{L}\p{M}\p{N}]+"
    if joiners:
        cls = regex.escape(joiners)
        # a joiner is word-internal only between two letters
        return regex.compile(rf"{core}(?:(?<=\p{{L}}\p{{M}}*)[{cls}](?=\p{{L}}){core})*")
    return regex.compile(core)


_HAS_DIGIT = regex.compile(r"\p{N}")
_HAS_LETTER = regex.compile(r"\p{L}")
_SYMBOL_CHUNK = regex.compile(r"(?<!\S)[^\s\p{L}\p{N}]*\p{S}[^\s\p{L}\p{N}]*(?!\S)")


def _normalize_surface(word: str, rules: TokenizationRules) -> str:
    word = word.replace("’", "'").replace("‐", "-")
    if rules.case_fold:
        word = unicodedata.normalize(rules.normalization, word.casefold())
    return word


def tokenize(raw: RawText, rules: TokenizationRules | None = None) -> tuple[TokenStream, list[RejectRecord]]:
    """Split ``raw.body`` into word tokens.

    A word is a maximal run of letters (apostrophes and hyphens allowed between
    letters) with no digit in it. Runs containing digits and whitespace-bounded
    symbol strings are returned as rejects; their ``position`` is the index the
    string would have taken in the token stream. Ordinary punctuation is a
    separator and is neither kept nor reported.
    """
    rules = rules or TokenizationRules()
    body = raw.body
    try:
        body.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise InputError(f"{raw.id}: invalid Unicode at offset {exc.start}") from exc
    body = unicodedata.normalize(rules.normalization, body)
    if rules.strip_gutenberg_boilerplate:
        body = strip_gutenberg(body)

    pattern = _word_pattern(rules)
    found = [(m.start(), m.group(), True) for m in pattern.finditer(body)]
    found += [(m.start(), m.group(), False) for m in _SYMBOL_CHUNK.finditer(body)]
    found.sort(key=lambda item: item[0])

    words: list[str] = []
    rejects: list[RejectRecord] = []
    for _, text, is_run in found:
        if is_run and _HAS_LETTER.search(text) and not _HAS_DIGIT.search(text):
            words.append(_normalize_surface(text, rules))
        else:
            rejects.append(RejectRecord(text, len(words), Reason.NON_WORD))
    return TokenStream(tuple(words), rules.fingerprint(), raw.id), rejects


@dataclass(frozen=True)
class Dictionary:
    entries: frozenset[str]
    source: str | None = None
    duplicates: int = 0

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_words(cls, words: Iterable[str], rules: TokenizationRules | None = None) -> "Dictionary":
        rules = rules or TokenizationRules()
        return cls(frozenset(_normalize_surface(w.strip(), rules) for w in words if w.strip()))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for w in sorted(self.entries):
            h.update(w.encode("utf-8") + b"\n")
        return h.hexdigest()[:16]


def load_dictionary(path: str | Path, rules: TokenizationRules | None = None) -> Dictionary:
    """Load a one-word-per-line UTF-8 dictionary, case-folded like tokens.

    Duplicate lines (after folding) are merged with a warning.
    """
    rules = rules or TokenizationRules()
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read dictionary {path}: {exc}") from exc
    lines = [ln.strip() for ln in decode_utf8(data, str(path)).splitlines()]
    folded = [_normalize_surface(ln, rules) for ln in lines if ln]
    entries = frozenset(folded)
    dupes = len(folded) - len(entries)
    if dupes:
        warnings.warn(f"{path}: {dupes} duplicate dictionary entries merged", stacklevel=2)
    return Dictionary(entries, str(path), dupes)


def apply_dictionary_filter(
    stream: TokenStream,
    dictionary: Dictionary,
    policy: FilterPolicy | str = FilterPolicy.KEEP_MISSES,
) -> tuple[TokenStream, list[RejectRecord]]:
    """Check every token against ``dictionary``.

    Returns the (possibly reduced) stream and one ``dictionary-miss`` record
    per absent token, positioned by its index in the input stream. Only
    ``drop-misses`` removes anything.
    """
    policy = FilterPolicy(policy)
    if policy is FilterPolicy.DROP_MISSES and len(dictionary) == 0:
        raise ConfigError("empty dictionary with drop-misses would erase the whole text")
    misses = [
        RejectRecord(w, i, Reason.DICTIONARY_MISS) for i, w in enumerate(stream.words) if w not in dictionary
    ]
    if policy is not FilterPolicy.DROP_MISSES:
        return stream, misses
    kept = tuple(w for w in stream.words if w in dictionary)
    fp = _combine(stream.fingerprint, "drop", dictionary.fingerprint())
    return TokenStream(kept, fp, stream.text_id), misses


def _combine(*parts: str | None) -> str:
    return hashlib.sha256("|".join(p or "" for p in parts).encode()).hexdigest()[:16]


def write_rejects(records: Iterable[RejectRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        out.writerow(["original", "position", "reason"])
        for rec in records:
            out.writerow([rec.original, rec.position, rec.reason.value])


def read_rejects(path: str | Path) -> list[RejectRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    return [RejectRecord(o, int(p), Reason(r)) for o, p, r in rows[1:]]


@dataclass
class IngestResult:
    stream: TokenStream
    rejects: list[RejectRecord] = field(default_factory=list)
    misses: list[RejectRecord] = field(default_factory=list)


def ingest(
    raw: RawText,
    rules: TokenizationRules | None = None,
    dictionary: Dictionary | None = None,
    policy: FilterPolicy | str = FilterPolicy.KEEP_MISSES,
) -> IngestResult:
    stream, rejects = tokenize(raw, rules)
    if dictionary is None:
        return IngestResult(stream, rejects)
    stream, misses = apply_dictionary_filter(stream, dictionary, policy)
    return IngestResult(stream, rejects, misses)
