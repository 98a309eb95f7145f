"""Lexicon-driven part-of-speech tagging and lemmatization.

No morphology is built in: every surface form the toolkit can analyse has to
be listed in a lexicon file. Surfaces with one analysis are tagged
automatically; surfaces with several are either resolved by lexicon order
(``priority``) or left for a human (``queue-only``). Both modes emit an
ambiguity queue that can be answered with a review file.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InputError
from .text_ingest import TokenizationRules, TokenStream, _combine, _normalize_surface, decode_utf8


class PosTag(str, enum.Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    OTHER = "OTHER"  # the black-box class


class Resolution(str, enum.Enum):
    AUTO = "auto"
    REVIEW = "review"
    FALLBACK = "fallback"


class DisambiguationMode(str, enum.Enum):
    PRIORITY = "priority"
    QUEUE_ONLY = "queue-only"


@dataclass(frozen=True)
class Analysis:
    lemma: str
    pos: PosTag


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    analyses: tuple[Analysis, ...]

    @property
    def ambiguous(self) -> bool:
        return len(self.analyses) > 1


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lemma: str
    pos: PosTag
    resolution: Resolution
    position: int
    ambiguous: bool = False
    pending: bool = False  # queued for a human and not yet answered

    def __post_init__(self):
        if self.resolution is Resolution.FALLBACK and (self.pos is not PosTag.OTHER or self.lemma != self.surface):
            raise ValueError("fallback tokens must be (surface, OTHER)")


@dataclass(frozen=True)
class QueueRecord:
    position: int
    surface: str
    candidates: tuple[Analysis, ...]


class Lexicon:
    def __init__(self, entries: dict[str, LexiconEntry], rows: int = 0, source: str | None = None):
        self.entries = entries
        self.rows = rows
        self.source = source

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, surface: str) -> bool:
        return surface in self.entries

    def get(self, surface: str) -> LexiconEntry | None:
        return self.entries.get(surface)

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[tuple[str, str, str | PosTag]],
        rules: TokenizationRules | None = None,
        line_numbers: Sequence[int] | None = None,
    ) -> "Lexicon":
        rules = rules or TokenizationRules()
        grouped: dict[str, list[Analysis]] = {}
        n = 0
        for i, (surface, lemma, pos) in enumerate(rows):
            lineno = line_numbers[i] if line_numbers else i + 1
            n += 1
            surface = _normalize_surface(surface.strip(), rules)
            lemma = _normalize_surface(lemma.strip(), rules)
            if not surface:
                raise InputError(f"line {lineno}: empty surface")
            if not lemma:
                raise InputError(f"line {lineno}: empty lemma for {surface!r}")
            try:
                tag = PosTag(pos.strip().upper() if isinstance(pos, str) else pos)
            except ValueError:
                raise InputError(f"line {lineno}: unknown POS label {pos!r}") from None
            analysis = Analysis(lemma, tag)
            bucket = grouped.setdefault(surface, [])
            if analysis not in bucket:
                bucket.append(analysis)
        entries = {s: LexiconEntry(s, tuple(a)) for s, a in grouped.items()}
        return cls(entries, n)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for s in sorted(self.entries):
            for a in self.entries[s].analyses:
                h.update(f"{s}\t{a.lemma}\t{a.pos.value}\n".encode())
        return h.hexdigest()[:16]


def load_lexicon(path: str | Path, rules: TokenizationRules | None = None) -> Lexicon:
    """Read a ``surface<TAB>lemma<TAB>pos`` file.

    Blank lines and lines starting with ``#`` are skipped. Row order within a
    surface is its disambiguation priority.
    """
    try:
        text = decode_utf8(Path(path).read_bytes(), str(path))
    except OSError as exc:
        raise InputError(f"cannot read lexicon {path}: {exc}") from exc
    rows, linenos = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise InputError(f"{path}:{lineno}: expected 3 tab-separated columns, got {len(cols)}")
        rows.append(cols)
        linenos.append(lineno)
    try:
        lex = Lexicon.from_rows(rows, rules, linenos)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    lex.source = str(path)
    return lex


def tag_tokens(
    stream: TokenStream | Sequence[str],
    lexicon: Lexicon,
    mode: DisambiguationMode | str = DisambiguationMode.PRIORITY,
) -> tuple[list[TaggedToken], list[QueueRecord]]:
    mode = DisambiguationMode(mode)
    tagged: list[TaggedToken] = []
    queue: list[QueueRecord] = []
    for i, surface in enumerate(stream):
        entry = lexicon.get(surface)
        if entry is None:
            tagged.append(TaggedToken(surface, surface, PosTag.OTHER, Resolution.FALLBACK, i))
            continue
        first = entry.analyses[0]
        if not entry.ambiguous:
            tagged.append(TaggedToken(surface, first.lemma, first.pos, Resolution.AUTO, i))
            continue
        queue.append(QueueRecord(i, surface, entry.analyses))
        if mode is DisambiguationMode.PRIORITY:
            tagged.append(TaggedToken(surface, first.lemma, first.pos, Resolution.AUTO, i, ambiguous=True))
        else:
            tagged.append(TaggedToken(surface, first.lemma, first.pos, Resolution.REVIEW, i, ambiguous=True, pending=True))
    return tagged, queue


def write_queue(queue: Iterable[QueueRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = csv.writer(fh, delimiter="\t", lineterminator="\n")
        out.writerow(["position", "surface", "candidates"])
        for rec in queue:
            cands = ";".join(f"{a.lemma}/{a.pos.value}" for a in rec.candidates)
            out.writerow([rec.position, rec.surface, cands])


@dataclass(frozen=True)
class ReviewRow:
    position: int
    lemma: str
    pos: PosTag


def load_review_file(path: str | Path) -> list[ReviewRow]:
    """Read ``position<TAB>lemma<TAB>pos`` rows; a header line is optional."""
    rows = []
    text = decode_utf8(Path(path).read_bytes(), str(path))
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if lineno == 1 and cols[0] == "position":
            continue
        if len(cols) != 3:
            raise InputError(f"{path}:{lineno}: expected 3 columns")
        try:
            rows.append(ReviewRow(int(cols[0]), cols[1].strip().casefold(), PosTag(cols[2].strip().upper())))
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    return rows


def apply_review_file(tagged: Sequence[TaggedToken], review: Iterable[ReviewRow]) -> list[TaggedToken]:
    """Apply human decisions to ambiguous tokens.

    Rows pointing at tokens that were never ambiguous are ignored with a
    warning; rows pointing past the end of the stream are an error.
    """
    review = list(review)
    bad = [r for r in review if not 0 <= r.position < len(tagged)]
    if bad:
        listing = ", ".join(str(r.position) for r in bad)
        raise InputError(f"review rows out of range (stream length {len(tagged)}): {listing}")
    out = list(tagged)
    for row in review:
        tok = out[row.position]
        if not tok.ambiguous:
            warnings.warn(f"review row for position {row.position} ({tok.surface!r}) is not in the ambiguity queue", stacklevel=2)
            continue
        out[row.position] = replace(tok, lemma=row.lemma, pos=row.pos, resolution=Resolution.REVIEW, pending=False)
    return out


def unresolved(tagged: Iterable[TaggedToken]) -> list[int]:
    """Positions still awaiting a human decision."""
    return [t.position for t in tagged if t.pending]


def lemmatize(tagged: Sequence[TaggedToken], fingerprint: str | None = None) -> TokenStream:
    return TokenStream(tuple(t.lemma for t in tagged), _combine(fingerprint, "lemma"))


def lemma_fingerprint(stream_fp: str | None, lexicon: Lexicon) -> str:
    return _combine(stream_fp, lexicon.fingerprint())
