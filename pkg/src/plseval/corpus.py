"""Document model, deterministic tokenization/segmentation, dataset I/O,
and greedy sentence alignment for parallel complex/plain corpora.

All operations here are pure; the same input always yields the same output.
Every downstream component (metrics, language models, perturbations) consumes
this module's tokenizer so that n-gram accounting stays internally consistent.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field

from . import CorpusError

# Tokens: decimals stay whole ("3.5"), everything else splits on
# non-alphanumeric characters. Lowercased.
_TOKEN_RE = re.compile(r"\d+\.\d+|\w+", re.UNICODE)

_SENT_END = ".!?"

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.",
        "e.g.", "i.e.", "etc.", "vs.", "fig.", "al.", "no.", "approx.",
    }
)


@dataclass
class Document:
    """A text with sentence spans (character offsets into ``text``)."""

    id: str
    text: str
    sentences: list[tuple[int, int]] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_text(cls, doc_id: str, text: str, abbrev=DEFAULT_ABBREVIATIONS,
                  meta=None) -> "Document":
        return cls(id=doc_id, text=text,
                   sentences=segment_sentences(text, abbrev),
                   meta=dict(meta or {}))

    def sentence_texts(self) -> list[str]:
        return [self.text[a:b] for a, b in self.sentences]


@dataclass
class ParallelPair:
    """A source (complex) and target (plain) document pair."""

    id: str
    source: Document
    target: Document
    alignment: list[tuple[int, int]] | None = None


@dataclass
class TokenizedText:
    tokens: list[str]
    sentence_breaks: list[int]


def segment_sentences(text: str, abbrev=DEFAULT_ABBREVIATIONS) -> list[tuple[int, int]]:
    """Split ``text`` into sentence spans.

    A boundary is a run of sentence-final punctuation (. ! ?) followed by
    whitespace and an uppercase letter or digit, unless the token ending at
    the punctuation is a known abbreviation. Digit runs like "3.5" never
    split because no whitespace follows the dot. Spans exclude surrounding
    whitespace; the gaps between consecutive spans are whitespace-only.
    """
    if not text or not text.strip():
        return []
    abbrev = {a.lower() for a in abbrev}
    boundaries = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] in _SENT_END:
            j = i
            while j + 1 < n and text[j + 1] in _SENT_END:
                j += 1
            k = j + 1
            if k < n and text[k].isspace():
                m = k
                while m < n and text[m].isspace():
                    m += 1
                if m < n and (text[m].isupper() or text[m].isdigit()):
                    # token ending at j, scanned back to previous whitespace
                    t = j
                    while t > 0 and not text[t - 1].isspace():
                        t -= 1
                    if text[t:j + 1].lower() not in abbrev:
                        boundaries.append(j + 1)
            i = j + 1
        else:
            i += 1
    spans = []
    start = 0
    for b in boundaries + [n]:
        a, e = start, b
        while a < e and text[a].isspace():
            a += 1
        while e > a and text[e - 1].isspace():
            e -= 1
        if e > a:
            spans.append((a, e))
        start = b
    return spans


def tokenize(text: str, abbrev=DEFAULT_ABBREVIATIONS) -> TokenizedText:
    """Lowercase, punctuation-splitting, decimal-preserving tokenization."""
    spans = segment_sentences(text, abbrev)
    if not spans:
        toks = [t.lower() for t in _TOKEN_RE.findall(text)]
        return TokenizedText(toks, [len(toks)] if toks else [])
    tokens: list[str] = []
    breaks: list[int] = []
    for a, b in spans:
        tokens.extend(t.lower() for t in _TOKEN_RE.findall(text[a:b]))
        if not breaks or len(tokens) > breaks[-1]:
            breaks.append(len(tokens))
    return TokenizedText(tokens, breaks)


def tokens_of(text: str) -> list[str]:
    """Token list without sentence structure."""
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """(lowercased token, start, end) triples; spans index into ``text``."""
    return [(m.group(0).lower(), m.start(), m.end())
            for m in _TOKEN_RE.finditer(text)]


def token_f1(a: list[str], b: list[str]) -> float:
    """Clipped token-overlap F1 between two token lists."""
    if not a or not b:
        return 0.0
    overlap = sum((Counter(a) & Counter(b)).values())
    if overlap == 0:
        return 0.0
    p = overlap / len(a)
    r = overlap / len(b)
    return 2 * p * r / (p + r)


def align_greedy(source: Document, target: Document) -> list[tuple[int, int]]:
    """For each target sentence pick the unused source sentence with maximal
    token-overlap F1 (ties to the lower source index); zero-F1 pairs are
    omitted."""
    src_toks = [tokens_of(s) for s in source.sentence_texts()]
    used: set[int] = set()
    alignment: list[tuple[int, int]] = []
    for ti, tsent in enumerate(target.sentence_texts()):
        ttoks = tokens_of(tsent)
        best_f1, best_si = 0.0, -1
        for si, stoks in enumerate(src_toks):
            if si in used:
                continue
            f1 = token_f1(stoks, ttoks)
            if f1 > best_f1:
                best_f1, best_si = f1, si
        if best_si >= 0:
            used.add(best_si)
            alignment.append((best_si, ti))
    return alignment


def _pair_to_record(pair: ParallelPair) -> dict:
    rec = {
        "id": pair.id,
        "source_text": pair.source.text,
        "target_text": pair.target.text,
        "meta": dict(pair.source.meta),
    }
    if pair.alignment is not None:
        rec["alignment"] = [list(p) for p in pair.alignment]
    return rec


def load_pairs(path, abbrev=DEFAULT_ABBREVIATIONS) -> list[ParallelPair]:
    """Load a JSONL corpus; every document is segmented on load.

    Raises CorpusError naming the line for malformed records and for
    duplicate ids.
    """
    pairs: list[ParallelPair] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            for key in ("id", "source_text", "target_text"):
                if key not in rec:
                    raise CorpusError(f"{path}: line {lineno}: missing field {key!r}")
            if rec["id"] in seen:
                raise CorpusError(f"{path}: line {lineno}: duplicate id {rec['id']!r}")
            seen.add(rec["id"])
            meta = rec.get("meta", {})
            source = Document.from_text(rec["id"] + ":src", rec["source_text"], abbrev, meta)
            tgt = Document.from_text(rec["id"] + ":tgt", rec["target_text"], abbrev, meta)
            alignment = None
            if rec.get("alignment") is not None:
                alignment = [tuple(p) for p in rec["alignment"]]
                ns, nt = len(source.sentences), len(tgt.sentences)
                tseen: set[int] = set()
                for si, ti in alignment:
                    if not (0 <= si < ns and 0 <= ti < nt) or ti in tseen:
                        raise CorpusError(
                            f"{path}: line {lineno}: bad alignment pair ({si},{ti})")
                    tseen.add(ti)
            pairs.append(ParallelPair(rec["id"], source, tgt, alignment))
    return pairs


def save_pairs(pairs, path) -> None:
    """Write pairs in the canonical JSONL form (sorted keys, UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in pairs:
            fh.write(json.dumps(_pair_to_record(pair), sort_keys=True,
                                ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")
