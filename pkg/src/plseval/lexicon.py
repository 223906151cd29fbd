"""Loaders for the plain-text lexicon files shipped with the package.

File formats (all UTF-8, one record per line, blank lines and lines
starting with '#' ignored unless noted):

- POS lexicon:        token TAB tag
- synonym/antonym:    lemma TAB syn,syn,... TAB ant,ant,...
- entity lexicon:     surface TAB category
- glossary:           keyword TAB definition
- word sets:          one token per line (common words, conjunctions, pools)
- frequency table:    token TAB count
- document-frequency: optional header "#docs TAB n", then token TAB count
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import LexiconError


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line


def load_pos_lexicon(path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"{path}: line {lineno}: expected 'token\\ttag'")
        out[parts[0].lower()] = parts[1]
    return out


def load_syn_ant(path) -> dict[str, tuple[list[str], list[str]]]:
    out: dict[str, tuple[list[str], list[str]]] = {}
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"{path}: line {lineno}: expected 'lemma\\tsyns\\tants'")
        syns = [s for s in parts[1].split(",") if s]
        ants = [a for a in parts[2].split(",") if a]
        if not syns and not ants:
            raise LexiconError(f"{path}: line {lineno}: empty synonym and antonym lists")
        out[parts[0].lower()] = (syns, ants)
    return out


def load_entities(path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"{path}: line {lineno}: expected 'surface\\tcategory'")
        out[parts[0].lower()] = parts[1]
    return out


def load_glossary(path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[1].strip():
            raise LexiconError(f"{path}: line {lineno}: expected 'keyword\\tdefinition'")
        out[parts[0].lower()] = parts[1]
    return out


def load_wordset(path) -> set[str]:
    return {line.strip().lower() for _, line in _lines(path)}


def load_wordlist(path) -> list[str]:
    """Ordered variant of load_wordset (sentence pools need stable order)."""
    return [line.strip() for _, line in _lines(path)]


def load_frequency_table(path) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, line in _lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"{path}: line {lineno}: expected 'token\\tcount'")
        try:
            out[parts[0].lower()] = int(parts[1])
        except ValueError as exc:
            raise LexiconError(f"{path}: line {lineno}: bad count {parts[1]!r}") from exc
    return out


@dataclass
class DocFrequencyTable:
    """Document frequencies with the number of documents they came from."""

    df: dict[str, int]
    total_docs: int


def load_df_table(path) -> DocFrequencyTable:
    total = 0
    df: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#docs\t"):
                total = int(line.split("\t")[1])
                continue
            if line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{path}: line {lineno}: expected 'token\\tcount'")
            df[parts[0].lower()] = int(parts[1])
    if total <= 0:
        total = max(df.values(), default=0) + 1
    return DocFrequencyTable(df=df, total_docs=total)


@dataclass
class LexiconBundle:
    """All lexical resources the perturbations and metrics draw on."""

    pos: dict[str, str] = field(default_factory=dict)
    syn_ant: dict[str, tuple[list[str], list[str]]] = field(default_factory=dict)
    entities: dict[str, str] = field(default_factory=dict)
    glossary: dict[str, str] = field(default_factory=dict)
    common_words: set[str] = field(default_factory=set)

    @classmethod
    def load(cls, directory) -> "LexiconBundle":
        d = Path(directory)
        return cls(
            pos=load_pos_lexicon(d / "pos_lexicon.tsv"),
            syn_ant=load_syn_ant(d / "syn_ant.tsv"),
            entities=load_entities(d / "entities.tsv"),
            glossary=load_glossary(d / "glossary.tsv"),
            common_words=load_wordset(d / "common_words.txt"),
        )


def data_dir() -> Path:
    """Directory of the lexicons and desk corpus shipped with the package."""
    return Path(resources.files("plseval") / "data")
