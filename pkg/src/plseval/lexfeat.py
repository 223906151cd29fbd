"""Lexical features predictive of text simplicity: lengths, familiarity,
a frequency-based specificity proxy, conjunction counts, and function-word
counts; includes the lexicon-backed POS tagger used across the package."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .corpus import tokenize

_NUMERIC_RE = re.compile(r"^\d+(\.\d+)?$")

CONTENT_TAGS = {"verb", "noun", "adj", "adv"}
COUNTED_TAGS = ("verb", "noun", "adj", "adv", "num")


def pos_tag(tokens: list[str], pos_lexicon: dict[str, str]) -> list[str]:
    """Lexicon lookup with suffix heuristics for unknown tokens.

    Unknowns: numeric pattern -> num, -ly -> adv, -ing/-ed -> verb,
    otherwise noun. Deterministic.
    """
    tags = []
    for tok in tokens:
        tag = pos_lexicon.get(tok)
        if tag is None:
            if _NUMERIC_RE.match(tok):
                tag = "num"
            elif tok.endswith("ly") and len(tok) > 3:
                tag = "adv"
            elif (tok.endswith("ing") or tok.endswith("ed")) and len(tok) > 4:
                tag = "verb"
            else:
                tag = "noun"
        tags.append(tag)
    return tags


@dataclass
class LexicalProfile:
    mean_sentence_length: float = 0.0
    paragraph_length: int = 0
    familiarity: float = 0.0
    specificity: float = 0.0
    conjunctions: int = 0
    pos_counts: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        out = {
            "mean_sentence_length": self.mean_sentence_length,
            "paragraph_length": float(self.paragraph_length),
            "familiarity": self.familiarity,
            "specificity": self.specificity,
            "conjunctions": float(self.conjunctions),
        }
        for tag in COUNTED_TAGS:
            out[f"pos_{tag}"] = float(self.pos_counts.get(tag, 0))
        return out


def profile(text: str, pos_lexicon: dict[str, str], common_words: set[str],
            frequency: dict[str, int], conjunctions: set[str]) -> LexicalProfile:
    """Compute all lexical features of ``text``.

    Specificity is the mean over content tokens of -log(relative corpus
    frequency); rarer content vocabulary means more specific text.
    """
    tt = tokenize(text)
    if not tt.tokens:
        return LexicalProfile(pos_counts={t: 0 for t in COUNTED_TAGS})
    n_sents = max(len(tt.sentence_breaks), 1)
    tags = pos_tag(tt.tokens, pos_lexicon)
    pos_counts = {t: 0 for t in COUNTED_TAGS}
    for tag in tags:
        if tag in pos_counts:
            pos_counts[tag] += 1
    common = sum(1 for t in tt.tokens if t in common_words)
    freq_total = sum(frequency.values()) or 1
    spec_terms = []
    for tok, tag in zip(tt.tokens, tags):
        if tag in CONTENT_TAGS:
            # unseen tokens take the rarest observed slot (count 1)
            count = max(frequency.get(tok, 1), 1)
            spec_terms.append(-math.log(count / freq_total))
    conj = sum(1 for t in tt.tokens if t in conjunctions)
    return LexicalProfile(
        mean_sentence_length=len(tt.tokens) / n_sents,
        paragraph_length=len(tt.tokens),
        familiarity=common / len(tt.tokens),
        specificity=sum(spec_terms) / len(spec_terms) if spec_terms else 0.0,
        conjunctions=conj,
        pos_counts=pos_counts,
    )


def profile_delta(base: LexicalProfile, perturbed: LexicalProfile) -> dict[str, dict]:
    """Per-field relative change (perturbed - base) / base.

    Fields with a zero base are reported as absolute deltas and flagged.
    """
    out: dict[str, dict] = {}
    b, p = base.as_dict(), perturbed.as_dict()
    for key in b:
        if b[key] != 0.0:
            out[key] = {"delta": (p[key] - b[key]) / b[key], "relative": True}
        else:
            out[key] = {"delta": p[key] - b[key], "relative": False}
    return out
