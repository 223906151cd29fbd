"""Oracle extractive hypotheses: greedy longest-common-subsequence-F1
sentence selection against the target summary, then a pluggable paraphrase
step that introduces lexical variation (identity, lexicon substitution, or a
remote service)."""

from __future__ import annotations

import random
from dataclasses import dataclass

import requests

from . import PlsevalError, ProviderError
from .corpus import ParallelPair, tokens_of, segment_sentences
from .lexicon import LexiconBundle
from .metrics import lcs_length

# Prompt used by callers that generate simplified replacement sentences with
# an external LLM service; no model ships with this package.
SIMPLIFICATION_PROMPT = "explain the text in layman's terms to a primary school student."


class OracleError(PlsevalError):
    pass


@dataclass
class OracleHypothesis:
    pair_id: str
    selected_indices: list[int]
    extractive_text: str
    paraphrased_text: str
    provider_id: str
    degenerate: bool = False  # no source sentence shared a token with the target


def _rouge_l_f1(hyp_tokens: list[str], ref_tokens: list[str]) -> float:
    if not hyp_tokens or not ref_tokens:
        return 0.0
    lcs = lcs_length(hyp_tokens, ref_tokens)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp_tokens)
    r = lcs / len(ref_tokens)
    return 2 * p * r / (p + r)


def extract_oracle(pair: ParallelPair, max_sentences: int | None = None
                   ) -> tuple[list[int], bool]:
    """Greedy forward selection of source sentences maximizing LCS-based F1
    against the target. Stops when no sentence improves the score (or at
    max_sentences). Returns (sorted indices, degenerate flag)."""
    src_sents = [tokens_of(s) for s in pair.source.sentence_texts()]
    if not src_sents:
        raise OracleError(f"pair {pair.id}: source has no sentences")
    ref = pair.target.text and tokens_of(pair.target.text) or []
    selected: list[int] = []
    best = 0.0
    while True:
        if max_sentences is not None and len(selected) >= max_sentences:
            break
        gain_best, gain_idx = 0.0, -1
        for i, _ in enumerate(src_sents):
            if i in selected:
                continue
            cand = sorted(selected + [i])
            toks = [t for j in cand for t in src_sents[j]]
            score = _rouge_l_f1(toks, ref)
            if score > best + 1e-12 and score - best > gain_best + 1e-12:
                gain_best, gain_idx = score - best, i
        if gain_idx < 0:
            break
        selected.append(gain_idx)
        best += gain_best
    return sorted(selected), not selected


@dataclass
class ParaphraseProvider:
    """identity, lexicon-substitution, or remote paraphrasing."""

    provider_id: str
    kind: str = "identity"  # identity | lexicon | remote
    bundle: LexiconBundle | None = None
    url: str | None = None
    max_fraction: float = 0.2

    def paraphrase(self, text: str, seed: int) -> str:
        if self.kind == "identity":
            return text
        if self.kind == "lexicon":
            return self._lexicon_paraphrase(text, seed)
        if self.kind == "remote":
            return self._remote_paraphrase(text, seed)
        raise OracleError(f"unknown paraphrase provider kind {self.kind!r}")

    def _lexicon_paraphrase(self, text: str, seed: int) -> str:
        """Seeded synonym replacement of up to max_fraction of the tokens
        with lexicon-listed synonyms; sentence structure preserved."""
        if self.bundle is None:
            raise OracleError("lexicon paraphrase provider needs a LexiconBundle")
        rng = random.Random(f"paraphrase|{self.provider_id}|{seed}|{text}")
        from .corpus import tokenize_with_spans
        spans = tokenize_with_spans(text)
        candidates = [i for i, (tok, _, _) in enumerate(spans)
                      if self.bundle.syn_ant.get(tok, ([], []))[0]]
        budget = int(len(spans) * self.max_fraction)
        chosen = sorted(rng.sample(candidates, min(budget, len(candidates))),
                        reverse=True)
        for i in chosen:
            tok, a, b = spans[i]
            repl = rng.choice(self.bundle.syn_ant[tok][0])
            text = text[:a] + repl + text[b:]
        return text

    def _remote_paraphrase(self, text: str, seed: int) -> str:
        try:
            resp = requests.post(self.url.rstrip("/") + "/v1/paraphrase",
                                 json={"texts": [text], "seed": seed}, timeout=60)
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"paraphrase provider failed: {exc}",
                                payload=getattr(exc, "response", None)) from exc
        texts = payload.get("texts")
        if not isinstance(texts, list) or len(texts) != 1:
            raise ProviderError("paraphrase provider returned a misaligned response",
                                payload=payload)
        return texts[0]


def build_hypothesis(pair: ParallelPair, provider: ParaphraseProvider,
                     seed: int, max_sentences: int | None = None) -> OracleHypothesis:
    """Select oracle sentences, then paraphrase.

    Pre-aligned pairs whose alignment covers every target sentence skip
    extraction: the paraphrase applies to the target directly.
    """
    n_target = len(pair.target.sentences)
    aligned_targets = {t for _, t in (pair.alignment or [])}
    if pair.alignment and n_target and aligned_targets == set(range(n_target)):
        text = pair.target.text
        return OracleHypothesis(
            pair_id=pair.id, selected_indices=[], extractive_text=text,
            paraphrased_text=provider.paraphrase(text, seed),
            provider_id=provider.provider_id)
    indices, degenerate = extract_oracle(pair, max_sentences)
    sents = pair.source.sentence_texts()
    extractive = " ".join(sents[i] for i in indices)
    return OracleHypothesis(
        pair_id=pair.id, selected_indices=indices, extractive_text=extractive,
        paraphrased_text=provider.paraphrase(extractive, seed) if extractive else "",
        provider_id=provider.provider_id, degenerate=degenerate)
