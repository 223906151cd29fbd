"""Overlap-based scorers: ROUGE (mean of 1/2/L), BLEU, METEOR, SARI, plus a
client for remote model-based scorers speaking the metric wire protocol.

All scorers consume the corpus tokenizer's output and return values in
[0, 1]; reports scale by 100 for presentation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import requests

from . import ProviderError

BLEU_FLOOR = 1e-9


@dataclass
class MetricScore:
    metric_id: str
    value: float
    components: dict[str, float] = field(default_factory=dict)


@dataclass
class ScoreRequest:
    hypothesis: list[str]
    reference: list[str]
    source: list[str] | None = None


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _overlap_f1(hyp: list[str], ref: list[str], n: int) -> float:
    hc, rc = _ngrams(hyp, n), _ngrams(ref, n)
    overlap = sum((hc & rc).values())
    if overlap == 0:
        return 0.0
    return _f1(overlap / sum(hc.values()), overlap / sum(rc.values()))


def lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge(hypothesis: list[str], reference: list[str]) -> MetricScore:
    """Mean of ROUGE-1, ROUGE-2 and ROUGE-L F1."""
    if not hypothesis or not reference:
        comps = {"rouge1_f": 0.0, "rouge2_f": 0.0, "rougeL_f": 0.0}
        return MetricScore("rouge", 0.0, comps)
    r1 = _overlap_f1(hypothesis, reference, 1)
    r2 = _overlap_f1(hypothesis, reference, 2)
    lcs = lcs_length(hypothesis, reference)
    rl = _f1(lcs / len(hypothesis), lcs / len(reference)) if lcs else 0.0
    comps = {"rouge1_f": r1, "rouge2_f": r2, "rougeL_f": rl}
    return MetricScore("rouge", (r1 + r2 + rl) / 3.0, comps)


def bleu(hypothesis: list[str], reference: list[str]) -> MetricScore:
    """Geometric mean of clipped 1-4-gram precisions times brevity penalty.

    Zero precisions are floored at 1e-9 so short texts stay comparable.
    """
    if not hypothesis:
        return MetricScore("bleu", 0.0, {"bp": 0.0})
    comps: dict[str, float] = {}
    log_sum = 0.0
    for n in range(1, 5):
        hc, rc = _ngrams(hypothesis, n), _ngrams(reference, n)
        total = sum(hc.values())
        matched = sum((hc & rc).values())
        p = matched / total if total else 0.0
        comps[f"p{n}"] = p
        log_sum += math.log(max(p, BLEU_FLOOR))
    c, r = len(hypothesis), len(reference)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    comps["bp"] = bp
    return MetricScore("bleu", bp * math.exp(log_sum / 4.0), comps)


def _stem(token: str) -> str:
    for suf in ("ing", "ed", "es", "ly", "s"):
        if token.endswith(suf) and len(token) - len(suf) >= 3:
            token = token[: -len(suf)]
            break
    if len(token) >= 3 and token[-1] == token[-2] and token[-1] not in "aeiou":
        token = token[:-1]
    return token


def meteor(hypothesis: list[str], reference: list[str],
           syn_ant: dict[str, tuple[list[str], list[str]]] | None = None) -> MetricScore:
    """Staged unigram alignment (exact, suffix-stem, synonym) with the
    classic fragmentation penalty."""
    syn_ant = syn_ant or {}

    def synonyms(tok: str) -> set[str]:
        return set(syn_ant.get(tok, ([], []))[0])

    stages = [
        lambda h, r: h == r,
        lambda h, r: _stem(h) == _stem(r),
        lambda h, r: r in synonyms(h) or h in synonyms(r),
    ]
    hyp_match = [-1] * len(hypothesis)
    ref_used = [False] * len(reference)
    for stage in stages:
        for i, h in enumerate(hypothesis):
            if hyp_match[i] >= 0:
                continue
            for j, r in enumerate(reference):
                if not ref_used[j] and stage(h, r):
                    hyp_match[i] = j
                    ref_used[j] = True
                    break
    pairs = [(i, j) for i, j in enumerate(hyp_match) if j >= 0]
    m = len(pairs)
    if m == 0 or not hypothesis or not reference:
        return MetricScore("meteor", 0.0, {"matches": 0.0, "chunks": 0.0})
    chunks = 1
    for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
        if i1 != i0 + 1 or j1 != j0 + 1:
            chunks += 1
    p = m / len(hypothesis)
    r = m / len(reference)
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    comps = {"precision": p, "recall": r, "fmean": fmean,
             "matches": float(m), "chunks": float(chunks), "penalty": penalty}
    return MetricScore("meteor", fmean * (1 - penalty), comps)


def _ratio(num: set, den: set) -> float:
    if not den:
        return 1.0 if not num else 0.0
    return len(num) / len(den)


def sari(source: list[str], hypothesis: list[str], reference: list[str]) -> MetricScore:
    """Single-reference SARI over n-gram sets for n = 1..4.

    Add and keep are F1s, delete is precision. A component whose candidate
    and gold sets are both empty scores 1 (nothing to do, done perfectly).
    """
    comps: dict[str, float] = {}
    total = 0.0
    for n in range(1, 5):
        s = set(_ngrams(source, n))
        h = set(_ngrams(hypothesis, n))
        r = set(_ngrams(reference, n))
        add_h, add_r = h - s, r - s
        add_p = _ratio(add_h & add_r, add_h)
        add_rec = _ratio(add_h & add_r, add_r)
        add_f = 1.0 if not add_h and not add_r else _f1(add_p, add_rec)
        keep_h, keep_r = h & s, r & s
        keep_p = _ratio(keep_h & keep_r, keep_h)
        keep_rec = _ratio(keep_h & keep_r, keep_r)
        keep_f = 1.0 if not keep_h and not keep_r else _f1(keep_p, keep_rec)
        del_h, del_r = s - h, s - r
        del_p = _ratio(del_h & del_r, del_h)
        comps[f"add_f{n}"] = add_f
        comps[f"keep_f{n}"] = keep_f
        comps[f"del_p{n}"] = del_p
        total += (add_f + keep_f + del_p) / 3.0
    return MetricScore("sari", total / 4.0, comps)


def remote_score(requests_batch: list[ScoreRequest], provider_url: str,
                 metric_id: str = "remote", timeout: float = 30.0) -> list[MetricScore]:
    """Score a batch through the metric wire protocol.

    POST {provider_url}/v1/score with {metric_id, items:[{hyp, ref, src?}]}
    and expect {metric_id, values:[real]} index-aligned with the request.
    """
    items = []
    for req in requests_batch:
        item = {"hyp": " ".join(req.hypothesis), "ref": " ".join(req.reference)}
        if req.source is not None:
            item["src"] = " ".join(req.source)
        items.append(item)
    try:
        resp = requests.post(provider_url.rstrip("/") + "/v1/score",
                             json={"metric_id": metric_id, "items": items},
                             timeout=timeout)
        resp.raise_for_status()
        payload = resp.json()
    except requests.RequestException as exc:
        raise ProviderError(f"metric provider failed: {exc}",
                            payload=getattr(exc, "response", None)) from exc
    values = payload.get("values")
    if not isinstance(values, list) or len(values) != len(items):
        raise ProviderError("metric provider returned a misaligned response",
                            payload=payload)
    out = []
    for v in values:
        if not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
            raise ProviderError(f"metric provider value {v!r} outside [0,1]",
                                payload=payload)
        out.append(MetricScore(payload.get("metric_id", metric_id), float(v)))
    return out
