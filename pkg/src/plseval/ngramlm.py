"""Interpolated Kneser-Ney n-gram language model and perplexity providers.

The model is the desk-scale stand-in for the neural in-domain and
out-of-domain LMs: any provider returning a positive, finite, per-token
normalized perplexity satisfies the normalized-difference metric's contract.

Conventions (pinned for bit-exactness): natural log throughout; one </s>
predicted per sentence and included in the token count; <s> context padding
excluded from the count; population discount D_k = n1/(n1 + 2*n2) from the
counts-of-counts at order k.
"""

from __future__ import annotations

import math
import struct
from collections import Counter

import requests

from . import PlsevalError, ProviderError
from .corpus import TokenizedText, tokenize

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

_MAGIC = b"PLSKNLM\x01"
_VERSION = 1


class NGramModel:
    """Immutable interpolated-KN model over explicit count tables."""

    def __init__(self, order: int, vocab: set[str],
                 counts: dict[int, dict[tuple, int]],
                 discounts: list[float]):
        if order < 1:
            raise PlsevalError(f"order must be >= 1, got {order}")
        if len(discounts) != order:
            raise PlsevalError("need one discount per order")
        for d in discounts:
            if not 0.0 < d < 1.0:
                raise PlsevalError(f"discount {d} outside (0,1)")
        self.order = order
        self.vocab = frozenset(vocab)
        self.counts = {k: dict(v) for k, v in counts.items()}
        self.discounts = list(discounts)
        self._build_tables()

    def _build_tables(self):
        n = self.order
        top = self.counts.get(n, {})
        # highest order: raw context totals and distinct-follower counts
        self._ctx_total: dict[tuple, int] = {}
        self._ctx_followers: dict[tuple, int] = {}
        for gram in top:
            ctx = gram[:-1]
            self._ctx_total[ctx] = self._ctx_total.get(ctx, 0) + top[gram]
            self._ctx_followers[ctx] = self._ctx_followers.get(ctx, 0) + 1
        # continuation structures for each lower level k (gram length k)
        self._cont: dict[int, dict[tuple, int]] = {}
        self._cont_den: dict[int, dict[tuple, int]] = {}
        self._cont_followers: dict[int, dict[tuple, int]] = {}
        for k in range(1, n):
            higher = self.counts.get(k + 1, {})
            cont: dict[tuple, int] = {}
            for gram in higher:
                cont[gram[1:]] = cont.get(gram[1:], 0) + 1
            den: dict[tuple, int] = {}
            fol: dict[tuple, int] = {}
            for gram, c in cont.items():
                ctx = gram[:-1]
                den[ctx] = den.get(ctx, 0) + c
                fol[ctx] = fol.get(ctx, 0) + 1
            self._cont[k] = cont
            self._cont_den[k] = den
            self._cont_followers[k] = fol
        self._uni_total = sum(self.counts.get(1, {}).values())

    def _map(self, token: str) -> str:
        if token in self.vocab:
            return token
        return UNK if UNK in self.vocab else token

    def prob(self, context: tuple[str, ...] | list[str], token: str) -> float:
        """Interpolated KN probability of ``token`` after ``context``.

        Conditional distributions over the vocabulary sum to 1 (+-1e-9).
        Unknown tokens are routed through <unk> when present.
        """
        token = self._map(token)
        ctx = tuple(self._map(t) for t in context)[-(self.order - 1):] if self.order > 1 else ()
        return self._p(len(ctx) + 1, ctx, token)

    def _p(self, k: int, ctx: tuple, w: str) -> float:
        d = self.discounts[k - 1]
        if k == 1:
            if self.order == 1:
                table = self.counts.get(1, {})
                total = self._uni_total
                types = len(table)
                if total == 0:
                    return 1.0 / max(len(self.vocab), 1)
                uniform = 1.0 / len(self.vocab)
                return (max(table.get((w,), 0) - d, 0.0) / total
                        + d * types / total * uniform)
            cont = self._cont[1]
            total = self._cont_den[1].get((), 0)
            types = self._cont_followers[1].get((), 0)
            if total == 0:
                return 1.0 / max(len(self.vocab), 1)
            uniform = 1.0 / len(self.vocab)
            return (max(cont.get((w,), 0) - d, 0.0) / total
                    + d * types / total * uniform)
        if k == self.order:
            table = self.counts.get(k, {})
            den = self._ctx_total.get(ctx, 0)
            if den == 0:
                return self._p(k - 1, ctx[1:], w)
            lam = d * self._ctx_followers[ctx] / den
            return max(table.get(ctx + (w,), 0) - d, 0.0) / den + lam * self._p(k - 1, ctx[1:], w)
        cont = self._cont[k]
        den = self._cont_den[k].get(ctx, 0)
        if den == 0:
            return self._p(k - 1, ctx[1:], w)
        lam = d * self._cont_followers[k][ctx] / den
        return max(cont.get(ctx + (w,), 0) - d, 0.0) / den + lam * self._p(k - 1, ctx[1:], w)

    def sentence_logprob(self, tokens: list[str]) -> tuple[float, int]:
        """(sum of natural-log probs, token count) for one sentence.

        Predicts every token plus one </s>; <s> padding is context only.
        """
        padded = [BOS] * (self.order - 1) + [self._map(t) for t in tokens] + [EOS]
        logp = 0.0
        start = self.order - 1
        for i in range(start, len(padded)):
            ctx = tuple(padded[i - self.order + 1:i])
            p = self._p(len(ctx) + 1, ctx, padded[i])
            if p <= 0.0:
                raise PlsevalError(f"zero probability for token {padded[i]!r}")
            logp += math.log(p)
        return logp, len(tokens) + 1


def _discount(counter: Counter) -> float:
    cc = Counter(counter.values())
    n1, n2 = cc.get(1, 0), cc.get(2, 0)
    if n1 + 2 * n2 == 0:
        return 0.5
    return min(max(n1 / (n1 + 2 * n2), 0.01), 0.99)


def train(corpus: list[TokenizedText], order: int = 3, min_count: int = 2) -> NGramModel:
    """Train an interpolated-KN model; tokens below min_count become <unk>."""
    if order < 1:
        raise PlsevalError(f"order must be >= 1, got {order}")
    sentences: list[list[str]] = []
    for tt in corpus:
        prev = 0
        for b in tt.sentence_breaks:
            sent = tt.tokens[prev:b]
            if sent:
                sentences.append(sent)
            prev = b
    if not sentences:
        raise PlsevalError("training corpus is empty")
    freq = Counter(t for s in sentences for t in s)
    keep = {t for t, c in freq.items() if c >= min_count}
    has_unk = len(keep) < len(freq)
    vocab = set(keep) | {EOS}
    if has_unk:
        vocab.add(UNK)
    if order > 1:
        vocab.add(BOS)
    counts: dict[int, Counter] = {k: Counter() for k in range(1, order + 1)}
    for sent in sentences:
        mapped = [t if t in keep else UNK for t in sent]
        padded = [BOS] * (order - 1) + mapped + [EOS]
        for k in range(1, order + 1):
            lo = max(order - k, 0) if k < order else 0
            for i in range(lo, len(padded) - k + 1):
                counts[k][tuple(padded[i:i + k])] += 1
    discounts = [_discount(counts[k]) for k in range(1, order + 1)]
    return NGramModel(order, vocab, {k: dict(v) for k, v in counts.items()}, discounts)


def perplexity_of(model: NGramModel, text: TokenizedText) -> float:
    """exp of the mean negative log probability per token (incl. </s>)."""
    if not text.tokens:
        raise PlsevalError("cannot compute perplexity of empty text")
    logs: list[float] = []
    total_n = 0
    prev = 0
    breaks = text.sentence_breaks or [len(text.tokens)]
    for b in breaks:
        sent = text.tokens[prev:b]
        prev = b
        if not sent:
            continue
        lp, n = model.sentence_logprob(sent)
        logs.append(lp)
        total_n += n
    return math.exp(-math.fsum(logs) / total_n)


class LocalNgramProvider:
    """PPL provider backed by an in-process n-gram model."""

    kind = "local-ngram"

    def __init__(self, provider_id: str, model: NGramModel):
        self.provider_id = provider_id
        self.model = model

    def perplexity(self, text: str) -> float:
        return perplexity_of(self.model, tokenize(text))

    def perplexity_batch(self, texts: list[str]) -> list[float]:
        return [self.perplexity(t) for t in texts]


class RemotePplProvider:
    """PPL provider speaking the perplexity wire protocol.

    POST {url}/v1/perplexity {model_id, texts:[...]} -> {model_id, ppls:[...]}.
    """

    kind = "remote"

    def __init__(self, url: str, model_id: str, timeout: float = 60.0):
        self.url = url.rstrip("/")
        self.model_id = model_id
        self.provider_id = f"remote:{model_id}"
        self.timeout = timeout

    def perplexity(self, text: str) -> float:
        return self.perplexity_batch([text])[0]

    def perplexity_batch(self, texts: list[str]) -> list[float]:
        try:
            resp = requests.post(self.url + "/v1/perplexity",
                                 json={"model_id": self.model_id, "texts": list(texts)},
                                 timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
        except requests.RequestException as exc:
            raise ProviderError(f"ppl provider failed: {exc}",
                                payload=getattr(exc, "response", None)) from exc
        ppls = payload.get("ppls")
        if not isinstance(ppls, list) or len(ppls) != len(texts):
            raise ProviderError("ppl provider returned a misaligned response",
                                payload=payload)
        for p in ppls:
            if not isinstance(p, (int, float)) or not (p > 0 and math.isfinite(p)):
                raise ProviderError(f"ppl provider value {p!r} not positive finite",
                                    payload=payload)
        return [float(p) for p in ppls]


def list_remote_models(url: str, timeout: float = 30.0) -> list[str]:
    try:
        resp = requests.get(url.rstrip("/") + "/v1/models", timeout=timeout)
        resp.raise_for_status()
        payload = resp.json()
    except requests.RequestException as exc:
        raise ProviderError(f"ppl provider failed: {exc}") from exc
    return list(payload.get("models", []))


def save_model(model: NGramModel, path) -> None:
    """Versioned binary container: magic, order, vocab table, count tables."""
    vocab = sorted(model.vocab)
    index = {t: i for i, t in enumerate(vocab)}
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HB", _VERSION, model.order))
        for d in model.discounts:
            fh.write(struct.pack("<d", d))
        fh.write(struct.pack("<I", len(vocab)))
        for tok in vocab:
            raw = tok.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        for k in range(1, model.order + 1):
            table = model.counts.get(k, {})
            fh.write(struct.pack("<Q", len(table)))
            for gram in sorted(table):
                fh.write(struct.pack(f"<{k}I", *(index[t] for t in gram)))
                fh.write(struct.pack("<Q", table[gram]))


def load_model(path) -> NGramModel:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        if data[:8] != _MAGIC:
            raise PlsevalError(f"{path}: not a model file (bad magic)")
        off = 8
        version, order = struct.unpack_from("<HB", data, off)
        if version != _VERSION:
            raise PlsevalError(
                f"{path}: model version {version}, supported version {_VERSION}")
        off += 3
        discounts = list(struct.unpack_from(f"<{order}d", data, off))
        off += 8 * order
        (vsize,) = struct.unpack_from("<I", data, off)
        off += 4
        vocab = []
        for _ in range(vsize):
            (ln,) = struct.unpack_from("<H", data, off)
            off += 2
            vocab.append(data[off:off + ln].decode("utf-8"))
            off += ln
        counts: dict[int, dict[tuple, int]] = {}
        for k in range(1, order + 1):
            (nent,) = struct.unpack_from("<Q", data, off)
            off += 8
            table: dict[tuple, int] = {}
            for _ in range(nent):
                ids = struct.unpack_from(f"<{k}I", data, off)
                off += 4 * k
                (c,) = struct.unpack_from("<Q", data, off)
                off += 8
                table[tuple(vocab[i] for i in ids)] = c
            counts[k] = table
        if off != len(data):
            raise PlsevalError(f"{path}: trailing bytes in model file")
    except struct.error as exc:
        raise PlsevalError(f"{path}: truncated model file") from exc
    return NGramModel(order, set(vocab), counts, discounts)
