"""Criteria-specific text perturbations with exact magnitude accounting,
seeded determinism, and a replayable change log.

Magnitude semantics: the fraction of eligible edit sites altered, normalized
so the defined extreme (reversed order, all-sentence negation, deletion to a
single sentence, three added definitions) equals 100%. Counts use
round-half-up so 50% of 4 sites is exactly 2.

Every operation returns a PerturbedInstance whose change log, replayed
against the base text, reproduces the perturbed text byte-exactly, and whose
magnitude is recomputable from the log to within 1e-9.
"""

from __future__ import annotations

import json
import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from . import PlsevalError
from .corpus import segment_sentences, tokenize_with_spans, tokens_of
from .lexicon import DocFrequencyTable, LexiconBundle
from .lexfeat import pos_tag

_NUMERIC_RE = re.compile(r"^\d+(\.\d+)?$")


class PerturbError(PlsevalError):
    pass


class PerturbationKind(str, Enum):
    DELETE_SENTENCES = "delete_sentences"
    ADD_SENTENCES_OUT_DOMAIN = "add_sentences_out_domain"
    ADD_SENTENCES_IN_DOMAIN = "add_sentences_in_domain"
    ADD_DEFINITIONS = "add_definitions"
    REPLACE_SIMPLIFIED = "replace_simplified"
    REORDER_SENTENCES = "reorder_sentences"
    NUMBER_SWAP = "number_swap"
    VERB_SYNONYM_SWAP = "verb_synonym_swap"
    VERB_ANTONYM_SWAP = "verb_antonym_swap"
    ENTITY_SWAP = "entity_swap"
    NEGATE_SENTENCES = "negate_sentences"


CRITERION_OF = {
    PerturbationKind.DELETE_SENTENCES: "informativeness",
    PerturbationKind.ADD_SENTENCES_OUT_DOMAIN: "informativeness",
    PerturbationKind.ADD_SENTENCES_IN_DOMAIN: "informativeness",
    PerturbationKind.ADD_DEFINITIONS: "informativeness",
    PerturbationKind.REPLACE_SIMPLIFIED: "simplification",
    PerturbationKind.REORDER_SENTENCES: "coherence",
    PerturbationKind.NUMBER_SWAP: "faithfulness",
    PerturbationKind.VERB_SYNONYM_SWAP: "faithfulness",
    PerturbationKind.VERB_ANTONYM_SWAP: "faithfulness",
    PerturbationKind.ENTITY_SWAP: "faithfulness",
    PerturbationKind.NEGATE_SENTENCES: "faithfulness",
}


@dataclass
class ChangeRecord:
    op: str                  # insert | delete | replace | move
    unit: str                # sentence | token
    position: int
    before: str | None = None
    after: str | None = None


@dataclass
class PerturbedInstance:
    base_id: str
    kind: PerturbationKind
    magnitude_pct: float
    seed: int
    text: str
    changes: list[ChangeRecord] = field(default_factory=list)


@dataclass
class PerturbResources:
    """Lexicons and pools the individual perturbations draw on."""

    bundle: LexiconBundle | None = None
    out_pool: list[str] = field(default_factory=list)
    in_pool: list[str] = field(default_factory=list)
    background_df: DocFrequencyTable | None = None
    simple_map: dict[int, str] | None = None


def _rng(base_id: str, kind: PerturbationKind, target_pct: float, seed: int) -> random.Random:
    return random.Random(f"{base_id}|{kind.value}|{target_pct!r}|{seed}")


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def _sentences(text: str) -> list[str]:
    return [text[a:b] for a, b in segment_sentences(text)]


def replay_changes(base_text: str, changes: list[ChangeRecord]) -> str:
    """Apply a change log to the base text, reproducing the perturbed text.

    Runs of consecutive sentence ops share one sentence list: inserted
    sentences (e.g. lowercase definition templates) are kept as units even
    where re-segmenting the joined text would merge them.
    """
    text = base_text
    i = 0
    while i < len(changes):
        ch = changes[i]
        if ch.unit == "sentence":
            sents = _sentences(text)
            while i < len(changes) and changes[i].unit == "sentence":
                ch = changes[i]
                if ch.op == "insert":
                    sents.insert(ch.position, ch.after)
                elif ch.op == "delete":
                    del sents[ch.position]
                elif ch.op == "replace":
                    sents[ch.position] = ch.after
                elif ch.op == "move":
                    j = int(ch.after)
                    sents[ch.position], sents[j] = sents[j], sents[ch.position]
                else:
                    raise PerturbError(f"unknown sentence op {ch.op!r}")
                i += 1
            text = " ".join(sents)
        elif ch.unit == "token":
            spans = tokenize_with_spans(text)
            if ch.op == "replace":
                width = len(tokens_of(ch.before))
                a = spans[ch.position][1]
                b = spans[ch.position + width - 1][2]
                if text[a:b] != ch.before:
                    raise PerturbError(
                        f"change log does not match text at token {ch.position}")
                text = text[:a] + ch.after + text[b:]
            elif ch.op == "insert":
                a = spans[ch.position][1]
                text = text[:a] + ch.after + " " + text[a:]
            else:
                raise PerturbError(f"unknown token op {ch.op!r}")
            i += 1
        else:
            raise PerturbError(f"unknown change unit {ch.unit!r}")
    return text


def _finish(base_id, kind, magnitude, seed, base_text, changes) -> PerturbedInstance:
    return PerturbedInstance(base_id=base_id, kind=kind, magnitude_pct=magnitude,
                             seed=seed, text=replay_changes(base_text, changes),
                             changes=changes)


# --- informativeness -------------------------------------------------------

def _similarity_ranking(sent_tokens: list[list[str]]) -> list[int]:
    """Sentence indices ordered most-similar-to-the-rest first.

    Similarity is the term-frequency cosine between a sentence and the
    centroid (sum) of the remaining sentences; ties break to the lower index.
    """
    n = len(sent_tokens)
    counters = [Counter(toks) for toks in sent_tokens]
    total = Counter()
    for c in counters:
        total.update(c)
    sims = []
    for i, c in enumerate(counters):
        rest = total - c
        dot = sum(c[t] * rest[t] for t in c)
        na = math.sqrt(sum(v * v for v in c.values()))
        nb = math.sqrt(sum(v * v for v in rest.values()))
        sims.append(dot / (na * nb) if na and nb else 0.0)
    return sorted(range(n), key=lambda i: (-sims[i], i))


def delete_sentences(base_id: str, text: str, target_pct: float, seed: int,
                     resources: PerturbResources | None = None) -> PerturbedInstance:
    kind = PerturbationKind.DELETE_SENTENCES
    sents = _sentences(text)
    n = len(sents)
    if n < 1:
        raise PerturbError("hypothesis has no sentences")
    d = _round_half_up(target_pct / 100.0 * (n - 1))
    ranking = _similarity_ranking([tokens_of(s) for s in sents])[:d]
    changes: list[ChangeRecord] = []
    remaining = list(range(n))
    for orig in ranking:
        pos = remaining.index(orig)
        changes.append(ChangeRecord("delete", "sentence", pos, before=sents[orig]))
        remaining.pop(pos)
    magnitude = d / (n - 1) * 100.0 if n > 1 else 0.0
    return _finish(base_id, kind, magnitude, seed, text, changes)


def add_sentences(base_id: str, text: str, target_pct: float, seed: int,
                  pool: list[str], domain: str) -> PerturbedInstance:
    kind = (PerturbationKind.ADD_SENTENCES_IN_DOMAIN if domain == "in"
            else PerturbationKind.ADD_SENTENCES_OUT_DOMAIN)
    sents = _sentences(text)
    n = len(sents)
    if n < 1:
        raise PerturbError("hypothesis has no sentences")
    a = _round_half_up(target_pct / 100.0 * n)
    if a > len(pool):
        raise PerturbError(
            f"sentence pool too small: need {a}, have {len(pool)} "
            f"(short by {a - len(pool)})")
    rng = _rng(base_id, kind, target_pct, seed)
    picks = rng.sample(range(len(pool)), a)
    changes: list[ChangeRecord] = []
    size = n
    for idx in picks:
        pos = rng.randint(0, size)
        changes.append(ChangeRecord("insert", "sentence", pos, after=pool[idx]))
        size += 1
    return _finish(base_id, kind, a / n * 100.0, seed, text, changes)


def select_keywords(text: str, background_df: DocFrequencyTable,
                    limit: int = 20) -> list[str]:
    """Content keywords ranked by TF-IDF against the background corpus."""
    toks = tokens_of(text)
    tf = Counter(t for t in toks if len(t) > 2 and not _NUMERIC_RE.match(t))
    first_pos = {}
    for i, t in enumerate(toks):
        first_pos.setdefault(t, i)
    scored = []
    for tok, count in tf.items():
        idf = math.log((1 + background_df.total_docs) / (1 + background_df.df.get(tok, 0)))
        scored.append((tok, count * idf))
    scored.sort(key=lambda kv: (-kv[1], first_pos[kv[0]]))
    return [tok for tok, _ in scored[:limit]]


def add_definitions(base_id: str, text: str, target_pct: float, seed: int,
                    glossary: dict[str, str],
                    background_df: DocFrequencyTable) -> PerturbedInstance:
    kind = PerturbationKind.ADD_DEFINITIONS
    if not background_df.df:
        raise PerturbError("background document-frequency table is empty")
    k_target = min(_round_half_up(target_pct / 100.0 * 3), 3)
    covered = [kw for kw in select_keywords(text, background_df) if kw in glossary]
    k = min(k_target, len(covered))
    changes: list[ChangeRecord] = []
    current = _sentences(text)
    for kw in covered[:k]:
        mention = next((i for i, s in enumerate(current) if kw in tokens_of(s)), None)
        pos = len(current) if mention is None else mention + 1
        definition = f"{kw} means {glossary[kw]}."
        changes.append(ChangeRecord("insert", "sentence", pos, after=definition))
        current.insert(pos, definition)
    return _finish(base_id, kind, k / 3 * 100.0, seed, text, changes)


# --- simplification --------------------------------------------------------

def replace_simplified(base_id: str, text: str, target_pct: float, seed: int,
                       simple_map: dict[int, str]) -> PerturbedInstance:
    kind = PerturbationKind.REPLACE_SIMPLIFIED
    if not simple_map:
        raise PerturbError("simple_map is empty")
    sents = _sentences(text)
    for idx in simple_map:
        if not 0 <= idx < len(sents):
            raise PerturbError(f"simple_map index {idx} out of range")
    keys = sorted(simple_map)
    r = _round_half_up(target_pct / 100.0 * len(keys))
    rng = _rng(base_id, kind, target_pct, seed)
    chosen = sorted(rng.sample(keys, r))
    changes = [ChangeRecord("replace", "sentence", i, before=sents[i],
                            after=simple_map[i]) for i in chosen]
    return _finish(base_id, kind, r / len(keys) * 100.0, seed, text, changes)


# --- coherence -------------------------------------------------------------

def order_distance(original: list[int], shuffled: list[int]) -> float:
    """Total absolute displacement as a percentage of the reversal distance."""
    n = len(original)
    if sorted(original) != list(range(n)) or sorted(shuffled) != list(range(n)):
        raise PerturbError("inputs must be permutations of 0..n-1")
    if n <= 1:
        return 0.0
    pos_orig = {v: i for i, v in enumerate(original)}
    pos_shuf = {v: i for i, v in enumerate(shuffled)}
    dist = sum(abs(pos_shuf[v] - pos_orig[v]) for v in pos_orig)
    dmax = n * n // 2
    return dist / dmax * 100.0


def reorder_sentences(base_id: str, text: str, target_pct: float,
                      seed: int) -> PerturbedInstance:
    kind = PerturbationKind.REORDER_SENTENCES
    sents = _sentences(text)
    n = len(sents)
    if target_pct > 0 and n < 2:
        raise PerturbError("need at least 2 sentences to reorder")
    identity = list(range(n))
    changes: list[ChangeRecord] = []
    if target_pct <= 0 or n < 2:
        return _finish(base_id, kind, 0.0, seed, text, changes)
    if target_pct >= 100.0:
        swaps = [(i, n - 1 - i) for i in range(n // 2)]
    else:
        rng = _rng(base_id, kind, target_pct, seed)
        perm = list(identity)
        swaps = []
        for _ in range(10000):
            if order_distance(identity, perm) >= target_pct:
                break
            i, j = rng.sample(range(n), 2)
            perm[i], perm[j] = perm[j], perm[i]
            swaps.append((i, j))
        else:
            raise PerturbError("reorder failed to reach target magnitude")
    perm = list(identity)
    for i, j in swaps:
        changes.append(ChangeRecord("move", "sentence", i, after=str(j)))
        perm[i], perm[j] = perm[j], perm[i]
    magnitude = order_distance(identity, perm)
    return _finish(base_id, kind, magnitude, seed, text, changes)


# --- faithfulness ----------------------------------------------------------

def _numeric_token_indices(text: str) -> list[int]:
    return [i for i, (tok, _, _) in enumerate(tokenize_with_spans(text))
            if _NUMERIC_RE.match(tok)]


def _bump_number(token: str, delta: int) -> str:
    if "." in token:
        whole, frac = token.split(".", 1)
        return f"{int(whole) + delta}.{frac}"
    return str(int(token) + delta)


def swap_numbers(base_id: str, text: str, target_pct: float,
                 seed: int) -> PerturbedInstance:
    kind = PerturbationKind.NUMBER_SWAP
    eligible = _numeric_token_indices(text)
    if not eligible:
        return _finish(base_id, kind, 0.0, seed, text, [])
    s = _round_half_up(target_pct / 100.0 * len(eligible))
    rng = _rng(base_id, kind, target_pct, seed)
    chosen = sorted(rng.sample(eligible, s), reverse=True)
    spans = tokenize_with_spans(text)
    changes = []
    for idx in chosen:
        tok, a, b = spans[idx]
        delta = rng.randint(1, 5)
        changes.append(ChangeRecord("replace", "token", idx, before=text[a:b],
                                    after=_bump_number(tok, delta)))
    magnitude = s / len(eligible) * 100.0
    return _finish(base_id, kind, magnitude, seed, text, changes)


def _verb_eligible(text: str, bundle: LexiconBundle, mode: str) -> list[int]:
    spans = tokenize_with_spans(text)
    tags = pos_tag([t for t, _, _ in spans], bundle.pos)
    which = 0 if mode == "synonym" else 1
    out = []
    for i, ((tok, _, _), tag) in enumerate(zip(spans, tags)):
        if tag == "verb" and bundle.syn_ant.get(tok, ([], []))[which]:
            out.append(i)
    return out


def swap_verbs(base_id: str, text: str, target_pct: float, seed: int,
               bundle: LexiconBundle, mode: str) -> PerturbedInstance:
    if mode not in ("synonym", "antonym"):
        raise PerturbError(f"unknown verb swap mode {mode!r}")
    kind = (PerturbationKind.VERB_SYNONYM_SWAP if mode == "synonym"
            else PerturbationKind.VERB_ANTONYM_SWAP)
    eligible = _verb_eligible(text, bundle, mode)
    if not eligible:
        return _finish(base_id, kind, 0.0, seed, text, [])
    s = _round_half_up(target_pct / 100.0 * len(eligible))
    rng = _rng(base_id, kind, target_pct, seed)
    chosen = sorted(rng.sample(eligible, s), reverse=True)
    spans = tokenize_with_spans(text)
    which = 0 if mode == "synonym" else 1
    changes = []
    for idx in chosen:
        tok, a, b = spans[idx]
        choice = rng.choice(bundle.syn_ant[tok][which])
        changes.append(ChangeRecord("replace", "token", idx, before=text[a:b],
                                    after=choice))
    magnitude = s / len(eligible) * 100.0
    return _finish(base_id, kind, magnitude, seed, text, changes)


def _entity_matches(text: str, entities: dict[str, str]) -> list[tuple[int, int, str]]:
    """Maximal left-to-right non-overlapping entity matches.

    Returns (token index, token width, surface key) triples; only entities
    whose category has at least one alternative are eligible.
    """
    by_cat: dict[str, list[str]] = {}
    for surface, cat in entities.items():
        by_cat.setdefault(cat, []).append(surface)
    keyed = {tuple(tokens_of(s)): s for s in entities}
    max_len = max((len(k) for k in keyed), default=0)
    toks = [t for t, _, _ in tokenize_with_spans(text)]
    matches = []
    i = 0
    while i < len(toks):
        hit = None
        for width in range(min(max_len, len(toks) - i), 0, -1):
            key = tuple(toks[i:i + width])
            if key in keyed:
                surface = keyed[key]
                if len(by_cat[entities[surface]]) > 1:
                    hit = (i, width, surface)
                break
        if hit:
            matches.append(hit)
            i += hit[1]
        else:
            i += 1
    return matches


def swap_entities(base_id: str, text: str, target_pct: float, seed: int,
                  bundle: LexiconBundle) -> PerturbedInstance:
    kind = PerturbationKind.ENTITY_SWAP
    entities = bundle.entities
    matches = _entity_matches(text, entities)
    if not matches:
        return _finish(base_id, kind, 0.0, seed, text, [])
    s = _round_half_up(target_pct / 100.0 * len(matches))
    rng = _rng(base_id, kind, target_pct, seed)
    chosen = sorted(rng.sample(range(len(matches)), s), reverse=True)
    spans = tokenize_with_spans(text)
    by_cat: dict[str, list[str]] = {}
    for surface, cat in sorted(entities.items()):
        by_cat.setdefault(cat, []).append(surface)
    changes = []
    for mi in chosen:
        idx, width, surface = matches[mi]
        a = spans[idx][1]
        b = spans[idx + width - 1][2]
        others = [e for e in by_cat[entities[surface]] if e != surface]
        replacement = rng.choice(others)
        changes.append(ChangeRecord("replace", "token", idx, before=text[a:b],
                                    after=replacement))
    magnitude = s / len(matches) * 100.0
    return _finish(base_id, kind, magnitude, seed, text, changes)


def negate_sentences(base_id: str, text: str, target_pct: float, seed: int,
                     bundle: LexiconBundle) -> PerturbedInstance:
    kind = PerturbationKind.NEGATE_SENTENCES
    spans = tokenize_with_spans(text)
    tags = pos_tag([t for t, _, _ in spans], bundle.pos)
    sent_spans = segment_sentences(text)
    n = len(sent_spans)
    if n == 0:
        return _finish(base_id, kind, 0.0, seed, text, [])
    # first verb-tagged token of each sentence, by global token index
    first_verb: dict[int, int] = {}
    for si, (a, b) in enumerate(sent_spans):
        for ti, ((_, ta, _), tag) in enumerate(zip(spans, tags)):
            if a <= ta < b and tag == "verb":
                first_verb[si] = ti
                break
    g = _round_half_up(target_pct / 100.0 * n)
    rng = _rng(base_id, kind, target_pct, seed)
    order = list(range(n))
    rng.shuffle(order)
    selected = [si for si in order if si in first_verb][:g]
    changes = [ChangeRecord("insert", "token", first_verb[si], after="not")
               for si in sorted(selected, key=lambda s: -first_verb[s])]
    magnitude = len(selected) / n * 100.0
    return _finish(base_id, kind, magnitude, seed, text, changes)


# --- dispatch --------------------------------------------------------------

def apply_perturbation(kind: PerturbationKind, base_id: str, text: str,
                       target_pct: float, seed: int,
                       resources: PerturbResources) -> PerturbedInstance:
    if not 0.0 <= target_pct <= 100.0:
        raise PerturbError(f"target percentage {target_pct} outside [0,100]")
    if kind is PerturbationKind.DELETE_SENTENCES:
        return delete_sentences(base_id, text, target_pct, seed)
    if kind is PerturbationKind.ADD_SENTENCES_OUT_DOMAIN:
        return add_sentences(base_id, text, target_pct, seed, resources.out_pool, "out")
    if kind is PerturbationKind.ADD_SENTENCES_IN_DOMAIN:
        return add_sentences(base_id, text, target_pct, seed, resources.in_pool, "in")
    if kind is PerturbationKind.ADD_DEFINITIONS:
        return add_definitions(base_id, text, target_pct, seed,
                               resources.bundle.glossary, resources.background_df)
    if kind is PerturbationKind.REPLACE_SIMPLIFIED:
        return replace_simplified(base_id, text, target_pct, seed, resources.simple_map)
    if kind is PerturbationKind.REORDER_SENTENCES:
        return reorder_sentences(base_id, text, target_pct, seed)
    if kind is PerturbationKind.NUMBER_SWAP:
        return swap_numbers(base_id, text, target_pct, seed)
    if kind is PerturbationKind.VERB_SYNONYM_SWAP:
        return swap_verbs(base_id, text, target_pct, seed, resources.bundle, "synonym")
    if kind is PerturbationKind.VERB_ANTONYM_SWAP:
        return swap_verbs(base_id, text, target_pct, seed, resources.bundle, "antonym")
    if kind is PerturbationKind.ENTITY_SWAP:
        return swap_entities(base_id, text, target_pct, seed, resources.bundle)
    if kind is PerturbationKind.NEGATE_SENTENCES:
        return negate_sentences(base_id, text, target_pct, seed, resources.bundle)
    raise PerturbError(f"unknown perturbation kind {kind!r}")


def perturbation_series(base_id: str, text: str, kind: PerturbationKind,
                        levels: list[float], seeds: list[int],
                        resources: PerturbResources) -> list[PerturbedInstance]:
    """Cartesian product of levels x seeds; level 0 is the unperturbed base."""
    out = []
    for seed in seeds:
        for level in levels:
            out.append(apply_perturbation(kind, base_id, text, level, seed, resources))
    return out


def recompute_magnitude(instance: PerturbedInstance, base_text: str,
                        resources: PerturbResources) -> float:
    """Recompute magnitude_pct from the change log per the kind's formula."""
    kind = instance.kind
    n = len(segment_sentences(base_text))
    changes = instance.changes
    if kind is PerturbationKind.DELETE_SENTENCES:
        d = sum(1 for c in changes if c.op == "delete")
        return d / (n - 1) * 100.0 if n > 1 else 0.0
    if kind in (PerturbationKind.ADD_SENTENCES_OUT_DOMAIN,
                PerturbationKind.ADD_SENTENCES_IN_DOMAIN):
        a = sum(1 for c in changes if c.op == "insert")
        return a / n * 100.0
    if kind is PerturbationKind.ADD_DEFINITIONS:
        return sum(1 for c in changes if c.op == "insert") / 3 * 100.0
    if kind is PerturbationKind.REPLACE_SIMPLIFIED:
        r = sum(1 for c in changes if c.op == "replace")
        return r / len(resources.simple_map) * 100.0
    if kind is PerturbationKind.REORDER_SENTENCES:
        perm = list(range(n))
        for c in changes:
            j = int(c.after)
            perm[c.position], perm[j] = perm[j], perm[c.position]
        return order_distance(list(range(n)), perm)
    if kind is PerturbationKind.NUMBER_SWAP:
        eligible = len(_numeric_token_indices(base_text))
        s = sum(1 for c in changes if c.op == "replace")
        return s / eligible * 100.0 if eligible else 0.0
    if kind in (PerturbationKind.VERB_SYNONYM_SWAP, PerturbationKind.VERB_ANTONYM_SWAP):
        mode = "synonym" if kind is PerturbationKind.VERB_SYNONYM_SWAP else "antonym"
        eligible = len(_verb_eligible(base_text, resources.bundle, mode))
        s = sum(1 for c in changes if c.op == "replace")
        return s / eligible * 100.0 if eligible else 0.0
    if kind is PerturbationKind.ENTITY_SWAP:
        eligible = len(_entity_matches(base_text, resources.bundle.entities))
        s = sum(1 for c in changes if c.op == "replace")
        return s / eligible * 100.0 if eligible else 0.0
    if kind is PerturbationKind.NEGATE_SENTENCES:
        g = sum(1 for c in changes if c.op == "insert")
        return g / n * 100.0 if n else 0.0
    raise PerturbError(f"unknown perturbation kind {kind!r}")


# --- serialization ---------------------------------------------------------

def instance_to_record(inst: PerturbedInstance) -> dict:
    return {
        "base_id": inst.base_id,
        "kind": inst.kind.value,
        "magnitude_pct": inst.magnitude_pct,
        "seed": inst.seed,
        "text": inst.text,
        "changes": [{"op": c.op, "unit": c.unit, "position": c.position,
                     "before": c.before, "after": c.after} for c in inst.changes],
    }


def record_to_instance(rec: dict) -> PerturbedInstance:
    return PerturbedInstance(
        base_id=rec["base_id"],
        kind=PerturbationKind(rec["kind"]),
        magnitude_pct=rec["magnitude_pct"],
        seed=rec["seed"],
        text=rec["text"],
        changes=[ChangeRecord(**c) for c in rec["changes"]],
    )


def save_instances(instances: list[PerturbedInstance], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_record(inst), sort_keys=True,
                                ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def load_instances(path) -> list[PerturbedInstance]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(record_to_instance(json.loads(line)))
    return out
