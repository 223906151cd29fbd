"""Normalized perplexity-difference simplicity score.

The score Z-normalizes log-perplexities from an in-domain and an
out-of-domain language model against a fixed reference corpus and takes
their difference; higher means simpler. Reference statistics are the mean
and population standard deviation of natural-log perplexities, so each Z is
a standard z-score in log space.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

from . import PlsevalError


class PommeError(PlsevalError):
    pass


@dataclass
class ReferenceStats:
    ref_id: str
    provider_id_id: str
    provider_id_ood: str
    mu_id: float
    sigma_id: float
    mu_ood: float
    sigma_ood: float
    manifest_digest: str = ""


@dataclass
class PommeScore:
    value: float
    z_id: float
    z_ood: float
    ppl_id: float
    ppl_ood: float


def manifest_digest(texts: list[str]) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode("utf-8"))
        h.update(b"\x00")
    return h.hexdigest()


def _mean_std(values: list[float]) -> tuple[float, float]:
    mu = math.fsum(values) / len(values)
    var = math.fsum((v - mu) ** 2 for v in values) / len(values)
    return mu, math.sqrt(var)


def fit_reference(reference_texts: list[str], id_provider, ood_provider,
                  ref_id: str = "reference") -> ReferenceStats:
    """Per-provider mean/std of natural-log perplexities over the reference
    corpus (population std). Degenerate zero-variance references are
    rejected."""
    if len(reference_texts) < 2:
        raise PommeError("reference corpus needs at least 2 texts")
    logs_id = [math.log(p) for p in id_provider.perplexity_batch(reference_texts)]
    logs_ood = [math.log(p) for p in ood_provider.perplexity_batch(reference_texts)]
    mu_id, sigma_id = _mean_std(logs_id)
    mu_ood, sigma_ood = _mean_std(logs_ood)
    if sigma_id == 0.0 or sigma_ood == 0.0:
        raise PommeError("zero variance over the reference corpus (degenerate reference)")
    return ReferenceStats(
        ref_id=ref_id,
        provider_id_id=id_provider.provider_id,
        provider_id_ood=ood_provider.provider_id,
        mu_id=mu_id, sigma_id=sigma_id, mu_ood=mu_ood, sigma_ood=sigma_ood,
        manifest_digest=manifest_digest(reference_texts))


def zscore(ppl: float, mu: float, sigma: float) -> float:
    if not ppl > 0:
        raise PommeError(f"perplexity must be positive, got {ppl}")
    if not sigma > 0:
        raise PommeError(f"sigma must be positive, got {sigma}")
    return (math.log(ppl) - mu) / sigma


def pomme(text: str, id_provider, ood_provider, stats: ReferenceStats) -> PommeScore:
    """Z(PPL in-domain) - Z(PPL out-of-domain); higher means simpler."""
    if (id_provider.provider_id != stats.provider_id_id
            or ood_provider.provider_id != stats.provider_id_ood):
        raise PommeError(
            f"provider mismatch: stats fitted with "
            f"({stats.provider_id_id}, {stats.provider_id_ood}), got "
            f"({id_provider.provider_id}, {ood_provider.provider_id})")
    ppl_id = id_provider.perplexity(text)
    ppl_ood = ood_provider.perplexity(text)
    return pomme_from_ppls(ppl_id, ppl_ood, stats)


def pomme_from_ppls(ppl_id: float, ppl_ood: float, stats: ReferenceStats) -> PommeScore:
    z_id = zscore(ppl_id, stats.mu_id, stats.sigma_id)
    z_ood = zscore(ppl_ood, stats.mu_ood, stats.sigma_ood)
    return PommeScore(value=z_id - z_ood, z_id=z_id, z_ood=z_ood,
                      ppl_id=ppl_id, ppl_ood=ppl_ood)


def save_stats(stats: ReferenceStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({
            "ref_id": stats.ref_id,
            "provider_id_id": stats.provider_id_id,
            "provider_id_ood": stats.provider_id_ood,
            "mu_id": stats.mu_id, "sigma_id": stats.sigma_id,
            "mu_ood": stats.mu_ood, "sigma_ood": stats.sigma_ood,
            "manifest_digest": stats.manifest_digest,
        }, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_stats(path) -> ReferenceStats:
    with open(path, encoding="utf-8") as fh:
        return ReferenceStats(**json.load(fh))
