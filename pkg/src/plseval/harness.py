"""Meta-evaluation: bin perturbation series into 10 magnitude bins, test
expected-direction sensitivity with Spearman rank correlation, correct with
the Holm step-down procedure, and emit deterministic JSON/CSV reports."""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field

from scipy import stats as _scipy_stats

from . import PlsevalError, __version__
from .perturb import PerturbationKind

ALPHA_DEFAULT = 0.05
FLAT_RHO_BAND = 0.2

# Median reported metric improvements in the surveyed ACL'22 summarization
# and generation papers; attached to reports as context for effect sizes.
CONTEXT_DELTAS = {
    "rouge": 0.89,
    "bleu": 0.69,
    "ppl": -2.06,
    "meteor": 0.50,
    "bertscore": 0.55,
    "sari": 1.71,
}

# Metrics whose scores mean "simpler is higher"; they are expected to rise
# under simplification replacement while overlap metrics fall.
SIMPLICITY_METRICS = {"pomme"}

# [0,1]-ranged metrics presented on the conventional 0-100 scale in the CSV.
PRESENTATION_X100 = {"rouge", "bleu", "meteor", "sari"}

_KIND_DIRECTION = {
    PerturbationKind.DELETE_SENTENCES: "down",
    PerturbationKind.ADD_SENTENCES_OUT_DOMAIN: "down",
    PerturbationKind.ADD_SENTENCES_IN_DOMAIN: "down",
    PerturbationKind.ADD_DEFINITIONS: "up",
    PerturbationKind.REPLACE_SIMPLIFIED: "up",  # simplicity metrics; see below
    PerturbationKind.REORDER_SENTENCES: "down",
    PerturbationKind.NUMBER_SWAP: "down",
    PerturbationKind.VERB_SYNONYM_SWAP: "flat",
    PerturbationKind.VERB_ANTONYM_SWAP: "down",
    PerturbationKind.ENTITY_SWAP: "down",
    PerturbationKind.NEGATE_SENTENCES: "down",
}


class HarnessError(PlsevalError):
    pass


def expected_direction(metric_id: str, kind: PerturbationKind,
                       simplicity_metrics: set[str] = SIMPLICITY_METRICS) -> str:
    if kind is PerturbationKind.REPLACE_SIMPLIFIED:
        return "up" if metric_id in simplicity_metrics else "down"
    return _KIND_DIRECTION[kind]


@dataclass
class ScoredInstance:
    base_id: str
    kind: PerturbationKind
    magnitude_pct: float
    seed: int
    metric_id: str
    value: float


@dataclass
class Bin:
    center: float
    mean: float | None
    count: int


@dataclass
class SensitivityReport:
    metric_id: str
    kind: PerturbationKind
    bins: list[Bin]
    rho: float
    p_raw: float
    p_holm: float
    direction_expected: str
    verdict: str
    degenerate: bool = False
    n_pairs: int = 0


def bin_index(magnitude: float) -> int:
    """Bin i covers (10i, 10(i+1)]; magnitude 0 falls in bin 0."""
    if magnitude <= 10.0:
        return 0
    return min(9, math.ceil(magnitude / 10.0) - 1)


def bin_scores(pairs: list[tuple[float, float]]) -> list[Bin]:
    """Average (magnitude, score) pairs in 10 equal magnitude bins.

    Empty bins are flagged with count 0 and mean None.
    """
    sums = [0.0] * 10
    counts = [0] * 10
    for magnitude, score in pairs:
        if not 0.0 <= magnitude <= 100.0:
            raise HarnessError(f"magnitude {magnitude} outside [0,100]")
        i = bin_index(magnitude)
        sums[i] += score
        counts[i] += 1
    return [Bin(center=10.0 * i + 5.0,
                mean=sums[i] / counts[i] if counts[i] else None,
                count=counts[i]) for i in range(10)]


def _ranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(x: list[float], y: list[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return 0.0
    return sxy / math.sqrt(sxx * syy)


def spearman(pairs: list[tuple[float, float]]) -> tuple[float, float, bool]:
    """Rank correlation with average ranks on ties.

    Returns (rho, two-sided p, degenerate flag). p uses the normal
    approximation z = rho*sqrt(N-1) for N >= 10 and exact permutation below.
    Constant series are degenerate: rho 0, p 1.
    """
    n = len(pairs)
    if n < 3:
        raise HarnessError("spearman needs at least 3 pairs")
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        return 0.0, 1.0, True
    rx = _ranks(xs)
    ry = _ranks(ys)
    rho = _pearson(rx, ry)
    if n >= 10:
        z = abs(rho) * math.sqrt(n - 1)
        p = math.erfc(z / math.sqrt(2.0))
    else:
        observed = abs(rho)
        hits = total = 0
        for perm in itertools.permutations(ry):
            total += 1
            if abs(_pearson(rx, list(perm))) >= observed - 1e-12:
                hits += 1
        p = hits / total
    return rho, min(p, 1.0), False


def paired_delta_test(scores_at_zero: list[float],
                      scores_at_level: list[float]) -> tuple[float, bool]:
    """Two-sided Wilcoxon signed-rank p on per-instance deltas.

    Inputs are paired by position (same base ids in the same order).
    Returns (p, degenerate flag); all-zero deltas are degenerate with p 1.
    """
    if len(scores_at_zero) != len(scores_at_level):
        raise HarnessError("paired samples differ in length")
    if len(scores_at_zero) < 6:
        raise HarnessError("paired test needs at least 6 pairs")
    deltas = [b - a for a, b in zip(scores_at_zero, scores_at_level)]
    if all(d == 0 for d in deltas):
        return 1.0, True
    res = _scipy_stats.wilcoxon(deltas, alternative="two-sided", method="auto")
    return float(res.pvalue), False


def holm_correct(p_values: list[float], alpha: float = ALPHA_DEFAULT
                 ) -> tuple[list[bool], list[float]]:
    """Holm step-down correction.

    Returns rejection flags and adjusted p values in input order. Adjusted
    p_(i) = max over j <= i of min(1, (m-j+1) * p_(j)); rejections are the
    prefix of sorted p values passing their stepwise thresholds.
    """
    m = len(p_values)
    for p in p_values:
        if not 0.0 <= p <= 1.0:
            raise HarnessError(f"p value {p} outside [0,1]")
    order = sorted(range(m), key=lambda i: p_values[i])
    adjusted = [0.0] * m
    rejected = [False] * m
    running = 0.0
    still_rejecting = True
    for rank, idx in enumerate(order):
        running = max(running, min(1.0, (m - rank) * p_values[idx]))
        adjusted[idx] = running
        if still_rejecting and p_values[idx] <= alpha / (m - rank):
            rejected[idx] = True
        else:
            still_rejecting = False
    return rejected, adjusted


def _verdict(direction: str, rho: float, p_holm: float, degenerate: bool,
             alpha: float) -> str:
    if direction == "flat":
        return "correctly-flat" if (abs(rho) < FLAT_RHO_BAND or p_holm >= alpha) \
            else "sensitive"
    if degenerate or p_holm >= alpha or rho == 0.0:
        return "insensitive"
    sign_ok = (rho > 0) if direction == "up" else (rho < 0)
    return "sensitive" if sign_ok else "wrong-direction"


def evaluate(scored: list[ScoredInstance], alpha: float = ALPHA_DEFAULT,
             simplicity_metrics: set[str] = SIMPLICITY_METRICS
             ) -> list[SensitivityReport]:
    """Per (metric, kind): bins, Spearman rho, Holm-corrected p across the
    metric's perturbation family, expected direction, verdict."""
    if not scored:
        raise HarnessError("no scored instances to evaluate")
    scored = sorted(scored, key=lambda s: (s.metric_id, s.kind.value, s.base_id,
                                           s.magnitude_pct, s.seed))
    grouped: dict[tuple[str, PerturbationKind], list[tuple[float, float]]] = {}
    for s in scored:
        grouped.setdefault((s.metric_id, s.kind), []).append(
            (s.magnitude_pct, s.value))
    reports: list[SensitivityReport] = []
    by_metric: dict[str, list[SensitivityReport]] = {}
    for (metric_id, kind), pairs in sorted(grouped.items(),
                                           key=lambda kv: (kv[0][0], kv[0][1].value)):
        rho, p_raw, degenerate = spearman(pairs)
        rep = SensitivityReport(
            metric_id=metric_id, kind=kind, bins=bin_scores(pairs),
            rho=rho, p_raw=p_raw, p_holm=p_raw,
            direction_expected=expected_direction(metric_id, kind, simplicity_metrics),
            verdict="", degenerate=degenerate, n_pairs=len(pairs))
        reports.append(rep)
        by_metric.setdefault(metric_id, []).append(rep)
    for metric_reports in by_metric.values():
        _, adjusted = holm_correct([r.p_raw for r in metric_reports])
        for rep, p_holm in zip(metric_reports, adjusted):
            rep.p_holm = p_holm
            rep.verdict = _verdict(rep.direction_expected, rep.rho, p_holm,
                                   rep.degenerate, alpha)
    return reports


def report_to_dict(rep: SensitivityReport) -> dict:
    return {
        "metric_id": rep.metric_id,
        "kind": rep.kind.value,
        "bins": [{"center": b.center, "mean": b.mean, "count": b.count}
                 for b in rep.bins],
        "rho": rep.rho,
        "p_raw": rep.p_raw,
        "p_holm": rep.p_holm,
        "direction_expected": rep.direction_expected,
        "verdict": rep.verdict,
        "degenerate": rep.degenerate,
        "n_pairs": rep.n_pairs,
    }


def write_reports(reports: list[SensitivityReport], json_path, csv_path,
                  config_digest: str, seeds: list[int], alpha: float,
                  mode: str = "normal") -> None:
    """Machine-readable JSON plus a CSV with one row per metric x kind x bin.

    Output is byte-deterministic for identical inputs: fixed ordering, no
    timestamps. Presentation scores are scaled by 100 in the CSV.
    """
    payload = {
        "tool_version": __version__,
        "config_digest": config_digest,
        "seeds": list(seeds),
        "alpha": alpha,
        "mode": mode,
        "flat_rho_band": FLAT_RHO_BAND,
        "context_deltas": CONTEXT_DELTAS,
        "reports": [report_to_dict(r) for r in reports],
    }
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric_id", "kind", "bin_center", "bin_mean",
                         "bin_count", "rho", "p_holm", "direction_expected",
                         "verdict"])
        for rep in reports:
            scale = 100.0 if rep.metric_id in PRESENTATION_X100 else 1.0
            for b in rep.bins:
                mean = "" if b.mean is None else f"{b.mean * scale:.6f}"
                writer.writerow([rep.metric_id, rep.kind.value, b.center, mean,
                                 b.count, f"{rep.rho:.6f}", f"{rep.p_holm:.6g}",
                                 rep.direction_expected, rep.verdict])
