"""Set-based scoring against dual-tier ground truth, plus variance stats."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError

__all__ = [
    "MODES",
    "GroundTruth",
    "ScoreReport",
    "RunStats",
    "normalize_row",
    "score",
    "macro_f1",
    "repeat_stats",
]

MODES = ("strict", "lenient")


@dataclass(frozen=True)
class GroundTruth:
    """Required rows and acceptable-but-not-required rows for one query."""

    query_id: str
    must_contain: frozenset[str]
    may_contain: frozenset[str] = frozenset()

    def __post_init__(self):
        overlap = self.must_contain & self.may_contain
        if overlap:
            raise InputError(f"query {self.query_id}: rows in both tiers: {sorted(overlap)[:3]}")


@dataclass(frozen=True)
class ScoreReport:
    """Counts and derived metrics for one (returned, truth, mode) triple."""

    mode: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class RunStats:
    """Aggregates over a queries x runs F1 matrix (lists align to the
    caller's query order)."""

    per_query_mean: tuple[float, ...]
    per_query_std: tuple[float, ...]
    macro_f1: float
    median_sigma: float


def normalize_row(raw: str) -> str:
    """Strip the ends and collapse internal whitespace runs; case kept."""
    return " ".join(raw.split())


def _report(mode: str, tp: int, fp: int, fn: int) -> ScoreReport:
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ScoreReport(mode=mode, tp=tp, fp=fp, fn=fn, precision=precision, recall=recall, f1=f1)


def score(
    returned: Iterable[str],
    truth: GroundTruth,
    mode: str = "strict",
    strict_may_neutral: bool = False,
) -> ScoreReport:
    """Set-semantics scoring: rows are normalized, deduplicated, and empty
    rows dropped before comparison.

    strict counts a returned row as TP only when it is in must_contain;
    lenient also accepts may_contain.  Missing may rows are never FN.  By
    default strict counts returned may rows as FP (the literal reading);
    strict_may_neutral=True instead ignores them entirely.
    """
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    rows = {normalize_row(r) for r in returned}
    rows.discard("")
    must, may = truth.must_contain, truth.may_contain
    if mode == "strict":
        tp = len(rows & must)
        fp_rows = rows - must
        if strict_may_neutral:
            fp_rows -= may
        fp = len(fp_rows)
    else:
        accepted = must | may
        tp = len(rows & accepted)
        fp = len(rows - accepted)
    fn = len(must - rows)
    return _report(mode, tp, fp, fn)


def macro_f1(reports: Sequence[ScoreReport]) -> float:
    """Unweighted mean of per-query F1."""
    if not reports:
        raise InputError("macro_f1 over an empty report list")
    return statistics.fmean(report.f1 for report in reports)


def repeat_stats(per_query_f1_by_run: Sequence[Sequence[float]]) -> RunStats:
    """Per-query mean and sample std (divisor N-1) over repeated runs.

    macro_f1 is the mean of per-query means; median_sigma the median of
    per-query stds.  Rows must be equal length >= 2.
    """
    if not per_query_f1_by_run:
        raise InputError("repeat_stats over an empty matrix")
    runs = len(per_query_f1_by_run[0])
    if runs < 2:
        raise InputError("repeat_stats needs at least 2 runs per query")
    for i, row in enumerate(per_query_f1_by_run):
        if len(row) != runs:
            raise InputError(f"ragged matrix: query row {i} has {len(row)} runs, expected {runs}")
    means = tuple(statistics.fmean(row) for row in per_query_f1_by_run)
    stds = tuple(statistics.stdev(row) for row in per_query_f1_by_run)
    return RunStats(
        per_query_mean=means,
        per_query_std=stds,
        macro_f1=statistics.fmean(means),
        median_sigma=statistics.median(stds),
    )
