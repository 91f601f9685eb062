"""Batch evaluation: benchmark/truth file formats and the N-run harness.

File formats (all line-delimited JSON):
  benchmark: {"id", "tier", "kind", "text", "columns": [{"name", "dtype"}],
              "log"} - log paths resolve relative to the benchmark file;
  truth:     {"query_id", "must_contain": [rows], "may_contain": [rows]};
  results:   {"record": "run" | "query" | "summary", ...} per record.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .context import ContextStrategy
from .errors import InputError, LogQueryError, TransportError
from .executor import RetryPolicy
from .ingest import SampleConfig
from .llm import ColumnSpec, QuerySpec, Transport
from .runner import run_query
from .scoring import GroundTruth, RunStats, ScoreReport, normalize_row, repeat_stats, score

__all__ = [
    "BenchmarkEntry",
    "RunOutcome",
    "BenchmarkResult",
    "load_benchmark",
    "load_truth",
    "run_benchmark",
    "write_results",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchmarkEntry:
    """One query and the log it runs against."""

    query: QuerySpec
    log: Path


@dataclass(frozen=True)
class RunOutcome:
    """Scores for one (query, run) cell; failed runs carry forced-zero F1
    and no reports."""

    query_id: str
    run: int
    status: str
    strict: ScoreReport | None
    lenient: ScoreReport | None
    f1_strict: float
    f1_lenient: float


@dataclass(frozen=True)
class BenchmarkResult:
    """All outcomes (sorted by query id then run) plus per-mode stats
    aligned to query_ids."""

    query_ids: tuple[str, ...]
    outcomes: tuple[RunOutcome, ...]
    stats: dict[str, RunStats]
    runs: int


def load_benchmark(path: str | Path) -> list[BenchmarkEntry]:
    """Read benchmark entries, resolving log paths against the file's dir."""
    base = Path(path).resolve().parent
    entries = []
    seen_ids = set()
    with open(path, encoding="utf-8") as src:
        for number, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                columns = tuple(ColumnSpec(name=c["name"], dtype=c["dtype"]) for c in record["columns"])
                query = QuerySpec(
                    id=record["id"],
                    tier=record["tier"],
                    kind=record["kind"],
                    text=record["text"],
                    output_spec=columns,
                )
                log = Path(record["log"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{path}: record {number}: {exc}") from exc
            if query.id in seen_ids:
                raise InputError(f"{path}: record {number}: duplicate query id {query.id}")
            seen_ids.add(query.id)
            entries.append(BenchmarkEntry(query=query, log=log if log.is_absolute() else base / log))
    if not entries:
        raise InputError(f"{path}: no benchmark entries")
    return entries


def load_truth(path: str | Path) -> dict[str, GroundTruth]:
    """Read ground truth; rows are normalized at load."""
    truths: dict[str, GroundTruth] = {}
    with open(path, encoding="utf-8") as src:
        for number, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                query_id = record["query_id"]
                must = frozenset(normalize_row(r) for r in record["must_contain"]) - {""}
                may = frozenset(normalize_row(r) for r in record.get("may_contain", [])) - {""}
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}: record {number}: {exc}") from exc
            if query_id in truths:
                raise InputError(f"{path}: record {number}: duplicate query id {query_id}")
            truths[query_id] = GroundTruth(query_id=query_id, must_contain=must, may_contain=may)
    return truths


def _run_cell(
    entry: BenchmarkEntry,
    run: int,
    truth: GroundTruth,
    strategy: ContextStrategy,
    transport: Transport,
    policy: RetryPolicy,
    sample_cfg: SampleConfig,
    language: str,
    strict_may_neutral: bool,
) -> RunOutcome:
    try:
        result, _trace = run_query(
            entry.query, entry.log, strategy, transport, policy, sample_cfg, language
        )
        status = result.status
        rows = result.rows
    except TransportError as exc:
        logger.warning("query %s run %d failed: %s", entry.query.id, run, exc)
        status = "transport_error"
        rows = ()
    except LogQueryError as exc:
        logger.warning("query %s run %d failed: %s", entry.query.id, run, exc)
        status = "error"
        rows = ()
    except Exception as exc:  # never abort the batch
        logger.warning("query %s run %d raised unexpectedly: %s", entry.query.id, run, exc)
        status = "error"
        rows = ()
    if status == "ok":
        strict = score(rows, truth, "strict", strict_may_neutral=strict_may_neutral)
        lenient = score(rows, truth, "lenient")
        return RunOutcome(
            query_id=entry.query.id,
            run=run,
            status=status,
            strict=strict,
            lenient=lenient,
            f1_strict=strict.f1,
            f1_lenient=lenient.f1,
        )
    # failed executions score F1 = 0 in both modes
    return RunOutcome(
        query_id=entry.query.id,
        run=run,
        status=status,
        strict=None,
        lenient=None,
        f1_strict=0.0,
        f1_lenient=0.0,
    )


def run_benchmark(
    entries: Sequence[BenchmarkEntry],
    truths: dict[str, GroundTruth],
    strategy: ContextStrategy,
    transport: Transport,
    policy: RetryPolicy = RetryPolicy(),
    sample_cfg: SampleConfig = SampleConfig(),
    runs: int = 5,
    language: str = "python",
    jobs: int = 1,
    strict_may_neutral: bool = False,
) -> BenchmarkResult:
    """Score every query N times; per-query failures never abort the batch.

    Sampling stays on the fixed seed for every run, so with replay or stub
    transports the whole result is deterministic.  Aggregation happens
    after a sort by query id, making it independent of completion order.
    """
    if runs < 1:
        raise InputError("runs must be >= 1")
    if jobs < 1:
        raise InputError("jobs must be >= 1")
    for entry in entries:
        if entry.query.id not in truths:
            raise InputError(f"no ground truth for query {entry.query.id}")
        if not entry.log.exists():
            raise InputError(f"log file not found for query {entry.query.id}: {entry.log}")

    cells = [(entry, run) for entry in entries for run in range(1, runs + 1)]

    def work(cell):
        entry, run = cell
        return _run_cell(
            entry, run, truths[entry.query.id], strategy, transport, policy,
            sample_cfg, language, strict_may_neutral,
        )

    if jobs == 1:
        outcomes = [work(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, cells))

    outcomes.sort(key=lambda o: (o.query_id, o.run))
    query_ids = tuple(sorted(entry.query.id for entry in entries))
    by_query = {qid: [o for o in outcomes if o.query_id == qid] for qid in query_ids}
    stats: dict[str, RunStats] = {}
    if runs >= 2:
        stats["strict"] = repeat_stats([[o.f1_strict for o in by_query[q]] for q in query_ids])
        stats["lenient"] = repeat_stats([[o.f1_lenient for o in by_query[q]] for q in query_ids])
    return BenchmarkResult(query_ids=query_ids, outcomes=tuple(outcomes), stats=stats, runs=runs)


def _report_fields(report: ScoreReport | None, forced_f1: float) -> dict:
    if report is None:
        return {"tp": 0, "fp": 0, "fn": 0, "precision": 0.0, "recall": 0.0, "f1": forced_f1}
    return {
        "tp": report.tp,
        "fp": report.fp,
        "fn": report.fn,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
    }


def write_results(path: str | Path, result: BenchmarkResult) -> None:
    """Serialize a BenchmarkResult; byte-identical for identical results."""
    with open(path, "w", encoding="utf-8") as out:
        for o in result.outcomes:
            record = {
                "record": "run",
                "query_id": o.query_id,
                "run": o.run,
                "status": o.status,
                "strict": _report_fields(o.strict, o.f1_strict),
                "lenient": _report_fields(o.lenient, o.f1_lenient),
            }
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
        for mode, stats in result.stats.items():
            for qid, mean, std in zip(result.query_ids, stats.per_query_mean, stats.per_query_std):
                record = {
                    "record": "query",
                    "query_id": qid,
                    "mode": mode,
                    "mean_f1": mean,
                    "std_f1": std,
                }
                out.write(json.dumps(record, ensure_ascii=False) + "\n")
        for mode, stats in result.stats.items():
            record = {
                "record": "summary",
                "mode": mode,
                "runs": result.runs,
                "macro_f1": stats.macro_f1,
                "median_sigma": stats.median_sigma,
            }
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
