"""End-to-end query orchestration: context, prompt, retry loop, audit trace.

Each attempt runs send -> parse -> safety -> execute -> validate.  On any
failure the category plus the first 4,000 characters of the diagnostic
are appended to the conversation and the loop retries, up to
1 + max_retries attempts.  Generated code never executes without a
passing safety verdict.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from .context import ContextStrategy, build_context
from .drain_miner import DrainConfig
from .errors import ResponseParseError, TransportError
from .executor import ExecutionResult, RetryPolicy, execute, validate_output
from .freq_miner import FreqConfig
from .ingest import SampleConfig
from .llm import QuerySpec, Transport, assemble_prompt, parse_response
from .safety import check_script_safety

__all__ = ["AttemptRecord", "run_query", "write_trace", "FEEDBACK_LIMIT"]

logger = logging.getLogger(__name__)

FEEDBACK_LIMIT = 4000  # characters of diagnostic fed back to the model

# failure categories surfaced in feedback turns and attempt traces
CATEGORIES = ("response-parse", "safety", "execution", "timeout", "output-format", "transport")


@dataclass(frozen=True)
class AttemptRecord:
    """One audited attempt: what was generated and how it ended."""

    attempt: int
    language: str | None
    code: str | None
    status: str
    category: str | None
    diagnostic: str
    wall_time: float


def _feedback(category: str, diagnostic: str) -> str:
    return (
        "The previous attempt failed.\n"
        f"Category: {category}\n"
        f"Details: {diagnostic[:FEEDBACK_LIMIT]}\n"
        'Return a corrected script as a JSON object {"language": ..., "code": ...}.'
    )


def run_query(
    query: QuerySpec,
    log: str | Path,
    strategy: ContextStrategy,
    transport: Transport,
    policy: RetryPolicy = RetryPolicy(),
    sample_cfg: SampleConfig = SampleConfig(),
    language: str = "python",
    freq_config: FreqConfig | None = None,
    drain_config: DrainConfig | None = None,
    interpreter: str | None = None,
) -> tuple[ExecutionResult, list[AttemptRecord]]:
    """Run one query to a terminal result.

    Returns the first fully successful ExecutionResult, or the last
    failure after the attempt budget is spent, plus the full attempt
    trace.  Unretriable transport errors raise immediately; retriable ones
    consume attempts and propagate once the budget is exhausted.
    """
    ctx = build_context(strategy, log, sample_cfg, freq_config=freq_config, drain_config=drain_config)
    prompt = assemble_prompt(query, ctx, language)
    conversation: list[tuple[str, str]] = list(prompt.messages)
    attempts: list[AttemptRecord] = []
    last_result: ExecutionResult | None = None
    max_attempts = 1 + policy.max_retries

    for attempt in range(1, max_attempts + 1):
        try:
            text = transport.send(conversation)
        except TransportError as exc:
            attempts.append(
                AttemptRecord(
                    attempt=attempt,
                    language=None,
                    code=None,
                    status="transport_error",
                    category="transport",
                    diagnostic=str(exc),
                    wall_time=0.0,
                )
            )
            if not exc.retriable or attempt == max_attempts:
                raise
            logger.warning("query %s attempt %d: retriable transport error: %s", query.id, attempt, exc)
            continue  # same conversation, fresh request

        conversation.append(("assistant", text))
        script = None
        try:
            script = parse_response(text)
        except ResponseParseError as exc:
            category = "response-parse"
            result = ExecutionResult(status="exec_error", diagnostic=str(exc))
        else:
            verdict = check_script_safety(script)
            if not verdict.allowed:
                category = "safety"
                message = "; ".join(
                    f"{v.rule}: {v.message}" + (f" ({v.location})" if v.location else "")
                    for v in verdict.violations
                )
                result = ExecutionResult(status="safety_rejected", diagnostic=message)
            else:
                result = execute(script, log, policy, interpreter=interpreter)
                if result.status == "ok":
                    contract = validate_output(result.rows, query.output_spec)
                    if contract is None:
                        category = None
                    else:
                        category = "output-format"
                        result = ExecutionResult(
                            status="format_error", diagnostic=contract, wall_time=result.wall_time
                        )
                elif result.status == "timeout":
                    category = "timeout"
                else:
                    category = "execution"

        attempts.append(
            AttemptRecord(
                attempt=attempt,
                language=script.language if script else None,
                code=script.code if script else None,
                status=result.status,
                category=category,
                diagnostic=result.diagnostic,
                wall_time=result.wall_time,
            )
        )
        if category is None:
            return result, attempts
        last_result = result
        conversation.append(("user", _feedback(category, result.diagnostic)))

    assert last_result is not None
    return last_result, attempts


def write_trace(path: str | Path, attempts: Sequence[AttemptRecord]) -> None:
    """Serialize an attempt trace, one JSON record per attempt."""
    with open(path, "w", encoding="utf-8") as out:
        for record in attempts:
            out.write(json.dumps(asdict(record), ensure_ascii=False) + "\n")
