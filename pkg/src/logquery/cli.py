"""Operator-facing command surface.

Subcommands: template (mine a log), query (full pipeline for one
question), eval (batch N-run scoring), score (score externally produced
rows).  Machine-readable output goes to stdout or files; diagnostics go
to stderr; every command is non-interactive and exits with a documented
status code.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import drain_miner, freq_miner
from .benchmark import load_benchmark, load_truth, run_benchmark, write_results
from .config import GlobalConfig, resolve_config
from .errors import (
    CassetteError,
    InputError,
    InterpreterNotFoundError,
    LogQueryError,
    TransportError,
)
from .ingest import read_lines
from .llm import ColumnSpec, QuerySpec, make_transport
from .runner import run_query, write_trace
from .scoring import score

__all__ = ["main", "EXIT_CODES"]

logger = logging.getLogger(__name__)

# exit code per failure category
EXIT_CODES = {
    "ok": 0,
    "unexpected": 1,
    "input": 2,
    "safety_rejected": 3,
    "exec_error": 4,  # includes unparseable model output
    "timeout": 5,
    "format_error": 6,
    "transport": 7,
}


def _parse_columns(spec: str) -> tuple[ColumnSpec, ...]:
    columns = []
    for part in spec.split(","):
        name, sep, dtype = part.strip().partition(":")
        if not sep:
            raise InputError(f"column {part!r}: expected name:dtype")
        try:
            columns.append(ColumnSpec(name=name.strip(), dtype=dtype.strip()))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return tuple(columns)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline configuration")
    group.add_argument("--config", type=Path, default=None, help="key=value config file")
    group.add_argument("--strategy", choices=["matryoshka", "drain3", "frequency", "random_sample", "none"], default=None)
    group.add_argument("--template-file", type=Path, default=None, help="template file for --strategy matryoshka")
    group.add_argument("--max-templates", type=int, default=None, help="cap templates placed in the prompt")
    group.add_argument("--no-samples", action="store_true", help="omit raw sample lines from the prompt")
    group.add_argument("--language", choices=["python", "bash"], default=None, help="generated script language")
    group.add_argument("--sample-size", type=int, default=None)
    group.add_argument("--seed", type=int, default=None)
    group.add_argument("--max-retries", type=int, default=None)
    group.add_argument("--timeout", type=float, default=None, help="per-attempt timeout in seconds")
    group.add_argument("--transport", choices=["live", "replay", "stub"], default=None)
    group.add_argument("--endpoint", default=None, help="chat-completions endpoint URL (live)")
    group.add_argument("--model", default=None, help="model name (live)")
    group.add_argument("--cassette", type=Path, default=None, help="cassette file (replay/stub; records live)")
    group.add_argument("--api-key-env", default=None, help="NAME of the env var holding the API key")


def _config_from_args(args: argparse.Namespace, output_path: Path | None = None) -> GlobalConfig:
    flags = {
        "strategy": args.strategy,
        "template_file": args.template_file,
        "max_templates": args.max_templates,
        "with_samples": False if args.no_samples else None,
        "language": args.language,
        "sample_size": args.sample_size,
        "seed": args.seed,
        "max_retries": args.max_retries,
        "timeout_seconds": args.timeout,
        "transport": args.transport,
        "endpoint": args.endpoint,
        "model": args.model,
        "cassette": args.cassette,
        "api_key_env": args.api_key_env,
    }
    return resolve_config(flags, config_file=args.config, output_path=output_path)


def cmd_template(args: argparse.Namespace) -> int:
    start = time.monotonic()
    if args.miner == "frequency":
        templates = freq_miner.mine(read_lines(args.log))
    else:
        templates = drain_miner.mine(read_lines(args.log))
    templates.save(args.out)
    wall = time.monotonic() - start
    print(f"{len(templates)} templates in {wall:.2f} s -> {args.out}", file=sys.stderr)
    return EXIT_CODES["ok"]


def cmd_query(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args, output_path=args.trace_out)
    query = QuerySpec(
        id=args.id,
        tier=args.tier,
        kind=args.kind,
        text=args.query,
        output_spec=_parse_columns(args.columns),
    )
    transport = make_transport(cfg.transport)
    result, trace = run_query(
        query,
        args.log,
        cfg.strategy,
        transport,
        cfg.policy,
        cfg.sample,
        cfg.script_language,
    )
    if cfg.output_path is not None:
        write_trace(cfg.output_path, trace)
    if result.status == "ok":
        for row in result.rows:
            print(row)
        print(f"{len(result.rows)} rows in {len(trace)} attempt(s)", file=sys.stderr)
        return EXIT_CODES["ok"]
    print(f"query failed with status {result.status}: {result.diagnostic}", file=sys.stderr)
    return EXIT_CODES.get(result.status, EXIT_CODES["unexpected"])


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    entries = load_benchmark(args.bench)
    truths = load_truth(args.truth)
    transport = make_transport(cfg.transport)
    result = run_benchmark(
        entries,
        truths,
        cfg.strategy,
        transport,
        cfg.policy,
        cfg.sample,
        runs=args.runs,
        language=cfg.script_language,
        jobs=args.jobs,
        strict_may_neutral=args.neutral_may,
    )
    write_results(args.out, result)
    for mode, stats in sorted(result.stats.items()):
        print(
            f"{mode}: macro_f1={stats.macro_f1:.3f} median_sigma={stats.median_sigma:.3f}",
            file=sys.stderr,
        )
    print(f"results -> {args.out}", file=sys.stderr)
    return EXIT_CODES["ok"]


def cmd_score(args: argparse.Namespace) -> int:
    truths = load_truth(args.truth)
    if args.query_id not in truths:
        raise InputError(f"unknown query id {args.query_id!r}")
    rows = [line.raw for line in read_lines(args.returned)]
    report = score(rows, truths[args.query_id], args.mode, strict_may_neutral=args.neutral_may)
    print(
        f"tp={report.tp} fp={report.fp} fn={report.fn} "
        f"precision={report.precision:.3f} recall={report.recall:.3f} f1={report.f1:.3f}"
    )
    return EXIT_CODES["ok"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logquery",
        description="Query raw logs in natural language via generated, guarded scripts.",
        epilog=(
            "exit codes: 0 ok; 1 unexpected; 2 bad input; 3 safety rejection; "
            "4 execution/parse failure; 5 timeout; 6 output-format violation; "
            "7 transport/cassette failure"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_template = sub.add_parser("template", help="mine a template set from a log")
    p_template.add_argument("log", type=Path)
    p_template.add_argument("--miner", choices=["frequency", "drain3"], default="frequency")
    p_template.add_argument("--out", type=Path, required=True)
    p_template.set_defaults(func=cmd_template)

    p_query = sub.add_parser("query", help="answer one natural-language query")
    p_query.add_argument("log", type=Path)
    p_query.add_argument("--query", required=True, help="the natural-language question")
    p_query.add_argument("--columns", required=True, help="output spec, e.g. 'host:string,count:integer'")
    p_query.add_argument("--id", default="cli-query")
    p_query.add_argument("--tier", choices=["simple", "complex"], default="simple")
    p_query.add_argument("--kind", choices=["where", "select"], default="select")
    p_query.add_argument("--trace-out", type=Path, default=None, help="write the attempt trace here")
    _add_config_flags(p_query)
    p_query.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="run a benchmark file N times and score it")
    p_eval.add_argument("bench", type=Path)
    p_eval.add_argument("truth", type=Path)
    p_eval.add_argument("--out", type=Path, required=True)
    p_eval.add_argument("--runs", type=int, default=5)
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.add_argument("--neutral-may", action="store_true", help="strict mode ignores returned may rows")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_score = sub.add_parser("score", help="score an externally produced row file")
    p_score.add_argument("returned", type=Path, help="file of result rows, one per line")
    p_score.add_argument("truth", type=Path)
    p_score.add_argument("--query-id", required=True)
    p_score.add_argument("--mode", choices=["strict", "lenient"], default="strict")
    p_score.add_argument("--neutral-may", action="store_true")
    p_score.set_defaults(func=cmd_score)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["input"]
    except (TransportError, CassetteError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_CODES["transport"]
    except InterpreterNotFoundError as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_CODES["unexpected"]
    except LogQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES["unexpected"]


if __name__ == "__main__":
    sys.exit(main())
