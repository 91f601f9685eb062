"""Parser-free natural-language querying over raw security logs.

Pipeline: mine templates from the log, build a compact prompt context,
ask a model for a filter script, statically check the script, run it in
an isolated scratch environment, validate the output shape, and score
rows against tiered ground truth.
"""

from __future__ import annotations

from ._kernels import KERNEL_BACKEND
from .benchmark import (
    BenchmarkEntry,
    BenchmarkResult,
    RunOutcome,
    load_benchmark,
    load_truth,
    run_benchmark,
    write_results,
)
from .config import DEFAULTS, GlobalConfig, read_config_file, resolve_config
from .context import ContextBlock, ContextStrategy, build_context, load_template_file
from .drain_miner import DrainConfig, DrainMiner
from .errors import (
    CassetteError,
    InputError,
    InterpreterNotFoundError,
    LogQueryError,
    ResponseParseError,
    TransportError,
)
from .executor import ExecutionResult, RetryPolicy, execute, validate_output
from .freq_miner import FreqConfig
from .ingest import LogLine, SampleConfig, read_lines, reservoir_sample
from .llm import (
    ColumnSpec,
    GeneratedScript,
    LiveTransport,
    Prompt,
    QuerySpec,
    ReplayTransport,
    StubTransport,
    TransportConfig,
    assemble_prompt,
    conversation_digest,
    make_transport,
    parse_response,
    read_cassette,
)
from .runner import AttemptRecord, run_query, write_trace
from .safety import SafetyVerdict, check_script_safety
from .scoring import GroundTruth, RunStats, ScoreReport, macro_f1, repeat_stats, score
from .templates import WILDCARD, Template, TemplateSet

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "WILDCARD",
    # errors
    "LogQueryError",
    "InputError",
    "ResponseParseError",
    "TransportError",
    "CassetteError",
    "InterpreterNotFoundError",
    # ingest
    "LogLine",
    "SampleConfig",
    "read_lines",
    "reservoir_sample",
    # templates and miners
    "Template",
    "TemplateSet",
    "FreqConfig",
    "DrainConfig",
    "DrainMiner",
    # context
    "ContextStrategy",
    "ContextBlock",
    "build_context",
    "load_template_file",
    # llm
    "ColumnSpec",
    "QuerySpec",
    "Prompt",
    "GeneratedScript",
    "TransportConfig",
    "LiveTransport",
    "ReplayTransport",
    "StubTransport",
    "assemble_prompt",
    "parse_response",
    "conversation_digest",
    "read_cassette",
    "make_transport",
    # safety and execution
    "SafetyVerdict",
    "check_script_safety",
    "ExecutionResult",
    "RetryPolicy",
    "execute",
    "validate_output",
    # runner
    "AttemptRecord",
    "run_query",
    "write_trace",
    # scoring
    "GroundTruth",
    "ScoreReport",
    "RunStats",
    "score",
    "macro_f1",
    "repeat_stats",
    # benchmark
    "BenchmarkEntry",
    "RunOutcome",
    "BenchmarkResult",
    "load_benchmark",
    "load_truth",
    "run_benchmark",
    "write_results",
    # config
    "GlobalConfig",
    "DEFAULTS",
    "read_config_file",
    "resolve_config",
]
