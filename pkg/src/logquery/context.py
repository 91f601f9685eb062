"""Prompt context construction under the five strategies."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import drain_miner, freq_miner
from .errors import InputError
from .ingest import SampleConfig, read_lines, reservoir_sample

__all__ = ["STRATEGY_KINDS", "ContextStrategy", "ContextBlock", "build_context", "load_template_file"]

STRATEGY_KINDS = ("matryoshka", "drain3", "frequency", "random_sample", "none")


@dataclass(frozen=True)
class ContextStrategy:
    """How the prompt describes the log's formats.

    matryoshka loads externally authored templates (named placeholders kept
    verbatim); drain3/frequency run the corresponding miner; random_sample
    sends samples only; none sends a single line.  with_samples controls
    whether template strategies also carry raw samples (default yes);
    max_templates optionally caps how many templates enter the prompt.
    """

    kind: str = "drain3"
    template_file: Path | None = None
    with_samples: bool = True
    max_templates: int | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"kind must be one of {STRATEGY_KINDS}")
        if (self.kind == "matryoshka") != (self.template_file is not None):
            raise ValueError("template_file is required exactly when kind is matryoshka")
        if self.max_templates is not None and self.max_templates < 1:
            raise ValueError("max_templates must be >= 1")


@dataclass(frozen=True)
class ContextBlock:
    """templates: (pattern text, example line) pairs, None when the strategy
    carries no templates; samples: raw lines."""

    strategy_kind: str
    templates: tuple[tuple[str, str], ...] | None
    samples: tuple[str, ...]


def load_template_file(path: str | Path) -> list[tuple[str, str]]:
    """Read an external template file: one JSON record {template, example}
    per line.  Placeholders inside templates pass through verbatim."""
    pairs = []
    with open(path, encoding="utf-8") as src:
        for number, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                template = record["template"]
                example = record["example"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}: record {number}: {exc}") from exc
            if not isinstance(template, str) or not isinstance(example, str):
                raise InputError(f"{path}: record {number}: template and example must be strings")
            pairs.append((template, example))
    return pairs


def _first_nonempty_line(log: str | Path) -> tuple[str, ...]:
    for line in read_lines(log):
        if line.raw.strip():
            return (line.raw,)
    return ()


def build_context(
    strategy: ContextStrategy,
    log: str | Path,
    cfg: SampleConfig = SampleConfig(),
    freq_config: freq_miner.FreqConfig | None = None,
    drain_config: drain_miner.DrainConfig | None = None,
) -> ContextBlock:
    """Build the context block for one query; deterministic for fixed seed."""
    kind = strategy.kind
    if kind == "none":
        return ContextBlock(strategy_kind=kind, templates=None, samples=_first_nonempty_line(log))

    samples = tuple(line.raw for line in reservoir_sample(read_lines(log), cfg))
    if kind == "random_sample":
        return ContextBlock(strategy_kind=kind, templates=None, samples=samples)

    if kind == "matryoshka":
        pairs = load_template_file(strategy.template_file)
    elif kind == "frequency":
        mined = freq_miner.mine(read_lines(log), freq_config or freq_miner.FreqConfig())
        pairs = [(t.pattern_text, t.example.raw) for t in mined]
    else:  # drain3
        mined = drain_miner.mine(read_lines(log), drain_config or drain_miner.DrainConfig())
        pairs = [(t.pattern_text, t.example.raw) for t in mined]

    if strategy.max_templates is not None:
        pairs = pairs[: strategy.max_templates]
    return ContextBlock(
        strategy_kind=kind,
        templates=tuple(pairs),
        samples=samples if strategy.with_samples else (),
    )
