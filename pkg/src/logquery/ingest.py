"""Log ingestion: ordered line streaming and seeded reservoir sampling."""

from __future__ import annotations

import gzip
import io
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

__all__ = ["LogLine", "SampleConfig", "read_lines", "reservoir_sample"]


@dataclass(frozen=True)
class LogLine:
    """One raw log record and its 1-based position in the source file."""

    index: int
    raw: str


@dataclass(frozen=True)
class SampleConfig:
    """Reservoir sampling parameters (defaults: 100 lines, seed 42)."""

    sample_size: int = 100
    seed: int = 42

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")


def read_lines(path: str | Path) -> Iterator[LogLine]:
    """Stream LogLines from a plain or gzip-compressed log file.

    gzip input is detected by the ``.gz`` extension.  Bytes that are not
    valid UTF-8 are replaced, never raised.  Only "\\n" terminates a line,
    so a lone "\\r" stays inside the line text and joining the raw lines
    back with newlines reproduces the input byte-for-byte for
    newline-terminated text files.
    """
    p = Path(path)
    binary = gzip.open(p, "rb") if p.suffix == ".gz" else open(p, "rb")
    with io.TextIOWrapper(binary, encoding="utf-8", errors="replace", newline="\n") as stream:
        for index, text in enumerate(stream, start=1):
            yield LogLine(index=index, raw=text.removesuffix("\n"))


def reservoir_sample(lines: Iterable[LogLine], cfg: SampleConfig) -> list[LogLine]:
    """Uniform fixed-size sample of a stream (Algorithm R), sorted by index.

    Streams of at most cfg.sample_size lines are returned whole.  Each item
    i >= k draws j = randrange(i + 1) and replaces slot j when j < k, which
    gives every line the same k/n inclusion probability.  The generator is
    random.Random (Mersenne Twister) seeded with cfg.seed, so a fixed
    (stream, seed) pair reproduces the identical sample on every platform.
    """
    k = cfg.sample_size
    rng = random.Random(cfg.seed)
    reservoir: list[LogLine] = []
    for i, line in enumerate(lines):
        if i < k:
            reservoir.append(line)
            continue
        j = rng.randrange(i + 1)
        if j < k:
            reservoir[j] = line
    reservoir.sort(key=lambda line: line.index)
    return reservoir
