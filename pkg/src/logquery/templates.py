"""Mined template records and their line-delimited JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import InputError
from .ingest import LogLine

__all__ = ["WILDCARD", "Template", "TemplateSet"]

WILDCARD = "<*>"


@dataclass(frozen=True)
class Template:
    """One message family: constant tokens with wildcard slots.

    pattern holds the tokens (WILDCARD marks a variable position), example
    is the first line that produced the pattern, count the number of lines
    the family matched.
    """

    pattern: tuple[str, ...]
    example: LogLine
    count: int

    @property
    def pattern_text(self) -> str:
        return " ".join(self.pattern)


@dataclass(frozen=True)
class TemplateSet:
    """An ordered collection of templates.

    Miners emit templates sorted by descending count, ties by first-seen
    line index; save() preserves that order so serialization is bit-exact
    for a fixed input and config.
    """

    templates: tuple[Template, ...] = ()

    def __iter__(self) -> Iterator[Template]:
        return iter(self.templates)

    def __len__(self) -> int:
        return len(self.templates)

    def save(self, path: str | Path) -> None:
        """Write one JSON record per template: {pattern, example, count}."""
        with open(path, "w", encoding="utf-8") as out:
            for t in self.templates:
                record = {"pattern": t.pattern_text, "example": t.example.raw, "count": t.count}
                out.write(json.dumps(record, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TemplateSet":
        """Read a saved TemplateSet.

        Loaded examples carry their record ordinal as index; the original
        source-file position is not stored in the serialization.
        """
        templates = []
        with open(path, encoding="utf-8") as src:
            for number, line in enumerate(src, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                    pattern = record["pattern"]
                    example = record["example"]
                    count = record["count"]
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise InputError(f"{path}: record {number}: {exc}") from exc
                if not isinstance(pattern, str) or not isinstance(example, str) or not isinstance(count, int):
                    raise InputError(f"{path}: record {number}: wrong field types")
                templates.append(
                    Template(
                        pattern=tuple(pattern.split(" ")) if pattern else (),
                        example=LogLine(index=number, raw=example),
                        count=count,
                    )
                )
        return cls(tuple(templates))
