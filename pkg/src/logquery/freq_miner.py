"""Frequency-based log templater.

Four passes over the raw lines:

1. normalize: volatile literals (IPv4 addresses, 0x-hex tokens, quoted
   strings, filesystem paths with >= 3 separators) become the wildcard;
2. partition: whitespace tokenization, lines grouped by token count;
3. wildcard detection: inside a group, position p becomes a wildcard iff
   its unique-value ratio r_p = distinct(p) / group size exceeds the
   threshold (strictly);
4. consolidation: skeletons sharing a structural signature merge into one
   template (most frequent skeleton is the representative, earliest
   first-seen wins ties) and templates rarer than
   max(min_count_floor, floor(n / min_count_divisor)) are dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _kernels
from .ingest import LogLine
from .templates import WILDCARD, Template, TemplateSet

__all__ = [
    "FreqConfig",
    "Skeleton",
    "normalize",
    "partition_by_length",
    "detect_skeletons",
    "structural_signature",
    "template_matches",
    "mine",
]

SIGNATURE_MODES = ("key_prefix", "bare_equals")

_QUOTED = re.compile(r'"[^"\n]*"|\'[^\'\n]*\'')
_TOKEN = re.compile(r"\S+")
_IPV4 = re.compile(r"\b\d{1,3}(?:\.\d{1,3}){3}\b")
_HEX = re.compile(r"\b0[xX][0-9a-fA-F]{2,}\b")


@dataclass(frozen=True)
class FreqConfig:
    """Tuning knobs for the four passes."""

    variable_ratio_threshold: float = 0.3
    min_count_floor: int = 2
    min_count_divisor: int = 10_000
    signature_mode: str = "key_prefix"

    def __post_init__(self):
        if not 0 < self.variable_ratio_threshold < 1:
            raise ValueError("variable_ratio_threshold must be in (0, 1)")
        if self.min_count_floor < 1 or self.min_count_divisor < 1:
            raise ValueError("min_count_floor and min_count_divisor must be positive")
        if self.signature_mode not in SIGNATURE_MODES:
            raise ValueError(f"signature_mode must be one of {SIGNATURE_MODES}")


@dataclass(frozen=True)
class Skeleton:
    """A per-line pattern after pass 3, before consolidation."""

    tokens: tuple[str, ...]
    count: int


def _normalize_one(tok: str) -> str:
    """Apply the token-level rules: path, then IPv4, then hex."""
    if tok == WILDCARD:
        return tok
    head, sep, tail = tok.partition("=")
    body = tail if sep else tok
    if body.count("/") >= 3:
        # a leading key= prefix survives, mirroring the hex rule
        return head + "=" + WILDCARD if sep else WILDCARD
    out = tok
    if "." in out:
        out = _IPV4.sub(WILDCARD, out)
    if "0x" in out or "0X" in out:
        out = _HEX.sub(WILDCARD, out)
    return out


def normalize(line: str) -> str:
    """Replace volatile literals with the wildcard; whitespace untouched.

    Idempotent: wildcards produced by one pass match no rule on the next.
    """
    if '"' in line or "'" in line:
        line = _QUOTED.sub(WILDCARD, line)
    return _TOKEN.sub(lambda m: _normalize_one(m.group(0)), line)


def _normalize_tokens(line: str) -> list[str]:
    # same result as normalize(line).split(), skipping the re.sub machinery
    if '"' in line or "'" in line:
        line = _QUOTED.sub(WILDCARD, line)
    return [_normalize_one(tok) for tok in line.split()]


def partition_by_length(rows: Iterable[Sequence[str]]) -> dict[int, list[Sequence[str]]]:
    """Group already-tokenized lines by token count."""
    groups: dict[int, list[Sequence[str]]] = {}
    for row in rows:
        groups.setdefault(len(row), []).append(row)
    return groups


def detect_skeletons(group: Sequence[Sequence[str]], cfg: FreqConfig = FreqConfig()) -> list[Skeleton]:
    """Pass 3 over one equal-length group, skeletons in first-seen order."""
    if not group:
        return []
    seen: dict[tuple[str, ...], list[int]] = {}
    for order, row in enumerate(group):
        key = tuple(row)
        entry = seen.get(key)
        if entry is None:
            seen[key] = [1, order]
        else:
            entry[0] += 1
    rows = list(seen.keys())
    counts = [seen[r][0] for r in rows]
    orders = [seen[r][1] for r in rows]
    mask = _kernels.position_wildcards(rows, len(group), cfg.variable_ratio_threshold)
    collapsed = _kernels.collapse_rows(rows, counts, orders, mask)
    ordered = sorted(collapsed.items(), key=lambda item: item[1][1])
    return [Skeleton(tokens=skel, count=meta[0]) for skel, meta in ordered]


def _signature(tokens: Sequence[str], mode: str) -> tuple[str, ...]:
    out = []
    for tok in tokens:
        if tok == WILDCARD:
            continue
        if "=" in tok:
            out.append(tok.split("=", 1)[0] + "=" if mode == "key_prefix" else "=")
        else:
            out.append(tok)
    return tuple(out)


def structural_signature(skeleton: Skeleton, mode: str = "key_prefix") -> tuple[str, ...]:
    """Ordered non-wildcard tokens with key=value tokens reduced per mode."""
    if mode not in SIGNATURE_MODES:
        raise ValueError(f"mode must be one of {SIGNATURE_MODES}")
    return _signature(skeleton.tokens, mode)


def template_matches(pattern: Sequence[str], tokens: Sequence[str], mode: str = "key_prefix") -> bool:
    """Whether a normalized token row belongs to a template's family.

    Wildcard positions match anything.  Consolidation keeps the most
    frequent skeleton as the pattern, so merged lines may carry a different
    value in a key=value token; such tokens match when the key agrees
    (key_prefix) or whenever both carry "=" (bare_equals).
    """
    if len(pattern) != len(tokens):
        return False
    for p_tok, tok in zip(pattern, tokens):
        if p_tok == WILDCARD or p_tok == tok:
            continue
        if "=" in p_tok and "=" in tok:
            if mode == "bare_equals":
                continue
            if p_tok.split("=", 1)[0] == tok.split("=", 1)[0]:
                continue
        return False
    return True


def mine(lines: Iterable[LogLine], cfg: FreqConfig = FreqConfig()) -> TemplateSet:
    """Run all four passes over a LogLine stream.

    Blank lines count toward n (the drop rule denominator) but form no
    template.  Deterministic for a fixed input and config; templates are
    ordered by descending count, ties by the family's first-seen index.
    """
    groups: dict[int, dict[tuple[str, ...], list]] = {}
    n = 0
    for line in lines:
        n += 1
        tokens = tuple(_normalize_tokens(line.raw))
        if not tokens:
            continue
        group = groups.setdefault(len(tokens), {})
        entry = group.get(tokens)
        if entry is None:
            group[tokens] = [1, line.index, line]
        else:
            entry[0] += 1

    candidates: list[tuple[Template, int]] = []  # (template, family first-seen)
    for group in groups.values():
        rows = list(group.keys())
        counts = [group[r][0] for r in rows]
        orders = [group[r][1] for r in rows]
        total = sum(counts)
        mask = _kernels.position_wildcards(rows, total, cfg.variable_ratio_threshold)
        collapsed = _kernels.collapse_rows(rows, counts, orders, mask)

        by_signature: dict[tuple[str, ...], list] = {}
        for skeleton, (count, first_order, row_pos) in collapsed.items():
            sig = _signature(skeleton, cfg.signature_mode)
            by_signature.setdefault(sig, []).append((skeleton, count, first_order, row_pos))
        for members in by_signature.values():
            rep = min(members, key=lambda m: (-m[1], m[2]))
            family_count = sum(m[1] for m in members)
            family_first = min(m[2] for m in members)
            example = group[rows[rep[3]]][2]
            template = Template(pattern=rep[0], example=example, count=family_count)
            candidates.append((template, family_first))

    threshold = max(cfg.min_count_floor, n // cfg.min_count_divisor)
    survivors = [(t, first) for t, first in candidates if t.count >= threshold]
    survivors.sort(key=lambda pair: (-pair[0].count, pair[1]))
    return TemplateSet(tuple(t for t, _ in survivors))
