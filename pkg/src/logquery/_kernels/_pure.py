"""Pure-Python miner kernels; semantics identical to _speedups.pyx."""

from __future__ import annotations

from typing import Mapping, Sequence

WILDCARD = "<*>"


def position_wildcards(rows: Sequence[tuple[str, ...]], total: int, threshold: float) -> list[bool]:
    """Per-position wildcard mask for one equal-length token group.

    rows are the distinct token rows of the group, total the group's line
    count including duplicates.  Position p is wildcarded iff the ratio of
    distinct tokens at p to total is strictly greater than threshold.
    """
    width = len(rows[0])
    distinct: list[set[str]] = [set() for _ in range(width)]
    for row in rows:
        for p in range(width):
            distinct[p].add(row[p])
    return [len(distinct[p]) / total > threshold for p in range(width)]


def collapse_rows(
    rows: Sequence[tuple[str, ...]],
    counts: Sequence[int],
    orders: Sequence[int],
    mask: Sequence[bool],
) -> dict[tuple[str, ...], tuple[int, int, int]]:
    """Apply the wildcard mask and aggregate identical skeletons.

    Returns skeleton -> (summed count, earliest first-seen order, row
    position of that earliest row).
    """
    out: dict[tuple[str, ...], tuple[int, int, int]] = {}
    for i, row in enumerate(rows):
        skeleton = tuple(WILDCARD if m else tok for tok, m in zip(row, mask))
        entry = out.get(skeleton)
        if entry is None:
            out[skeleton] = (counts[i], orders[i], i)
        else:
            count, order, row_pos = entry
            if orders[i] < order:
                order, row_pos = orders[i], i
            out[skeleton] = (count + counts[i], order, row_pos)
    return out


def best_match(patterns: Sequence[Sequence[str]], tokens: Sequence[str], threshold: float) -> tuple[int, float]:
    """Index and similarity of the best positional match, or (-1, best sim).

    sim = (#positions with literally identical tokens) / len(tokens);
    wildcards only count when the line token is literally the wildcard.
    Ties keep the earliest pattern.  Returns -1 when the best similarity
    falls below threshold.
    """
    length = len(tokens)
    best_i = -1
    best_sim = -1.0
    for i, pattern in enumerate(patterns):
        same = 0
        for a, b in zip(pattern, tokens):
            if a == b:
                same += 1
        sim = same / length
        if sim > best_sim:
            best_sim = sim
            best_i = i
    if best_i >= 0 and best_sim >= threshold:
        return best_i, best_sim
    return -1, max(best_sim, 0.0)


def merge_pattern(pattern: list[str], tokens: Sequence[str]) -> int:
    """Wildcard every position where pattern and tokens disagree (in place).

    Returns the number of positions changed; wildcarded positions never
    revert, so a cluster's wildcard set only grows.
    """
    changed = 0
    for p in range(len(pattern)):
        if pattern[p] != WILDCARD and pattern[p] != tokens[p]:
            pattern[p] = WILDCARD
            changed += 1
    return changed
