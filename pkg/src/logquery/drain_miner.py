"""Streaming Drain-style template miner.

A fixed-depth prefix tree routes each line by token count and then by its
first (tree_depth - 2) tokens; digit-bearing tokens route to a wildcard
branch so numeric prefixes cannot explode the tree.  At the leaf, the
cluster maximizing positional similarity wins when it clears the
threshold and its pattern is updated by wildcarding disagreeing
positions; otherwise the line starts a new cluster.  One pass, constant
work per line in the number of tree levels.  Unlike the frequency
templater, no normalization is applied before routing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import _kernels
from .ingest import LogLine
from .templates import WILDCARD, Template, TemplateSet

__all__ = ["DrainConfig", "DrainMiner", "mine"]


@dataclass(frozen=True)
class DrainConfig:
    """Tree shape and matching threshold (defaults follow classic Drain)."""

    tree_depth: int = 4
    similarity_threshold: float = 0.4
    max_children: int = 100

    def __post_init__(self):
        if self.tree_depth < 2:
            raise ValueError("tree_depth must be >= 2")
        if not 0 < self.similarity_threshold < 1:
            raise ValueError("similarity_threshold must be in (0, 1)")
        if self.max_children < 1:
            raise ValueError("max_children must be >= 1")


@dataclass
class _Cluster:
    pattern: list[str]
    example: LogLine
    count: int


@dataclass
class _Node:
    children: dict = field(default_factory=dict)
    clusters: list = field(default_factory=list)  # cluster ids


class DrainMiner:
    """Single-writer streaming miner; mining distinct files concurrently is
    safe with one miner per file."""

    def __init__(self, cfg: DrainConfig = DrainConfig()):
        self._cfg = cfg
        self._root: dict[int, _Node] = {}
        self._clusters: list[_Cluster] = []

    def _route(self, tokens: list[str]) -> _Node:
        node = self._root.get(len(tokens))
        if node is None:
            node = self._root[len(tokens)] = _Node()
        levels = min(self._cfg.tree_depth - 2, len(tokens))
        for depth in range(levels):
            tok = tokens[depth]
            if any(ch.isdigit() for ch in tok):
                tok = WILDCARD
            child = node.children.get(tok)
            if child is None:
                if tok != WILDCARD and len(node.children) >= self._cfg.max_children:
                    tok = WILDCARD  # overflow routes to the wildcard child
                    child = node.children.get(tok)
                if child is None:
                    child = node.children[tok] = _Node()
            node = child
        return node

    def update(self, line: LogLine) -> int:
        """Assign one line to a cluster, creating or widening as needed.

        Returns the cluster id.  A cluster's wildcard set only grows and its
        pattern length never changes.
        """
        tokens = line.raw.split()
        node = self._route(tokens)
        if not tokens:
            # blank lines share one length-0 cluster and mine no template
            if node.clusters:
                cid = node.clusters[0]
                self._clusters[cid].count += 1
                return cid
            return self._new_cluster(node, tokens, line)
        patterns = [self._clusters[cid].pattern for cid in node.clusters]
        best, _sim = _kernels.best_match(patterns, tokens, self._cfg.similarity_threshold)
        if best < 0:
            return self._new_cluster(node, tokens, line)
        cid = node.clusters[best]
        cluster = self._clusters[cid]
        cluster.count += 1
        _kernels.merge_pattern(cluster.pattern, tokens)
        return cid

    def _new_cluster(self, node: _Node, tokens: list[str], line: LogLine) -> int:
        cid = len(self._clusters)
        self._clusters.append(_Cluster(pattern=list(tokens), example=line, count=1))
        node.clusters.append(cid)
        return cid

    def finalize(self) -> TemplateSet:
        """One Template per non-empty cluster, ordered like the freq miner:
        descending count, ties by first-seen index."""
        templates = [
            Template(pattern=tuple(c.pattern), example=c.example, count=c.count)
            for c in self._clusters
            if c.pattern
        ]
        templates.sort(key=lambda t: (-t.count, t.example.index))
        return TemplateSet(tuple(templates))


def mine(lines: Iterable[LogLine], cfg: DrainConfig = DrainConfig()) -> TemplateSet:
    """Feed every line through one miner and finalize."""
    miner = DrainMiner(cfg)
    for line in lines:
        miner.update(line)
    return miner.finalize()
