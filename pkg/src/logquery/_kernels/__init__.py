"""Miner kernel backend selection.

The compiled Cython kernels are preferred when built; LOGQUERY_PURE_KERNELS=1
forces the pure-Python fallback (used by tests and the backend benchmark).
KERNEL_BACKEND reports which one is active.
"""

from __future__ import annotations

import os

if os.environ.get("LOGQUERY_PURE_KERNELS"):
    from . import _pure as _impl

    KERNEL_BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "pure"

position_wildcards = _impl.position_wildcards
collapse_rows = _impl.collapse_rows
best_match = _impl.best_match
merge_pattern = _impl.merge_pattern

__all__ = [
    "KERNEL_BACKEND",
    "position_wildcards",
    "collapse_rows",
    "best_match",
    "merge_pattern",
]
