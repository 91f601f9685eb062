# cython: boundscheck=False, wraparound=False
"""Compiled miner kernels; semantics identical to _pure.py."""

WILDCARD = "<*>"


def position_wildcards(rows, total, threshold):
    """Per-position wildcard mask for one equal-length token group."""
    cdef Py_ssize_t width = len(rows[0])
    cdef Py_ssize_t p
    cdef double total_f = <double> total
    cdef double thr = <double> threshold
    distinct = [set() for _ in range(width)]
    for row in rows:
        for p in range(width):
            (<set> distinct[p]).add(row[p])
    return [len(<set> distinct[p]) / total_f > thr for p in range(width)]


def collapse_rows(rows, counts, orders, mask):
    """Apply the wildcard mask and aggregate identical skeletons."""
    cdef Py_ssize_t i, n = len(rows)
    cdef Py_ssize_t count, order, row_pos
    out = {}
    wildcard = WILDCARD
    for i in range(n):
        row = rows[i]
        skeleton = tuple([wildcard if m else tok for tok, m in zip(row, mask)])
        entry = out.get(skeleton)
        if entry is None:
            out[skeleton] = (counts[i], orders[i], i)
        else:
            count, order, row_pos = entry
            if orders[i] < order:
                order = orders[i]
                row_pos = i
            out[skeleton] = (count + counts[i], order, row_pos)
    return out


def best_match(patterns, tokens, threshold):
    """Index and similarity of the best positional match, or (-1, best sim)."""
    cdef Py_ssize_t length = len(tokens)
    cdef Py_ssize_t i, p, same
    cdef Py_ssize_t best_i = -1
    cdef double best_sim = -1.0
    cdef double sim
    cdef double thr = <double> threshold
    for i in range(len(patterns)):
        pattern = patterns[i]
        same = 0
        for p in range(length):
            a = pattern[p]
            b = tokens[p]
            if a is b or a == b:
                same += 1
        sim = same / (<double> length)
        if sim > best_sim:
            best_sim = sim
            best_i = i
    if best_i >= 0 and best_sim >= thr:
        return best_i, best_sim
    return -1, best_sim if best_sim > 0.0 else 0.0


def merge_pattern(pattern, tokens):
    """Wildcard every position where pattern and tokens disagree (in place)."""
    cdef Py_ssize_t p, n = len(pattern)
    cdef Py_ssize_t changed = 0
    wildcard = WILDCARD
    for p in range(n):
        a = pattern[p]
        if a == wildcard:
            continue
        b = tokens[p]
        if not (a is b or a == b):
            pattern[p] = wildcard
            changed += 1
    return changed
