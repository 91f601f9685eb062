from __future__ import annotations

import os
import random
import subprocess
import sys

import pytest

from logquery._kernels import _pure

try:
    from logquery._kernels import _speedups
except ImportError:
    _speedups = None

W = "<*>"

BACKENDS = [_pure] + ([_speedups] if _speedups is not None else [])


def backend_id(mod):
    return "compiled" if mod is not _pure else "pure"


@pytest.fixture(params=BACKENDS, ids=backend_id)
def kern(request):
    return request.param


class TestPositionWildcards:
    def test_all_identical_rows_stay_constant(self, kern):
        rows = [("a", "b", "c")]
        # denominator is the group line count, not the distinct-row count
        assert kern.position_wildcards(rows, 10, 0.3) == [False, False, False]

    def test_single_line_group_wildcards_everything(self, kern):
        assert kern.position_wildcards([("a", "b")], 1, 0.3) == [True, True]

    def test_threshold_is_strict(self, kern):
        rows = [("a", "x"), ("a", "y"), ("a", "z")]
        # position 1 has 3 distinct over 10 lines: 0.3 is NOT > 0.3
        assert kern.position_wildcards(rows, 10, 0.3) == [False, False]
        # over 9 lines the ratio is 1/3 > 0.3
        assert kern.position_wildcards(rows, 9, 0.3) == [False, True]

    def test_matches_bruteforce_on_random_groups(self, kern):
        rng = random.Random(5)
        for _ in range(50):
            width = rng.randint(1, 6)
            n = rng.randint(1, 40)
            group = [
                tuple(rng.choice("abcde") for _ in range(width)) for _ in range(n)
            ]
            distinct_rows = list(dict.fromkeys(group))
            got = kern.position_wildcards(distinct_rows, n, 0.3)
            want = [
                (len({row[p] for row in group}) / n) > 0.3 for p in range(width)
            ]
            assert got == want


class TestCollapseRows:
    def test_sums_counts_and_keeps_earliest_order(self, kern):
        rows = [("x", "1"), ("x", "2"), ("y", "3")]
        counts = [5, 2, 1]
        orders = [4, 0, 2]
        mask = [False, True]
        out = kern.collapse_rows(rows, counts, orders, mask)
        assert out == {
            ("x", W): (7, 0, 1),  # earliest order 0 came from row position 1
            ("y", W): (1, 2, 2),
        }

    def test_identity_mask_keeps_rows_apart(self, kern):
        rows = [("a",), ("b",)]
        out = kern.collapse_rows(rows, [1, 1], [0, 1], [False])
        assert set(out) == {("a",), ("b",)}


class TestBestMatch:
    def test_exact_match_wins(self, kern):
        patterns = [["a", "b", "c"], ["a", "b", "x"]]
        assert kern.best_match(patterns, ["a", "b", "x"], 0.4) == (1, 1.0)

    def test_tie_keeps_earliest(self, kern):
        patterns = [["a", "b", "c"], ["a", "b", "d"]]
        idx, sim = kern.best_match(patterns, ["a", "b", "e"], 0.4)
        assert idx == 0 and sim == pytest.approx(2 / 3)

    def test_below_threshold_returns_minus_one(self, kern):
        idx, sim = kern.best_match([["a", "b", "c"]], ["x", "y", "z"], 0.4)
        assert idx == -1 and sim == 0.0

    def test_wildcard_in_pattern_is_literal(self, kern):
        # the wildcard token only counts when the line carries it verbatim
        idx, sim = kern.best_match([[W, "b"]], ["a", "b"], 0.4)
        assert (idx, sim) == (0, 0.5)
        idx, sim = kern.best_match([[W, "b"]], [W, "b"], 0.4)
        assert (idx, sim) == (0, 1.0)

    def test_empty_pattern_list(self, kern):
        assert kern.best_match([], ["a"], 0.4) == (-1, 0.0)


class TestMergePattern:
    def test_disagreements_become_wildcards_in_place(self, kern):
        pattern = ["a", "b", "c"]
        changed = kern.merge_pattern(pattern, ["a", "x", "c"])
        assert changed == 1 and pattern == ["a", W, "c"]

    def test_wildcards_never_revert(self, kern):
        pattern = ["a", W]
        changed = kern.merge_pattern(pattern, ["a", "b"])
        assert changed == 0 and pattern == ["a", W]


@pytest.mark.skipif(_speedups is None, reason="compiled kernels unavailable")
class TestBackendParity:
    def test_randomized_parity_all_kernels(self):
        rng = random.Random(17)
        alphabet = ["alpha", "beta", "gamma", "0x12", W]
        for _ in range(200):
            width = rng.randint(1, 5)
            rows = [
                tuple(rng.choice(alphabet) for _ in range(width))
                for _ in range(rng.randint(1, 12))
            ]
            rows = list(dict.fromkeys(rows))
            counts = [rng.randint(1, 9) for _ in rows]
            orders = rng.sample(range(100), len(rows))
            total = sum(counts)
            mask_p = _pure.position_wildcards(rows, total, 0.3)
            mask_c = _speedups.position_wildcards(rows, total, 0.3)
            assert mask_p == mask_c
            assert _pure.collapse_rows(rows, counts, orders, mask_p) == _speedups.collapse_rows(
                rows, counts, orders, mask_c
            )
            patterns = [list(r) for r in rows]
            tokens = list(rng.choice(rows))
            assert _pure.best_match(patterns, tokens, 0.4) == _speedups.best_match(
                patterns, tokens, 0.4
            )
            pat_p = list(patterns[0])
            pat_c = list(patterns[0])
            assert _pure.merge_pattern(pat_p, tokens) == _speedups.merge_pattern(pat_c, tokens)
            assert pat_p == pat_c


class TestBackendSelection:
    def test_env_var_forces_pure(self):
        env = dict(os.environ, LOGQUERY_PURE_KERNELS="1")
        out = subprocess.run(
            [sys.executable, "-c", "from logquery._kernels import KERNEL_BACKEND; print(KERNEL_BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "pure"

    def test_default_backend_reported(self):
        from logquery._kernels import KERNEL_BACKEND

        assert KERNEL_BACKEND in ("pure", "compiled")
