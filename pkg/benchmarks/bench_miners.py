"""Compare the compiled miner kernels against the pure-Python fallback.

Runs the same mining workload in two subprocesses (one per backend),
checks that both produce byte-identical template files, and prints a
timing table.  Usage:

    python3 benchmarks/bench_miners.py [--lines 200000] [--repeats 3]

The subprocess boundary matters: the backend is chosen at import time, so
each measurement needs a fresh interpreter.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import tempfile
import time
from pathlib import Path

FORMATS = [
    "kernel: core dump {n}",
    "session opened for user user{n:05d}",
    "Accepted password for user{n:05d} from 10.{o}.{o2}.{o3}",
    "cron job /srv/jobs/batch{o}/task{n}.log exited with status {o2}",
    "Failed password for user{n:05d} from 10.{o}.{o2}.{o3} port {n}",
    "device id=0x{n:06x} mounted read only at /mnt/data{o} by user{n:05d}",
    "dhcpd: DHCPACK on 10.{o}.{o2}.{o3} to 0x{n:06x} via eth0 lease time {n}",
    "puppet-agent[{n}]: Applied catalog for node host{o} in {o2} seconds with {o3} failures",
]


def generate_corpus(path: Path, lines: int, seed: int = 17) -> None:
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as out:
        for i in range(lines):
            fills = {
                "n": rng.randrange(1, 1_000_000),
                "o": rng.randrange(256),
                "o2": rng.randrange(256),
                "o3": rng.randrange(256),
            }
            out.write(FORMATS[i % len(FORMATS)].format(**fills) + "\n")


def worker(log: Path, out_dir: Path, repeats: int) -> None:
    from logquery import drain_miner, freq_miner
    from logquery._kernels import KERNEL_BACKEND
    from logquery.ingest import read_lines

    timings = {"backend": KERNEL_BACKEND}
    for name, miner in (("frequency", freq_miner.mine), ("drain3", drain_miner.mine)):
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            templates = miner(read_lines(log))
            best = min(best, time.perf_counter() - start)
        templates.save(out_dir / f"{name}.jsonl")
        timings[name] = best
    print(json.dumps(timings))


def run_backend(pure: bool, log: Path, out_dir: Path, repeats: int) -> dict:
    env = dict(os.environ)
    env.pop("LOGQUERY_PURE_KERNELS", None)
    if pure:
        env["LOGQUERY_PURE_KERNELS"] = "1"
    out_dir.mkdir(parents=True, exist_ok=True)
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", str(log), str(out_dir), str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lines", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", nargs=3, metavar=("LOG", "OUT_DIR", "REPEATS"), default=None,
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker is not None:
        worker(Path(args.worker[0]), Path(args.worker[1]), int(args.worker[2]))
        return 0

    with tempfile.TemporaryDirectory(prefix="logquery-bench-") as tmp:
        tmp_path = Path(tmp)
        log = tmp_path / "corpus.log"
        print(f"generating {args.lines:,} lines ...", file=sys.stderr)
        generate_corpus(log, args.lines)

        results = {}
        for backend, pure in (("compiled", False), ("pure", True)):
            print(f"mining with {backend} kernels ...", file=sys.stderr)
            results[backend] = run_backend(pure, log, tmp_path / backend, args.repeats)

        if results["compiled"]["backend"] == "pure":
            print("note: compiled kernels are not built; both runs used the fallback", file=sys.stderr)

        for name in ("frequency", "drain3"):
            compiled_out = (tmp_path / "compiled" / f"{name}.jsonl").read_bytes()
            pure_out = (tmp_path / "pure" / f"{name}.jsonl").read_bytes()
            if compiled_out != pure_out:
                print(f"BACKEND MISMATCH: {name} outputs differ", file=sys.stderr)
                return 1

        print(f"{'miner':<12} {'compiled (s)':>14} {'pure (s)':>12} {'speedup':>9}")
        for name in ("frequency", "drain3"):
            fast = results["compiled"][name]
            slow = results["pure"][name]
            print(f"{name:<12} {fast:>14.3f} {slow:>12.3f} {slow / fast:>8.1f}x")
        print("outputs identical across backends")
    return 0


if __name__ == "__main__":
    sys.exit(main())
