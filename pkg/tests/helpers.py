"""Shared builders for the test suite: synthetic corpora, checksums,
recording transports."""

from __future__ import annotations

import copy
import hashlib
import random
import threading
from pathlib import Path
from typing import Sequence

W = "<*>"

# Twelve synthetic formats with pairwise distinct token counts (4..15),
# so each token-length group holds exactly one format and the ratio rule
# cannot bleed across formats.  The expected patterns are written by
# hand, not derived from the implementation: IP/HEX/PATH/QUOTED fills
# normalize to the wildcard up front (the id= prefix survives on key
# tokens), USER/INT fills are high-cardinality and get wildcarded by the
# unique-ratio rule.
FORMATS: list[tuple[str, tuple[str, ...]]] = [
    (
        "kernel: core dump {int}",
        ("kernel:", "core", "dump", W),
    ),
    (
        "session opened for user {user}",
        ("session", "opened", "for", "user", W),
    ),
    (
        "Accepted password for {user} from {ip}",
        ("Accepted", "password", "for", W, "from", W),
    ),
    (
        "cron job {path} exited with status {int}",
        ("cron", "job", W, "exited", "with", "status", W),
    ),
    (
        "Failed password for {user} from {ip} port {int}",
        ("Failed", "password", "for", W, "from", W, "port", W),
    ),
    (
        "device id={hex} mounted read only at {path} by {user}",
        ("device", "id=" + W, "mounted", "read", "only", "at", W, "by", W),
    ),
    (
        "audit: user pid={int} uid={int} auid={int} msg=op=PAM:accounting res=success for host {ip}",
        ("audit:", "user", W, W, W, "msg=op=PAM:accounting", "res=success", "for", "host", W),
    ),
    (
        "dhcpd: DHCPACK on {ip} to {hex} via eth0 lease time {int}",
        ("dhcpd:", "DHCPACK", "on", W, "to", W, "via", "eth0", "lease", "time", W),
    ),
    (
        "puppet-agent[{int}]: Applied catalog for node {user} in {int} seconds with {int} failures",
        (W, "Applied", "catalog", "for", "node", W, "in", W, "seconds", "with", W, "failures"),
    ),
    (
        "klogd: TCP connection from {ip} flagged after {int} retries state listen window {int}",
        ("klogd:", "TCP", "connection", "from", W, "flagged", "after", W, "retries", "state", "listen", "window", W),
    ),
    (
        "su(pam_unix): session closed for user {user} on tty {int} after {int} seconds idle time",
        ("su(pam_unix):", "session", "closed", "for", "user", W, "on", "tty", W, "after", W, "seconds", "idle", "time"),
    ),
    (
        "ftpd: data transfer {quoted} from {ip} port {int} took {int} ms over channel {int} total",
        ("ftpd:", "data", "transfer", W, "from", W, "port", W, "took", W, "ms", "over", "channel", W, "total"),
    ),
]


def _fills(rng: random.Random) -> dict[str, str]:
    return {
        "user": f"user{rng.randrange(100000):05d}",
        "ip": f"{rng.randrange(1, 255)}.{rng.randrange(256)}.{rng.randrange(256)}.{rng.randrange(1, 255)}",
        "hex": f"0x{rng.randrange(16 ** 6):06x}",
        "int": str(rng.randrange(1, 1000000)),
        "path": f"/srv/jobs/batch{rng.randrange(1000)}/task{rng.randrange(1000)}.log",
        "quoted": f'"blob-{rng.randrange(100000)}.dat"',
    }


def build_recovery_corpus(
    instantiations: int = 200, seed: int = 7
) -> tuple[list[str], dict[int, tuple[str, ...]]]:
    """Instantiate every format; returns (shuffled lines, expected pattern
    keyed by token count)."""
    rng = random.Random(seed)
    lines = []
    for fmt, _ in FORMATS:
        for _ in range(instantiations):
            lines.append(fmt.format(**_fills(rng)))
    rng.shuffle(lines)
    expected = {len(pattern): pattern for _, pattern in FORMATS}
    assert len(expected) == len(FORMATS)  # token counts pairwise distinct
    return lines, expected


def build_big_corpus(n_lines: int, seed: int = 11) -> list[str]:
    """n_lines instantiations cycling through the formats."""
    rng = random.Random(seed)
    formats = [fmt for fmt, _ in FORMATS]
    return [formats[i % len(formats)].format(**_fills(rng)) for i in range(n_lines)]


def write_log(path: Path, lines: Sequence[str]) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def sha256_tree(root: Path) -> str:
    """Order-stable digest of a directory tree: relative paths + contents."""
    digest = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        digest.update(str(p.relative_to(root)).encode())
        if p.is_file():
            digest.update(p.read_bytes())
    return digest.hexdigest()


class RecordingStub:
    """Stub transport that snapshots every conversation it is sent."""

    def __init__(self, responses: Sequence[str]):
        self._responses = list(responses)
        self._lock = threading.Lock()
        self.calls = 0
        self.conversations: list[list[tuple[str, str]]] = []

    def send(self, conversation) -> str:
        with self._lock:
            self.calls += 1
            self.conversations.append(copy.deepcopy(list(conversation)))
            return self._responses.pop(0)


def wrap_json(language: str, code: str) -> str:
    import json

    return json.dumps({"language": language, "code": code})
