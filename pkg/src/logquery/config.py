"""Layered configuration: flags > config file > environment > defaults.

The config file is plain key=value lines ("#" comments allowed); the same
keys work as LOGQUERY_<KEY> environment variables.  The live-transport
credential itself is never a config value: only the name of the
environment variable holding it (api_key_env) is.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .context import ContextStrategy
from .errors import InputError
from .executor import RetryPolicy
from .ingest import SampleConfig
from .llm import TransportConfig

__all__ = ["GlobalConfig", "DEFAULTS", "read_config_file", "resolve_config"]

ENV_PREFIX = "LOGQUERY_"

DEFAULTS: dict[str, object] = {
    # mirrors the evaluated setup: python output, 100 samples, seed 42,
    # 4 retries, 1200 s timeout
    "strategy": "drain3",
    "template_file": None,
    "max_templates": None,
    "with_samples": True,
    "language": "python",
    "sample_size": 100,
    "seed": 42,
    "max_retries": 4,
    "timeout_seconds": 1200.0,
    "transport": "live",
    "endpoint": None,
    "model": "",
    "cassette": None,
    "api_key_env": "LOGQUERY_API_KEY",
}

_INT_KEYS = {"sample_size", "seed", "max_retries", "max_templates"}
_FLOAT_KEYS = {"timeout_seconds"}
_BOOL_KEYS = {"with_samples"}
_PATH_KEYS = {"template_file", "cassette"}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass(frozen=True)
class GlobalConfig:
    """Everything cmd_query/cmd_eval need, validated at construction."""

    strategy: ContextStrategy
    transport: TransportConfig
    policy: RetryPolicy
    sample: SampleConfig
    script_language: str
    output_path: Path | None = None


def _coerce(key: str, raw: str) -> object:
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            low = raw.strip().lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _PATH_KEYS:
            return Path(raw)
    except ValueError as exc:
        raise InputError(f"config key {key}: {exc}") from exc
    return raw


def read_config_file(path: str | Path) -> dict[str, object]:
    """Parse key=value lines into typed config values."""
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise InputError(f"{path}: line {number}: expected key=value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise InputError(f"{path}: line {number}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def _env_values(env: Mapping[str, str]) -> dict[str, object]:
    values: dict[str, object] = {}
    for key in DEFAULTS:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = _coerce(key, raw)
    return values


def resolve_config(
    flags: Mapping[str, object],
    config_file: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    output_path: Path | None = None,
) -> GlobalConfig:
    """Merge the four layers and build the validated GlobalConfig.

    flags entries with value None count as "not given".
    """
    merged = dict(DEFAULTS)
    merged.update(_env_values(os.environ if env is None else env))
    if config_file is not None:
        merged.update(read_config_file(config_file))
    merged.update({k: v for k, v in flags.items() if v is not None})

    unknown = set(merged) - set(DEFAULTS)
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")

    try:
        strategy = ContextStrategy(
            kind=merged["strategy"],
            template_file=Path(merged["template_file"]) if merged["template_file"] else None,
            with_samples=bool(merged["with_samples"]),
            max_templates=merged["max_templates"],
        )
        transport = TransportConfig(
            mode=merged["transport"],
            endpoint=merged["endpoint"],
            model_name=merged["model"],
            cassette=Path(merged["cassette"]) if merged["cassette"] else None,
            api_key_env=merged["api_key_env"],
        )
        policy = RetryPolicy(
            max_retries=int(merged["max_retries"]),
            timeout_seconds=float(merged["timeout_seconds"]),
        )
        sample = SampleConfig(sample_size=int(merged["sample_size"]), seed=int(merged["seed"]))
        language = merged["language"]
        if language not in ("python", "bash"):
            raise ValueError("language must be python or bash")
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return GlobalConfig(
        strategy=strategy,
        transport=transport,
        policy=policy,
        sample=sample,
        script_language=language,
        output_path=output_path,
    )
