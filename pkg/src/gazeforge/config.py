"""Configuration resolution: flags > environment > config file > defaults.

Environment variables are ``GAZEFORGE_<KEY>`` (upper-cased key). The config
file is a flat ``key = value`` format: one pair per line, ``#`` comments,
optional single or double quotes around values, no sections.
"""
from __future__ import annotations

import os
from pathlib import Path

from .errors import InvalidArgumentsError

__all__ = ["load_config_file", "resolve_setting", "DEFAULTS"]

DEFAULTS = {
    "port": "8099",
    "host": "127.0.0.1",
    "backend": "mock:",
    "embedder": "hashed-512",
    "cors_origin": "*",
    "ppd": "40.0",
    "data_dir": "",
    "index": "",
    "timeout_ms": "60000",
    "display": "study-24in",
}

ENV_PREFIX = "GAZEFORGE_"


def load_config_file(path) -> dict:
    """Parse the flat key=value grammar; unknown keys are kept verbatim."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgumentsError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
            value = value[1:-1]
        if not key:
            raise InvalidArgumentsError(f"{path}:{lineno}: empty key")
        out[key] = value
    return out


def resolve_setting(key: str, flag_value=None, file_values: dict | None = None) -> str:
    """Resolve one setting through the precedence chain."""
    if flag_value is not None:
        return str(flag_value)
    env = os.environ.get(ENV_PREFIX + key.upper())
    if env is not None:
        return env
    if file_values and key in file_values:
        return file_values[key]
    return DEFAULTS.get(key, "")
