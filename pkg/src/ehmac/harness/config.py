"""Flat ``key=value`` configuration files.

One setting per line, keys spelled like the long CLI flags without the
leading dashes (``snr1-db=11``). ``#`` starts a comment. A key may repeat;
callers decide whether repeats accumulate or the last one wins.
"""

from __future__ import annotations


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        pairs.append((key, value))
    return pairs


def read_config(path: str) -> list[tuple[str, str]]:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)
