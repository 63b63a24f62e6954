"""Run configuration: a flat ``key = value`` file overridden by command-line flags."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from mobnil.errors import ParameterError
from mobnil.sieve import DEFAULT_MEMORY_CAP

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    cache_path: str = ""
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP
    seed: int = 0
    thread_count: object = 1  # positive int or "auto"
    output_format: str = "csv"
    truncate_shifts: bool = False  # self-correlations: drop terms with arguments beyond n

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if self.memory_cap_bytes < 1:
            raise ParameterError("memory_cap_bytes must be positive")
        if self.thread_count != "auto" and (not isinstance(self.thread_count, int) or self.thread_count < 1):
            raise ParameterError("thread_count must be a positive integer or 'auto'")
        if self.output_format not in FORMATS:
            raise ParameterError(f"output_format must be one of {', '.join(FORMATS)}")

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if key in ("memory_cap_bytes", "seed"):
        try:
            return int(raw.replace("_", ""), 0)
        except ValueError:
            raise ParameterError(f"{key} must be an integer, got {raw!r}") from None
    if key == "thread_count":
        if raw == "auto":
            return raw
        try:
            return int(raw)
        except ValueError:
            raise ParameterError(f"thread_count must be an integer or 'auto', got {raw!r}") from None
    if key == "truncate_shifts":
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ParameterError(f"truncate_shifts must be a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ParameterError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text())


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {str(v).lower() if isinstance(v, bool) else v}")
    return "\n".join(lines) + "\n"
