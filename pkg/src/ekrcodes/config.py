"""Enumeration and search caps.

The library reads these module-level defaults whenever a function is called
with ``cap=None``. The CLI overrides them from its flags.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import TooLarge


@dataclass
class RunConfig:
    enum_cap: int = 2_000_000
    search_cap: int = 10_000
    census_cap: int = 2048
    dense_cap: int = 4096
    moment_cap: int = 200_000
    threads: int = 1
    cache_dir: Path | None = None
    output_format: str = "json"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("enum_cap", "search_cap", "census_cap", "dense_cap", "moment_cap", "threads"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.output_format not in ("table", "json"):
            raise ValueError("output_format must be 'table' or 'json'")


CONFIG = RunConfig()


def check_cap(size: int, cap: int | None, what: str, default: str = "enum_cap") -> None:
    limit = getattr(CONFIG, default) if cap is None else cap
    if size > limit:
        raise TooLarge(f"{what}: {size} exceeds cap {limit}")
