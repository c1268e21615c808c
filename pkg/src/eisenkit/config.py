"""Run configuration: defaults, config-file parsing, flag overrides."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction


ENV_THREADS = "EISENKIT_THREADS"


@dataclass(frozen=True)
class RunConfig:
    level: int = 4
    weight: str = "1/2"            # "1/2" or "3/2"
    c_max: int = 200
    n_max: int = 8
    heights: tuple[float, float] = (0.7, 1.1)
    w_re: float = 2.5
    w_im: float = 0.0
    seed: int = 20250810
    threads: int = 0               # 0: use env or 1
    out: str = ""
    csv: bool = False
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.level % 4 != 0 or self.level <= 0:
            raise ValueError(f"level must be a positive multiple of 4, got {self.level}")
        if self.weight not in ("1/2", "3/2"):
            raise ValueError(f"weight must be '1/2' or '3/2', got {self.weight!r}")

    @property
    def weight_fraction(self) -> Fraction:
        return Fraction(self.weight)

    @property
    def w(self) -> complex:
        return complex(self.w_re, self.w_im)

    @property
    def worker_count(self) -> int:
        if self.threads > 0:
            return self.threads
        env = os.environ.get(ENV_THREADS, "")
        return max(1, int(env)) if env.isdigit() else 1


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Config file (key = value sections) merged with flag overrides; flags win."""
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise FileNotFoundError(path)
        for section in parser.sections():
            for key, raw in parser.items(section):
                values[key] = raw
        values.update({k: v for k, v in parser.defaults().items()})
    cfg = RunConfig()
    converted = {}
    for f in fields(RunConfig):
        if f.name in values:
            converted[f.name] = _convert(f.name, values[f.name])
    for k, v in overrides.items():
        if v is not None:
            converted[k] = v
    return replace(cfg, **converted)


def _convert(name: str, raw: str):
    if name in ("level", "c_max", "n_max", "seed", "threads"):
        return int(raw)
    if name in ("w_re", "w_im"):
        return float(raw)
    if name == "heights":
        parts = [float(p) for p in raw.replace(",", " ").split()]
        return tuple(parts[:2])
    if name == "csv":
        return raw.strip().lower() in ("1", "true", "yes")
    return raw
