"""Run configuration, loaded from JSON and validated up front."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .jacobi import BASE_COORD, _is_pow2_multiple

OUTPUT_ENV = "FBANNULUS_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    zero_tol: float = 1e-6
    newton_tol: float = 1e-10
    ode_step: float = 1e-4
    spectrum_levels: tuple[int, ...] = (257, 513, 1025)
    sweep_t_min: float = 0.0
    sweep_t_max: float = 0.3
    sweep_steps: int = 7
    probe_t: tuple[float, ...] = (0.0, 0.05, 0.1)
    morse_trials: int = 20
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        self.spectrum_levels = tuple(int(g) for g in self.spectrum_levels)
        self.probe_t = tuple(float(t) for t in self.probe_t)
        self.validate()

    def validate(self):
        for name in ("zero_tol", "newton_tol", "ode_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for g in self.spectrum_levels:
            if not _is_pow2_multiple(g - 1, BASE_COORD):
                raise ConfigError(f"grid size {g} is not base {BASE_COORD} times a power of two, plus one")
        if len(self.spectrum_levels) < 2:
            raise ConfigError("need at least two spectrum refinement levels")
        if self.sweep_steps < 1 or self.sweep_t_min > self.sweep_t_max:
            raise ConfigError("empty sweep range")
        if self.morse_trials < 1:
            raise ConfigError("morse_trials must be at least 1")

    @classmethod
    def load(cls, path: str | os.PathLike | None = None) -> "Config":
        data = {}
        if path is not None:
            data = json.loads(Path(path).read_text())
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        # the environment may only redirect outputs
        env = os.environ.get(OUTPUT_ENV)
        if env:
            cfg.output_dir = env
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spectrum_levels"] = list(self.spectrum_levels)
        d["probe_t"] = list(self.probe_t)
        return d
