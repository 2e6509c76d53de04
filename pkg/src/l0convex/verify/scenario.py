"""Scenario records: everything a suite run depends on, including the seed."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError, StructuralError
from ..lattice import AtomSpace

__all__ = ["Scenario"]


@dataclass(frozen=True)
class Scenario:
    suite: str
    seed: int = 0
    atoms: tuple = (0.25, 0.25, 0.25, 0.25)
    dim: int = 2
    trials: int = 100
    tolerance: float = 1e-8
    # suite knobs
    min_pieces: int = 2
    max_pieces: int = 4
    points: int = 100
    dual_points: int = 50
    functions: int = 20
    domain_prob: float = 0.3
    slope_scale: float = 1.0
    param_scale: float = 1.0
    identity_params: bool = False
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(float(p) for p in self.atoms))
        try:
            AtomSpace(self.atoms)
        except StructuralError as exc:
            raise ConfigError(f"invalid atoms: {exc}") from None
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not 1 <= self.min_pieces <= self.max_pieces:
            raise ConfigError("need 1 <= min_pieces <= max_pieces")
        if self.points < 1 or self.dual_points < 1 or self.functions < 1:
            raise ConfigError("points, dual_points and functions must be positive")
        if not 0.0 <= self.domain_prob <= 1.0:
            raise ConfigError("domain_prob must lie in [0, 1]")
        if not self.tolerance > 0.0:
            raise ConfigError("tolerance must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be positive")

    @property
    def space(self) -> AtomSpace:
        return AtomSpace(self.atoms)

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "Scenario":
        known = {f.name for f in dataclasses.fields(cls)}
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        unknown = set(merged) - known
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        if "suite" not in merged:
            raise ConfigError("scenario needs a suite name")
        return cls(**merged)

    @classmethod
    def from_file(cls, path, **overrides) -> "Scenario":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("scenario file must hold a JSON object")
        return cls.from_dict(data, **overrides)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)
