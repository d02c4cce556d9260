"""Optimizer settings. Defaults follow the baseline column of the study grid."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import ClassVar, Union

from ..core import ConfigurationError


def _check_budget(cfg) -> None:
    if cfg.max_iters < 1:
        raise ConfigurationError(f"{cfg.name}: max_iters must be positive")
    if cfg.max_attempts < 1:
        raise ConfigurationError(f"{cfg.name}: max_attempts must be positive")
    if cfg.max_attempts > cfg.max_iters:
        raise ConfigurationError(f"{cfg.name}: max_attempts may not exceed max_iters")


@dataclass(frozen=True)
class RhcConfig:
    restarts: int = 0
    max_iters: int = 1000
    max_attempts: int = 10

    name: ClassVar[str] = "RHC"

    @property
    def param_label(self) -> str:
        return f"Restarts={self.restarts}"

    def validate(self) -> None:
        if self.restarts < 0:
            raise ConfigurationError("RHC: restarts must be non-negative")
        _check_budget(self)


@dataclass(frozen=True)
class SaConfig:
    exp_const: float = 0.005
    t0: float = 1.0
    min_temp: float = 0.001
    max_iters: int = 1000
    max_attempts: int = 10

    name: ClassVar[str] = "SA"

    @property
    def param_label(self) -> str:
        return f"ExpConst={self.exp_const:g}"

    def validate(self) -> None:
        if self.exp_const <= 0:
            raise ConfigurationError("SA: exp_const must be positive")
        if not 0 < self.min_temp < self.t0:
            raise ConfigurationError("SA: need 0 < min_temp < t0")
        _check_budget(self)


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 200
    mutation_prob: float = 0.1
    max_iters: int = 1000
    max_attempts: int = 50

    name: ClassVar[str] = "GA"

    @property
    def param_label(self) -> str:
        return f"PopSize={self.pop_size}"

    def validate(self) -> None:
        if self.pop_size < 2 or self.pop_size % 2:
            raise ConfigurationError("GA: pop_size must be an even number >= 2")
        if not 0 < self.mutation_prob < 1:
            raise ConfigurationError("GA: mutation_prob must lie in (0, 1)")
        _check_budget(self)


@dataclass(frozen=True)
class MimicConfig:
    pop_size: int = 200
    keep_fraction: float = 0.2
    smoothing: float = 0.5
    max_iters: int = 1000
    max_attempts: int = 10

    name: ClassVar[str] = "MIMIC"

    @property
    def param_label(self) -> str:
        return f"PopSize={self.pop_size}"

    @property
    def keep(self) -> int:
        return math.ceil(self.keep_fraction * self.pop_size)

    def validate(self) -> None:
        if not 0 < self.keep_fraction < 1:
            raise ConfigurationError("MIMIC: keep_fraction must lie in (0, 1)")
        if self.keep < 2:
            raise ConfigurationError("MIMIC: the retained set must hold at least 2 samples")
        if self.smoothing <= 0:
            raise ConfigurationError("MIMIC: smoothing must be positive")
        _check_budget(self)


AlgorithmConfig = Union[RhcConfig, SaConfig, GaConfig, MimicConfig]
CONFIG_TYPES = {cls.name: cls for cls in (RhcConfig, SaConfig, GaConfig, MimicConfig)}


def config_params(cfg: AlgorithmConfig) -> dict:
    return asdict(cfg)


def make_config(algorithm: str, **params) -> AlgorithmConfig:
    try:
        cls = CONFIG_TYPES[algorithm.upper()]
    except KeyError:
        raise ConfigurationError(
            f"unknown algorithm {algorithm!r}; valid: {', '.join(CONFIG_TYPES)}"
        ) from None
    try:
        cfg = cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"{cls.name}: {exc}") from None
    cfg.validate()
    return cfg
