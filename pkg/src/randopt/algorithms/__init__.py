"""The four randomized optimizers and their configuration types."""

from .configs import (
    CONFIG_TYPES,
    AlgorithmConfig,
    GaConfig,
    MimicConfig,
    RhcConfig,
    SaConfig,
    config_params,
    make_config,
)
from .ga import ga
from .mimic import mimic
from .rhc import rhc
from .sa import sa

OPTIMIZERS = {"RHC": rhc, "SA": sa, "GA": ga, "MIMIC": mimic}


def run_algorithm(problem, cfg, rng, counter=None):
    return OPTIMIZERS[cfg.name](problem, cfg, rng, counter)


__all__ = [
    "AlgorithmConfig", "CONFIG_TYPES", "GaConfig", "MimicConfig", "OPTIMIZERS", "RhcConfig",
    "SaConfig", "config_params", "ga", "make_config", "mimic", "rhc", "run_algorithm", "sa",
]
