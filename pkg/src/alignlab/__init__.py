"""Multi-agent RL laboratory for alignment embeddings with stability certification."""

from .environment import EnvConfig, GridWorld, reset, step
from .errors import (
    CertificationWarning,
    ConfigError,
    DomainError,
    InsufficientDataError,
    NumericalAbort,
    ShapeError,
    StateError,
)
from .trainer import Trainer, TrainerConfig, VanillaTrainer, stability_preset

__version__ = "0.1.0"

__all__ = [
    "CertificationWarning",
    "ConfigError",
    "DomainError",
    "EnvConfig",
    "GridWorld",
    "InsufficientDataError",
    "NumericalAbort",
    "ShapeError",
    "StateError",
    "Trainer",
    "TrainerConfig",
    "VanillaTrainer",
    "reset",
    "stability_preset",
    "step",
]
