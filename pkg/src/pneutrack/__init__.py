"""Simulation and control of a hysteretic pneumatic bending actuator.

Cascade PID tracking with an adaptive anti-hysteresis tuner that scales the
feedback and feedforward gains around reference U-turns.
"""
from .cascade import ControllerParams, LoopState, PidGains
from .config import ConfigError, RunConfig, dumps_config, load_config, loads_config
from .harness import (
    Comparison,
    EpisodeTrace,
    LoopTable,
    MetricsReport,
    compare_methods,
    compute_metrics,
    identify_hysteresis,
    run_episode,
    sweep,
)
from .plant import PlantParams, PlantState
from .signals import DiffState, ReferenceKind, ReferenceSpec, gradual_reference, rapid_reference
from .tuner import ChannelParams, Mode, TunerParams, TunerState

__all__ = [
    "ChannelParams",
    "Comparison",
    "ConfigError",
    "ControllerParams",
    "DiffState",
    "EpisodeTrace",
    "LoopState",
    "LoopTable",
    "MetricsReport",
    "Mode",
    "PidGains",
    "PlantParams",
    "PlantState",
    "ReferenceKind",
    "ReferenceSpec",
    "RunConfig",
    "TunerParams",
    "TunerState",
    "compare_methods",
    "compute_metrics",
    "dumps_config",
    "gradual_reference",
    "identify_hysteresis",
    "load_config",
    "loads_config",
    "rapid_reference",
    "run_episode",
    "sweep",
]
