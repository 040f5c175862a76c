"""AFDM ISAC numerical lab: DAFT modem, pilots, estimator and sensing experiments."""

from ._afdm_isac import (
    AfdmConfig,
    ConfigError,
    NumericalError,
    ambiguity,
    daft,
    daft_matrix,
    idaft,
    max_sidelobe,
    presets,
    proposed_pilot,
    run,
    scenarios,
    single_pilot,
    zc_sequence,
)

__all__ = [
    "AfdmConfig",
    "ConfigError",
    "NumericalError",
    "ambiguity",
    "daft",
    "daft_matrix",
    "idaft",
    "max_sidelobe",
    "presets",
    "proposed_pilot",
    "run",
    "scenarios",
    "single_pilot",
    "zc_sequence",
]
