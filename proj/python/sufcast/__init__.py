"""Factor-based sufficient forecasting for large predictor panels."""

from ._sufcast import (
    ConfigError,
    DataError,
    NumericalError,
    SufcastError,
    estimate_factors,
    forecast,
    run_replications,
    sdr_directions,
    select_num_factors,
    simulate,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "SufcastError",
    "estimate_factors",
    "forecast",
    "run_replications",
    "sdr_directions",
    "select_num_factors",
    "simulate",
]
