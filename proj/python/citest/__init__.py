"""Python access to the citest conditional independence tests."""

from ._citest import (
    ConfigError,
    ConstructionError,
    DataError,
    DimensionError,
    Error,
    InsufficientSampleError,
    OutOfSupportError,
    ToleranceError,
    UnsupportedDimensionError,
    bin_count,
    couple,
    flattened_u_statistic,
    generate,
    run_test,
    simulate,
    smoothness,
    u_statistic,
    u_statistic_naive,
)

__all__ = [
    "ConfigError",
    "ConstructionError",
    "DataError",
    "DimensionError",
    "Error",
    "InsufficientSampleError",
    "OutOfSupportError",
    "ToleranceError",
    "UnsupportedDimensionError",
    "bin_count",
    "couple",
    "flattened_u_statistic",
    "generate",
    "run_test",
    "simulate",
    "smoothness",
    "u_statistic",
    "u_statistic_naive",
]
