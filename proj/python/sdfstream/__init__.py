"""Streaming Deep Forest: synthetic streams, cascade of adaptive random forests,
budgeted active learning and rank statistics."""

from ._core import (
    Adwin,
    BudgetState,
    ConfigError,
    ContractError,
    DataError,
    HoeffdingTree,
    Rng,
    SchemaError,
    StreamingDeepForest,
    average_ranks,
    decide,
    friedman_nemenyi,
    generate,
    hoeffding_bound,
    label_fraction_simulation,
    layer_input,
    layer_subspace_sizes,
    nemenyi_q,
    run_prequential,
    stream_schema,
    successor_probability,
    threshold_limit_oracle,
)

__all__ = [
    "Adwin",
    "BudgetState",
    "ConfigError",
    "ContractError",
    "DataError",
    "HoeffdingTree",
    "Rng",
    "SchemaError",
    "StreamingDeepForest",
    "average_ranks",
    "decide",
    "friedman_nemenyi",
    "generate",
    "hoeffding_bound",
    "label_fraction_simulation",
    "layer_input",
    "layer_subspace_sizes",
    "nemenyi_q",
    "run_prequential",
    "stream_schema",
    "successor_probability",
    "threshold_limit_oracle",
]
