"""Python bindings for the neurogame core library."""

from ._core import (
    EmbeddingGame,
    Game,
    LimitError,
    NumericalError,
    TabularGame,
    demo,
    estimate,
    exact_values,
    gibbs_tilted_values,
    run,
    schema_version,
    solve_mean_field,
    spin_marginals,
)

__all__ = [
    "EmbeddingGame",
    "Game",
    "LimitError",
    "NumericalError",
    "TabularGame",
    "demo",
    "estimate",
    "exact_values",
    "gibbs_tilted_values",
    "run",
    "schema_version",
    "solve_mean_field",
    "spin_marginals",
]
