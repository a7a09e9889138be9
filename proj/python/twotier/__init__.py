"""Two-tier day-ahead solar forecasting.

The global tier forecasts a whole day from history (weighted k-NN or a small
LM-trained network); the local tier corrects the rest of the day from a
least-squares Fourier fit of the latest residuals.
"""

from ._core import (
    DfsFit,
    KnnModel,
    NnModel,
    TwotierError,
    design_matrix,
    fit_dfs,
    fit_knn,
    fit_nn,
    generate,
    improvement_percent,
    load_model,
    neighbor_weights,
    rmse,
    run_cli,
    save_model,
    simulate_day,
)

__all__ = [
    "DfsFit",
    "KnnModel",
    "NnModel",
    "TwotierError",
    "design_matrix",
    "fit_dfs",
    "fit_knn",
    "fit_nn",
    "generate",
    "improvement_percent",
    "load_model",
    "neighbor_weights",
    "rmse",
    "run_cli",
    "save_model",
    "simulate_day",
]
