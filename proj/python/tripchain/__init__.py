"""Daily trip-chain analysis of cellphone stay records."""

from ._tripchain import (
    TripchainError,
    __version__,
    anchor_points,
    canonicalize,
    chain_metrics,
    classify_category,
    fit_lognormal,
    haversine_m,
    kde_raster,
    local_project,
    local_unproject,
    lognormal_density,
    run_pipeline,
    synth,
)

__all__ = [
    "TripchainError",
    "__version__",
    "anchor_points",
    "canonicalize",
    "chain_metrics",
    "classify_category",
    "fit_lognormal",
    "haversine_m",
    "kde_raster",
    "local_project",
    "local_unproject",
    "lognormal_density",
    "run_pipeline",
    "synth",
]
