"""Thresholding scheme for mean-curvature flow on the periodic unit torus.

Fields are NumPy arrays with one axis per dimension and the same power-of-two
length on every axis; cell i sits at (i + 1/2) / n.
"""

from ._core import (
    c0,
    dissipation_density,
    energy,
    equivalent_radius,
    gaussian_identities,
    interpolate,
    metric,
    pair_measure,
    perimeter_estimate,
    run,
    sample_disc,
    sample_random,
    sample_stripe,
    slope_lower,
    threshold_step,
)

__all__ = [
    "c0",
    "dissipation_density",
    "energy",
    "equivalent_radius",
    "gaussian_identities",
    "interpolate",
    "metric",
    "pair_measure",
    "perimeter_estimate",
    "run",
    "sample_disc",
    "sample_random",
    "sample_stripe",
    "slope_lower",
    "threshold_step",
]
