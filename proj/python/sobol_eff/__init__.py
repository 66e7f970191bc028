"""Sobol' index estimation (Pick-Freeze and given-data) with efficient
influence-function variances and a Monte Carlo efficiency harness."""

from ._core import (
    DegenerateVariance,
    Error,
    InsufficientData,
    InvalidArgument,
    InvalidK,
    InvalidLevel,
    Method,
    MissingTruth,
    MomentVector,
    SobolEstimate,
    efficiency_bound,
    empirical_moments_pf,
    estimate_sobol_gd,
    estimate_sobol_pf,
    expansion_check,
    gd_influence,
    model_truth,
    normal_quantile,
    pf_sobol_influence,
    phi_gradient,
    psi_onestep,
    psi_rank_pairing,
    run_replications,
    sample_givendata,
    sample_pickfreeze,
    sobol_from_moments,
    wald_interval,
)

__all__ = [
    "DegenerateVariance",
    "Error",
    "InsufficientData",
    "InvalidArgument",
    "InvalidK",
    "InvalidLevel",
    "Method",
    "MissingTruth",
    "MomentVector",
    "SobolEstimate",
    "efficiency_bound",
    "empirical_moments_pf",
    "estimate_sobol_gd",
    "estimate_sobol_pf",
    "expansion_check",
    "gd_influence",
    "model_truth",
    "normal_quantile",
    "pf_sobol_influence",
    "phi_gradient",
    "psi_onestep",
    "psi_rank_pairing",
    "run_replications",
    "sample_givendata",
    "sample_pickfreeze",
    "sobol_from_moments",
    "wald_interval",
]
