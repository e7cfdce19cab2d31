"""Self-Wiener robust deconvolution of deterministic signals."""

__version__ = "0.1.0"

from .analysis import (
    BinContext,
    MsePrediction,
    mmse_bin,
    predicted_mse_bin,
    predicted_mse_total,
    rho,
    threshold_probability,
    varrho,
)
from .deconvolvers import (
    LeastSquaresDeconvolver,
    ModifiedWienerDeconvolver,
    SelfWienerDeconvolver,
    TikhonovDeconvolver,
)
from .estimators import (
    DeconvProblem,
    EstimateResult,
    empirical_mse,
    fixed_point_iterate,
    ls_estimate,
    mmse_oracle_estimate,
    mw_estimate,
    sw_estimate,
    tik_estimate,
)
from .exceptions import (
    DegenerateDataError,
    DimensionError,
    InvalidInputError,
    NoDecisionError,
    SelfWienerError,
    SingularFilterError,
    SymmetryError,
)
from .noise import NoiseSpec, estimate_px, estimate_sigma_v, generate_noise
from .spectral import circular_convolve, inverse_dft, unitary_dft

__all__ = [
    "BinContext",
    "DeconvProblem",
    "DegenerateDataError",
    "DimensionError",
    "EstimateResult",
    "InvalidInputError",
    "LeastSquaresDeconvolver",
    "ModifiedWienerDeconvolver",
    "MsePrediction",
    "NoDecisionError",
    "NoiseSpec",
    "SelfWienerDeconvolver",
    "SelfWienerError",
    "SingularFilterError",
    "SymmetryError",
    "TikhonovDeconvolver",
    "circular_convolve",
    "empirical_mse",
    "estimate_px",
    "estimate_sigma_v",
    "fixed_point_iterate",
    "generate_noise",
    "inverse_dft",
    "ls_estimate",
    "mmse_bin",
    "mmse_oracle_estimate",
    "mw_estimate",
    "predicted_mse_bin",
    "predicted_mse_total",
    "rho",
    "sw_estimate",
    "threshold_probability",
    "tik_estimate",
    "unitary_dft",
    "varrho",
]
