"""Analytical per-bin MSE of the Self-Wiener estimator.

For a bin with signal power ``|X|^2``, effective noise ``s2 = Sv/|H|^2`` and
output SNR ``S = |X|^2 / s2`` the predictor combines two asymptotic forms:

* low SNR:  ``eps_low  = |X|^2 + c * s2`` with ``c = rho`` (complex bins) or
  ``varrho`` (real bins ``k = 0, N/2``);
* high SNR: ``eps_high = (1 - p) |X|^2 + p * s2`` with ``p = P(|Z| > 2)``;

and blends them linearly in dB over ``[-tau, tau]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .exceptions import DimensionError, InvalidInputError
from .spectral import real_bin_mask
from .special import bessel_k1, gaussian_q, marcum_q1

DEFAULT_TAU_DB = 6.0


def rho():
    """Residual-MSE constant of a pure-noise complex bin (about 0.0464)."""
    e2, e4 = math.exp(-2.0), math.exp(-4.0)
    return 0.5 * (5.0 * e4 + 2.0 * e2 * float(bessel_k1(2.0)) - 2.0 * e4)


def varrho():
    """Residual-MSE constant of a pure-noise real bin (about 0.1529)."""
    e2 = math.exp(-2.0)
    return e2 / 2.0 + e2 * math.sqrt(2.0 / math.pi) - float(gaussian_q(2.0))


def rho_quadrature():
    """``rho`` by adaptive quadrature over the chi-square(2) tail beyond 8."""

    def integrand(t):
        return (t / 2 + math.sqrt(t * t / 4 - 2 * t) - 2) * 0.25 * math.exp(-t / 2)

    value, _ = integrate.quad(integrand, 8.0, np.inf, epsabs=1e-13, epsrel=1e-12)
    return value


def varrho_quadrature():
    """``varrho`` by adaptive quadrature over the Gaussian tail beyond 2."""

    def integrand(v):
        phi = math.exp(-v * v / 2) / math.sqrt(2 * math.pi)
        return (v * v - 2 + math.sqrt(v ** 4 - 4 * v * v)) * phi

    value, _ = integrate.quad(integrand, 2.0, np.inf, epsabs=1e-13, epsrel=1e-12)
    return value


_RHO = rho()
_VARRHO = varrho()


@dataclass(frozen=True)
class BinContext:
    """Signal power and effective noise level of one frequency bin."""

    x_abs2: float
    sigma_eff2: float
    is_real_bin: bool = False

    def __post_init__(self):
        if not (self.sigma_eff2 > 0 and math.isfinite(self.sigma_eff2)):
            raise InvalidInputError(f"sigma_eff2 must be finite and > 0, got {self.sigma_eff2}")
        if not (self.x_abs2 >= 0 and math.isfinite(self.x_abs2)):
            raise InvalidInputError(f"x_abs2 must be finite and >= 0, got {self.x_abs2}")

    @classmethod
    def from_snr(cls, snr_out, sigma_eff2=1.0, is_real_bin=False):
        return cls(snr_out * sigma_eff2, sigma_eff2, is_real_bin)

    @property
    def snr_out(self):
        return self.x_abs2 / self.sigma_eff2

    @property
    def snr_out_db(self):
        return 10.0 * math.log10(self.snr_out) if self.snr_out > 0 else -math.inf


@dataclass(frozen=True)
class MsePrediction:
    mse: float
    regime: str
    p: float
    eps_low2: float
    eps_high2: float
    f_tau: Optional[float]
    tau_db: float


def threshold_probability(ctx):
    """Probability that the bin's ``|Z|`` exceeds the threshold 2."""
    if ctx.is_real_bin:
        eta = math.sqrt(ctx.snr_out)
        return float(gaussian_q(2.0 - eta) + gaussian_q(2.0 + eta))
    return float(marcum_q1(math.sqrt(2.0 * ctx.snr_out), 2.0 * math.sqrt(2.0)))


def mmse_bin(ctx):
    """MSE of the unrealizable oracle filter, ``|X|^2 / (1 + SNR_out)``."""
    return ctx.x_abs2 / (1.0 + ctx.snr_out)


def optimality_gap_low(ctx):
    """Low-SNR gap ``eps_low - MMSE`` written in closed form (needs ``SNR_out > 0``)."""
    s = ctx.snr_out
    c = _VARRHO if ctx.is_real_bin else _RHO
    return ctx.x_abs2 * (s + c * (1.0 + 1.0 / s)) / (1.0 + s)


def optimality_gap_high(ctx):
    """High-SNR gap with ``p = 1``: ``sigma_eff2 / (1 + SNR_out)``."""
    return ctx.sigma_eff2 / (1.0 + ctx.snr_out)


def predicted_mse_bin(ctx, tau_db=DEFAULT_TAU_DB):
    """Predicted SW MSE of one bin, interpolated in dB between regimes."""
    if not tau_db > 0:
        raise InvalidInputError(f"tau_db must be > 0, got {tau_db}")
    p = threshold_probability(ctx)
    c = _VARRHO if ctx.is_real_bin else _RHO
    eps_low2 = ctx.x_abs2 + c * ctx.sigma_eff2
    eps_high2 = (1.0 - p) * ctx.x_abs2 + p * ctx.sigma_eff2
    snr_db = ctx.snr_out_db
    if snr_db < -tau_db:
        return MsePrediction(eps_low2, "low", p, eps_low2, eps_high2, None, tau_db)
    if snr_db > tau_db:
        return MsePrediction(eps_high2, "high", p, eps_low2, eps_high2, None, tau_db)
    f = 0.5 * (1.0 - snr_db / tau_db)
    mse = eps_low2 * f + eps_high2 * (1.0 - f)
    return MsePrediction(mse, "interpolated", p, eps_low2, eps_high2, f, tau_db)


def bin_contexts(x_true, H, Sv):
    """Build one :class:`BinContext` per bin; ``k = 0`` (and ``N/2``) are real bins."""
    X = np.asarray(x_true, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    Sv = np.broadcast_to(np.asarray(Sv, dtype=np.float64), X.shape)
    if X.ndim != 1 or H.shape != X.shape:
        raise DimensionError(f"x_true {X.shape} and H {H.shape} must be equal 1-D shapes")
    is_real = real_bin_mask(X.size)
    x2 = np.abs(X) ** 2
    s2 = Sv / np.abs(H) ** 2
    return [BinContext(float(x2[k]), float(s2[k]), bool(is_real[k])) for k in range(X.size)]


def predicted_mse_total(x_true, H, Sv, tau_db=DEFAULT_TAU_DB):
    """Sum of per-bin predictions; returns ``(total, predictions)``."""
    preds = [predicted_mse_bin(ctx, tau_db) for ctx in bin_contexts(x_true, H, Sv)]
    return math.fsum(pr.mse for pr in preds), preds
