"""Noise generation with exact variance calibration, and MAD noise-level estimation.

Random streams come from NumPy's PCG64 seeded through :class:`numpy.random.SeedSequence`
with a ``spawn_key``: ``(seed, key)`` fully determines the samples, so trials
indexed by ``key = (grid_index, trial_index)`` can run in any order or in
parallel and still reproduce bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateDataError, InvalidInputError

FAMILIES = ("gaussian", "laplace", "uniform")
#: Consistency factor of the MAD for Gaussian data, 1 / Phi^{-1}(3/4).
MAD_GAUSS = 1.4826


@dataclass(frozen=True)
class NoiseSpec:
    family: str = "gaussian"
    sigma_v2: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown noise family {self.family!r}; expected one of {FAMILIES}")
        if not (self.sigma_v2 > 0 and math.isfinite(self.sigma_v2)):
            raise InvalidInputError(f"sigma_v2 must be finite and > 0, got {self.sigma_v2}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")


def noise_rng(seed, key=()):
    """Independent generator for substream ``key`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in key))
    return np.random.Generator(np.random.PCG64(ss))


def draw(family, sigma_v2, size, rng):
    """Zero-mean i.i.d. samples of the given family with variance ``sigma_v2``."""
    if family == "gaussian":
        return rng.normal(0.0, math.sqrt(sigma_v2), size)
    if family == "laplace":
        # var = 2 b^2
        return rng.laplace(0.0, math.sqrt(sigma_v2 / 2.0), size)
    if family == "uniform":
        # var = a^2 / 3
        half_width = math.sqrt(3.0 * sigma_v2)
        return rng.uniform(-half_width, half_width, size)
    raise InvalidInputError(f"unknown noise family {family!r}")


def generate_noise(spec, n, key=()):
    """Time-domain noise of length ``n`` for substream ``key`` of ``spec.seed``."""
    if int(n) < 2:
        raise InvalidInputError(f"noise length must be >= 2, got {n}")
    return draw(spec.family, spec.sigma_v2, int(n), noise_rng(spec.seed, key))


def white_psd(sigma_v2, n):
    """Flat PSD array for white noise of variance ``sigma_v2``."""
    if not sigma_v2 > 0:
        raise InvalidInputError(f"sigma_v2 must be > 0, got {sigma_v2}")
    return np.full(int(n), float(sigma_v2))


def _mad(u):
    med = np.median(u, axis=-1, keepdims=True)
    return np.median(np.abs(u - med), axis=-1)


def estimate_sigma_v(Y):
    """Robust noise standard deviation from a measured spectrum.

    ``sigma = 1.4826 / sqrt(2) * (MAD(Re Y) + MAD(Im Y))`` over all bins
    (the real bins are included). Accepts a batch with bins on the last axis.
    """
    Y = np.asarray(Y, dtype=np.complex128)
    if Y.shape[-1] < 4:
        raise InvalidInputError(f"need at least 4 bins, got {Y.shape[-1]}")
    sigma = MAD_GAUSS / math.sqrt(2.0) * (_mad(Y.real) + _mad(Y.imag))
    if np.any(sigma <= 0):
        raise DegenerateDataError("median absolute deviation is zero; cannot estimate noise")
    return float(sigma) if np.ndim(sigma) == 0 else sigma


def estimate_px(Y, sigma_v2_hat):
    """Signal power estimate ``mean|Y|^2 - sigma_v2_hat``, floored at ``1e-12 * mean|Y|^2``."""
    Y = np.asarray(Y, dtype=np.complex128)
    py = np.mean(np.abs(Y) ** 2, axis=-1)
    px = np.maximum(py - np.asarray(sigma_v2_hat, dtype=float), 1e-12 * py)
    return float(px) if np.ndim(px) == 0 else px
