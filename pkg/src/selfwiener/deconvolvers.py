"""scikit-learn compatible deconvolution transformers.

Each row of ``X`` is one length-``N`` time-domain measurement ``y = h (*) x + v``
(circular convolution); :meth:`transform` returns the deconvolved rows.
The estimators follow the usual conventions: hyper-parameters are stored
verbatim by ``__init__``, everything learned ends in an underscore, and
:func:`sklearn.base.clone` / ``Pipeline`` work out of the box.

>>> import numpy as np
>>> from selfwiener import SelfWienerDeconvolver
>>> h = np.r_[0.75, 0.1875, np.zeros(6)]
>>> est = SelfWienerDeconvolver(kernel=h, noise_var=0.01)
>>> est.fit_transform(np.zeros((2, 8))).shape
(2, 8)
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .estimators import (
    DeconvProblem,
    ls_estimate,
    mw_estimate,
    sw_estimate,
    tik_estimate,
)
from .exceptions import DimensionError, InvalidInputError
from .noise import estimate_px, estimate_sigma_v


def _noise_psd(noise_var, n):
    if isinstance(noise_var, numbers.Real):
        if not noise_var > 0:
            raise InvalidInputError(f"noise_var must be > 0, got {noise_var}")
        return np.full(n, float(noise_var))
    sv = np.asarray(noise_var, dtype=np.float64)
    if sv.shape != (n,):
        raise DimensionError(f"per-bin noise_var must have shape ({n},), got {sv.shape}")
    if np.any(sv <= 0) or not np.all(np.isfinite(sv)):
        raise InvalidInputError("per-bin noise_var must be finite and > 0")
    return sv.copy()


class _BaseDeconvolver(TransformerMixin, BaseEstimator):
    """Shared fit/transform logic.

    Parameters
    ----------
    kernel : array-like of shape (n_features,)
        Impulse response ``h`` (``kernel_domain="time"``) or the frequency
        response ``H`` acting on unitary spectra (``kernel_domain="frequency"``).
    noise_var : float, array-like of shape (n_features,) or "auto"
        White-noise variance, per-bin noise PSD, or ``"auto"`` to estimate a
        white level with the MAD rule from the data passed to :meth:`fit`.
    kernel_domain : {"time", "frequency"}
    """

    _uses_noise = True

    def __init__(self, kernel=None, noise_var="auto", kernel_domain="time"):
        self.kernel = kernel
        self.noise_var = noise_var
        self.kernel_domain = kernel_domain

    def _filter_response(self, n):
        if self.kernel is None:
            raise InvalidInputError("kernel is required")
        if self.kernel_domain == "time":
            k = check_array(np.atleast_1d(self.kernel), ensure_2d=False, dtype=np.float64)
            H = np.fft.fft(k)
        elif self.kernel_domain == "frequency":
            H = np.asarray(self.kernel, dtype=np.complex128)
        else:
            raise InvalidInputError(f"kernel_domain must be 'time' or 'frequency', got {self.kernel_domain!r}")
        if H.shape != (n,):
            raise DimensionError(f"kernel has {H.shape[-1]} taps but X has {n} features")
        return H

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64, ensure_min_features=2)
        self.n_features_in_ = X.shape[1]
        self.filter_response_ = self._filter_response(X.shape[1])
        if self._uses_noise:
            if isinstance(self.noise_var, str):
                if self.noise_var != "auto":
                    raise InvalidInputError("noise_var must be a number, an array or 'auto'")
                spectra = np.fft.fft(X, axis=1, norm="ortho")
                sigma = np.median(np.atleast_1d(estimate_sigma_v(spectra)))
                self.noise_psd_ = np.full(X.shape[1], sigma ** 2)
            else:
                self.noise_psd_ = _noise_psd(self.noise_var, X.shape[1])
        return self

    def _spectra(self, X):
        check_is_fitted(self, "filter_response_")
        X = check_array(X, dtype=np.float64, ensure_min_features=2)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return np.fft.fft(X, axis=1, norm="ortho")

    def _problem(self, X):
        Y = self._spectra(X)
        sv = getattr(self, "noise_psd_", None)
        return DeconvProblem(Y, self.filter_response_, np.ones(Y.shape[1]) if sv is None else sv)

    def transform(self, X):
        """Deconvolve each row; returns real time-domain estimates."""
        X_hat = self._estimate_spectra(self._problem(X))
        return np.fft.ifft(X_hat, axis=1, norm="ortho").real

    def score(self, X, y):
        """Negative mean (over rows) of the summed squared reconstruction error."""
        y = check_array(y, dtype=np.float64)
        return -float(np.mean(np.sum((self.transform(X) - y) ** 2, axis=1)))


class SelfWienerDeconvolver(_BaseDeconvolver):
    """Tuning-free threshold/shrinkage deconvolution.

    Bins whose normalized magnitude ``|Y| / sqrt(Sv)`` does not exceed 2 are
    zeroed; the rest are inverse-filtered and shrunk by
    ``(1 + sqrt(1 - 4 Sv / |Y|^2)) / 2``.

    Attributes
    ----------
    filter_response_ : ndarray of shape (n_features,)
    noise_psd_ : ndarray of shape (n_features,)
    n_features_in_ : int
    """

    def _estimate_spectra(self, problem):
        return sw_estimate(problem).x_hat

    def estimate(self, X):
        """Full :class:`~selfwiener.estimators.EstimateResult` (spectra and diagnostics)."""
        return sw_estimate(self._problem(X))


class LeastSquaresDeconvolver(_BaseDeconvolver):
    """Plain inverse filter ``Y / H``; ``noise_var`` is ignored."""

    _uses_noise = False

    def __init__(self, kernel=None, kernel_domain="time"):
        super().__init__(kernel=kernel, noise_var=None, kernel_domain=kernel_domain)

    def _estimate_spectra(self, problem):
        return ls_estimate(problem)


class TikhonovDeconvolver(_BaseDeconvolver):
    """Tikhonov filter ``H* / (|H|^2 + Sv / P_x)``.

    ``signal_power="auto"`` estimates ``P_x`` per row as ``mean|Y|^2 - mean(Sv)``.
    """

    def __init__(self, kernel=None, noise_var="auto", signal_power="auto", kernel_domain="time"):
        super().__init__(kernel=kernel, noise_var=noise_var, kernel_domain=kernel_domain)
        self.signal_power = signal_power

    def _estimate_spectra(self, problem):
        if isinstance(self.signal_power, str):
            px = estimate_px(problem.Y, float(np.mean(problem.Sv)))[:, None]
        else:
            px = self.signal_power
        return tik_estimate(problem, px)


class ModifiedWienerDeconvolver(_BaseDeconvolver):
    """Modified Wiener filter with noise-control parameter ``q >= 1``."""

    def __init__(self, kernel=None, noise_var="auto", q=2.0, kernel_domain="time"):
        super().__init__(kernel=kernel, noise_var=noise_var, kernel_domain=kernel_domain)
        self.q = q

    def _estimate_spectra(self, problem):
        return mw_estimate(problem, self.q)
