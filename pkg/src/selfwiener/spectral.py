"""Unitary DFT plumbing.

All transforms use the unitary convention ``X[k] = N**-0.5 * sum_n x[n] e^{-2j pi nk/N}``.
Under this normalization the circular convolution theorem reads
``udft(a (*) b) = sqrt(N) * udft(a) * udft(b)``; a filter with impulse
response ``h`` therefore acts on unitary spectra through its *plain* DFT
``H = sqrt(N) * udft(h)`` (see :func:`filter_response`).
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, InvalidInputError, SymmetryError

#: Imaginary residue (relative) above which :func:`inverse_dft` refuses to
#: drop the imaginary part.
SYMMETRY_ERROR_TOL = 1e-6


def as_time_signal(samples, name="signal"):
    """Validate and return a 1-D float array of length >= 2."""
    x = np.asarray(samples)
    if np.iscomplexobj(x):
        raise InvalidInputError(f"{name} must be real-valued")
    x = x.astype(np.float64, copy=False)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {x.shape}")
    if x.size < 2:
        raise InvalidInputError(f"{name} must have length >= 2, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    return x


def as_spectrum(bins, name="spectrum"):
    """Validate and return a 1-D complex array of length >= 2."""
    X = np.asarray(bins, dtype=np.complex128)
    if X.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {X.shape}")
    if X.size < 2:
        raise InvalidInputError(f"{name} must have length >= 2, got {X.size}")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError(f"{name} contains non-finite bins")
    return X


def unitary_dft(samples):
    """Unitary DFT of a real signal (any algorithm; checked against the direct sum)."""
    x = as_time_signal(samples)
    return np.fft.fft(x, norm="ortho")


def inverse_dft(bins, return_residue=False):
    """Inverse unitary DFT returning the real part.

    The imaginary residue ``max|Im x| / max|x|`` is computed for every call;
    if it exceeds ``SYMMETRY_ERROR_TOL`` the spectrum was not the transform of
    a real signal and :class:`SymmetryError` is raised.

    Parameters
    ----------
    bins : array_like, complex
        Spectrum of length N >= 2.
    return_residue : bool
        Also return the relative imaginary residue.
    """
    X = as_spectrum(bins)
    z = np.fft.ifft(X, norm="ortho")
    scale = np.max(np.abs(z))
    residue = float(np.max(np.abs(z.imag)) / scale) if scale > 0 else 0.0
    if residue > SYMMETRY_ERROR_TOL:
        raise SymmetryError(
            f"spectrum is not conjugate-symmetric (imaginary residue {residue:.3g})"
        )
    if return_residue:
        return z.real.copy(), residue
    return z.real.copy()


def is_conjugate_symmetric(bins, rtol=1e-9):
    """True if ``bins[k] == conj(bins[-k mod N])`` within ``rtol`` of the peak magnitude."""
    X = np.asarray(bins, dtype=np.complex128)
    mirrored = np.conj(np.roll(X[::-1], 1))
    scale = max(np.max(np.abs(X)), np.finfo(float).tiny)
    return bool(np.max(np.abs(X - mirrored)) <= rtol * scale)


def circular_convolve(a, b):
    """Circular convolution ``c[n] = sum_k a[k] b[(n-k) mod N]``."""
    a = as_time_signal(a, "a")
    b = as_time_signal(b, "b")
    if a.size != b.size:
        raise DimensionError(f"length mismatch: {a.size} != {b.size}")
    return np.fft.ifft(np.fft.fft(a) * np.fft.fft(b)).real


def filter_response(kernel):
    """Multiplier ``H`` acting on unitary spectra for a circular filter ``kernel``.

    This is the plain (unnormalized) DFT, i.e. ``sqrt(N) * unitary_dft(kernel)``,
    so that ``unitary_dft(circular_convolve(h, x)) == filter_response(h) * unitary_dft(x)``.
    """
    h = as_time_signal(kernel, "kernel")
    return np.fft.fft(h)


def real_bins(n):
    """Indices of DFT bins that are real for real signals: {0} or {0, N/2}."""
    return (0, n // 2) if n % 2 == 0 else (0,)


def real_bin_mask(n):
    mask = np.zeros(n, dtype=bool)
    mask[list(real_bins(n))] = True
    return mask
