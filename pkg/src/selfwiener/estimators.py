"""Per-bin deconvolution estimators in the unitary-DFT domain.

Every estimator acts independently on each frequency bin of the model
``Y = H X + V``. Arrays may carry leading batch axes (e.g. Monte-Carlo
trials); the last axis is always the frequency index ``k``.

Self-Wiener (SW) is the data-driven threshold/shrinkage rule

    X_sw = (Y / H) * 0.5 * (1 + sqrt(1 - 4 / |Z|^2))   if |Z| > 2
    X_sw = 0                                          otherwise

with ``Z = Y / sqrt(Sv)``. It is the stable fixed point of plugging the
estimate back into the Wiener-like gain ``1 / (1 + Sv / |H X|^2)``; see
:func:`fixed_point_iterate` for the iteration itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DimensionError,
    InvalidInputError,
    NoDecisionError,
    SingularFilterError,
)

#: Relative dead-bin tolerance: bins with ``|H| <= H_TOL_REL * max|H|`` pass nothing.
H_TOL_REL = 1e-12
#: Threshold on ``|Z|``; the boundary itself belongs to the zero branch.
THRESHOLD = 2.0


def _complex(a, name):
    arr = np.asarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class DeconvProblem:
    """Measured spectrum ``Y``, filter response ``H`` and noise PSD ``Sv``.

    ``Y`` has shape ``(..., N)``; ``H`` has shape ``(N,)``; ``Sv`` must
    broadcast against ``Y`` (scalar, per-bin ``(N,)`` or per-trial ``(T, 1)``).
    """

    Y: np.ndarray
    H: np.ndarray
    Sv: np.ndarray

    def __post_init__(self):
        Y = _complex(self.Y, "Y")
        H = _complex(self.H, "H")
        Sv = np.asarray(self.Sv, dtype=np.float64)
        if Y.ndim < 1 or H.ndim != 1:
            raise DimensionError("Y must be at least 1-D and H exactly 1-D")
        if Y.shape[-1] != H.shape[0]:
            raise DimensionError(f"Y has {Y.shape[-1]} bins but H has {H.shape[0]}")
        try:
            np.broadcast_shapes(Sv.shape, Y.shape)
        except ValueError:
            raise DimensionError(f"Sv shape {Sv.shape} does not match Y {Y.shape}") from None
        if Sv.ndim >= 1 and Sv.shape[-1] not in (1, Y.shape[-1]):
            raise DimensionError(f"Sv has {Sv.shape[-1]} bins, expected {Y.shape[-1]}")
        if not np.all(np.isfinite(Sv)) or np.any(Sv <= 0):
            raise InvalidInputError("noise PSD Sv must be finite and > 0 at every bin")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "Sv", Sv)

    @classmethod
    def white(cls, Y, H, sigma_v2):
        """Problem with white noise, ``Sv[k] = sigma_v2`` for every bin."""
        H = np.asarray(H)
        return cls(Y, H, np.full(H.shape[-1], float(sigma_v2)))

    @property
    def n(self):
        return self.H.shape[0]

    @property
    def h_tol(self):
        return H_TOL_REL * float(np.max(np.abs(self.H)))

    @property
    def dead(self):
        """Boolean mask of bins where the filter passes (numerically) nothing."""
        return np.abs(self.H) <= self.h_tol

    @property
    def z(self):
        return self.Y / np.sqrt(self.Sv)

    @property
    def sigma_eff2(self):
        """Effective noise level ``Sv / |H|^2`` (inf on dead bins)."""
        with np.errstate(divide="ignore"):
            return self.Sv / np.abs(self.H) ** 2


@dataclass(frozen=True)
class BinDiagnostics:
    """Per-bin SW diagnostics (arrays shaped like ``Y``)."""

    z_abs: np.ndarray
    above_threshold: np.ndarray
    shrinkage: np.ndarray

    @property
    def snr_out_hat(self):
        return self.z_abs ** 2


@dataclass(frozen=True)
class EstimateResult:
    x_hat: np.ndarray
    diagnostics: BinDiagnostics


@dataclass(frozen=True)
class FixedPointTrace:
    """Iterates of the reciprocal-magnitude recursion ``g <- a (1 + b2 g^2)``.

    ``limit`` is the converged ``g*`` or ``math.inf`` when the iterates blow
    up; ``estimate`` maps it back to a spectrum value with the LS phase.
    """

    iterates: np.ndarray
    converged: bool
    limit: float
    ls_value: complex = field(repr=False)

    @property
    def estimate(self):
        if math.isinf(self.limit):
            return 0j
        return self.ls_value / abs(self.ls_value) / self.limit


def _raise_first_dead(mask, what):
    k = int(np.argwhere(mask)[0][-1])
    raise SingularFilterError(f"filter response vanishes at bin {k} ({what})", bin_index=k)


def _safe_ls(problem):
    H = np.where(problem.dead, 1.0, problem.H)
    return problem.Y / H


def sw_shrinkage(z_abs):
    """SW gain as a function of ``|Z|``: 0 up to 2, then ``(1 + sqrt(1 - 4/|Z|^2)) / 2``."""
    z_abs = np.asarray(z_abs, dtype=np.float64)
    above = z_abs > THRESHOLD
    safe = np.where(above, z_abs, 2 * THRESHOLD)
    return np.where(above, 0.5 * (1.0 + np.sqrt(1.0 - 4.0 / safe ** 2)), 0.0)


def sw_estimate(problem):
    """Self-Wiener estimate with per-bin diagnostics.

    Raises
    ------
    SingularFilterError
        If a dead filter bin (``|H| <= h_tol``) lies above the threshold.
    """
    z_abs = np.abs(problem.Y) / np.sqrt(problem.Sv)
    above = z_abs > THRESHOLD
    dead = np.broadcast_to(problem.dead, above.shape)
    if np.any(above & dead):
        _raise_first_dead(above & dead, "above-threshold bin")
    shrink = sw_shrinkage(z_abs)
    x_hat = np.where(above, _safe_ls(problem) * shrink, 0j)
    return EstimateResult(x_hat, BinDiagnostics(z_abs, above, shrink))


def fixed_point_iterate(y_bin, h_bin, sv_bin, max_iter=10_000, tol=1e-12):
    """Run the SW fixed-point recursion on one bin, starting from the LS estimate.

    With ``a = 1/|Y/H|`` and ``b2 = Sv/|H|^2`` the reciprocal magnitude obeys
    ``g_{t+1} = a (1 + b2 g_t^2)``, ``g_0 = a``. The sequence increases
    monotonically; it converges iff ``a^2 b2 < 1/4``. Convergence is declared
    once the step falls below ``tol * g * (1 - f'(g))`` (a bound on the
    remaining distance to the limit), divergence once ``g > 1/tol``.
    """
    y_bin, h_bin, sv_bin = complex(y_bin), complex(h_bin), float(sv_bin)
    if sv_bin < 0 or abs(h_bin) == 0 or abs(y_bin) == 0:
        raise InvalidInputError("need sv_bin >= 0, h_bin != 0 and y_bin != 0")
    ls = y_bin / h_bin
    a = 1.0 / abs(ls)
    b2 = sv_bin / abs(h_bin) ** 2
    g = a
    iterates = [g]
    for _ in range(max_iter):
        g_next = a * (1.0 + b2 * g * g)
        iterates.append(g_next)
        if g_next > 1.0 / tol:
            return FixedPointTrace(np.array(iterates), False, math.inf, ls)
        slope = 2.0 * a * b2 * g_next
        if slope < 1.0 and abs(g_next - g) <= tol * g_next * (1.0 - slope):
            return FixedPointTrace(np.array(iterates), True, g_next, ls)
        g = g_next
    raise NoDecisionError(f"no convergence or divergence after {max_iter} iterations")


def ls_estimate(problem):
    """Inverse filter ``Y / H``; every bin must be live."""
    if np.any(problem.dead):
        _raise_first_dead(problem.dead, "least squares")
    return problem.Y / problem.H


def tik_estimate(problem, px):
    """Tikhonov estimate ``Y H* / (|H|^2 + Sv / px)`` for signal power ``px > 0``.

    ``px`` may be an array broadcasting against ``Y`` (one power per trial).
    """
    px = np.asarray(px, dtype=np.float64)
    if not np.all(px > 0) or not np.all(np.isfinite(px)):
        raise InvalidInputError(f"signal power px must be finite and > 0, got {px}")
    H = problem.H
    return problem.Y * np.conj(H) * px / (np.abs(H) ** 2 * px + problem.Sv)


def mw_estimate(problem, q=2.0):
    """Modified Wiener estimate with noise-control parameter ``q >= 1``.

    Uses the bias-corrected output SNR ``max(|Z|^2 - 1, 0)``; bins where it is
    zero are set to 0.
    """
    q = float(q)
    if not q >= 1:
        raise InvalidInputError(f"q must be >= 1, got {q}")
    ls = ls_estimate(problem)
    snr_i = np.maximum(np.abs(problem.Y) ** 2 / problem.Sv - 1.0, 0.0)
    return ls * (snr_i / (snr_i + q))


def mmse_oracle_estimate(x_true, problem):
    """Unrealizable MMSE filter that knows ``|X|^2`` (zero where ``X == 0``)."""
    x_true = _complex(x_true, "x_true")
    if x_true.shape[-1] != problem.n:
        raise DimensionError(f"x_true has {x_true.shape[-1]} bins, expected {problem.n}")
    x2 = np.abs(x_true) ** 2
    H = problem.H
    return problem.Y * np.conj(H) * x2 / (np.abs(H) ** 2 * x2 + problem.Sv)


def empirical_mse(x_true, x_hat):
    """Squared error ``sum_k |x_true - x_hat|^2`` over the last axis."""
    x_true = np.asarray(x_true)
    x_hat = np.asarray(x_hat)
    if x_true.shape[-1] != x_hat.shape[-1]:
        raise DimensionError(f"length mismatch: {x_true.shape[-1]} != {x_hat.shape[-1]}")
    err = np.sum(np.abs(x_true - x_hat) ** 2, axis=-1)
    return float(err) if np.ndim(err) == 0 else err
