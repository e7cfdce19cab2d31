"""Monte-Carlo benchmark harness: signal catalog, filter family, SNR sweeps.

A run fixes the white-noise variance at each grid point so that the average
output SNR ``mean_k |H X|^2 / Sv`` hits the requested value, draws ``trials``
noise realizations (substream ``(grid_index, trial_index)`` of the seed), and
records the empirical MSE of every requested method together with the
analytical SW prediction.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .analysis import DEFAULT_TAU_DB, predicted_mse_total
from .estimators import (
    DeconvProblem,
    empirical_mse,
    ls_estimate,
    mmse_oracle_estimate,
    mw_estimate,
    sw_estimate,
    tik_estimate,
)
from .exceptions import DimensionError, InvalidInputError
from .io import fmt, provenance_lines, write_rows
from .noise import FAMILIES, NoiseSpec, estimate_px, estimate_sigma_v, generate_noise

SIGNAL_KINDS = ("X1", "X2", "X3", "custom")
BASE_METHODS = ("sw", "ls", "tik", "tik_oracle", "mw", "mmse_oracle")
DEFAULT_MW_Q = 2.0
CSV_HEADER = ("snr_avg_db", "method", "mse", "mse_db", "stderr", "predicted_mse_db")


def principal_frequencies(n):
    """``2 pi k / N`` wrapped into ``(-pi, pi]``."""
    k = np.arange(n)
    w = 2.0 * np.pi * k / n
    return np.where(k > n / 2, w - 2.0 * np.pi, w)


def _tri_cdf(u):
    u = np.asarray(u, dtype=float)
    return np.select(
        [u <= -1, u <= 0, u <= 1],
        [0.0, 0.5 * (1 + u) ** 2, 1 - 0.5 * (1 - u) ** 2],
        default=1.0,
    )


def rect_tri_conv(omega, delta):
    """Continuous convolution of ``rect(w / 2pi)`` with ``tri(w / delta)``.

    Closed piecewise-quadratic form: ``delta * [T((w + pi)/delta) - T((w - pi)/delta)]``
    where ``T`` is the integral of the unit triangle.
    """
    omega = np.asarray(omega, dtype=float)
    return delta * (_tri_cdf((omega + np.pi) / delta) - _tri_cdf((omega - np.pi) / delta))


@dataclass(frozen=True)
class SignalSpec:
    kind: str = "X1"
    n: int = 100
    delta: float = 1.5
    custom: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise InvalidInputError(f"unknown signal kind {self.kind!r}")
        if self.kind == "custom":
            if self.custom is None or len(self.custom) != self.n:
                raise InvalidInputError("custom signal needs a spectrum of length n")
        elif self.n < 16:
            raise InvalidInputError(f"built-in signals need n >= 16, got {self.n}")
        if not self.delta > 0:
            raise InvalidInputError(f"delta must be > 0, got {self.delta}")

    def to_dict(self):
        d = {"kind": self.kind, "n": self.n, "delta": self.delta}
        if self.custom is not None:
            d["custom"] = [[float(np.real(v)), float(np.imag(v))] for v in self.custom]
        return d


@dataclass(frozen=True)
class FilterSpec:
    alpha: float = 0.25
    n: int = 100

    def __post_init__(self):
        if not abs(self.alpha) < 1:
            raise InvalidInputError(f"|alpha| must be < 1, got {self.alpha}")
        if self.n < 2:
            raise InvalidInputError(f"filter length must be >= 2, got {self.n}")


def make_signal(spec):
    """Spectrum of a catalog signal (conjugate-symmetric for built-in kinds)."""
    n = spec.n
    if spec.kind == "custom":
        return np.asarray(spec.custom, dtype=np.complex128)
    w = principal_frequencies(n)
    if spec.kind == "X1":
        return (2.0 * np.pi / spec.delta * rect_tri_conv(6.0 * spec.delta * w, spec.delta)).astype(
            np.complex128
        )
    if spec.kind == "X2":
        return np.exp(-((math.sqrt(spec.delta) * w) ** 2)).astype(np.complex128)
    if not 32 < n / 2:
        raise InvalidInputError(f"X3 needs its support 8*4 < N/2; N={n} is too small")
    X = np.zeros(n, dtype=np.complex128)
    for ell in range(1, 5):
        X[(8 * ell) % n] += 1.0
        X[(-8 * ell) % n] += 1.0
    return X


def make_filter(spec):
    """First-order response ``H[k] = (1 - a) / (1 - a exp(-j 2 pi k / N))``; ``H[0] = 1``."""
    k = np.arange(spec.n)
    return (1.0 - spec.alpha) / (1.0 - spec.alpha * np.exp(-2j * np.pi * k / spec.n))


def filter_impulse_response(spec):
    """Truncated impulse response ``(1 - a) a^n``, n < N, whose plain DFT approximates :func:`make_filter`."""
    n = np.arange(spec.n)
    return (1.0 - spec.alpha) * spec.alpha ** n


def avg_output_snr(X, H, Sv):
    """Average over bins of ``|H X|^2 / Sv``."""
    X = np.asarray(X, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    Sv = np.asarray(Sv, dtype=np.float64)
    if X.shape != H.shape or (Sv.ndim and Sv.shape != X.shape):
        raise DimensionError("X, H and Sv must have equal lengths")
    if np.any(Sv <= 0):
        raise InvalidInputError("Sv must be > 0")
    return float(np.mean(np.abs(H * X) ** 2 / Sv))


def solve_sigma_for_snr(X, H, target_db):
    """White-noise variance giving average output SNR ``target_db``."""
    power = float(np.mean(np.abs(np.asarray(H) * np.asarray(X)) ** 2))
    if not power > 0:
        raise InvalidInputError("filtered signal is identically zero")
    return power / 10.0 ** (target_db / 10.0)


def parse_method(name):
    """``"mw"`` / ``"mw:20"`` -> ``("mw", 20.0)``; other names -> ``(name, None)``."""
    base, _, arg = str(name).partition(":")
    if base not in BASE_METHODS:
        raise InvalidInputError(f"unknown method {name!r}; expected one of {BASE_METHODS}")
    if base == "mw":
        q = float(arg) if arg else DEFAULT_MW_Q
        if not q >= 1:
            raise InvalidInputError(f"MW needs q >= 1, got {q}")
        return base, q
    if arg:
        raise InvalidInputError(f"method {base!r} takes no parameter")
    return base, None


def method_label(name):
    base, q = parse_method(name)
    return f"mw:{q:g}" if base == "mw" else base


@dataclass(frozen=True)
class BenchConfig:
    signal: SignalSpec = field(default_factory=SignalSpec)
    filter: FilterSpec = field(default_factory=FilterSpec)
    noise_family: str = "gaussian"
    seed: int = 0
    snr_grid_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 1000
    methods: tuple = ("sw", "ls", "tik_oracle", "mw", "mmse_oracle")
    noise_known: bool = True
    tau_db: float = DEFAULT_TAU_DB

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "methods", tuple(method_label(m) for m in self.methods))
        if self.trials < 1:
            raise InvalidInputError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_grid_db or not all(math.isfinite(s) for s in self.snr_grid_db):
            raise InvalidInputError("snr_grid_db must be a non-empty list of finite values")
        if self.noise_family not in FAMILIES:
            raise InvalidInputError(f"unknown noise family {self.noise_family!r}")
        if self.signal.n != self.filter.n:
            raise DimensionError(f"signal length {self.signal.n} != filter length {self.filter.n}")
        if not self.tau_db > 0:
            raise InvalidInputError(f"tau_db must be > 0, got {self.tau_db}")

    def to_dict(self):
        return {
            "signal": self.signal.to_dict(),
            "filter": {"alpha": self.filter.alpha, "n": self.filter.n},
            "noise_family": self.noise_family,
            "seed": self.seed,
            "snr_grid_db": list(self.snr_grid_db),
            "trials": self.trials,
            "methods": list(self.methods),
            "noise_known": self.noise_known,
            "tau_db": self.tau_db,
        }


@dataclass(frozen=True)
class BenchRow:
    snr_avg_db: float
    method: str
    mse: float
    stderr: float
    predicted_mse: Optional[float] = None

    @property
    def mse_db(self):
        return 10.0 * math.log10(self.mse) if self.mse > 0 else -math.inf

    @property
    def predicted_mse_db(self):
        return None if self.predicted_mse is None else 10.0 * math.log10(self.predicted_mse)


@dataclass(frozen=True)
class BenchResult:
    config: BenchConfig
    rows: tuple

    def get(self, snr_avg_db, method):
        for row in self.rows:
            if row.snr_avg_db == snr_avg_db and row.method == method:
                return row
        raise KeyError((snr_avg_db, method))

    def curve(self, method):
        """``(snr_grid, mse, stderr)`` arrays for one method."""
        rows = [r for r in self.rows if r.method == method_label(method)]
        return (
            np.array([r.snr_avg_db for r in rows]),
            np.array([r.mse for r in rows]),
            np.array([r.stderr for r in rows]),
        )

    def csv_rows(self):
        for r in self.rows:
            pred = "" if r.predicted_mse is None else fmt(r.predicted_mse_db)
            yield (fmt(r.snr_avg_db), r.method, fmt(r.mse), fmt(r.mse_db), fmt(r.stderr), pred)

    def write_csv(self, path):
        comments = provenance_lines("selfwiener", __version__, self.config.to_dict())
        write_rows(path, CSV_HEADER, self.csv_rows(), comments)

    def to_json(self):
        doc = {
            "tool": "selfwiener",
            "version": __version__,
            "config": self.config.to_dict(),
            "rows": [
                {
                    "snr_avg_db": r.snr_avg_db,
                    "method": r.method,
                    "mse": r.mse,
                    "mse_db": r.mse_db,
                    "stderr": r.stderr,
                    "predicted_mse_db": r.predicted_mse_db,
                }
                for r in self.rows
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def write_json(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    def table(self):
        lines = [f"{'snr_avg_db':>10}  {'method':<12} {'mse_db':>9} {'stderr':>10} {'pred_db':>9}"]
        for r in self.rows:
            pred = "" if r.predicted_mse is None else f"{r.predicted_mse_db:9.3f}"
            lines.append(f"{r.snr_avg_db:10.2f}  {r.method:<12} {r.mse_db:9.3f} {r.stderr:10.4g} {pred:>9}")
        return "\n".join(lines)


def _run_method(method, problem, X, px_hat):
    base, q = parse_method(method)
    if base == "sw":
        return sw_estimate(problem).x_hat
    if base == "ls":
        return ls_estimate(problem)
    if base == "tik":
        return tik_estimate(problem, px_hat)
    if base == "tik_oracle":
        return tik_estimate(problem, float(np.mean(np.abs(X) ** 2)))
    if base == "mw":
        return mw_estimate(problem, q)
    return mmse_oracle_estimate(X, problem)


def _grid_point(cfg, X, H, g, snr_db):
    n = cfg.signal.n
    sigma_v2 = solve_sigma_for_snr(X, H, snr_db)
    spec = NoiseSpec(cfg.noise_family, sigma_v2, cfg.seed)
    v = np.stack([generate_noise(spec, n, key=(g, t)) for t in range(cfg.trials)])
    Y = H * X + np.fft.fft(v, axis=-1, norm="ortho")
    if cfg.noise_known:
        sv = np.full(n, sigma_v2)
        px_hat = estimate_px(Y, sigma_v2)[:, None]
    else:
        sv2_hat = estimate_sigma_v(Y) ** 2
        sv = sv2_hat[:, None]
        px_hat = estimate_px(Y, sv2_hat)[:, None]
    problem = DeconvProblem(Y, H, sv)
    predicted, _ = predicted_mse_total(X, H, np.full(n, sigma_v2), cfg.tau_db)
    rows = []
    for method in cfg.methods:
        err = empirical_mse(X, _run_method(method, problem, X, px_hat))
        err = np.atleast_1d(err)
        stderr = float(np.std(err, ddof=1) / math.sqrt(err.size)) if err.size > 1 else 0.0
        pred = predicted if method == "sw" else None
        rows.append(BenchRow(snr_db, method, float(np.mean(err)), stderr, pred))
    return rows


def run_bench(cfg, n_jobs=1):
    """Run the sweep described by ``cfg``.

    Grid points may be evaluated concurrently (``n_jobs > 1``); every trial
    owns its noise substream and per-point reductions run in trial order, so
    the result does not depend on ``n_jobs``.
    """
    X = make_signal(cfg.signal)
    H = make_filter(cfg.filter)
    points = list(enumerate(cfg.snr_grid_db))
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            chunks = list(pool.map(lambda gp: _grid_point(cfg, X, H, *gp), points))
    else:
        chunks = [_grid_point(cfg, X, H, g, s) for g, s in points]
    return BenchResult(cfg, tuple(row for chunk in chunks for row in chunk))
