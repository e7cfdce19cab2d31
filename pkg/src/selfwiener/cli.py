"""Command-line interface: ``selfwiener {estimate,predict,gen,bench}``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure
(singular filter, degenerate data, no decision).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .analysis import DEFAULT_TAU_DB, predicted_mse_total
from .bench import (
    BASE_METHODS,
    BenchConfig,
    FilterSpec,
    SignalSpec,
    filter_impulse_response,
    make_filter,
    make_signal,
    run_bench,
)
from .estimators import DeconvProblem, sw_estimate
from .exceptions import (
    DegenerateDataError,
    NoDecisionError,
    SelfWienerError,
    SingularFilterError,
)
from .io import (
    fmt,
    provenance_lines,
    read_psd,
    read_signal,
    write_rows,
    write_spectrum,
    write_time,
)
from .noise import FAMILIES, estimate_sigma_v
from .spectral import inverse_dft, unitary_dft

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

_NUMERICAL = (SingularFilterError, DegenerateDataError, NoDecisionError)


def _header(command, config):
    return provenance_lines("selfwiener", __version__, {"command": command, **config})


def _load_measurement(path):
    kind, values = read_signal(path)
    return values if kind == "spectrum" else unitary_dft(values)


def _load_filter(path):
    kind, values = read_signal(path)
    return values if kind == "spectrum" else np.fft.fft(values)


def _noise_psd(args, Y, n):
    """Resolve ``--sv`` / ``--sv-file`` / ``--noise auto`` into a PSD array and a config entry."""
    if args.noise == "auto":
        sigma = estimate_sigma_v(Y)
        return np.full(n, sigma ** 2), {"noise": "auto", "sigma_v_hat": sigma}
    if args.sv_file:
        sv = read_psd(args.sv_file)
        return sv, {"sv_file": args.sv_file}
    if args.sv is None:
        raise argparse.ArgumentTypeError("one of --sv, --sv-file or --noise auto is required")
    return np.full(n, args.sv), {"sv": args.sv}


def cmd_estimate(args):
    Y = _load_measurement(args.y)
    H = _load_filter(args.h)
    sv, noise_cfg = _noise_psd(args, Y, Y.size)
    result = sw_estimate(DeconvProblem(Y, H, sv))
    x_time = inverse_dft(result.x_hat)
    cfg = {"y": args.y, "h": args.h, **noise_cfg}
    comments = _header("estimate", cfg)
    write_spectrum(f"{args.out}_xhat_spectrum.csv", result.x_hat, comments)
    write_time(f"{args.out}_xhat_time.csv", x_time, comments)
    d = result.diagnostics
    write_rows(
        f"{args.out}_diagnostics.csv",
        ("k", "z_abs", "above_threshold", "shrinkage"),
        ((k, fmt(d.z_abs[k]), int(d.above_threshold[k]), fmt(d.shrinkage[k])) for k in range(Y.size)),
        comments,
    )
    print(f"{int(d.above_threshold.sum())} of {Y.size} bins above threshold")
    return EXIT_OK


def cmd_predict(args):
    kind, X = read_signal(args.x)
    if kind == "time":
        X = unitary_dft(X)
    H = _load_filter(args.h)
    if args.noise == "auto":
        raise argparse.ArgumentTypeError("predict needs a known noise level (--sv or --sv-file)")
    sv, noise_cfg = _noise_psd(args, None, X.size)
    total, preds = predicted_mse_total(X, H, sv, args.tau_db)
    snr = np.abs(H * X) ** 2 / sv
    rows = []
    for k, pr in enumerate(preds):
        snr_db = 10 * math.log10(snr[k]) if snr[k] > 0 else -math.inf
        rows.append((k, fmt(snr_db), pr.regime, fmt(pr.p), fmt(pr.eps_low2), fmt(pr.eps_high2), fmt(pr.mse)))
    rows.append(("total", "", "", "", "", "", fmt(total)))
    cfg = {"x": args.x, "h": args.h, "tau_db": args.tau_db, **noise_cfg}
    write_rows(
        args.out,
        ("k", "snr_out_db", "regime", "p", "eps_low2", "eps_high2", "mse"),
        rows,
        _header("predict", cfg),
    )
    print(f"predicted total MSE {total!r} ({10 * math.log10(total):.3f} dB)")
    return EXIT_OK


def cmd_gen(args):
    if args.filter:
        spec = FilterSpec(args.alpha, args.n)
        spectrum, time = make_filter(spec), filter_impulse_response(spec)
        cfg = {"filter": True, "alpha": args.alpha, "n": args.n}
    else:
        spec = SignalSpec(args.signal, args.n, args.delta)
        spectrum = make_signal(spec)
        time = inverse_dft(spectrum)
        cfg = {"signal": args.signal, "n": args.n, "delta": args.delta}
    comments = _header("gen", cfg)
    write_spectrum(f"{args.out}_spectrum.csv", spectrum, comments)
    write_time(f"{args.out}_time.csv", time, comments)
    return EXIT_OK


def parse_grid(text):
    """``"10"``, ``"0,5,10"`` or ``"start:stop:step"`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise argparse.ArgumentTypeError("grid step must be > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    return tuple(float(t) for t in text.split(",") if t.strip())


def cmd_bench(args):
    cfg = BenchConfig(
        signal=SignalSpec(args.signal, args.n, args.delta),
        filter=FilterSpec(args.alpha, args.n),
        noise_family=args.noise_family,
        seed=args.seed,
        snr_grid_db=args.snr_grid,
        trials=args.trials,
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        noise_known=not args.noise_unknown,
        tau_db=args.tau_db,
    )
    result = run_bench(cfg, n_jobs=args.jobs)
    result.write_csv(f"{args.out}.csv")
    result.write_json(f"{args.out}.json")
    print(result.table())
    return EXIT_OK


def _add_noise_args(p, allow_auto=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sv", type=float, help="white noise PSD (variance)")
    g.add_argument("--sv-file", help="per-bin PSD CSV (header k,sv)")
    if allow_auto:
        g.add_argument("--noise", choices=["auto"], help="estimate the noise level from y (MAD)")
    p.set_defaults(noise=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="selfwiener", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"selfwiener {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="Self-Wiener deconvolution of a measurement")
    p.add_argument("--y", required=True, help="measurement CSV (n,value or k,re,im)")
    p.add_argument("--h", required=True, help="filter CSV: impulse response or frequency response")
    _add_noise_args(p)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("predict", help="analytical per-bin SW MSE")
    p.add_argument("--x", required=True, help="signal CSV (n,value or k,re,im)")
    p.add_argument("--h", required=True, help="filter CSV")
    _add_noise_args(p, allow_auto=False)
    p.add_argument("--tau-db", type=float, default=DEFAULT_TAU_DB)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gen", help="write catalog signals or the first-order filter")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--signal", choices=["X1", "X2", "X3"])
    what.add_argument("--filter", action="store_true")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="Monte-Carlo MSE sweep over average output SNR")
    p.add_argument("--signal", choices=["X1", "X2", "X3"], default="X1")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--methods", default="sw,ls,tik_oracle,mw,mmse_oracle",
                   help=f"comma list from {','.join(BASE_METHODS)}; mw:Q sets q")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-grid", type=parse_grid, default=parse_grid("0:20:5"),
                   help="average output SNRs in dB: '10', '0,5,10' or '0:20:5'")
    p.add_argument("--noise-family", choices=FAMILIES, default="gaussian")
    p.add_argument("--noise-unknown", action="store_true", help="estimate sigma_v by MAD")
    p.add_argument("--tau-db", type=float, default=DEFAULT_TAU_DB)
    p.add_argument("--jobs", type=int, default=1, help="grid points evaluated concurrently")
    p.add_argument("--out", required=True, help="output path prefix (.csv and .json)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SingularFilterError as exc:
        print(f"error: {exc} (bin {exc.bin_index})", file=sys.stderr)
        return EXIT_NUMERICAL
    except _NUMERICAL as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SelfWienerError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
