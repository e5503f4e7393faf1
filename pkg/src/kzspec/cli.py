"""Command-line entry point: ``kzspec {kzp,simulate,reconstruct,experiment,ar}``.

Exit status is 0 on success, 1 on a computational or I/O error and 2 on a
usage error. Output files default to ``$KZSPEC_OUTDIR`` (or the current
directory) when no explicit path is given.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from kzspec.adaptive import kzp
from kzspec.arbaseline import acf, unexplained_ratio, yule_walker
from kzspec.errors import KZError
from kzspec.experiments import STUDIES, ScenarioConfig, ShowcaseConfig, load_config, run_showcase, run_study
from kzspec.reconstruct import fit_metrics, reconstruct, save_reconstruction
from kzspec.series import load_csv, save_csv
from kzspec.simulate import SignalSpec, Tone, inject_missing, snr

OUTDIR_ENV = "KZSPEC_OUTDIR"


def _outdir(args) -> Path:
    return Path(getattr(args, "out_dir", None) or os.environ.get(OUTDIR_ENV) or ".")


def _fmt_freq(f, digits):
    # Values are already rounded half-even to ``digits`` by top_frequencies.
    return f"{f:.{digits}f}"


def _add_kz_flags(p, smooth=True):
    p.add_argument("--m", type=int, required=True, help="KZFT window width")
    p.add_argument("--k", type=int, default=3, help="KZFT iterations (default 3)")
    p.add_argument("--edge", choices=("drop", "partial", "auto"), default="auto")
    if smooth:
        p.add_argument("--smooth", "--smooth-level", dest="smooth", type=float, default=0.05,
                       help="proportion of smoothness, in (0, 1)")
        p.add_argument("--method", type=str.upper, choices=("DZ", "NZ"), default="DZ")
        p.add_argument("--digits", type=int, default=3)
        p.add_argument("--top", type=int, default=1)
        p.add_argument("--oversample", type=int, default=1)


def _validate_kz(parser, args, smooth=True):
    if args.m < 2:
        parser.error("--m must be >= 2")
    if args.k < 1:
        parser.error("--k must be >= 1")
    if smooth:
        if not 0 < args.smooth < 1:
            parser.error("--smooth must lie strictly between 0 and 1")
        if args.digits < 0:
            parser.error("--digits must be >= 0")
        if args.top < 1:
            parser.error("--top must be >= 1")
        if args.oversample < 1:
            parser.error("--oversample must be >= 1")


def _parse_tone(text):
    try:
        parts = [float(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ValueError
        return Tone(*parts)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"tone must be FREQ:AMP[:PHASE], got {text!r}") from None


def _parse_freqs(text):
    try:
        freqs = [float(p) for p in text.replace(";", ",").split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad frequency list {text!r}") from None
    if not freqs or any(not 0 < f < 0.5 for f in freqs):
        raise argparse.ArgumentTypeError("frequencies must lie strictly between 0 and 0.5")
    return freqs


def cmd_kzp(args, parser):
    _validate_kz(parser, args)
    ts = load_csv(args.input)
    res = kzp(ts, args.m, args.k, args.smooth, args.method, args.digits, args.top,
              oversample=args.oversample, edge=args.edge)
    out = _outdir(args)
    out.mkdir(parents=True, exist_ok=True)
    spectrum = Path(args.spectrum) if args.spectrum else out / "kzp_spectrum.csv"
    summary = Path(args.summary) if args.summary else spectrum.with_name(spectrum.stem + "_summary.json")
    res.save(summary, spectrum)
    print("top frequencies: " + " ".join(_fmt_freq(f, args.digits) for f in res.top_frequencies))
    print(f"total variance: {res.total_variance:.6g}")
    print(f"spectrum: {spectrum}")
    if args.plot:
        from kzspec.svg import line_chart

        svg = Path(args.plot)
        line_chart(svg, [(res.raw.frequencies, res.smoothed.smoothed, "")],
                   title=f"KZ periodogram (m={args.m}, k={args.k}, {args.method} {args.smooth})",
                   xlabel="frequency (cycles/step)", ylabel="intensity", log_y=args.log)
        print(f"plot: {svg}")
    return 0


def cmd_simulate(args, parser):
    if not args.tone and args.noise_sigma == 0:
        print("warning: no tones and no noise; writing an all-zero series", file=sys.stderr)
    if not 0 <= args.missing <= 1:
        parser.error("--missing must lie in [0, 1]")
    if args.n < 1:
        parser.error("--n must be >= 1")
    try:
        spec = SignalSpec(tuple(args.tone), args.noise_sigma, args.n, args.seed, args.start)
    except ValueError as exc:
        parser.error(str(exc))
    from kzspec.simulate import generate

    ts = generate(spec)
    if args.missing > 0:
        ts = inject_missing(ts, args.missing, args.seed + 1 if args.missing_seed is None else args.missing_seed)
    out = Path(args.out) if args.out else _outdir(args) / "series.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(ts, out)
    echo = {k: v for k, v in asdict(spec).items() if k != "components"}
    echo["tones"] = [asdict(t) for t in spec.components]
    echo["snr"] = snr(spec) if spec.noise_sigma > 0 else None
    echo["missing"] = args.missing
    echo["observed"] = ts.n_observed
    echo["path"] = str(out)
    print(json.dumps(echo, indent=2))
    return 0


def cmd_reconstruct(args, parser):
    _validate_kz(parser, args, smooth=False)
    ts = load_csv(args.input)
    truth = load_csv(args.truth) if args.truth else None
    if truth is not None and len(truth) != len(ts):
        raise KZError(f"truth series has {len(truth)} points, data has {len(ts)}")
    rec = reconstruct(ts, args.freqs, args.m, args.k, edge=args.edge)
    out = Path(args.out) if args.out else _outdir(args) / "reconstruction.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_reconstruction(out, ts, rec, truth)
    reference = truth.with_mask(truth.mask & ts.mask) if truth is not None else ts
    fm = fit_metrics(reference, rec.estimate)
    print(f"r: {fm.r:.3f}")
    print(f"r_squared: {fm.r_squared:.3f}")
    print(f"scored: {fm.n_scored} (scored against {'truth' if truth is not None else 'observed data'})")
    print(f"lost at edges: {rec.warmup}")
    if args.plot:
        from kzspec.svg import line_chart

        lo, hi = args.window
        sel = (ts.times >= lo) & (ts.times <= hi)
        t = ts.times[sel]
        series = [(t, np.where(ts.mask[sel], ts.values[sel], np.nan), "signal+noise")]
        if truth is not None:
            series.append((t, truth.values[sel], "signal"))
        series.append((t, np.where(rec.estimate.mask[sel], rec.estimate.values[sel], np.nan), "reconstructed"))
        line_chart(args.plot, series, title="Signal reconstruction", xlabel="t", ylabel="X")
    return 0


def cmd_experiment(args, parser):
    out = _outdir(args)
    if args.study == "showcase":
        cfg = load_config(args.config, ShowcaseConfig) if args.config else ShowcaseConfig()
        if args.seed is not None:
            cfg.base_seed = args.seed
        report = run_showcase(cfg, out)
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0
    overrides = {"study": args.study, "replicates": args.replicates, "base_seed": args.seed, "workers": args.workers}
    try:
        if args.config:
            cfg = load_config(args.config, ScenarioConfig, **overrides)
        else:
            cfg = ScenarioConfig(**{k: v for k, v in overrides.items() if v is not None})
    except ValueError as exc:
        parser.error(str(exc))
    table = run_study(cfg)
    table.save(out, cfg)
    sys.stdout.write(table.summary_csv_text())
    return 0


def cmd_ar(args, parser):
    ts = load_csv(args.input)
    model = yule_walker(ts, args.max_order)
    ratio = unexplained_ratio(model, ts)
    print(f"order: {model.order}")
    print(f"noise variance: {model.noise_variance:.6g}")
    print(f"unexplained ratio: {ratio:.3f}")
    print(f"stationary: {model.stationary}")
    correlogram = acf(ts, args.max_lag)
    out = Path(args.acf_out) if args.acf_out else _outdir(args) / "acf.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write("lag,correlation\n")
        fh.writelines(f"{i},{v!r}\n" for i, v in enumerate(correlogram.tolist()))
    if args.plot:
        from kzspec.svg import line_chart

        line_chart(args.plot, [(np.arange(correlogram.size), correlogram, "")],
                   title="Correlogram", xlabel="lag", ylabel="autocorrelation", stems=True)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kzspec", description="Kolmogorov-Zurbenko periodogram toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kzp", help="KZ periodogram with adaptive smoothing")
    p.add_argument("--in", dest="input", required=True, help="input CSV (t,value)")
    _add_kz_flags(p)
    p.add_argument("--spectrum", help="spectrum CSV path (frequency,raw,smoothed,half_width)")
    p.add_argument("--summary", help="summary JSON path")
    p.add_argument("--out-dir")
    p.add_argument("--plot", metavar="SVG", help="write an SVG of the smoothed periodogram")
    p.add_argument("--log", action="store_true", help="log-scale intensity axis in the plot")
    p.set_defaults(func=cmd_kzp)

    p = sub.add_parser("simulate", help="generate sinusoids plus Gaussian noise")
    p.add_argument("--tone", type=_parse_tone, action="append", default=[], metavar="FREQ:AMP[:PHASE]")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="noise standard deviation")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", type=int, default=1, help="first time index")
    p.add_argument("--missing", type=float, default=0.0, help="MCAR missing probability")
    p.add_argument("--missing-seed", type=int)
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="rebuild the signal at given frequencies via the KZFT")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--freqs", type=_parse_freqs, required=True, help="comma-separated frequencies")
    _add_kz_flags(p, smooth=False)
    p.add_argument("--truth", help="noise-free signal CSV to score against")
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.add_argument("--plot", metavar="SVG")
    p.add_argument("--window", type=int, nargs=2, default=(30, 80), metavar=("T0", "T1"))
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("experiment", help="run a seeded limit study or the showcase")
    p.add_argument("study", choices=STUDIES)
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--workers", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("ar", help="Yule-Walker autoregression baseline")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-order", type=int)
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--acf-out")
    p.add_argument("--out-dir")
    p.add_argument("--plot", metavar="SVG", help="write a correlogram SVG")
    p.set_defaults(func=cmd_ar)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (KZError, ValueError, OSError) as exc:
        print(f"kzspec {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
