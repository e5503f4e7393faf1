"""Seeded harness for the limit studies (sensitivity, accuracy, resolution, robustness)
and the end-to-end two-tone showcase.

Every table row is one replicate of one sweep cell. Its series seed is
``base_seed + row_index`` and its missingness seed is that plus
``MISSING_SEED_OFFSET``; both are written into the row. Rows keep the sweep
order whatever the number of worker processes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from kzspec.adaptive import kzp
from kzspec.arbaseline import acf, unexplained_ratio, yule_walker
from kzspec.errors import KZError
from kzspec.reconstruct import fit_metrics, reconstruct, save_reconstruction
from kzspec.series import save_csv, stats
from kzspec.simulate import SignalSpec, amplitude_for_snr, clean_signal, generate, inject_missing, snr
from kzspec.spectrum import raw_periodogram

STUDIES = ("sensitivity", "accuracy", "resolution", "robustness", "showcase")
MISSING_SEED_OFFSET = 1_000_000_007


@dataclass
class ScenarioConfig:
    study: str = "sensitivity"
    n_values: tuple = (5000, 1000)
    dz_values: tuple = (0.05, 0.01)
    m: int = 500
    k: int = 3
    noise_sigma: float = 16.0
    base_seed: int = 20240
    replicates: int = 20
    method: str = "DZ"
    digits: int = 3
    edge: str = "auto"
    tolerance_steps: int = 1
    short_tolerance_steps: int = 2  # series shorter than the KZ window support
    workers: int = 1
    # sensitivity
    frequency: float = 0.040
    snr_sweep: dict = field(default_factory=lambda: {
        0.05: (0.052, 0.051, 0.050, 0.049, 0.048, 0.047, 0.046, 0.045),
        0.01: (0.017, 0.016, 0.015, 0.014, 0.013, 0.012, 0.011, 0.010),
    })
    # accuracy
    accuracy_frequencies: tuple = (0.400, 0.440, 0.444)
    accuracy_amplitude: float = 2.0
    # resolution
    resolution_lambda1: float = 0.040
    resolution_lambda2: tuple = (0.030, 0.033, 0.036, 0.037, 0.038, 0.039)
    resolution_amplitude: float = 8.0
    # robustness
    missing_levels: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7)
    snr_by_dz: dict = field(default_factory=lambda: {0.05: 0.055, 0.01: 0.015})

    def __post_init__(self):
        if self.study not in STUDIES[:-1]:
            raise ValueError(f"unknown study {self.study!r}; choose from {', '.join(STUDIES[:-1])}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        for name in ("n_values", "dz_values", "accuracy_frequencies", "resolution_lambda2", "missing_levels"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must not be empty")
        for dz in self.dz_values:
            if self.study == "sensitivity" and not self.snr_sweep.get(dz):
                raise ValueError(f"snr_sweep has no entry for dz={dz}")
            if self.study == "robustness" and dz not in self.snr_by_dz:
                raise ValueError(f"snr_by_dz has no entry for dz={dz}")

    def tolerance(self, n: int) -> float:
        steps = self.short_tolerance_steps if n < self.k * (self.m - 1) + 1 else self.tolerance_steps
        return steps / self.m


@dataclass
class ShowcaseConfig:
    n: int = 5000
    tones: tuple = ((0.084, 1.0), (0.098, 1.5))
    noise_sigma: float = 4.0  # N(0, 16) is a variance
    m: int = 500
    k: int = 3
    dz: float = 0.01
    method: str = "DZ"
    digits: int = 3
    top: int = 2
    missing: float = 0.5
    base_seed: int = 20240
    max_lag: int = 40
    zoom: tuple = (30, 80)


# ---------------------------------------------------------------- config files

def _parse_value(text, like):
    if isinstance(like, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    if isinstance(like, tuple):
        items = [p for p in text.replace(",", " ").split() if p]
        if like and isinstance(like[0], tuple):
            return tuple(tuple(float(v) for v in item.split(":")) for item in items)
        cast = int if like and isinstance(like[0], int) else float
        return tuple(cast(p) for p in items)
    return text


def parse_config_text(text: str, cls=ScenarioConfig, **overrides):
    """Build a config from ``key = value`` lines.

    ``#`` starts a comment. Lists are comma or space separated; list-of-pairs
    fields use ``a:b`` items. Mapping fields keyed by smoothing level are
    written with a dotted suffix, e.g. ``snr_sweep.0.05 = 0.052, 0.051``;
    naming any key of a mapping replaces that mapping's defaults entirely.
    """
    probe = cls()
    defaults = {f.name for f in fields(cls)}
    values = {}
    mappings = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        name, _, sub = key.partition(".")
        if name not in defaults:
            raise ValueError(f"config line {lineno}: unknown key {name!r}")
        current = getattr(probe, name)
        if isinstance(current, dict):
            if not sub:
                raise ValueError(f"config line {lineno}: {name} needs a '.<dz>' suffix")
            example = next(iter(current.values()))
            mappings.setdefault(name, {})[float(sub)] = _parse_value(value, example)
        else:
            values[name] = _parse_value(value, current)
    values.update(mappings)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return cls(**values)


def load_config(path, cls=ScenarioConfig, **overrides):
    return parse_config_text(Path(path).read_text(encoding="utf-8"), cls, **overrides)


# ---------------------------------------------------------------- tables

@dataclass
class ExperimentTable:
    study: str
    columns: list
    rows: list  # dicts keyed by ``columns``
    cell_keys: list  # columns identifying a sweep cell

    def cells(self) -> list:
        """One summary dict per cell: detection rate and modal observed answer."""
        groups = {}
        for row in self.rows:
            groups.setdefault(tuple(row[c] for c in self.cell_keys), []).append(row)
        out = []
        for key, rows in groups.items():
            hits = [r["hit"] for r in rows]
            modal, count = Counter(r["observed"] for r in rows).most_common(1)[0]
            out.append({
                **dict(zip(self.cell_keys, key)),
                "replicates": len(rows),
                "detection_rate": sum(hits) / len(hits),
                "modal_observed": modal,
                "modal_count": count,
            })
        return out

    def detection_rate(self, **where) -> float:
        rows = [r for r in self.rows if all(_matches(r[k], v) for k, v in where.items())]
        if not rows:
            raise KeyError(f"no rows match {where}")
        return sum(r["hit"] for r in rows) / len(rows)

    def select(self, **where) -> list:
        return [r for r in self.rows if all(_matches(r[k], v) for k, v in where.items())]

    def to_csv_text(self) -> str:
        return _csv_text(self.columns, self.rows)

    def summary_csv_text(self) -> str:
        cells = self.cells()
        return _csv_text(list(cells[0].keys()) if cells else [], cells)

    def save(self, out_dir, config=None) -> dict:
        """Write ``<study>.csv``, ``<study>_summary.csv`` and ``<study>_manifest.json``."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        artifacts = {
            f"{self.study}.csv": self.to_csv_text(),
            f"{self.study}_summary.csv": self.summary_csv_text(),
        }
        for name, text in artifacts.items():
            (out_dir / name).write_text(text, encoding="utf-8")
        manifest = {
            "study": self.study,
            "config": _jsonable(asdict(config)) if config is not None else None,
            "seeds": [{"row": i, "seed": r["seed"], "missing_seed": r.get("missing_seed")} for i, r in enumerate(self.rows)],
            "artifacts": {name: _sha256(text) for name, text in artifacts.items()},
        }
        path = out_dir / f"{self.study}_manifest.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return manifest


def _matches(value, wanted):
    if isinstance(wanted, float) or isinstance(value, float):
        return math.isclose(float(value), float(wanted), abs_tol=1e-12)
    return value == wanted


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _sha256(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# ---------------------------------------------------------------- running

def _freqs_text(freqs):
    return ";".join(format(f, ".6g") for f in freqs)


def matched_count(observed, truth, tol) -> int:
    """Largest number of distinct true frequencies paired with distinct observed peaks within ``tol``."""
    truth = sorted(set(truth))
    best = 0
    for perm in itertools.permutations(observed, min(len(observed), len(truth))):
        best = max(best, sum(abs(o - t) <= tol + 1e-9 for o, t in zip(perm, truth)))
    return best


def _job(args):
    """Run one replicate. Module-level so process pools can pickle it."""
    cfg, row = args
    spec = SignalSpec(row.pop("_tones"), cfg.noise_sigma, row["n"], seed=row["seed"])
    ts = generate(spec)
    if row["missing"] > 0:
        ts = inject_missing(ts, row["missing"], row["missing_seed"])
    top = row.pop("_top")
    try:
        found = kzp(ts, cfg.m, cfg.k, row["dz"], cfg.method, cfg.digits, top, edge=cfg.edge).top_frequencies
    except KZError:
        found = []
    truth = [float(f) for f in row["true_frequencies"].split(";")]
    row["observed"] = _freqs_text(found) if found else ""
    row["observed_top"] = found[0] if found else float("nan")
    row["resolved"] = matched_count(found, truth, row["tolerance"])
    if cfg.study == "resolution":
        row["hit"] = row["resolved"] >= 2
    else:
        row["hit"] = bool(found) and abs(found[0] - truth[0]) <= row["tolerance"] + 1e-9
    return row


_COLUMNS = [
    "study", "n", "dz", "snr", "noise_sigma", "noise_variance", "true_frequencies", "missing",
    "replicate", "seed", "missing_seed", "tolerance", "observed", "observed_top", "resolved", "hit",
]


def _cells(cfg: ScenarioConfig):
    """Sweep cells in table order as (n, dz, snr, tones, missing, top) tuples."""
    sigma = cfg.noise_sigma
    for n in cfg.n_values:
        for dz in cfg.dz_values:
            if cfg.study == "sensitivity":
                for s in cfg.snr_sweep[dz]:
                    yield n, dz, s, [(cfg.frequency, amplitude_for_snr(s, sigma))], 0.0, 1
            elif cfg.study == "accuracy":
                a = cfg.accuracy_amplitude
                for f in cfg.accuracy_frequencies:
                    yield n, dz, a * a / sigma**2, [(f, a)], 0.0, 1
            elif cfg.study == "resolution":
                a = cfg.resolution_amplitude
                for l2 in cfg.resolution_lambda2:
                    yield n, dz, a * a / sigma**2, [(cfg.resolution_lambda1, a), (l2, a)], 0.0, 2
            else:
                s = cfg.snr_by_dz[dz]
                for p in cfg.missing_levels:
                    yield n, dz, s, [(cfg.frequency, amplitude_for_snr(s, sigma))], p, 1


def run_study(cfg: ScenarioConfig) -> ExperimentTable:
    jobs = []
    for n, dz, s, tones, missing, top in _cells(cfg):
        for rep in range(cfg.replicates):
            seed = cfg.base_seed + len(jobs)
            jobs.append((cfg, {
                "study": cfg.study, "n": n, "dz": dz, "snr": s,
                "noise_sigma": cfg.noise_sigma, "noise_variance": cfg.noise_sigma**2,
                "true_frequencies": _freqs_text(sorted({t[0] for t in tones}, reverse=True)),
                "missing": missing, "replicate": rep, "seed": seed,
                "missing_seed": seed + MISSING_SEED_OFFSET, "tolerance": cfg.tolerance(n),
                "_tones": tones, "_top": top,
            }))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_job, jobs, chunksize=8))
    else:
        rows = [_job(j) for j in jobs]
    keys = {"sensitivity": ["n", "dz", "snr"], "accuracy": ["n", "dz", "true_frequencies"],
            "resolution": ["n", "dz", "true_frequencies"], "robustness": ["n", "dz", "missing"]}[cfg.study]
    return ExperimentTable(cfg.study, list(_COLUMNS), rows, keys)


def run_sensitivity(cfg: ScenarioConfig) -> ExperimentTable:
    return run_study(replace(cfg, study="sensitivity"))


def run_accuracy(cfg: ScenarioConfig) -> ExperimentTable:
    return run_study(replace(cfg, study="accuracy"))


def run_resolution(cfg: ScenarioConfig) -> ExperimentTable:
    return run_study(replace(cfg, study="resolution"))


def run_robustness(cfg: ScenarioConfig) -> ExperimentTable:
    return run_study(replace(cfg, study="robustness"))


# ---------------------------------------------------------------- showcase

def run_showcase(cfg: ShowcaseConfig | None = None, out_dir=None) -> dict:
    """Two-tone example end to end; optionally writes CSV and SVG artifacts to ``out_dir``.

    Returns a report dict with the identified frequencies, reconstruction fit
    against the noise-free signal, the AR baseline, and the same for a rerun
    with ``cfg.missing`` of the points removed at random.
    """
    cfg = cfg or ShowcaseConfig()
    spec = SignalSpec(cfg.tones, cfg.noise_sigma, cfg.n, seed=cfg.base_seed)
    ts = generate(spec)
    truth = clean_signal(spec)

    res = kzp(ts, cfg.m, cfg.k, cfg.dz, cfg.method, cfg.digits, cfg.top)
    rec = reconstruct(ts, res.top_frequencies, cfg.m, cfg.k)
    fit = fit_metrics(truth, rec.estimate)
    ar = yule_walker(ts)
    ratio = unexplained_ratio(ar, ts)
    correlogram = acf(ts, cfg.max_lag)

    gappy = inject_missing(ts, cfg.missing, cfg.base_seed + MISSING_SEED_OFFSET)
    res_m = kzp(gappy, cfg.m, cfg.k, cfg.dz, cfg.method, cfg.digits, cfg.top)
    rec_m = reconstruct(gappy, res_m.top_frequencies, cfg.m, cfg.k)
    fit_m = fit_metrics(truth.with_mask(gappy.mask), rec_m.estimate)

    report = {
        "seed": cfg.base_seed,
        "n": cfg.n,
        "snr": snr(spec),
        "series_variance": stats(ts).variance,
        "top_frequencies": res.top_frequencies,
        "total_spectral_variance": res.total_variance,
        "reconstruction_r": fit.r,
        "reconstruction_r_squared": fit.r_squared,
        "reconstruction_scored": fit.n_scored,
        "reconstruction_warmup": rec.warmup,
        "ar_order": ar.order,
        "ar_noise_variance": ar.noise_variance,
        "ar_unexplained_ratio": ratio,
        "acf_max_abs": float(np.max(np.abs(correlogram[1:]))),
        "missing_fraction": 1.0 - gappy.n_observed / len(gappy),
        "missing_top_frequencies": res_m.top_frequencies,
        "missing_reconstruction_r": fit_m.r,
        "missing_reconstruction_r_squared": fit_m.r_squared,
        "missing_reconstruction_scored": fit_m.n_scored,
    }
    if out_dir is not None:
        _write_showcase(Path(out_dir), cfg, ts, truth, gappy, res, res_m, rec, rec_m, correlogram, report)
    return report


def _write_showcase(out, cfg, ts, truth, gappy, res, res_m, rec, rec_m, correlogram, report):
    from kzspec.svg import line_chart

    out.mkdir(parents=True, exist_ok=True)
    save_csv(ts, out / "series.csv")
    save_csv(gappy, out / "series_missing.csv")
    classic = raw_periodogram(ts)
    classic.to_csv(out / "raw_periodogram.csv")
    res.save(out / "kzp_summary.json", out / "kzp_spectrum.csv")
    res_m.save(out / "kzp_missing_summary.json", out / "kzp_missing_spectrum.csv")
    save_reconstruction(out / "reconstruction.csv", ts, rec, truth)
    save_reconstruction(out / "reconstruction_missing.csv", gappy, rec_m, truth)
    with open(out / "acf.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("lag,correlation\n")
        fh.writelines(f"{i},{v!r}\n" for i, v in enumerate(correlogram.tolist()))

    line_chart(out / "raw_periodogram.svg", [(classic.frequencies, classic.intensity, "")],
               title="Standard periodogram", xlabel="frequency (cycles/step)", ylabel="intensity")
    line_chart(out / "kzp_dz.svg", [(res.raw.frequencies, res.smoothed.smoothed, "")],
               title=f"KZ periodogram, {cfg.method} smoothing {cfg.dz}", xlabel="frequency (cycles/step)",
               ylabel="intensity", log_y=True)
    line_chart(out / "kzp_dz_missing.svg", [(res_m.raw.frequencies, res_m.smoothed.smoothed, "")],
               title=f"KZ periodogram, {report['missing_fraction']:.0%} missing", xlabel="frequency (cycles/step)",
               ylabel="intensity", log_y=True)
    lo, hi = cfg.zoom
    for name, obs, r in (("reconstruction.svg", ts, rec), ("reconstruction_missing.svg", gappy, rec_m)):
        sel = (obs.times >= lo) & (obs.times <= hi)
        t = obs.times[sel]

        def masked(s):
            return np.where(s.mask[sel], s.values[sel], np.nan)

        line_chart(out / name, [(t, masked(obs), "signal+noise"), (t, truth.values[sel], "signal"),
                                (t, masked(r.estimate), "reconstructed")],
                   title="Signal reconstruction", xlabel="t", ylabel="X")
    line_chart(out / "correlogram.svg", [(np.arange(correlogram.size), correlogram, "")],
               title="Correlogram", xlabel="lag", ylabel="autocorrelation", stems=True)
    (out / "showcase_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    names = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    manifest = {
        "config": _jsonable(asdict(cfg)),
        "seeds": {"series": cfg.base_seed, "missing": cfg.base_seed + MISSING_SEED_OFFSET},
        "artifacts": {n: hashlib.sha256((out / n).read_bytes()).hexdigest() for n in names},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
