"""Run one or more Monte-Carlo studies with their default settings and save the tables.

    python scripts/run_study.py sensitivity accuracy --replicates 20 --workers 4 --out results/
"""
import argparse
import time
from pathlib import Path

from kzspec.experiments import STUDIES, ScenarioConfig, load_config, run_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("studies", nargs="*", help=f"any of {', '.join(STUDIES[:-1])} (default: all)")
    ap.add_argument("--config", help="key = value file applied before command-line overrides")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--seed", type=int, dest="base_seed")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    for study in args.studies:
        if study not in STUDIES[:-1]:
            ap.error(f"unknown study {study!r}")

    overrides = {k: v for k, v in (("replicates", args.replicates), ("base_seed", args.base_seed)) if v is not None}
    for study in args.studies or STUDIES[:-1]:
        if args.config:
            cfg = load_config(args.config, study=study, workers=args.workers, **overrides)
        else:
            cfg = ScenarioConfig(study=study, workers=args.workers, **overrides)
        t0 = time.perf_counter()
        table = run_study(cfg)
        table.save(Path(args.out), cfg)
        print(f"== {study} ({len(table.rows)} runs, {time.perf_counter() - t0:.1f}s)")
        print(table.summary_csv_text(), end="")


if __name__ == "__main__":
    main()
