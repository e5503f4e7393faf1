"""Two-tone showcase: identify, reconstruct, compare with AR, repeat with half the points missing."""
import argparse
import json

from kzspec.experiments import ShowcaseConfig, load_config, run_showcase

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--config")
ap.add_argument("--seed", type=int, default=20240)
ap.add_argument("--out", default="results/showcase")
args = ap.parse_args()

cfg = load_config(args.config, ShowcaseConfig, base_seed=args.seed) if args.config else ShowcaseConfig(base_seed=args.seed)
print(json.dumps(run_showcase(cfg, args.out), indent=2))
