"""Run one config file end to end and print the per-method summary.

    python3 scripts/run_experiment.py configs/figure1.cfg
    python3 scripts/run_experiment.py configs/fourrooms.cfg --workers 2
"""
import argparse
import json
import time

from structinfo.harness import load_config, run

parser = argparse.ArgumentParser()
parser.add_argument("config")
parser.add_argument("--out")
parser.add_argument("--workers")
args = parser.parse_args()

cfg = load_config(args.config, out=args.out, workers=args.workers)
t0 = time.perf_counter()
summary = run(cfg)
keep = ("episodes_to_threshold_median", "final_success_rate_median", "redundant_freq_median")
print(json.dumps({m: {k: s[k] for k in keep if k in s} for m, s in summary["methods"].items()}, indent=2))
print(f"{cfg.out}: {time.perf_counter() - t0:.1f}s")
