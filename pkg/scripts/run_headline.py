"""Run the forced 2D Navier-Stokes scenario and print the bound checks."""

import argparse
import json
import time
from pathlib import Path

from crestfactor.config import parse_config
from crestfactor.runner import run_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(ROOT / "configs" / "nse2d_kolmogorov.toml"))
    ap.add_argument("--output", default="runs/headline")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    s = parse_config(args.config).with_overrides(seed=args.seed)
    t0 = time.perf_counter()
    r = run_scenario(s, args.output)
    print(f"{s.name}: {time.perf_counter() - t0:.0f}s, written to {r.out_dir}")
    for name, check in r.verification["checks"].items():
        brief = {k: v for k, v in check.items() if k in ("value", "measured", "bound", "slack", "min_slack", "pass")}
        print(f"  {name:18s} {json.dumps(brief)}")
    if r.classification:
        print(f"  verdict: {r.classification['verdict']}")
    return r.status


if __name__ == "__main__":
    raise SystemExit(main())
