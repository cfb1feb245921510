"""Engine throughput in particle events per second on one core.

    python scripts/engine_benchmark.py --model 9 --runs 500
"""

import argparse
import json
import time

from brwsim.engine import simulate
from brwsim.medium import sample_medium
from brwsim.runner.config import model_config
from brwsim.runner.seeds import medium_seed, replicate_seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", type=int, default=9)
    ap.add_argument("--runs", type=int, default=500)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    cfg = model_config(args.model, master_seed=args.seed)
    medium = sample_medium(cfg.medium, medium_seed(args.seed, 0), cfg.window)
    simulate(medium, cfg.engine, cfg.window, replicate_seed=0)  # jit warm-up

    events = 0
    t0 = time.perf_counter()
    for i in range(args.runs):
        events += simulate(medium, cfg.engine, cfg.window, replicate_seed=replicate_seed(args.seed, 0, i)).n_events
    dt = time.perf_counter() - t0
    print(json.dumps({"model": args.model, "dimension": cfg.window.dimension, "trajectories": args.runs,
                      "events": events, "seconds": round(dt, 3), "events_per_second": events / dt,
                      "trajectories_per_second": args.runs / dt}))


if __name__ == "__main__":
    main()
