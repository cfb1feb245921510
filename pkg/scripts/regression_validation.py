"""Score the exponential-growth regression on the (2,1) homogeneous medium.

    python scripts/regression_validation.py --n 5000 --seed 42

Prints the validation report and, with ``--sweep``, repeats it for several
fit grid steps.
"""

import argparse
import json

from brwsim.engine import EngineParams
from brwsim.extrapolate import validate_regression
from brwsim.lattice import LatticeWindow
from brwsim.medium import Constant, MediumSpec, SourceConfiguration, sample_medium
from brwsim.runner.seeds import replicate_seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--grid-dt", type=float, default=0.05)
    ap.add_argument("--sweep", action="store_true", help="also try grid steps 0.01, 0.1, 0.2")
    args = ap.parse_args()

    w = LatticeWindow(1, 100)
    medium = sample_medium(MediumSpec(SourceConfiguration.every_point(), Constant(2.0), Constant(1.0)), 0, w)
    steps = [args.grid_dt] + ([0.01, 0.1, 0.2] if args.sweep else [])
    for dt in steps:
        rep = validate_regression(medium, args.n, EngineParams(t_max=10.0), w,
                                  lambda i: replicate_seed(args.seed, 0, i), dt)
        print(json.dumps({"grid_dt": dt, **rep.as_row()}))


if __name__ == "__main__":
    main()
