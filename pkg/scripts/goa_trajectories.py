"""Angle map of the globally optimal adaptive scheme plus sample runs.

Stores the full angle table (stage, credulity, angle) and a handful of
simulated credulity trajectories with the true state fixed to rho_+.

    python3 scripts/goa_trajectories.py --nu 0.1 --n 10 --runs 6
"""

import argparse
import math
import pathlib

from multicopy.export import policy_csv, trajectories_csv
from multicopy.montecarlo import simulate_batch
from multicopy.qubit_model import StateFamily
from multicopy.schemes_dp import goa_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=math.pi / 6)
    ap.add_argument("--nu", type=float, default=0.1)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--grid", type=int, default=2501)
    ap.add_argument("--runs", type=int, default=6)
    ap.add_argument("--seed", type=int, default=6)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    fam = StateFamily(args.alpha, args.nu)
    res = goa_solve(fam, args.n, args.grid)
    batch = simulate_batch(res.policy, fam, args.n, args.seed, range(args.runs), "+")
    runs = [batch.trajectory(i) for i in range(args.runs)]

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "goa_angles.csv").write_text(policy_csv(res.policy, args.n))
    (outdir / "goa_trajectories.csv").write_text(trajectories_csv(runs))
    print(f"GOA error with {args.n} copies: {res.errors[args.n]:.6f}")
    for tr in runs:
        path = " ".join(f"{s.credulity_after:.3f}" for s in tr.steps)
        print(f"trial {tr.trial}: {path} -> {'correct' if tr.correct else 'wrong'}")


if __name__ == "__main__":
    main()
