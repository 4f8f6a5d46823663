"""Error probability versus number of copies for every scheme.

Writes one CSV row per (scheme, nu, N).  The default grid of mixtures is the
one used throughout the test-suite; adaptive schemes use the credulity grid.

    python3 scripts/error_curves.py --out results/error_curves.csv
"""

import argparse
import math
import pathlib

from multicopy.collective import ocm_error
from multicopy.export import csv_text
from multicopy.qubit_model import StateFamily
from multicopy.schemes_dp import AnglePolicy, exact_policy_error, goa_solve, gof_optimize, lof_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=math.pi / 6)
    ap.add_argument("--nu", type=float, nargs="+", default=[0.0, 0.02, 0.05, 0.1, 0.2])
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--grid", type=int, default=2501)
    ap.add_argument("--out", default="results/error_curves.csv")
    args = ap.parse_args()

    rows = []
    for nu in args.nu:
        fam = StateFamily(args.alpha, nu)
        goa = goa_solve(fam, args.n_max, args.grid).errors
        for n in range(1, args.n_max + 1):
            gof = gof_optimize(fam, n)
            errors = {
                "ocm": ocm_error(fam, n),
                "lof": lof_error(fam, n),
                "gof": gof.error,
                "loa": exact_policy_error(AnglePolicy.osm(args.alpha), fam, n),
                "goa": float(goa[n]),
            }
            for scheme, err in errors.items():
                rows.append({"scheme": scheme, "alpha": args.alpha, "nu": nu, "N": n, "error": err,
                             "gof_angle": gof.phi if scheme == "gof" else None})
        print(f"nu={nu}: N={args.n_max} errors " + ", ".join(
            f"{r['scheme']}={r['error']:.5f}" for r in rows[-5:]))

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text(("scheme", "alpha", "nu", "N", "error", "gof_angle"), rows))
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
