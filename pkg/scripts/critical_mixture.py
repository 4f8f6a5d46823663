"""Critical mixture below which the best fixed measurement becomes biased.

Scans alpha over (0, pi/2), refines the maximum and, for one alpha, records
the optimal fixed angle across mixtures (the bifurcation diagram).

    python3 scripts/critical_mixture.py --points 50
"""

import argparse
import math
import pathlib

import numpy as np

from multicopy.asymptotics import classical_chernoff_fixed, critical_mixture_max
from multicopy.export import csv_text
from multicopy.qubit_model import StateFamily


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--alpha", type=float, default=math.pi / 6, help="alpha for the bifurcation diagram")
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for nu in np.linspace(0.0, 0.03, 61):
        est = classical_chernoff_fixed(StateFamily(args.alpha, float(nu)))
        rows.append({"nu": float(nu), "phi_star": est.phi_star, "mirror": math.pi / 2 - est.phi_star,
                     "a_star": est.a_star, "xi": est.xi, "degenerate": est.degenerate})
    (outdir / "gof_bifurcation.csv").write_text(
        csv_text(("nu", "phi_star", "mirror", "a_star", "xi", "degenerate"), rows))

    best = critical_mixture_max(args.points)
    scan = [{"alpha": c.alpha, "nu_crit": c.nu_crit} for c in best.scan]
    (outdir / "critical_mixture.csv").write_text(csv_text(("alpha", "nu_crit"), scan))
    print(f"maximum critical mixture {best.nu_crit_max:.5f} at alpha = {best.alpha_star:.4f}")


if __name__ == "__main__":
    main()
