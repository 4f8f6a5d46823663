"""Chernoff exponents versus mixture for every scheme.

Analytic exponents (collective, unbiased fixed), the optimized fixed
exponent, and numeric exponents of the grid DP at several grid sizes with
their extrapolation to an infinitely fine grid.  Also writes the log-gradient
of the error against N at the finest grid for one mixture.

    python3 scripts/chernoff_exponents.py --skip-large
"""

import argparse
import math
import pathlib

from multicopy.asymptotics import (
    DEFAULT_SAMPLE_SIZES,
    PURITY_FLOOR,
    classical_chernoff_fixed,
    extrapolate_chernoff,
    log_gradient,
    lof_chernoff,
    ocm_chernoff,
    scheme_log_errors,
)
from multicopy.export import csv_text
from multicopy.qubit_model import StateFamily


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=math.pi / 6)
    ap.add_argument("--nu", type=float, nargs="+",
                    default=[0.002, 0.004, 0.008, 0.012, 0.02, 0.05, 0.1, 0.2])
    ap.add_argument("--n-max", type=int, default=400)
    ap.add_argument("--skip-large", action="store_true", help="leave out s = 10001")
    ap.add_argument("--gradient-nu", type=float, default=0.02)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()
    sizes = [s for s in DEFAULT_SAMPLE_SIZES if not (args.skip_large and s > 2501)]
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for nu in args.nu:
        fam = StateFamily(args.alpha, nu)
        base = {"alpha": args.alpha, "nu": nu}
        rows.append({**base, "scheme": "ocm", "method": "analytic", "xi": ocm_chernoff(fam).xi})
        rows.append({**base, "scheme": "gof", "method": "classical-optimized",
                     "xi": classical_chernoff_fixed(fam).xi})
        rows.append({**base, "scheme": "lof", "method": "analytic", "xi": lof_chernoff(fam).xi})
        for scheme in ("lof", "loa", "goa"):
            samples = []
            for s in sizes:
                logs = scheme_log_errors(scheme, fam, s, args.n_max)
                xi = log_gradient(logs, args.n_max, 2)
                samples.append((s, xi))
                rows.append({**base, "scheme": scheme, "method": "numeric", "s": s, "xi": xi})
                if nu == args.gradient_nu and s == max(sizes):
                    grad = [{"scheme": scheme, "N": n, "xi": log_gradient(logs, n, 2)}
                            for n in range(2, args.n_max + 1, 2)]
                    (outdir / f"gradient_{scheme}.csv").write_text(csv_text(("scheme", "N", "xi"), grad))
            ext = extrapolate_chernoff(samples)
            unreliable = scheme != "lof" and nu < PURITY_FLOOR
            rows.append({**base, "scheme": scheme,
                         "method": "extrapolated-unreliable" if unreliable else "extrapolated",
                         "xi": ext.xi})
        print(f"nu={nu}: " + ", ".join(f"{r['scheme']}/{r['method']}={r['xi']:.5f}"
                                       for r in rows if r["nu"] == nu and r.get("s") is None))

    (outdir / "chernoff.csv").write_text(csv_text(("scheme", "alpha", "nu", "method", "s", "xi"), rows))


if __name__ == "__main__":
    main()
