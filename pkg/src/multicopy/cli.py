"""Command-line front end.

Every subcommand reads an optional JSON config file, applies flag
overrides on top, and writes one result table as CSV or JSON.  Progress
goes to stderr; data goes to ``--out`` (stdout when omitted).

Exit codes: 0 success, 2 config error, 3 resource ceiling exceeded,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .asymptotics import (
    DEFAULT_SAMPLE_SIZES,
    classical_chernoff_fixed,
    critical_mixture,
    critical_mixture_max,
    extrapolate_chernoff,
    lof_chernoff,
    numeric_chernoff,
    ocm_chernoff,
    PURITY_FLOOR,
)
from .collective import DENSE_CEILING, ocm_error
from .errors import ConfigError, MulticopyError, SizeLimitError
from .export import (
    TRAJECTORY_COLUMNS,
    render,
    trajectories_jsonl,
    write_text,
)
from .montecarlo import SimulationConfig, empirical_error, simulate_batch
from .qubit_model import QUARTER_PI, StateFamily
from .schemes_dp import (
    EXACT_CEILING,
    AnglePolicy,
    exact_policy_error,
    goa_solve,
    gof_optimize,
    grid_policy_error,
    loa_error,
    lof_error,
)

log = logging.getLogger("multicopy")

ALL_SCHEMES = ("ocm", "lof", "gof", "loa", "goa")
COMMAND_SCHEMES = {
    "error-curve": ALL_SCHEMES,
    "angles": ("gof", "goa"),
    "chernoff": ALL_SCHEMES,
    "critical": (),
    "simulate": ("lof", "gof", "loa", "goa"),
}

COLUMNS = {
    "error-curve": ("scheme", "alpha", "nu", "N", "error"),
    "angles": ("scheme", "alpha", "nu", "N", "stage", "credulity", "angle"),
    "chernoff": ("scheme", "alpha", "nu", "method", "s", "xi"),
    "critical": ("alpha", "nu_crit", "kind"),
    "simulate": ("scheme", "alpha", "nu", "N", "trials", "errors", "rate",
                 "standard_error", "predicted", "z"),
}


@dataclass
class SweepConfig:
    """Everything a subcommand needs; ``alpha`` is in degrees when ``degrees`` is set."""

    schemes: list = field(default_factory=list)
    alpha: list = field(default_factory=lambda: [math.pi / 6])
    nu: list = field(default_factory=lambda: [0.0, 0.02, 0.05, 0.1, 0.2])
    q: float = 0.5
    n_min: int = 1
    n_max: int = 10
    grid: list = field(default_factory=lambda: [2501])
    degrees: bool = False
    # asymptotics
    asymptotic_n: int = 400
    delta_n: int = 2
    extrapolate: bool = False
    sizes: list = field(default_factory=lambda: list(DEFAULT_SAMPLE_SIZES))
    skip_large: bool = False
    # critical mixture
    include_max: bool = False
    critical_points: int = 50
    # simulation
    seed: int = 0
    trials: int = 100_000
    true_state: str = "prior"
    trajectories: int = 6
    # output
    out: str | None = None
    format: str = "csv"
    threads: int = 1

    @property
    def alphas(self) -> list[float]:
        return [math.radians(a) for a in self.alpha] if self.degrees else [float(a) for a in self.alpha]

    @property
    def grid_sizes(self) -> list[int]:
        return [int(s) for s in self.grid]

    @property
    def extrapolation_sizes(self) -> list[int]:
        return [int(s) for s in self.sizes if not (self.skip_large and s > 2501)]

    def families(self):
        return [StateFamily(a, nu, self.q) for a in self.alphas for nu in self.nu]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict, source: str = "config") -> "SweepConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - names)
        if unknown:
            raise ConfigError(f"{source}: unknown field(s) {', '.join(unknown)}")
        return cls(**doc)

    def validate(self, command: str) -> "SweepConfig":
        allowed = COMMAND_SCHEMES[command]
        if not self.schemes:
            self.schemes = list(allowed)
        for s in self.schemes:
            if s not in allowed:
                raise ConfigError(f"schemes: {s!r} not available for {command} "
                                  f"(choose from {', '.join(allowed) or 'none'})")
        _check_list("alpha", self.alpha)
        _check_list("nu", self.nu)
        for i, a in enumerate(self.alphas):
            if not 0.0 <= a <= math.pi / 2 + 1e-15:
                raise ConfigError(f"alpha[{i}]: {self.alpha[i]!r} outside [0, pi/2]")
        for i, nu in enumerate(self.nu):
            if not 0.0 <= nu <= 1.0:
                raise ConfigError(f"nu[{i}]: {nu!r} outside [0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise ConfigError(f"q: {self.q!r} outside [0, 1]")
        if command != "critical" and self.q != 0.5:
            raise ConfigError("q: scheme-level commands require q = 0.5")
        if not (isinstance(self.n_min, int) and isinstance(self.n_max, int)) or not 0 <= self.n_min <= self.n_max:
            raise ConfigError(f"n_min/n_max: need integers 0 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        for name in ("grid", "sizes"):
            for i, s in enumerate(getattr(self, name)):
                if not isinstance(s, int) or s < 5 or s % 2 == 0:
                    raise ConfigError(f"{name}[{i}]: grid size must be an odd integer >= 5, got {s!r}")
        if not self.grid:
            raise ConfigError("grid: at least one grid size is required")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: must be csv or json, got {self.format!r}")
        if self.trials < 1:
            raise ConfigError("trials: must be >= 1")
        if self.true_state not in ("prior", "+", "-"):
            raise ConfigError(f"true_state: must be prior, + or -, got {self.true_state!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed: must be an unsigned 64-bit integer")
        if self.threads < 1:
            raise ConfigError("threads: must be >= 1")
        if self.asymptotic_n < 100 or self.delta_n <= 0 or self.delta_n % 2:
            raise ConfigError("asymptotic_n must be >= 100 and delta_n a positive even number")
        if self.extrapolate and len(set(self.extrapolation_sizes)) < 3:
            raise ConfigError("sizes: extrapolation needs at least three distinct grid sizes")
        if self.critical_points < 3:
            raise ConfigError("critical_points: must be >= 3")
        return self


def _check_list(name, values):
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{name}: expected a non-empty list")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name}[{i}]: expected a number, got {v!r}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


# ---------------------------------------------------------------------------
# commands

def _pool_map(cfg, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _progress(label):
    def report(k, n):
        if k % 100 == 0 or k == n:
            log.info("%s: %d/%d copies", label, k, n)
    return report


def cmd_error_curve(cfg: SweepConfig):
    ns = range(max(cfg.n_min, 1), cfg.n_max + 1)
    s = cfg.grid_sizes[0]
    # fail before any work rather than after the cheaper rows
    if "ocm" in cfg.schemes and cfg.n_max > DENSE_CEILING:
        raise SizeLimitError(f"ocm: N={cfg.n_max} exceeds the dense-solve ceiling {DENSE_CEILING}")
    if "gof" in cfg.schemes and cfg.n_max > EXACT_CEILING:
        raise SizeLimitError(f"gof: N={cfg.n_max} exceeds the exact-tree ceiling {EXACT_CEILING}")

    def run(task):
        scheme, fam = task
        log.info("error-curve %s alpha=%.6g nu=%.6g", scheme, fam.alpha, fam.nu)
        if scheme == "ocm":
            errs = {n: ocm_error(fam, n) for n in ns}
        elif scheme == "lof":
            errs = {n: lof_error(fam, n) for n in ns}
        elif scheme == "gof":
            errs = {n: gof_optimize(fam, n).error for n in ns}
        elif scheme == "loa":
            if cfg.n_max <= EXACT_CEILING:
                errs = {n: loa_error(fam, n) for n in ns}
            else:
                res = grid_policy_error(AnglePolicy.osm(fam.alpha), fam, cfg.n_max, s)
                errs = {n: float(res.errors[n]) for n in ns}
        else:
            res = goa_solve(fam, cfg.n_max, s)
            errs = {n: float(res.errors[n]) for n in ns}
        return [{"scheme": scheme, "alpha": fam.alpha, "nu": fam.nu, "N": n, "error": e}
                for n, e in errs.items()]

    tasks = [(sch, fam) for sch in cfg.schemes for fam in cfg.families()]
    return [row for rows in _pool_map(cfg, run, tasks) for row in rows]


def cmd_angles(cfg: SweepConfig):
    s = cfg.grid_sizes[0]

    def run(task):
        scheme, fam = task
        if scheme == "gof":
            return [{"scheme": "gof", "alpha": fam.alpha, "nu": fam.nu, "N": n,
                     "stage": None, "credulity": None, "angle": gof_optimize(fam, n).phi}
                    for n in range(max(cfg.n_min, 1), cfg.n_max + 1)]
        res = goa_solve(fam, cfg.n_max, s)
        table = res.policy.stage_table(cfg.n_max)
        rows = []
        for k, row in enumerate(table):
            for p, phi in zip(res.grid.points, row):
                rows.append({"scheme": "goa", "alpha": fam.alpha, "nu": fam.nu, "N": cfg.n_max,
                             "stage": k + 1, "credulity": float(p), "angle": float(phi)})
        return rows

    tasks = [(sch, fam) for sch in cfg.schemes for fam in cfg.families()]
    return [row for rows in _pool_map(cfg, run, tasks) for row in rows]


def cmd_chernoff(cfg: SweepConfig):
    def row(scheme, fam, method, xi, s=None):
        return {"scheme": scheme, "alpha": fam.alpha, "nu": fam.nu, "method": method,
                "s": s, "xi": xi}

    def run(task):
        scheme, fam = task
        if scheme == "ocm":
            return [row(scheme, fam, "analytic", ocm_chernoff(fam).xi)]
        if scheme == "gof":
            return [row(scheme, fam, "classical-optimized", classical_chernoff_fixed(fam).xi)]
        out = []
        if scheme == "lof":
            out.append(row(scheme, fam, "analytic", lof_chernoff(fam).xi))
        sizes = cfg.extrapolation_sizes if cfg.extrapolate else cfg.grid_sizes
        numeric = []
        for s in sizes:
            label = f"{scheme} alpha={fam.alpha:.4g} nu={fam.nu:.4g} s={s}"
            est = numeric_chernoff(scheme, fam, s, cfg.asymptotic_n, cfg.delta_n, _progress(label))
            numeric.append(est)
            out.append(row(scheme, fam, "numeric", est.xi, s))
        if cfg.extrapolate:
            ext = extrapolate_chernoff([(e.s, e.xi) for e in numeric])
            if scheme in ("loa", "goa") and fam.nu < PURITY_FLOOR:
                out.append(row(scheme, fam, "extrapolated-unreliable", None))
            else:
                out.append(row(scheme, fam, "extrapolated", ext.xi))
        return out

    tasks = [(sch, fam) for sch in cfg.schemes for fam in cfg.families()]
    return [r for rows in _pool_map(cfg, run, tasks) for r in rows]


def cmd_critical(cfg: SweepConfig):
    def run(alpha):
        if alpha <= 0.0 or alpha >= math.pi / 2:
            return {"alpha": alpha, "nu_crit": 0.0, "kind": "point"}
        log.info("critical alpha=%.6g", alpha)
        return {"alpha": alpha, "nu_crit": critical_mixture(alpha).nu_crit, "kind": "point"}

    rows = _pool_map(cfg, run, cfg.alphas)
    if cfg.include_max:
        log.info("critical maximum over %d alphas", cfg.critical_points)
        best = critical_mixture_max(cfg.critical_points)
        rows.append({"alpha": best.alpha_star, "nu_crit": best.nu_crit_max, "kind": "max"})
    return rows


def scheme_policy(scheme: str, fam: StateFamily, n_copies: int, s: int) -> AnglePolicy:
    if scheme == "lof":
        return AnglePolicy.fixed(QUARTER_PI)
    if scheme == "gof":
        return AnglePolicy.fixed(gof_optimize(fam, n_copies).phi)
    if scheme == "loa":
        return AnglePolicy.osm(fam.alpha)
    if scheme == "goa":
        return goa_solve(fam, n_copies, s).policy
    raise ValueError(f"scheme {scheme!r} cannot be simulated with local measurements")


def predicted_error(policy, fam, n_copies, s) -> float:
    if n_copies <= EXACT_CEILING:
        return exact_policy_error(policy, fam, n_copies)
    return float(grid_policy_error(policy, fam, n_copies, s).errors[n_copies])


def cmd_simulate(cfg: SweepConfig):
    """Returns (summary rows, trajectories)."""
    n = cfg.n_max
    s = cfg.grid_sizes[0]
    sim = SimulationConfig(cfg.seed, cfg.trials, cfg.true_state)
    summary, trajectories = [], []
    for scheme in cfg.schemes:
        for fam in cfg.families():
            log.info("simulate %s alpha=%.6g nu=%.6g trials=%d", scheme, fam.alpha, fam.nu, cfg.trials)
            policy = scheme_policy(scheme, fam, n, s)
            emp = empirical_error(policy, fam, n, sim, threads=cfg.threads)
            pred = predicted_error(policy, fam, n, s)
            z = (emp.rate - pred) / emp.standard_error if emp.standard_error > 0 else None
            summary.append({"scheme": scheme, "alpha": fam.alpha, "nu": fam.nu, "N": n,
                            "trials": cfg.trials, "errors": emp.errors, "rate": emp.rate,
                            "standard_error": emp.standard_error, "predicted": pred, "z": z})
            k = min(cfg.trajectories, cfg.trials)
            if k:
                batch = simulate_batch(policy, fam, n, cfg.seed, range(k), cfg.true_state)
                for i in range(k):
                    tr = batch.trajectory(i)
                    trajectories.append((scheme, fam, tr))
    return summary, trajectories


# ---------------------------------------------------------------------------
# argument handling

def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _strs(text):
    return [x.strip().lower() for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicopy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_SCHEMES:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--schemes", type=_strs)
        p.add_argument("--alpha", type=_floats, help="comma separated, radians unless --degrees")
        p.add_argument("--nu", type=_floats)
        p.add_argument("--q", type=float)
        p.add_argument("--n-min", type=int, dest="n_min")
        p.add_argument("--n-max", type=int, dest="n_max")
        p.add_argument("--grid", type=_ints, help="credulity grid size(s) s")
        p.add_argument("--degrees", action="store_true", default=None)
        p.add_argument("--quiet", "-q", action="store_true", help="suppress progress on stderr")
        if name == "chernoff":
            p.add_argument("--asymptotic-n", type=int, dest="asymptotic_n")
            p.add_argument("--delta-n", type=int, dest="delta_n")
            p.add_argument("--extrapolate", action="store_true", default=None)
            p.add_argument("--sizes", type=_ints)
            p.add_argument("--skip-large", action="store_true", default=None, dest="skip_large",
                           help="drop grid sizes above 2501 from the extrapolation")
        if name == "critical":
            p.add_argument("--include-max", action="store_true", default=None, dest="include_max")
            p.add_argument("--critical-points", type=int, dest="critical_points")
        if name == "simulate":
            p.add_argument("--trials", type=int)
            p.add_argument("--true-state", choices=("prior", "+", "-"), dest="true_state")
            p.add_argument("--trajectories", type=int)
    return parser


_NOT_FIELDS = {"command", "config", "quiet"}


def resolve_config(args) -> SweepConfig:
    doc = load_config(args.config)
    for key, value in vars(args).items():
        if key in _NOT_FIELDS or value is None:
            continue
        doc[key] = value
    try:
        cfg = SweepConfig.from_dict(doc, args.config or "flags")
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate(args.command)


def run(args) -> int:
    cfg = resolve_config(args)
    meta = {"command": args.command, "config": cfg.to_dict(), "seed": cfg.seed}
    columns = COLUMNS[args.command]
    if args.command == "simulate":
        summary, trajectories = cmd_simulate(cfg)
        summary_doc = render(columns, summary, "json", meta)
        if cfg.out in (None, "-"):
            write_text(summary_doc, None)
            return 0
        trs = [tr for _, _, tr in trajectories]
        if cfg.format == "csv":
            text = _trajectory_csv_with_scheme(trajectories)
        else:
            text = trajectories_jsonl(trs)
        write_text(text, cfg.out)
        write_text(summary_doc, cfg.out + ".summary.json")
        return 0
    commands = {
        "error-curve": cmd_error_curve,
        "angles": cmd_angles,
        "chernoff": cmd_chernoff,
        "critical": cmd_critical,
    }
    rows = commands[args.command](cfg)
    write_text(render(columns, rows, cfg.format, meta), cfg.out)
    return 0


def _trajectory_csv_with_scheme(trajectories) -> str:
    # one block per (scheme, family), distinguished by leading columns
    from .export import csv_text, trajectory_rows

    rows = []
    for scheme, fam, tr in trajectories:
        for r in trajectory_rows([tr]):
            rows.append({"scheme": scheme, "alpha": fam.alpha, "nu": fam.nu, **r})
    return csv_text(("scheme", "alpha", "nu") + TRAJECTORY_COLUMNS, rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    try:
        return run(args)
    except MulticopyError as exc:
        print(f"multicopy {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"multicopy {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
