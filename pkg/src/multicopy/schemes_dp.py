"""Local measurement schemes: LOF, GOF, LOA and GOA.

Value functions are indexed by the number of copies still to be measured:
``V_0(p) = min(p, 1 - p)`` and

    V_k(p) = sum_d Pr[d | p, phi_k(p)] V_{k-1}(posterior(p, d, phi_k(p)))

so that ``V_k(q)`` is the error probability of a ``k``-copy scheme and a
single backward pass yields the error for every number of copies up to
``N``.  Policies are stored the same way: row ``k - 1`` of an angle table
holds the angle used when ``k`` copies remain.

Two evaluation routes exist.  :func:`exact_policy_error` walks the whole
2^N outcome tree and is exact to rounding; :func:`grid_policy_error` and
:func:`goa_solve` sample each ``V_k`` on a uniform credulity grid and
interpolate between samples, which scales to hundreds of copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import OptimizerError, SizeLimitError
from .numerics import UniformGrid, golden_minimize
from .qubit_model import HALF_PI, QUARTER_PI, StateFamily, likelihoods, osm_angle, osm_error

#: Largest N evaluated by exhaustive outcome-tree recursion.
EXACT_CEILING = 24
DEFAULT_S = 2501
#: Per-sample angle minimization settings.
SCAN_POINTS = 64
ANGLE_TOL = 1e-9
#: Two fixed angles closer than this are treated as the same optimum.
DEGENERACY_TOL = 1e-6

_MAX_ANGLE = math.nextafter(HALF_PI, 0.0)
_TREE_CHUNK = 1 << 18


@dataclass(frozen=True)
class AnglePolicy:
    """A measurement strategy.

    kind ``"fixed"``
        the same angle ``phi`` for every copy;
    kind ``"osm"``
        the optimal single-copy angle for the current credulity;
    kind ``"table"``
        ``table[k - 1]`` sampled on a uniform credulity grid gives the angle
        when ``k`` copies remain, interpolated between samples.
    """

    kind: str
    phi: float | None = None
    alpha: float | None = None
    table: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def fixed(cls, phi: float) -> "AnglePolicy":
        if not 0.0 <= phi < HALF_PI:
            raise ValueError(f"fixed angle {phi!r} outside [0, pi/2)")
        return cls("fixed", phi=float(phi))

    @classmethod
    def osm(cls, alpha: float) -> "AnglePolicy":
        return cls("osm", alpha=float(alpha))

    @classmethod
    def from_table(cls, table, alpha: float | None = None) -> "AnglePolicy":
        table = np.atleast_2d(np.asarray(table, dtype=float))
        if np.any(table < 0.0) or np.any(table >= HALF_PI):
            raise ValueError("table angles must lie in [0, pi/2)")
        UniformGrid(table.shape[1])
        return cls("table", alpha=alpha, table=table)

    @property
    def horizon(self) -> int | None:
        """Largest number of copies the policy covers (None = unbounded)."""
        return None if self.table is None else self.table.shape[0]

    @property
    def grid(self) -> UniformGrid | None:
        return None if self.table is None else UniformGrid(self.table.shape[1])

    def angle(self, p, remaining: int):
        """Angle to use at credulity ``p`` with ``remaining`` copies left."""
        p = np.asarray(p, dtype=float)
        if self.kind == "fixed":
            return np.full(p.shape, self.phi)
        if self.kind == "osm":
            return np.asarray(osm_angle(p, self.alpha))
        if remaining < 1 or remaining > self.table.shape[0]:
            raise ValueError(
                f"table policy covers 1..{self.table.shape[0]} remaining copies, asked {remaining}"
            )
        return self.grid.interpolate(self.table[remaining - 1], p, 0.0, _MAX_ANGLE)

    def stage_table(self, n_copies: int) -> np.ndarray:
        """Stage-major view for an ``n_copies`` run: row ``n - 1`` is stage ``n``."""
        if self.table is None:
            raise ValueError("only table policies have a stage table")
        if n_copies > self.table.shape[0]:
            raise ValueError(f"policy covers at most {self.table.shape[0]} copies")
        return self.table[:n_copies][::-1]


@dataclass(frozen=True)
class ValueTable:
    """Expected remaining error sampled on the grid with ``remaining`` copies left.

    Stored as ``values * exp(log_scale)`` so that tables for several hundred
    copies stay inside double precision.
    """

    remaining: int
    values: np.ndarray = field(repr=False)
    log_scale: float = 0.0

    def actual(self) -> np.ndarray:
        return self.values * math.exp(self.log_scale)


@dataclass
class GridResult:
    """Backward DP output: ``errors[k]`` is the ``k``-copy error, k = 0..N."""

    errors: np.ndarray
    log_errors: np.ndarray
    grid: UniformGrid
    value_tables: list[ValueTable] | None = None
    policy: AnglePolicy | None = None


@dataclass(frozen=True)
class GofResult:
    phi: float
    error: float
    degenerate: bool


@dataclass
class SchemeResult:
    scheme: str
    family: StateFamily
    errors: dict[int, float]
    angles: dict[int, float] | None = None
    grid_s: int | None = None

    @property
    def method(self) -> str:
        return "exact" if self.grid_s is None else f"grid(s={self.grid_s})"


# ---------------------------------------------------------------------------
# closed forms

def lof_error(family: StateFamily, n_copies: int) -> float:
    """Majority vote over unbiased single-copy measurements.

    Even ``N`` ties are broken by ignoring the last result, so
    ``C_{2k} = C_{2k-1}``.
    """
    family.require_equal_priors("lof_error")
    if n_copies == 0:
        return 0.5
    n_odd = n_copies if n_copies % 2 else n_copies - 1
    c_osm = osm_error(family)
    # number of wrong single-copy verdicts is Binomial(N, c_osm); the vote
    # fails when at most floor(N/2) verdicts are right
    return float(stats.binom.cdf(n_odd // 2, n_odd, 1.0 - c_osm))


def fixed_angle_error(phi, family: StateFamily, n_copies: int):
    """Exact error of a fixed-angle scheme, vectorized over ``phi``.

    With one angle for every copy only the count of ``+1`` outcomes matters,
    so the outcome tree collapses to a binomial sum.
    """
    phi = np.asarray(phi, dtype=float)
    q = family.q
    if n_copies == 0:
        return np.full(phi.shape, min(q, 1.0 - q))
    lp, lm = likelihoods(phi, family)
    k = np.arange(n_copies + 1).reshape((-1,) + (1,) * phi.ndim)
    wp = q * stats.binom.pmf(k, n_copies, lp)
    wm = (1.0 - q) * stats.binom.pmf(k, n_copies, lm)
    return np.sum(np.minimum(wp, wm), axis=0)


# ---------------------------------------------------------------------------
# exhaustive outcome tree

def exact_policy_error(policy: AnglePolicy, family: StateFamily, n_copies: int,
                       ceiling: int = EXACT_CEILING) -> float:
    """Error of ``policy`` by enumerating all 2^N outcome strings.

    Each node carries the joint weights ``q Pr[string | rho_+]`` and
    ``(1 - q) Pr[string | rho_-]``; the credulity is their ratio and the
    leaf error is the smaller weight.
    """
    if n_copies > ceiling:
        raise SizeLimitError(f"N={n_copies} exceeds the exact-tree ceiling {ceiling}")
    if n_copies < 0:
        raise ValueError("n_copies must be >= 0")
    if policy.horizon is not None and n_copies > policy.horizon:
        raise ValueError(f"policy covers at most {policy.horizon} copies")
    wp = np.array([family.q])
    wm = np.array([1.0 - family.q])
    return _tree(policy, family, wp, wm, n_copies)


def _tree(policy, family, wp, wm, remaining):
    while remaining > 0:
        if wp.size > _TREE_CHUNK:
            half = wp.size // 2
            return (_tree(policy, family, wp[:half], wm[:half], remaining)
                    + _tree(policy, family, wp[half:], wm[half:], remaining))
        tot = wp + wm
        keep = tot > 0.0
        if not np.all(keep):
            wp, wm, tot = wp[keep], wm[keep], tot[keep]
        phi = policy.angle(wp / tot, remaining)
        lp, lm = likelihoods(phi, family)
        wp = np.concatenate([wp * lp, wp * (1.0 - lp)])
        wm = np.concatenate([wm * lm, wm * (1.0 - lm)])
        remaining -= 1
    return float(np.sum(np.minimum(wp, wm)))


# ---------------------------------------------------------------------------
# globally optimal fixed angle

def gof_optimize(family: StateFamily, n_copies: int, ceiling: int = EXACT_CEILING) -> GofResult:
    """Best fixed angle for ``n_copies``.

    For equal priors the error is symmetric under phi -> pi/2 - phi, so
    optima come in mirror pairs; the one <= pi/4 is returned and
    ``degenerate`` marks a genuine pair.
    """
    if n_copies > ceiling:
        raise SizeLimitError(f"N={n_copies} exceeds the exact-tree ceiling {ceiling}")
    if n_copies == 0:
        return GofResult(QUARTER_PI, min(family.q, 1.0 - family.q), False)

    def objective(phi):
        return fixed_angle_error(phi, family, n_copies)

    x, fx = golden_minimize(objective, [0.0], [HALF_PI], tol=ANGLE_TOL,
                            scan=SCAN_POINTS, period=HALF_PI)
    phi, err = float(x[0]), float(fx[0])
    if phi > QUARTER_PI:
        phi = HALF_PI - phi
    unbiased = float(objective(np.array(QUARTER_PI)))
    if unbiased <= err or QUARTER_PI - phi < DEGENERACY_TOL:
        return GofResult(QUARTER_PI, min(unbiased, err), False)
    degenerate = family.q == 0.5
    return GofResult(phi, err, degenerate)


# ---------------------------------------------------------------------------
# grid dynamic programming

class _Backward:
    """Shared machinery for the grid DP: scaled value tables and lookahead."""

    def __init__(self, family: StateFamily, grid: UniformGrid, keep_tables: bool):
        self.family = family
        self.grid = grid
        self.at = _prior_index(family, grid)
        self.keep_tables = keep_tables
        self.values = np.minimum(grid.points, 1.0 - grid.points)
        self.log_scale = 0.0
        self.remaining = 0
        self.tables = [ValueTable(0, self.values.copy())] if keep_tables else None
        self.errors = [float(self.values[self.at])]
        self.log_errors = [_safe_log(self.values[self.at])]

    def next_value(self, x):
        if self.remaining == 0:
            return np.minimum(x, 1.0 - x)
        # values are rescaled to max 1, so the bound only matters near log_scale 0
        hi = 0.5 * math.exp(-self.log_scale) if self.log_scale > -700.0 else math.inf
        return self.grid.interpolate(self.values, x, 0.0, hi)

    def lookahead(self, p, phi):
        lp, lm = likelihoods(phi, self.family)
        out = np.zeros(np.broadcast(p, phi).shape)
        for a, b in ((lp * p, lm * (1.0 - p)), ((1.0 - lp) * p, (1.0 - lm) * (1.0 - p))):
            tot = a + b
            post = np.divide(a, tot, out=np.full(tot.shape, 0.5), where=tot > 0.0)
            out += tot * self.next_value(post)
        return out

    def push(self, new_values):
        top = float(np.max(new_values))
        if top > 0.0:
            new_values = new_values / top
            self.log_scale += math.log(top)
        self.values = new_values
        self.remaining += 1
        mid = float(new_values[self.at])
        self.errors.append(mid * math.exp(self.log_scale))
        self.log_errors.append(_safe_log(mid) + self.log_scale)
        if self.keep_tables:
            self.tables.append(ValueTable(self.remaining, new_values.copy(), self.log_scale))

    def result(self, policy=None) -> GridResult:
        return GridResult(np.array(self.errors), np.array(self.log_errors), self.grid,
                          self.tables, policy)


def _safe_log(x):
    return math.log(x) if x > 0.0 else -math.inf


def _as_grid(grid) -> UniformGrid:
    if isinstance(grid, UniformGrid):
        return grid
    return UniformGrid(DEFAULT_S if grid is None else grid)


def grid_policy_error(policy: AnglePolicy, family: StateFamily, n_copies: int,
                      grid=DEFAULT_S, keep_tables: bool = False, progress=None) -> GridResult:
    """Backward value iteration of a given policy on a credulity grid.

    Returns the error for every number of copies ``0..n_copies`` at the
    family's prior, which must be a grid sample (q = 1/2 always is).
    """
    grid = _as_grid(grid)
    if policy.horizon is not None and n_copies > policy.horizon:
        raise ValueError(f"policy covers at most {policy.horizon} copies")
    dp = _Backward(family, grid, keep_tables)
    p = grid.points
    fixed_phi = None if policy.kind == "table" else policy.angle(p, 1)
    for k in range(1, n_copies + 1):
        if policy.kind == "table":
            phi = policy.table[k - 1]
        else:
            phi = fixed_phi
        dp.push(dp.lookahead(p, phi))
        if progress is not None:
            progress(k, n_copies)
    return dp.result(policy)


def goa_solve(family: StateFamily, n_copies: int, grid=DEFAULT_S,
              keep_tables: bool = False, progress=None) -> GridResult:
    """Globally optimal adaptive scheme by backward construction.

    With one copy left the optimal angle is the single-copy Helstrom angle;
    every earlier column minimizes the one-step lookahead against the
    already optimal tail.  ``result.policy`` holds the angle table.

    Equal priors make the problem symmetric under p -> 1 - p with
    phi -> pi/2 - phi, so only p <= 1/2 is optimized and the rest mirrored;
    this also fixes a consistent choice where the objective is flat.
    """
    family.require_equal_priors("goa_solve")
    grid = _as_grid(grid)
    dp = _Backward(family, grid, keep_tables)
    p = grid.points
    mid = grid.mid
    half = p[:mid + 1, None]
    angles = np.empty((n_copies, grid.s))
    for k in range(1, n_copies + 1):
        if k == 1:
            phi = osm_angle(p, family.alpha) if family.alpha > 0 else np.full(grid.s, QUARTER_PI)
            phi = np.minimum(phi, _MAX_ANGLE)
            vals = dp.lookahead(p, phi)
        else:
            def objective(x):
                return dp.lookahead(half, x)

            phi, vals = golden_minimize(objective, np.zeros(mid + 1), np.full(mid + 1, HALF_PI),
                                        tol=ANGLE_TOL, scan=SCAN_POINTS, period=HALF_PI)
            if not np.all(np.isfinite(vals)):
                raise OptimizerError(f"angle minimization failed with {k} copies left")
            phi = np.minimum(np.concatenate([phi, HALF_PI - phi[:mid][::-1]]), _MAX_ANGLE)
            vals = np.concatenate([vals, vals[:mid][::-1]])
        angles[k - 1] = phi
        dp.push(vals)
        if progress is not None:
            progress(k, n_copies)
    policy = AnglePolicy.from_table(angles, family.alpha) if n_copies else None
    return dp.result(policy)


def _prior_index(family, grid) -> int:
    idx = family.q * (grid.s - 1)
    if abs(idx - round(idx)) > 1e-9:
        raise ValueError(f"prior q={family.q} is not a sample of the s={grid.s} grid")
    return int(round(idx))


# ---------------------------------------------------------------------------
# scheme entry points

def loa_error(family: StateFamily, n_copies: int, grid=None) -> float:
    """Locally optimal adaptive error: exact tree when ``grid`` is None."""
    family.require_equal_priors("loa_error")
    policy = AnglePolicy.osm(family.alpha)
    if grid is None:
        return exact_policy_error(policy, family, n_copies)
    return float(grid_policy_error(policy, family, n_copies, grid).errors[n_copies])


def run_scheme(scheme: str, family: StateFamily, n_max: int, grid=None) -> SchemeResult:
    """Errors for ``N = 1..n_max`` of one named scheme.

    ``grid=None`` means exact evaluation where one exists; GOA always uses
    the grid (default size when None).
    """
    from .collective import ocm_error

    scheme = scheme.lower()
    ns = range(1, n_max + 1)
    if scheme == "ocm":
        return SchemeResult(scheme, family, {n: ocm_error(family, n) for n in ns})
    if scheme == "lof":
        if grid is None:
            return SchemeResult(scheme, family, {n: lof_error(family, n) for n in ns},
                                {n: QUARTER_PI for n in ns})
        res = grid_policy_error(AnglePolicy.fixed(QUARTER_PI), family, n_max, grid)
        return SchemeResult(scheme, family, {n: float(res.errors[n]) for n in ns},
                            {n: QUARTER_PI for n in ns}, res.grid.s)
    if scheme == "gof":
        opts = {n: gof_optimize(family, n) for n in ns}
        return SchemeResult(scheme, family, {n: o.error for n, o in opts.items()},
                            {n: o.phi for n, o in opts.items()})
    if scheme == "loa":
        if grid is None:
            return SchemeResult(scheme, family, {n: loa_error(family, n) for n in ns})
        res = grid_policy_error(AnglePolicy.osm(family.alpha), family, n_max, grid)
        return SchemeResult(scheme, family, {n: float(res.errors[n]) for n in ns}, None, res.grid.s)
    if scheme == "goa":
        res = goa_solve(family, n_max, _as_grid(grid))
        return SchemeResult(scheme, family, {n: float(res.errors[n]) for n in ns}, None, res.grid.s)
    raise ValueError(f"unknown scheme {scheme!r}")
