"""Chernoff exponents: analytic, classical-optimized, numeric and extrapolated."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collective import quantum_chernoff
from .errors import DegenerateFitError, OptimizerError
from .numerics import golden_minimize
from .qubit_model import HALF_PI, QUARTER_PI, StateFamily, outcome_probability
from .schemes_dp import AnglePolicy, goa_solve, grid_policy_error

#: Exponent of log(s) in the grid-size extrapolation model.
FIT_Z = 1.22
#: Grid sizes used for extrapolation by default.
DEFAULT_SAMPLE_SIZES = (501, 1001, 1501, 2001, 2501, 10001)
#: Below this mixture extrapolated adaptive exponents are not trusted.
PURITY_FLOOR = 0.002
#: An optimal fixed angle closer than this to pi/4 counts as unbiased.
BIAS_TOL = 1e-5


@dataclass(frozen=True)
class FitModel:
    """xi_s = x + y / (log s)^z."""

    x: float
    y: float
    z: float = FIT_Z

    def __call__(self, s):
        return self.x + self.y / np.log(s) ** self.z


@dataclass(frozen=True)
class ChernoffEstimate:
    xi: float
    method: str
    s: int | None = None
    a_star: float | None = None
    phi_star: float | None = None
    degenerate: bool = False
    fit: FitModel | None = None
    reliable: bool = True


@dataclass(frozen=True)
class CriticalMixture:
    alpha: float
    nu_crit: float


# ---------------------------------------------------------------------------
# analytic exponents

def ocm_chernoff(family: StateFamily) -> ChernoffEstimate:
    qc = quantum_chernoff(family)
    return ChernoffEstimate(qc.xi, "analytic", a_star=qc.a_star)


def lof_chernoff(family: StateFamily) -> ChernoffEstimate:
    """-1/2 log[1 - (1 - nu)^2 (1 - c^2)]."""
    family.require_equal_priors("lof_chernoff")
    inner = 1.0 - family.purity ** 2 * (1.0 - family.c ** 2)
    return ChernoffEstimate(-0.5 * math.log(inner), "analytic", phi_star=QUARTER_PI)


# ---------------------------------------------------------------------------
# classical Chernoff exponent of a fixed measurement

def chernoff_m(a, phi, family: StateFamily):
    """Classical Chernoff sum M(a, phi) over the two outcomes."""
    return _m_from_probs(np.asarray(a, dtype=float), _outcome_probs(phi, family))


def _outcome_probs(phi, family):
    # both outcomes evaluated directly: near the fully biased angle one of
    # them is tiny and 1 - Pr[+1] would lose it to cancellation
    return tuple(outcome_probability(sign, d, phi, family) for d in (1, -1) for sign in (1, -1))


def _m_from_probs(a, probs):
    up_p, up_m, down_p, down_m = probs
    return _powmix(up_p, up_m, a) + _powmix(down_p, down_m, a)


def _powmix(x, y, a):
    # x^a y^(1-a) with 0^0 = 1; a zero base with a positive power gives 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(a * np.log(x) + (1.0 - a) * np.log(y))
    if np.any(x == 0.0) or np.any(y == 0.0):
        out = np.where((x == 0.0) & (a == 0.0), y, out)
        out = np.where((y == 0.0) & (a == 1.0), x, out)
        out = np.nan_to_num(out, nan=0.0)
    return out


def min_over_a(phi, family: StateFamily, tol=1e-11):
    """min_a M(a, phi) for an array of angles; returns (a*, M*)."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    shape = phi.shape
    probs = tuple(p[:, None] for p in _outcome_probs(phi.ravel(), family))

    def objective(a):
        return _m_from_probs(a, probs)

    a, m = golden_minimize(objective, np.zeros(phi.size), np.ones(phi.size),
                           tol=tol, scan=16)
    return a.reshape(shape), m.reshape(shape)


def classical_chernoff_fixed(family: StateFamily, scan: int = 64) -> ChernoffEstimate:
    """Best classical Chernoff exponent over fixed projective measurements.

    The inner minimization over ``a`` is convex and solved exactly per
    angle; the outer search scans ``phi`` and refines by golden section.
    Mirror optima are reported as the angle <= pi/4 with ``degenerate``.
    """
    family.require_equal_priors("classical_chernoff_fixed")

    def g(phi):
        return min_over_a(phi, family)[1]

    x, fx = golden_minimize(g, [0.0], [HALF_PI], tol=1e-10, scan=scan, period=HALF_PI)
    phi, m = float(x[0]), float(fx[0])
    # for pure states the optimum is the fully biased angle, where M has a
    # logarithmic cusp in phi that golden section only approaches slowly
    biased = 0.5 * family.alpha
    m_b = float(g(np.array([biased]))[0])
    if m_b <= m * (1.0 + 1e-12):
        phi, m = biased, m_b
    if not (math.isfinite(m) and m > 0.0):
        raise OptimizerError(f"classical Chernoff minimization failed for {family}")
    if phi > QUARTER_PI:
        phi = HALF_PI - phi
    a_q, m_q = min_over_a(np.array([QUARTER_PI]), family)
    if m_q[0] <= m or QUARTER_PI - phi < BIAS_TOL:
        return ChernoffEstimate(-math.log(min(m, float(m_q[0]))), "classical-optimized",
                                a_star=float(a_q[0]), phi_star=QUARTER_PI)
    a_star = float(min_over_a(np.array([phi]), family)[0][0])
    return ChernoffEstimate(-math.log(m), "classical-optimized", a_star=a_star,
                            phi_star=phi, degenerate=True)


def critical_mixture(alpha: float, tol: float = 1e-7) -> CriticalMixture:
    """Mixture at which the optimal fixed angle bifurcates away from pi/4.

    Bisection on ``nu`` with the predicate "optimal angle is biased".
    """
    if not 0.0 < alpha < HALF_PI:
        raise ValueError(f"alpha must lie in (0, pi/2), got {alpha!r}")

    def biased(nu):
        return classical_chernoff_fixed(StateFamily(alpha, nu)).degenerate

    # every critical mixture found is well below 0.05; the loop below widens
    # the bracket if that ever fails
    lo, hi = 0.0, 0.05
    if not biased(lo):
        return CriticalMixture(alpha, 0.0)
    while biased(hi):
        lo, hi = hi, min(1.0, 2.0 * hi)
        if lo == 1.0:
            return CriticalMixture(alpha, 1.0)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if biased(mid):
            lo = mid
        else:
            hi = mid
    return CriticalMixture(alpha, 0.5 * (lo + hi))


@dataclass(frozen=True)
class CriticalMax:
    alpha_star: float
    nu_crit_max: float
    scan: tuple[CriticalMixture, ...]


def critical_mixture_max(points: int = 50, tol: float = 1e-7, refine_tol: float = 1e-5) -> CriticalMax:
    """Largest critical mixture over alpha: scan, then golden refinement."""
    alphas = HALF_PI * np.arange(1, points + 1) / (points + 1)
    scan = tuple(critical_mixture(float(a), tol) for a in alphas)
    vals = np.array([c.nu_crit for c in scan])
    j = int(np.argmax(vals))
    lo = alphas[max(j - 1, 0)]
    hi = alphas[min(j + 1, points - 1)]

    def neg(a):
        return -critical_mixture(a, tol).nu_crit

    # scalar golden search: the objective is one bisection per call
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
    fc, fd = neg(c), neg(d)
    while hi - lo > refine_tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = neg(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = neg(d)
    best_alpha, best_nu = (c, -fc) if fc < fd else (d, -fd)
    if vals[j] > best_nu:
        best_alpha, best_nu = float(alphas[j]), float(vals[j])
    return CriticalMax(float(best_alpha), float(best_nu), scan)


# ---------------------------------------------------------------------------
# numeric exponents from the grid DP

def scheme_log_errors(scheme: str, family: StateFamily, grid, n_max: int, progress=None):
    """log C_n for n = 0..n_max of LOF, LOA or GOA on the credulity grid."""
    scheme = scheme.lower()
    if scheme == "lof":
        res = grid_policy_error(AnglePolicy.fixed(QUARTER_PI), family, n_max, grid,
                                progress=progress)
    elif scheme == "loa":
        res = grid_policy_error(AnglePolicy.osm(family.alpha), family, n_max, grid,
                                progress=progress)
    elif scheme == "goa":
        res = goa_solve(family, n_max, grid, progress=progress)
    else:
        raise ValueError(f"numeric exponents exist for lof, loa, goa; got {scheme!r}")
    return res.log_errors


def log_gradient(log_errors, n: int, delta_n: int = 2) -> float:
    """-(log C_n - log C_{n-delta}) / delta."""
    return -(log_errors[n] - log_errors[n - delta_n]) / delta_n


def numeric_chernoff(scheme: str, family: StateFamily, grid=2501, n_max: int = 400,
                     delta_n: int = 2, progress=None) -> ChernoffEstimate:
    family.require_equal_priors("numeric_chernoff")
    if n_max < 100:
        raise ValueError("n_max must be at least 100")
    if delta_n <= 0 or delta_n % 2:
        raise ValueError("delta_n must be a positive even number")
    logs = scheme_log_errors(scheme, family, grid, n_max, progress)
    s = grid if isinstance(grid, int) else grid.s
    xi = float(log_gradient(logs, n_max, delta_n))
    if not math.isfinite(xi):
        # error underflowed to exactly zero (orthogonal pure states)
        xi = math.inf
    return ChernoffEstimate(xi, "numeric", s=s)


def extrapolate_chernoff(samples, z: float = FIT_Z) -> ChernoffEstimate:
    """Least-squares fit of xi_s = x + y / (log s)^z; the estimate is x."""
    samples = list(samples)
    s = np.array([float(a) for a, _ in samples])
    xi = np.array([float(b) for _, b in samples])
    if len(np.unique(s)) < 3:
        raise DegenerateFitError("need at least three distinct grid sizes")
    design = np.column_stack([np.ones_like(s), np.log(s) ** (-z)])
    if np.linalg.matrix_rank(design) < 2:
        raise DegenerateFitError("extrapolation design matrix is rank deficient")
    (x, y), *_ = np.linalg.lstsq(design, xi, rcond=None)
    return ChernoffEstimate(float(x), "extrapolated", fit=FitModel(float(x), float(y), z))


def extrapolated_chernoff(scheme: str, family: StateFamily, sizes=DEFAULT_SAMPLE_SIZES,
                          n_max: int = 400, delta_n: int = 2,
                          purity_floor: float = PURITY_FLOOR, progress=None):
    """Numeric exponents at each grid size plus their extrapolation.

    Returns ``(extrapolated, [numeric estimates])``.  Adaptive schemes below
    the purity floor are marked unreliable.
    """
    numeric = [numeric_chernoff(scheme, family, s, n_max, delta_n, progress) for s in sizes]
    est = extrapolate_chernoff([(e.s, e.xi) for e in numeric])
    if scheme.lower() in ("loa", "goa") and family.nu < purity_floor:
        est = ChernoffEstimate(est.xi, est.method, fit=est.fit, reliable=False)
    return est, numeric
