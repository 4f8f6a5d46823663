"""Depolarized qubit state pair, projective measurements and Bayesian updates.

The two hypotheses are

    rho_pm = 1/2 [I + (1 - nu)(Z cos(alpha) +- X sin(alpha))]

and a local measurement is the real projective basis {|phi>, |phi_perp>}
with |phi> = cos(phi)|0> + sin(phi)|1>.  Outcome ``d = +1`` is the
projection onto |phi>, ``d = -1`` onto |phi_perp>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ImpossibleOutcomeError, UnsupportedPriorError

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi

PAULI_I = np.eye(2)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

OUTCOMES = (+1, -1)


@dataclass(frozen=True)
class StateFamily:
    """A discrimination instance: separation ``alpha``, mixture ``nu``, prior ``q``."""

    alpha: float
    nu: float
    q: float = 0.5

    def __post_init__(self):
        for name, lo, hi in (("alpha", 0.0, HALF_PI), ("nu", 0.0, 1.0), ("q", 0.0, 1.0)):
            value = getattr(self, name)
            if not (lo <= value <= hi):
                raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")

    @property
    def c(self) -> float:
        """Overlap parameter cos(alpha)."""
        return min(1.0, max(0.0, math.cos(self.alpha)))

    @property
    def purity(self) -> float:
        """Bloch vector length 1 - nu."""
        return 1.0 - self.nu

    def require_equal_priors(self, what: str):
        if self.q != 0.5:
            raise UnsupportedPriorError(f"{what} is only defined for q = 1/2 (got q={self.q})")

    def with_nu(self, nu: float) -> "StateFamily":
        return StateFamily(self.alpha, nu, self.q)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def _sign(sign) -> int:
    if sign in (1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"state sign must be +1 or -1, got {sign!r}")


def bloch_vector(family: StateFamily, sign) -> BlochVector:
    s = _sign(sign)
    r = family.purity
    return BlochVector(s * r * math.sin(family.alpha), 0.0, r * math.cos(family.alpha))


def density_matrix(family: StateFamily, sign) -> np.ndarray:
    """Real symmetric 2x2 density matrix of rho_+ (sign=+1) or rho_- (sign=-1)."""
    b = bloch_vector(family, sign)
    return 0.5 * (PAULI_I + b.x * PAULI_X + b.z * PAULI_Z)


def projector(phi: float, d: int = +1) -> np.ndarray:
    """Projector onto |phi> (d=+1) or |phi_perp> (d=-1)."""
    if d == 1:
        v = np.array([math.cos(phi), math.sin(phi)])
    else:
        v = np.array([-math.sin(phi), math.cos(phi)])
    return np.outer(v, v)


def outcome_probability(state_sign, d, phi, family: StateFamily):
    """Pr[d | rho_pm, phi].  Vectorizes over ``d`` and ``phi``.

    ``d - 1`` is 0 or -2, so the cosine argument is shifted by 0 or pi/2:
    d = +1 gives cos^2 and d = -1 gives sin^2 of ``phi -+ alpha/2``.  Both
    are evaluated directly so that small probabilities keep full relative
    accuracy (and the aligned outcome is an exact zero).
    """
    s = _sign(state_sign)
    nu = family.nu
    x = np.asarray(phi) - s * 0.5 * family.alpha
    g = np.where(np.asarray(d) == 1, np.cos(x) ** 2, np.sin(x) ** 2)
    out = 0.5 * nu + (1.0 - nu) * g
    return float(out) if np.ndim(out) == 0 else out


def likelihoods(phi, family: StateFamily):
    """Arrays (Pr[+1|rho_+], Pr[+1|rho_-]) for an array of angles.

    The d=-1 likelihoods are the complements.
    """
    phi = np.asarray(phi, dtype=float)
    nu = family.nu
    half = 0.5 * family.alpha
    lp = 0.5 * nu + (1.0 - nu) * np.cos(phi - half) ** 2
    lm = 0.5 * nu + (1.0 - nu) * np.cos(phi + half) ** 2
    return lp, lm


def bayes_update(p, d, phi, family: StateFamily):
    """Posterior credulity in rho_+ after observing ``d`` at angle ``phi``."""
    lp = outcome_probability(+1, d, phi, family)
    lm = outcome_probability(-1, d, phi, family)
    num = np.asarray(lp) * p
    den = num + np.asarray(lm) * (1.0 - np.asarray(p))
    if np.any(den <= 0.0):
        raise ImpossibleOutcomeError(
            f"outcome d={d} has zero probability at p={p!r}, phi={phi!r}"
        )
    post = num / den
    return float(post) if np.ndim(post) == 0 else post


def predictive_probability(p, d, phi, family: StateFamily):
    """Pr[d | p, phi] = Pr[d|rho_+] p + Pr[d|rho_-] (1 - p)."""
    lp = outcome_probability(+1, d, phi, family)
    lm = outcome_probability(-1, d, phi, family)
    out = np.asarray(lp) * p + np.asarray(lm) * (1.0 - np.asarray(p))
    return float(out) if np.ndim(out) == 0 else out


def osm_angle(q, alpha: float):
    """Optimal single-copy angle 1/2 arccot[(2q - 1) cot(alpha)], arccot in (0, pi).

    Written with ``arctan2`` so it is continuous in ``q`` and finite at
    alpha = pi/2.  Vectorizes over ``q``.
    """
    if not (0.0 < alpha <= HALF_PI):
        raise ValueError(f"alpha must lie in (0, pi/2], got {alpha!r}")
    q = np.asarray(q, dtype=float)
    out = 0.5 * np.arctan2(math.sin(alpha), (2.0 * q - 1.0) * math.cos(alpha))
    return float(out) if out.ndim == 0 else out


def osm_error(family: StateFamily) -> float:
    """Single-copy Helstrom error for equal priors."""
    family.require_equal_priors("osm_error")
    return 0.5 * (1.0 - family.purity * math.sqrt(1.0 - family.c ** 2))
