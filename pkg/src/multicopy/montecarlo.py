"""Measurement-by-measurement simulation of adaptive and fixed policies.

Randomness is counter based: the uniform variate used by trial ``t`` at
draw ``j`` is a SplitMix64 hash of ``(seed, t, j)``.  Trials are therefore
independent of the order, chunking or thread in which they are simulated.
Draw 0 picks the true state, draw ``n`` the outcome of stage ``n``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .qubit_model import StateFamily, likelihoods
from .schemes_dp import AnglePolicy

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
CHUNK = 1 << 16


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, trials, draw: int) -> np.ndarray:
    """U[0,1) variates for the given trial indices at draw number ``draw``."""
    seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    t = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _mix(seed * _GAMMA + _GAMMA)
        z = _mix(key ^ _mix((t + np.uint64(1)) * _GAMMA))
        z = _mix(z + np.uint64(draw) * _GAMMA)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 0
    trials: int = 100_000
    #: "prior" draws the true state as rho_+ with probability q; "+" or "-" fixes it
    true_state: str = "prior"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.true_state not in ("prior", "+", "-"):
            raise ValueError(f"true_state must be 'prior', '+' or '-', got {self.true_state!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class Step:
    stage: int
    credulity_before: float
    angle: float
    outcome: int
    credulity_after: float


@dataclass
class Trajectory:
    true_sign: int
    steps: list[Step] = field(default_factory=list)
    final_guess: int = 1
    correct: bool = True
    trial: int = 0


@dataclass
class Batch:
    """Vectorized record of many trials; arrays are indexed [trial, stage]."""

    trials: np.ndarray
    true_sign: np.ndarray
    angles: np.ndarray
    outcomes: np.ndarray
    credulity: np.ndarray  # shape (T, N + 1): before stage 1 .. after stage N

    @property
    def final_guess(self) -> np.ndarray:
        return np.where(self.credulity[:, -1] >= 0.5, 1, -1)

    @property
    def correct(self) -> np.ndarray:
        return self.final_guess == self.true_sign

    def trajectory(self, i: int) -> Trajectory:
        n = self.angles.shape[1]
        steps = [Step(k + 1, float(self.credulity[i, k]), float(self.angles[i, k]),
                      int(self.outcomes[i, k]), float(self.credulity[i, k + 1]))
                 for k in range(n)]
        return Trajectory(int(self.true_sign[i]), steps, int(self.final_guess[i]),
                          bool(self.correct[i]), int(self.trials[i]))


def simulate_batch(policy: AnglePolicy, family: StateFamily, n_copies: int,
                   seed: int, trials, true_state: str = "prior") -> Batch:
    """Simulate the given trial indices; results depend only on (seed, trial)."""
    trials = np.asarray(trials, dtype=np.uint64)
    t = trials.size
    if true_state == "prior":
        sign = np.where(uniforms(seed, trials, 0) < family.q, 1, -1)
    else:
        sign = np.full(t, 1 if true_state == "+" else -1)
    p = np.full(t, family.q)
    cred = np.empty((t, n_copies + 1))
    cred[:, 0] = p
    angles = np.empty((t, n_copies))
    outcomes = np.empty((t, n_copies), dtype=np.int8)
    for n in range(1, n_copies + 1):
        phi = np.broadcast_to(policy.angle(p, n_copies - n + 1), p.shape)
        lp, lm = likelihoods(phi, family)
        pr_plus = np.where(sign == 1, lp, lm)
        d_plus = uniforms(seed, trials, n) < pr_plus
        a = np.where(d_plus, lp, 1.0 - lp) * p
        b = np.where(d_plus, lm, 1.0 - lm) * (1.0 - p)
        tot = a + b
        p = np.divide(a, tot, out=p.copy(), where=tot > 0.0)
        angles[:, n - 1] = phi
        outcomes[:, n - 1] = np.where(d_plus, 1, -1)
        cred[:, n] = p
    return Batch(trials, sign, angles, outcomes, cred)


def simulate_trajectory(policy: AnglePolicy, true_sign, family: StateFamily, n_copies: int,
                        seed: int, trial: int = 0) -> Trajectory:
    """One run with the true state fixed; ties in the final credulity guess rho_+."""
    true_state = "+" if true_sign in (1, "+") else "-"
    return simulate_batch(policy, family, n_copies, seed, [trial], true_state).trajectory(0)


@dataclass(frozen=True)
class EmpiricalError:
    rate: float
    standard_error: float
    errors: int
    trials: int

    def __iter__(self):
        return iter((self.rate, self.standard_error))


def empirical_error(policy: AnglePolicy, family: StateFamily, n_copies: int,
                    config: SimulationConfig, threads: int = 1) -> EmpiricalError:
    """Fraction of wrong final guesses and its binomial standard error."""
    starts = range(0, config.trials, CHUNK)

    def count(start):
        idx = np.arange(start, min(start + CHUNK, config.trials), dtype=np.uint64)
        b = simulate_batch(policy, family, n_copies, config.seed, idx, config.true_state)
        return int(np.count_nonzero(~b.correct))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            wrong = sum(pool.map(count, starts))
    else:
        wrong = sum(map(count, starts))
    rate = wrong / config.trials
    if wrong < 10:
        warnings.warn(f"only {wrong} errors in {config.trials} trials; "
                      "the standard error is unreliable", RuntimeWarning, stacklevel=2)
    return EmpiricalError(rate, math.sqrt(rate * (1.0 - rate) / config.trials), wrong,
                          config.trials)
