"""Optimal collective (Helstrom) measurement on N copies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import SizeLimitError
from .qubit_model import StateFamily, density_matrix

#: Largest N for which the 2^N x 2^N Helstrom operator is built densely.
DENSE_CEILING = 12


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    n_copies: int

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))


def kron_power(m: np.ndarray, n: int) -> np.ndarray:
    return reduce(np.kron, [m] * n)


def gamma_operator(family: StateFamily, n_copies: int) -> np.ndarray:
    rp = kron_power(density_matrix(family, +1), n_copies)
    rm = kron_power(density_matrix(family, -1), n_copies)
    return family.q * rp - (1.0 - family.q) * rm


def gamma_spectrum(family: StateFamily, n_copies: int, ceiling: int = DENSE_CEILING) -> Spectrum:
    """Eigenvalues of q rho_+^N - (1-q) rho_-^N by a dense symmetric eigensolve."""
    if n_copies < 1:
        raise ValueError("n_copies must be >= 1")
    if n_copies > ceiling:
        raise SizeLimitError(
            f"N={n_copies} exceeds the dense-solve ceiling {ceiling} "
            f"(needs {4 ** n_copies} matrix entries)"
        )
    gamma = gamma_operator(family, n_copies)
    return Spectrum(np.linalg.eigvalsh(gamma), n_copies)


def ocm_error(family: StateFamily, n_copies: int, ceiling: int = DENSE_CEILING) -> float:
    """Helstrom error 1 - q + sum of the negative eigenvalues."""
    spec = gamma_spectrum(family, n_copies, ceiling)
    neg = spec.eigenvalues[spec.eigenvalues < 0.0]
    err = 1.0 - family.q + float(np.sum(neg))
    return min(max(err, 0.0), min(family.q, 1.0 - family.q))


def ocm_error_pure(c: float, q: float, n_copies: int) -> float:
    """Closed-form Helstrom error for pure states with overlap ``c``."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"overlap c={c!r} outside [0, 1]")
    inner = 1.0 - 4.0 * q * (1.0 - q) * c ** (2 * n_copies)
    return 0.5 * (1.0 - math.sqrt(max(inner, 0.0)))


def chernoff_trace(family: StateFamily, a: float) -> float:
    """Tr[rho_+^a rho_-^(1-a)], evaluated by matrix powers."""
    return float(np.trace(_psd_power(density_matrix(family, +1), a)
                          @ _psd_power(density_matrix(family, -1), 1.0 - a)))


def _psd_power(m: np.ndarray, a: float) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    # roundoff-level eigenvalues are true zeros; tiny**a would inflate them
    w = np.where(w > 1e-13 * max(float(w.max()), 0.0), w, 0.0)
    # 0**0 = 1 keeps rho**0 equal to the identity
    return (v * w ** a) @ v.T


@dataclass(frozen=True)
class QuantumChernoff:
    xi: float
    a_star: float = 0.5


def quantum_chernoff(family: StateFamily) -> QuantumChernoff:
    """Quantum Chernoff exponent in nats; the minimizing power is a = 1/2."""
    family.require_equal_priors("quantum_chernoff")
    c2 = family.c ** 2
    r = family.purity
    inner = 1.0 - (1.0 - c2) * (1.0 - math.sqrt(max(1.0 - r * r, 0.0)))
    return QuantumChernoff(-math.log(inner))
