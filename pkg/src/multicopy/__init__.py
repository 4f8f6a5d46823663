"""Error probabilities and Chernoff exponents for multiple-copy discrimination
of depolarized qubit states with collective, fixed and adaptive measurements."""

__version__ = "0.1.0"

from .qubit_model import (  # noqa: E402
    StateFamily,
    bayes_update,
    bloch_vector,
    density_matrix,
    osm_angle,
    osm_error,
    outcome_probability,
)
from .collective import gamma_spectrum, ocm_error, ocm_error_pure, quantum_chernoff  # noqa: E402
from .schemes_dp import (  # noqa: E402
    AnglePolicy,
    exact_policy_error,
    goa_solve,
    gof_optimize,
    grid_policy_error,
    loa_error,
    lof_error,
)

__all__ = [
    "AnglePolicy",
    "StateFamily",
    "bayes_update",
    "bloch_vector",
    "density_matrix",
    "exact_policy_error",
    "gamma_spectrum",
    "goa_solve",
    "gof_optimize",
    "grid_policy_error",
    "loa_error",
    "lof_error",
    "ocm_error",
    "ocm_error_pure",
    "osm_angle",
    "osm_error",
    "outcome_probability",
    "quantum_chernoff",
]
