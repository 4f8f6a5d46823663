import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from multicopy.asymptotics import (
    FIT_Z,
    FitModel,
    chernoff_m,
    classical_chernoff_fixed,
    critical_mixture,
    extrapolate_chernoff,
    extrapolated_chernoff,
    lof_chernoff,
    min_over_a,
    numeric_chernoff,
    ocm_chernoff,
)
from multicopy.errors import DegenerateFitError, UnsupportedPriorError
from multicopy.numerics import golden_minimize
from multicopy.qubit_model import StateFamily, osm_error

ALPHA = math.pi / 6
Q4 = math.pi / 4


def brute_classical_exponent(family, n_phi=2001):
    """max over a dense phi grid of -log min_a M, with scipy's bounded minimizer."""
    best = 0.0
    for phi in np.linspace(0, math.pi / 4, n_phi):
        res = minimize_scalar(lambda a: float(chernoff_m(a, phi, family)), bounds=(0, 1),
                              method="bounded", options={"xatol": 1e-10})
        best = max(best, -math.log(res.fun))
    return best


def test_lof_chernoff_examples():
    assert lof_chernoff(StateFamily(ALPHA, 0.0)).xi == pytest.approx(-math.log(math.cos(ALPHA)), abs=1e-12)
    assert lof_chernoff(StateFamily(ALPHA, 1.0)).xi == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(UnsupportedPriorError):
        lof_chernoff(StateFamily(ALPHA, 0.1, 0.2))


@given(st.floats(0.01, math.pi / 2 - 0.01), st.floats(0.0, 1.0))
def test_lof_chernoff_is_bhattacharyya_of_vote(alpha, nu):
    # each unbiased measurement is a binary symmetric channel with flip rate C
    fam = StateFamily(alpha, nu)
    c = osm_error(fam)
    assert lof_chernoff(fam).xi == pytest.approx(-math.log(2 * math.sqrt(c * (1 - c))), abs=1e-10)


def test_lof_chernoff_reference_value():
    assert lof_chernoff(StateFamily(ALPHA, 0.1)).xi == pytest.approx(0.1131367, abs=1e-7)


def test_unbiased_slice_minimized_at_half():
    fam = StateFamily(ALPHA, 0.1)
    a, m = min_over_a(np.array([Q4]), fam)
    assert a[0] == pytest.approx(0.5, abs=1e-6)
    assert -math.log(m[0]) == pytest.approx(lof_chernoff(fam).xi, abs=1e-12)


def test_classical_pure_state_fully_biased():
    fam = StateFamily(ALPHA, 0.0)
    est = classical_chernoff_fixed(fam)
    assert est.phi_star == pytest.approx(ALPHA / 2, abs=1e-9)
    assert est.degenerate
    assert est.xi == pytest.approx(-2 * math.log(math.cos(ALPHA)), abs=1e-6)
    assert est.method == "classical-optimized"


def test_classical_above_critical_is_unbiased():
    fam = StateFamily(ALPHA, 0.1)
    est = classical_chernoff_fixed(fam)
    assert est.phi_star == Q4
    assert not est.degenerate
    assert est.xi == pytest.approx(lof_chernoff(fam).xi, abs=1e-8)


@pytest.mark.parametrize("nu", [0.0, 0.005, 0.03])
def test_classical_matches_brute_force(nu):
    fam = StateFamily(ALPHA, nu)
    assert classical_chernoff_fixed(fam).xi >= brute_classical_exponent(fam, 801) - 1e-9


@settings(max_examples=15)
@given(st.floats(0.05, math.pi / 2 - 0.05), st.floats(0.0, 1.0))
def test_exponent_ordering(alpha, nu):
    fam = StateFamily(alpha, nu)
    ocm = ocm_chernoff(fam).xi
    gof = classical_chernoff_fixed(fam).xi
    lof = lof_chernoff(fam).xi
    assert ocm >= gof - 1e-9
    assert gof >= lof - 1e-9
    assert min(ocm, gof, lof) >= 0


@given(st.floats(0.01, 100.0), st.floats(0.1, 1.4))
def test_argmin_invariant_under_scaling(scale, phi):
    fam = StateFamily(ALPHA, 0.05)

    def base(a):
        return chernoff_m(a, phi, fam)

    a1, _ = golden_minimize(base, [0.0], [1.0], tol=1e-11, scan=16)
    a2, _ = golden_minimize(lambda a: scale * base(a), [0.0], [1.0], tol=1e-11, scan=16)
    assert a2[0] == pytest.approx(a1[0], abs=1e-6)


def test_critical_mixture_endpoints_and_predicate():
    assert critical_mixture(0.02).nu_crit < 1e-3
    assert critical_mixture(math.pi / 2 - 0.02).nu_crit < 1e-3
    with pytest.raises(ValueError):
        critical_mixture(0.0)
    crit = critical_mixture(ALPHA, tol=1e-6).nu_crit
    assert classical_chernoff_fixed(StateFamily(ALPHA, crit - 2e-4)).degenerate
    assert not classical_chernoff_fixed(StateFamily(ALPHA, crit + 2e-4)).degenerate


def test_extrapolation_constant_data():
    est = extrapolate_chernoff([(501, 0.2), (1001, 0.2), (2501, 0.2)])
    assert est.xi == pytest.approx(0.2, abs=1e-12)
    assert est.fit.y == pytest.approx(0.0, abs=1e-10)
    assert est.fit.z == FIT_Z
    assert est.method == "extrapolated"


@given(st.floats(-1, 1), st.floats(-5, 5))
def test_extrapolation_recovers_synthetic_fit(x, y):
    model = FitModel(x, y)
    sizes = (501, 1001, 1501, 2001, 2501, 10001)
    est = extrapolate_chernoff([(s, model(s)) for s in sizes])
    assert est.fit.x == pytest.approx(x, abs=1e-8)
    assert est.fit.y == pytest.approx(y, abs=1e-8)


def test_extrapolation_degenerate():
    with pytest.raises(DegenerateFitError):
        extrapolate_chernoff([(501, 0.1), (501, 0.12), (1001, 0.11)])
    with pytest.raises(DegenerateFitError):
        extrapolate_chernoff([(501, 0.1), (1001, 0.11)])


def test_numeric_chernoff_fully_mixed():
    est = numeric_chernoff("loa", StateFamily(ALPHA, 1.0), 101, 100)
    assert est.xi == pytest.approx(0.0, abs=1e-12)
    assert est.method == "numeric" and est.s == 101
    assert isinstance(est.xi, float)


def test_numeric_chernoff_validation():
    fam = StateFamily(ALPHA, 0.1)
    with pytest.raises(ValueError):
        numeric_chernoff("lof", fam, 101, 50)
    with pytest.raises(ValueError):
        numeric_chernoff("lof", fam, 101, 200, delta_n=3)
    with pytest.raises(ValueError):
        numeric_chernoff("gof", fam, 101, 200)


def test_numeric_lof_overestimates_at_finite_grid():
    fam = StateFamily(ALPHA, 0.05)
    analytic = lof_chernoff(fam).xi
    coarse = numeric_chernoff("lof", fam, 501, 400).xi
    fine = numeric_chernoff("lof", fam, 2501, 400).xi
    assert coarse > fine > analytic


def test_extrapolated_flags_high_purity_adaptive():
    est, numeric = extrapolated_chernoff("loa", StateFamily(ALPHA, 0.001), sizes=(101, 201, 401), n_max=100)
    assert not est.reliable
    assert [e.s for e in numeric] == [101, 201, 401]
    est_lof, _ = extrapolated_chernoff("lof", StateFamily(ALPHA, 0.001), sizes=(101, 201, 401), n_max=100)
    assert est_lof.reliable
