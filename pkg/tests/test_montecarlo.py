import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from multicopy.collective import ocm_error_pure
from multicopy.montecarlo import (
    SimulationConfig,
    empirical_error,
    simulate_batch,
    simulate_trajectory,
    uniforms,
)
from multicopy.qubit_model import StateFamily, bayes_update
from multicopy.schemes_dp import AnglePolicy, goa_solve, lof_error

ALPHA = math.pi / 6
Q4 = math.pi / 4


@pytest.fixture(scope="module")
def goa_policy():
    return goa_solve(StateFamily(ALPHA, 0.1), 10, 501).policy


def test_uniforms_range_and_independence():
    u = uniforms(7, np.arange(200_000), 3)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert u.mean() == pytest.approx(0.5, abs=0.003)
    v = uniforms(7, np.arange(200_000), 4)
    assert abs(np.corrcoef(u, v)[0, 1]) < 0.01
    assert not np.array_equal(uniforms(8, np.arange(10), 3), u[:10])


def test_uniforms_order_independent():
    idx = np.arange(1000, dtype=np.uint64)
    assert np.array_equal(uniforms(3, idx, 2)[::-1], uniforms(3, idx[::-1], 2))


def test_orthogonal_states_identified_in_one_step():
    fam = StateFamily(math.pi / 2, 0.0)
    tr = simulate_trajectory(AnglePolicy.fixed(Q4), +1, fam, 1, seed=5)
    assert tr.steps[0].outcome == 1
    assert tr.steps[0].credulity_after == 1.0
    assert tr.correct and tr.final_guess == 1


def test_replay_determinism(goa_policy):
    fam = StateFamily(ALPHA, 0.1)
    a = simulate_batch(goa_policy, fam, 10, 42, np.arange(500))
    b = simulate_batch(goa_policy, fam, 10, 42, np.arange(500))
    for name in ("true_sign", "angles", "outcomes", "credulity"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    # chunking does not matter: trial 300 is the same alone or in a batch
    alone = simulate_batch(goa_policy, fam, 10, 42, [300])
    assert np.array_equal(alone.credulity[0], a.credulity[300])
    assert simulate_trajectory(goa_policy, 1, fam, 10, 9, 4) == simulate_trajectory(goa_policy, 1, fam, 10, 9, 4)


@given(st.integers(0, 2 ** 64 - 1), st.integers(0, 10_000), st.sampled_from([1, -1]),
       st.floats(0.0, 0.9), st.sampled_from(["osm", "lof"]))
def test_trajectory_validity(seed, trial, sign, nu, kind):
    fam = StateFamily(ALPHA, nu)
    policy = AnglePolicy.osm(ALPHA) if kind == "osm" else AnglePolicy.fixed(Q4)
    tr = simulate_trajectory(policy, sign, fam, 8, seed, trial)
    assert len(tr.steps) == 8
    p = 0.5
    for k, step in enumerate(tr.steps, start=1):
        assert step.stage == k
        assert step.credulity_before == p
        assert step.angle == pytest.approx(float(policy.angle(p, 9 - k)), abs=1e-15)
        p_next = bayes_update(p, step.outcome, step.angle, fam)
        assert abs(p_next - step.credulity_after) < 1e-12
        p = step.credulity_after
    assert tr.final_guess == (1 if p >= 0.5 else -1)
    assert tr.correct == (tr.final_guess == sign)


def test_posteriors_drift_toward_truth(goa_policy):
    fam = StateFamily(ALPHA, 0.1)
    b = simulate_batch(goa_policy, fam, 10, 1, np.arange(20_000), "+")
    mean = b.credulity.mean(axis=0)
    assert mean[-1] > mean[0] + 0.2
    assert np.all(np.diff(mean) > 0)


def test_fully_mixed_rate_is_half():
    fam = StateFamily(ALPHA, 1.0)
    res = empirical_error(AnglePolicy.osm(ALPHA), fam, 4, SimulationConfig(seed=2, trials=200_000))
    assert abs(res.rate - 0.5) <= 3 * res.standard_error


def test_lof_rate_matches_closed_form():
    fam = StateFamily(ALPHA, 0.0)
    rate, se = empirical_error(AnglePolicy.fixed(Q4), fam, 3, SimulationConfig(seed=11, trials=1_000_000))
    assert abs(rate - 5 / 32) <= 3 * se


def test_osm_rule_rate_matches_collective_bound():
    fam = StateFamily(ALPHA, 0.0)
    rate, se = empirical_error(AnglePolicy.osm(ALPHA), fam, 5, SimulationConfig(seed=12, trials=1_000_000),
                               threads=4)
    assert abs(rate - ocm_error_pure(fam.c, 0.5, 5)) <= 3 * se


def test_statistical_consistency_over_repetitions():
    fam = StateFamily(ALPHA, 0.1)
    target = lof_error(fam, 5)
    hits = 0
    for seed in range(20):
        rate, se = empirical_error(AnglePolicy.fixed(Q4), fam, 5, SimulationConfig(seed=seed, trials=50_000))
        hits += abs(rate - target) <= 3 * se
    assert hits >= 19


def test_threads_do_not_change_result():
    fam = StateFamily(ALPHA, 0.1)
    cfg = SimulationConfig(seed=3, trials=150_000)
    assert empirical_error(AnglePolicy.osm(ALPHA), fam, 6, cfg) == empirical_error(
        AnglePolicy.osm(ALPHA), fam, 6, cfg, threads=3)


def test_fixed_true_state_and_config_validation():
    fam = StateFamily(ALPHA, 0.1)
    b = simulate_batch(AnglePolicy.osm(ALPHA), fam, 3, 0, np.arange(100), "-")
    assert np.all(b.true_sign == -1)
    with pytest.raises(ValueError):
        SimulationConfig(trials=0)
    with pytest.raises(ValueError):
        SimulationConfig(true_state="x")
    with pytest.raises(ValueError):
        SimulationConfig(seed=-1)


def test_few_errors_warns():
    fam = StateFamily(math.pi / 2, 0.0)
    with pytest.warns(RuntimeWarning):
        empirical_error(AnglePolicy.osm(math.pi / 2), fam, 2, SimulationConfig(trials=100))
