import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import SPHERE_BOUNDS, sphere
from nbiswarm.swarm import hopso, pso


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_weights_symmetric_zero_diagonal(n, seed):
    w = hopso.init_weights(n, seed)
    assert np.array_equal(w, w.T)
    assert np.all(np.diag(w) == 0)
    assert np.all((w >= 0) & (w <= 1))


def test_weights_deterministic():
    assert np.array_equal(hopso.init_weights(6, 7), hopso.init_weights(6, 7))
    with pytest.raises(ValueError):
        hopso.init_weights(1, 0)


def test_net_input_examples():
    assert hopso.net_input(np.zeros((3, 3)), [1.0, 2.0, 3.0], [0.0, 0.0, 0.0], 1) == 0.0
    w = np.array([[0.0, 0.5], [0.5, 0.0]])
    x, v = np.array([1.0, -1.0]), np.zeros(2)
    assert hopso.net_input(w, x, v, 0) == -0.5
    assert hopso.net_input(w, x, v, 1) == 0.5
    np.testing.assert_array_equal(hopso.net_inputs(w, x, v), [-0.5, 0.5])


@given(st.integers(0, 10_000))
def test_net_input_linear_in_weights(seed):
    rng = np.random.default_rng(seed)
    w = hopso.init_weights(5, rng)
    x, v = rng.normal(size=5), rng.normal(size=5)
    np.testing.assert_allclose(hopso.net_inputs(2 * w, x, v) - v, 2 * (hopso.net_inputs(w, x, v) - v),
                               rtol=1e-12, atol=1e-12)


def test_reduce_state_normalised():
    lower, upper = np.array([0.0, 10.0]), np.array([2.0, 20.0])
    x_t, v_t = hopso.reduce_state([[0.0, 20.0], [1.0, 15.0]], [[1.0, 5.0], [0.0, 0.0]], lower, upper)
    np.testing.assert_allclose(x_t, [0.0, 0.0])
    np.testing.assert_allclose(v_t, [2.0, 0.0])
    x_raw, _ = hopso.reduce_state([[0.0, 20.0]], [[0.0, 0.0]], lower, upper, "raw")
    assert x_raw[0] == 20.0


@pytest.mark.parametrize("s, prev, expected", [(150, -1, 1), (-150, 1, -1), (50, -1, -1), (50, 1, 1),
                                               (100, -1, -1), (-100, 1, 1)])
def test_spin_update(s, prev, expected):
    assert hopso.spin_update(s, prev, 100.0) == expected


def test_energy_examples():
    w = np.array([[0.0, 0.5], [0.5, 0.0]])
    assert hopso.energy([1, 1], [1, 1], np.zeros((2, 2)), 0.0) == 0.0
    assert hopso.energy([1, 1], [1, 1], w, 0.02) == pytest.approx(-0.54, abs=1e-15)


@given(st.integers(0, 10_000))
def test_energy_flip_and_relabel_symmetry(seed):
    rng = np.random.default_rng(seed)
    n = 6
    w = hopso.init_weights(n, rng)
    s_next, s_prev = rng.choice([-1, 1], n), rng.choice([-1, 1], n)
    e = hopso.energy(s_next, s_prev, w, 0.0)
    assert hopso.energy(-s_next, -s_prev, w, 0.0) == pytest.approx(e, abs=1e-12)
    perm = rng.permutation(n)
    e_theta = hopso.energy(s_next, s_prev, w, 0.02)
    assert hopso.energy(s_next[perm], s_prev[perm], w[np.ix_(perm, perm)], 0.02) == pytest.approx(e_theta, abs=1e-12)


def test_first_step_commits():
    params = hopso.HopsoParams()
    run = hopso.init_hopso(params, SPHERE_BOUNDS, 3, sphere)
    hopso.hopso_step(run, params, sphere)
    assert run.committed == 1 and run.passed == 1 and run.rerandomized == 0
    assert run.evaluations == 12


def _rising_run(mode):
    params = hopso.HopsoParams(gate_mode=mode)
    run = hopso.init_hopso(params, SPHERE_BOUNDS, 3, sphere)
    run.energy_trace = [-1e9]  # any new energy is a rise
    return params, run


def test_rising_energy_skip_mode_leaves_incumbent():
    params, run = _rising_run("skip")
    before = (run.gbest_fitness, run.gbest_position.copy(), run.pbest_fitness.copy(), run.weights.copy())
    # put every particle on the optimum: an evaluated step would improve the incumbent
    run.positions[:] = 0.0
    run.velocities[:] = 0.0
    run.pbest_positions[:] = 0.0
    run.gbest_position = np.zeros(3)
    hopso.hopso_step(run, params, sphere, draws=(np.zeros(6), np.zeros(6)))
    assert run.gbest_fitness == before[0]
    np.testing.assert_array_equal(run.pbest_fitness, before[2])
    assert not np.array_equal(run.weights, before[3])
    assert run.rerandomized == 1 and run.committed == 0
    assert run.evaluations == 6
    assert run.fitness_trace[-1] == before[0]


def test_rising_energy_stop_mode_evaluates_but_redraws():
    params, run = _rising_run("stop")
    weights = run.weights.copy()
    hopso.hopso_step(run, params, sphere)
    assert run.committed == 1 and run.passed == 0 and run.rerandomized == 1
    assert not run.last_passed
    assert run.evaluations == 12
    assert not np.array_equal(run.weights, weights)
    assert np.array_equal(run.weights, run.weights.T)


def test_stop_mode_tracks_pso_positions():
    """Spins never move particles, so positions follow PSO for the same seed."""
    params = hopso.HopsoParams(t_max=60, stall_window=10**6)
    plain = pso.PsoParams(t_max=60, stall_window=10**6)
    h = hopso.init_hopso(params, SPHERE_BOUNDS, 8, sphere)
    p = pso.init_swarm(plain, SPHERE_BOUNDS, 8, sphere)
    for _ in range(60):
        hopso.hopso_step(h, params, sphere)
        pso.pso_step(p, plain, sphere)
        assert h.positions.tobytes() == p.positions.tobytes()
    assert h.rerandomized > 0


def test_disabled_layer_is_bitwise_pso():
    for seed in range(5):
        h = hopso.run_hopso(sphere, hopso.HopsoParams.disabled(t_max=100, stall_window=10**6),
                            SPHERE_BOUNDS, seed)
        p = pso.run_pso(sphere, pso.PsoParams(t_max=100, stall_window=10**6), SPHERE_BOUNDS, seed)
        assert h.fitness_trace == p.fitness_trace
        assert h.best_position.tobytes() == p.best_position.tobytes()
        assert len(set(h.extras["energy_trace"])) == 1  # spins frozen, energy constant


@pytest.mark.parametrize("mode", ["stop", "skip"])
@given(seed=st.integers(0, 2**32 - 1))
def test_spins_and_weights_stay_valid(mode, seed):
    params = hopso.HopsoParams(gate_mode=mode, spin_mode="raw", U=5.0)
    run = hopso.init_hopso(params, SPHERE_BOUNDS, seed, sphere)
    for _ in range(30):
        before = run.gbest_fitness
        hopso.hopso_step(run, params, sphere)
        assert set(np.unique(run.spins)) <= {-1, 1}
        assert np.array_equal(run.weights, run.weights.T) and np.all(np.diag(run.weights) == 0)
        assert run.gbest_fitness >= before
        assert np.all((run.positions >= -5) & (run.positions <= 5))
    dE = [b - a for a, b in zip(run.energy_trace, run.energy_trace[1:])]
    assert dE == run.energy_differences


def test_run_deterministic_and_reports_extras():
    a = hopso.run_hopso(sphere, hopso.HopsoParams(), SPHERE_BOUNDS, 7)
    b = hopso.run_hopso(sphere, hopso.HopsoParams(), SPHERE_BOUNDS, 7)
    assert a.fitness_trace == b.fitness_trace
    assert a.extras["energy_trace"] == b.extras["energy_trace"]
    assert a.extras["passed"] + a.extras["rerandomized"] == a.iterations


def test_constant_fitness_stops_on_a_passed_step():
    result = hopso.run_hopso(lambda X: np.zeros(len(X)), hopso.HopsoParams(), SPHERE_BOUNDS, 0)
    assert result.stop_reason == "stall"
    assert result.iterations >= 20


@pytest.mark.parametrize("kwargs", [{"U": 0.0}, {"theta": np.inf}, {"spin_mode": "binary"},
                                    {"gate_mode": "maybe"}, {"w": 2.0}])
def test_parameter_validation(kwargs):
    with pytest.raises(ValueError):
        hopso.HopsoParams(**kwargs)
