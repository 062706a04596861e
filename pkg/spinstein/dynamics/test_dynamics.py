import numpy as np
import pytest

from spinstein.dynamics import (
    ChainState,
    RestrictedRegion,
    cwp_glauber_step,
    cwp_move_probabilities,
    cwp_update_distribution,
    expected_increment,
    glauber_step,
    nearest_counts,
    propose_cwp,
    propose_graph,
    restricted_step,
    run_trajectory,
)
from spinstein.errors import UsageError
from spinstein.exact import lumped_gibbs, lumped_transition_matrix
from spinstein.macrostates import jacobian_A, ordered_point, s_star
from spinstein.spin_core import (
    ModelParams,
    complete_graph,
    conditional_spin_dist,
    cycle_graph,
    make_stream,
    softmax_gbeta,
)

E_HAT = np.full(3, 1 / 3)


def test_beta_zero_update_is_uniform():
    rng = make_stream(41)
    g = cycle_graph(12)
    state = ChainState(np.zeros(12, dtype=np.int64), 3)
    params = ModelParams(q=3, beta=0.0, n_vertices=12)
    draws = np.array([propose_graph(g, state, params, rng)[1] for _ in range(60_000)])
    freq = np.bincount(draws, minlength=3) / draws.size
    assert np.all(np.abs(freq - 1 / 3) < 4 * np.sqrt((2 / 9) / draws.size))


def test_graph_one_step_law():
    rng = make_stream(42)
    g = cycle_graph(10)
    params = ModelParams(q=3, beta=2.0, n_vertices=10)
    config = np.array([0, 0, 1, 1, 2, 0, 0, 0, 1, 2])
    state = ChainState(config, 3)
    expected = np.mean([conditional_spin_dist(g, config, v, params) for v in range(10)], axis=0)
    draws = np.array([propose_graph(g, state, params, rng)[1] for _ in range(200_000)])
    freq = np.bincount(draws, minlength=3) / draws.size
    assert np.all(np.abs(freq - expected) < 4 * np.sqrt(expected * (1 - expected) / draws.size))


def test_cwp_step_matches_graph_step_on_complete_graph():
    n = 50
    g = complete_graph(n)
    params = ModelParams(q=3, beta=1.6, n_vertices=n)
    rng = make_stream(43)
    config = rng.integers(0, 3, size=n)
    state = ChainState(config, 3)
    from_graph = np.zeros((3, 3))
    for v in range(n):
        from_graph[config[v]] += conditional_spin_dist(g, config, v, params) / n
    assert np.allclose(from_graph, cwp_move_probabilities(state.counts, 1.6), atol=1e-12)


def test_monochrome_stay_probability():
    n = 20
    probs = cwp_update_distribution(np.array([n, 0, 0]), 0, 1.3)
    assert probs[0] == pytest.approx(softmax_gbeta(np.array([(n - 1) / n, 0.0, 0.0]), 1.3)[0])
    assert cwp_move_probabilities(np.array([n, 0, 0]), 1.3).sum() == pytest.approx(1.0)


def test_glauber_step_keeps_counts():
    rng = make_stream(44)
    g = cycle_graph(30)
    params = ModelParams(q=3, beta=1.0, n_vertices=30)
    state = ChainState(rng.integers(0, 3, size=30), 3)
    for _ in range(20_000):
        glauber_step(g, state, params, rng)
    assert state.counts_consistent()
    assert state.step == 20_000


def test_cwp_bookkeeping_and_displacement():
    rng = make_stream(45)
    n = 40
    params = ModelParams(q=3, beta=1.6, n_vertices=n)
    summary = run_trajectory(ChainState.from_counts([14, 13, 13], 3, rng), 50_000, params, rng, stride=1)
    assert summary.final_state.counts_consistent()
    path = np.array([point["counts"] for point in summary.path]) / n
    jumps = np.sum(np.diff(path, axis=0) ** 2, axis=1)
    assert np.all(jumps <= 2.0 / n ** 2 + 1e-15)


def test_restricted_with_vacuous_ball_follows_unrestricted_chain():
    params = ModelParams(q=3, beta=1.2, n_vertices=25)
    start = ChainState.from_counts([10, 10, 5], 3)
    free = run_trajectory(start, 3000, params, make_stream(46), stride=1)
    ball = run_trajectory(start, 3000, params, make_stream(46), region=RestrictedRegion(E_HAT, 1.5), stride=1)
    assert ball.rejections == 0
    assert all(np.array_equal(a["counts"], b["counts"]) for a, b in zip(free.path, ball.path))
    assert np.array_equal(free.final_state.config, ball.final_state.config)


def test_boundary_state_rejects_outward_moves():
    region = RestrictedRegion(np.full(4, 0.25), 0.125)
    assert region.is_exact
    assert region.contains_counts(np.array([5, 5, 3, 3]))
    assert not region.contains_counts(np.array([6, 5, 2, 3]))

    params = ModelParams(q=4, beta=0.0, n_vertices=16)
    rng = make_stream(47)
    state = ChainState.from_counts([5, 5, 3, 3], 4)
    rejections = 0
    for _ in range(500):
        before = state.counts.copy()
        state, rejected = restricted_step(state, region, params, rng)
        if rejected:
            rejections += 1
            assert np.array_equal(state.counts, before)
        assert region.contains_counts(state.counts)
    assert rejections > 0


def test_restricted_step_rejects_outside_start():
    region = RestrictedRegion(E_HAT, 0.05)
    params = ModelParams(q=3, beta=1.0, n_vertices=30)
    with pytest.raises(UsageError):
        restricted_step(ChainState.from_counts([30, 0, 0], 3), region, params, make_stream(1))


def test_restricted_chain_stays_in_ordered_ball():
    beta, n = 1.6, 120
    x = ordered_point(s_star(beta, 3), 3, 0)
    region = RestrictedRegion(x, 0.05)
    assert not region.is_exact
    params = ModelParams(q=3, beta=beta, n_vertices=n)
    rng = make_stream(48)
    summary = run_trajectory(ChainState.from_counts(nearest_counts(x, n), 3, rng), 40_000, params, rng, region=region)
    for point in summary.path:
        assert np.linalg.norm(point["counts"] / n - x) <= 0.05 + 1e-12


def test_stopping_times():
    params = ModelParams(q=3, beta=1.0, n_vertices=30)
    region = RestrictedRegion(E_HAT, 0.2)
    summary = run_trajectory(ChainState.from_counts([10, 10, 10], 3), 0, params, make_stream(2), region=region)
    assert summary.stopping_times.tau_in == 0
    assert summary.stopping_times.tau_out is None

    summary = run_trajectory(
        ChainState.from_counts([13, 9, 8], 3), 100_000, params, make_stream(3), region=region, stop_at="tau_in"
    )
    assert summary.stopping_times.tau_in is not None
    assert summary.final_state.step == summary.stopping_times.tau_in


def test_trajectory_records_and_reproducibility():
    params = ModelParams(q=3, beta=1.2, n_vertices=30)
    start = ChainState.from_counts([12, 9, 9], 3)
    region = RestrictedRegion(E_HAT, 0.3)
    first = run_trajectory(start, 5000, params, make_stream(9, replica=2), region=region, stride=100)
    second = run_trajectory(start, 5000, params, make_stream(9, replica=2), region=region, stride=100)
    assert first.to_records() == second.to_records()
    rows = first.to_records()
    assert len(rows) == 51
    assert list(rows[0]) == ["step", "counts_1", "counts_2", "counts_3", "rejected_cum", "tau_out", "tau_in"]
    assert start.step == 0


def test_drift_matches_jacobian():
    q, n, beta = 3, 2000, 1.6
    x = ordered_point(s_star(beta, q), q, 0)
    A = jacobian_A(x, beta, q)
    rng = make_stream(49)
    for _ in range(100):
        d = rng.normal(size=q)
        d -= d.mean()
        counts = nearest_counts(x + 0.025 * d / np.linalg.norm(d), n)
        s_hat = counts / n - x
        predicted = -(s_hat - A @ s_hat) / n
        tolerance = 5 * (s_hat @ s_hat / n + 1.0 / n ** 2)
        assert np.all(np.abs(expected_increment(counts, beta) - predicted) <= tolerance)


def test_lumped_rows_match_simulated_frequencies():
    n, beta = 30, 1.6
    chain = lumped_transition_matrix(n, 3, beta)
    params = ModelParams(q=3, beta=beta, n_vertices=n)
    rng = make_stream(50)
    counts = np.array([18, 7, 5])
    row = chain.row(counts)
    state = ChainState.from_counts(counts, 3)
    draws = 200_000
    hits = np.zeros(chain.size)
    for _ in range(draws):
        v, color = propose_cwp(state, params, rng)
        target = counts.copy()
        target[state.config[v]] -= 1
        target[color] += 1
        hits[chain.index_of(target)] += 1
    support = row > 0
    sigma = np.sqrt(row * (1 - row) / draws)
    assert np.all(np.abs(hits / draws - row)[support] <= 4 * sigma[support] + 1e-12)
    assert hits[~support].sum() == 0


@pytest.mark.slow
def test_long_run_matches_lumped_gibbs():
    n, beta, steps = 30, 1.0, 10 ** 6
    params = ModelParams(q=3, beta=beta, n_vertices=n)
    rng = make_stream(51)
    state = ChainState.from_counts([10, 10, 10], 3)
    histogram = np.zeros(n + 1)
    for _ in range(steps):
        cwp_glauber_step(state, params, rng)
        histogram[state.counts[0]] += 1
    gibbs = lumped_gibbs(n, 3, beta)
    exact = np.bincount(gibbs.states[:, 0], weights=gibbs.weights, minlength=n + 1)
    assert 0.5 * np.abs(histogram / steps - exact).sum() < 0.03
