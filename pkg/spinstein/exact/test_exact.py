import math
from types import SimpleNamespace

import numpy as np
import pytest
import scipy.sparse as sp

from spinstein.dynamics import RestrictedRegion
from spinstein.errors import ResourceError, UsageError
from spinstein.exact import (
    brute_force_gibbs,
    conditional_multinomial,
    configuration_chain,
    configuration_wasserstein,
    enumerate_states,
    exact_wasserstein_exchangeable,
    gibbs_log_weights,
    lumped_gibbs,
    lumped_gibbs_exp_form,
    lumped_transition_matrix,
    neighbour_lipschitz,
    point_mass,
    product_measure,
    solve_lumped_transport,
    solve_stationary,
    solve_stein_poisson,
    stein_series,
    tv_curve_and_tmix,
    worst_tv,
    write_coordinate_text,
)
from spinstein.exact.lumped import LumpedMeasure
from spinstein.exact.mixing import _propagated_tmix
from spinstein.macrostates import ordered_point, s_star
from spinstein.spin_core import (
    ModelParams,
    build_graph,
    complete_graph,
    conditional_spin_dist,
    cycle_graph,
    empty_graph,
    make_stream,
    path_graph,
    proportions,
)

E_HAT = np.full(3, 1 / 3)


def ordered_region(beta, radius=0.05, q=3):
    return RestrictedRegion(ordered_point(s_star(beta, q), q, 0), radius)


def test_enumerate_states():
    assert enumerate_states(30, 3).shape == (496, 3)
    states = enumerate_states(2, 3)
    assert states.tolist() == [[2, 0, 0], [1, 1, 0], [0, 2, 0], [1, 0, 1], [0, 1, 1], [0, 0, 2]]
    assert np.all(enumerate_states(9, 4).sum(axis=1) == 9)


def test_enumerate_restricted_matches_filter():
    region = RestrictedRegion(E_HAT, 0.05)
    restricted = enumerate_states(60, 3, region)
    full = enumerate_states(60, 3)
    expected = [row for row in full.tolist() if np.linalg.norm(np.array(row) / 60 - E_HAT) <= 0.05]
    assert restricted.tolist() == expected


def test_enumerate_resource_guard():
    with pytest.raises(ResourceError) as info:
        enumerate_states(5000, 3)
    assert info.value.size == math.comb(5002, 2)
    assert info.value.exit_code == 3


def test_lumped_matrix_rows():
    chain = lumped_transition_matrix(30, 3, 1.6)
    assert np.max(np.abs(np.asarray(chain.transition.sum(axis=1)).ravel() - 1.0)) < 1e-14
    assert chain.transition.getnnz(axis=1).max() <= 3 * 2 + 1

    chain = lumped_transition_matrix(12, 3, 0.0)
    counts = np.array([6, 4, 2])
    row = chain.row(counts)
    for k in range(3):
        for l in range(3):
            if k != l:
                target = counts.copy()
                target[k] -= 1
                target[l] += 1
                assert row[chain.index_of(target)] == pytest.approx(counts[k] / 12 / 3, abs=1e-15)


def test_lumped_gibbs_stationary():
    for beta in (0.5, 1.0, 1.6):
        chain = lumped_transition_matrix(30, 3, beta)
        assert chain.stationary_residual() < 1e-10
        assert np.allclose(lumped_gibbs(30, 3, beta).weights, chain.stationary)


def test_lumped_gibbs_forms_are_proportional():
    for beta in (0.3, 1.6):
        states = enumerate_states(25, 3)
        diff = gibbs_log_weights(states, beta) - lumped_gibbs_exp_form(25, 3, beta)
        assert np.ptp(diff) < 1e-9


def test_lumped_gibbs_at_beta_zero_is_multinomial():
    assert np.allclose(lumped_gibbs(20, 3, 0.0).weights, conditional_multinomial(20, 3, E_HAT).weights, atol=1e-14)


def test_restricted_gibbs_is_conditioned_and_stationary():
    region = ordered_region(1.6)
    restricted = lumped_gibbs(30, 3, 1.6, region)
    full = lumped_gibbs(30, 3, 1.6)
    index = {tuple(row): i for i, row in enumerate(full.states.tolist())}
    picked = np.array([full.weights[index[tuple(row)]] for row in restricted.states.tolist()])
    assert np.allclose(restricted.weights, picked / picked.sum(), atol=1e-14)

    chain = lumped_transition_matrix(30, 3, 1.6, region)
    assert chain.size > 1
    assert chain.stationary_residual() < 1e-10
    eigenvector = solve_stationary(chain.transition)
    assert 0.5 * np.abs(eigenvector - restricted.weights).sum() < 1e-8


def test_conditional_multinomial():
    region = RestrictedRegion(E_HAT, 0.05)
    measure = conditional_multinomial(200, 3, E_HAT, region)
    # ||S - e_hat||^2 is about chi^2_2 / (q N), so the ball keeps about 1 - exp(-0.75)
    assert measure.captured_mass >= 0.25
    assert abs(measure.captured_mass - (1 - math.exp(-0.75))) < 0.05
    assert np.allclose(measure.mean_proportions(), E_HAT, atol=1e-12)

    x = np.array([0.5, 0.3, 0.2])
    tilted = conditional_multinomial(120, 3, x, RestrictedRegion(x, 0.1))
    assert np.linalg.norm(tilted.mean_proportions() - x) < 0.1

    with pytest.raises(UsageError):
        conditional_multinomial(30, 3, np.array([1.0, 0.0, 0.0]), region)


def test_tmix_basic_properties():
    chain = lumped_transition_matrix(20, 3, 1.0)
    result = tv_curve_and_tmix(chain, 0.25)
    assert result.curve[0] == (0, pytest.approx(1 - chain.stationary.min()))
    distances = [d for _, d in result.curve]
    assert all(b <= a + 1e-15 for a, b in zip(distances, distances[1:]))
    assert tv_curve_and_tmix(chain, 0.125).t_mix >= result.t_mix

    dense = chain.transition.toarray()
    before = np.linalg.matrix_power(dense, result.t_mix - 1)
    at = np.linalg.matrix_power(dense, result.t_mix)
    assert worst_tv(before, chain.stationary) > 0.25
    assert worst_tv(at, chain.stationary) <= 0.25

    assert _propagated_tmix(chain.transition, chain.stationary, 0.25, 10 ** 6).t_mix == result.t_mix

    with pytest.raises(UsageError):
        tv_curve_and_tmix(chain, 0.0)


def test_dense_tmix_matches_propagation_across_thresholds():
    test_cases = [(8, 0.0), (12, 1.0), (15, 0.5)]
    for n, beta in test_cases:
        chain = lumped_transition_matrix(n, 3, beta)
        for epsilon in [0.4, 0.25, 0.1, 0.01]:
            dense = tv_curve_and_tmix(chain, epsilon)
            propagated = _propagated_tmix(chain.transition, chain.stationary, epsilon, 10 ** 6)
            assert dense.t_mix == propagated.t_mix, (n, beta, epsilon)
            assert dense.curve[-1][1] <= epsilon


def test_dense_tmix_of_a_one_step_chain():
    stationary = np.array([0.2, 0.3, 0.5])
    chain = SimpleNamespace(transition=sp.csr_matrix(np.tile(stationary, (3, 1))), stationary=stationary)
    result = tv_curve_and_tmix(chain, 0.25)
    assert result.t_mix == 1
    assert [t for t, _ in result.curve] == [0, 1]


def test_stein_constant_function():
    chain = lumped_transition_matrix(15, 3, 1.0)
    solution = solve_stein_poisson(chain, np.full(chain.size, 2.5))
    assert np.max(np.abs(solution.values)) < 1e-12


def test_stein_matches_series():
    chain = lumped_transition_matrix(20, 3, 1.0)
    h = chain.states[:, 0] / 20.0
    solution = solve_stein_poisson(chain, h)
    assert solution.residual < 1e-9
    t_mix = tv_curve_and_tmix(chain, 0.25).t_mix
    series = stein_series(chain, h, 20 * t_mix)
    assert np.max(np.abs(series - solution.values)) < 1e-6


def test_stein_lipschitz_bound():
    n, beta = 20, 0.5
    chain = lumped_transition_matrix(n, 3, beta)
    h = chain.states[:, 0] / float(n)
    solution = solve_stein_poisson(chain, h)
    kappa = 1 - (1 - (n - 1) * math.tanh(beta / n)) / n
    bound = (1.0 / n) / (1 - kappa)
    assert neighbour_lipschitz(chain, solution.values) <= 1.05 * bound


def test_wasserstein_trivial_cases():
    gibbs = lumped_gibbs(12, 3, 1.0)
    assert exact_wasserstein_exchangeable(gibbs, gibbs) == 0.0

    states = enumerate_states(12, 3)
    a, b = np.array([6, 4, 2]), np.array([3, 4, 5])
    value = exact_wasserstein_exchangeable(point_mass(states, a), point_mass(states, b))
    assert value == pytest.approx(0.5 * np.abs(a - b).sum(), abs=1e-9)


def test_wasserstein_reduction_against_full_space():
    g = complete_graph(4)
    gibbs = brute_force_gibbs(g, ModelParams(q=3, beta=1.0, n_vertices=4))
    uniform = product_measure(4, E_HAT)
    full_value = configuration_wasserstein(gibbs.weights, uniform.weights, gibbs.configs)
    lumped = solve_lumped_transport(gibbs.lumped(), uniform.lumped())
    assert lumped.value == pytest.approx(full_value, abs=1e-9)
    assert lumped.duality_gap < 1e-9 * (lumped.value + 1)


def test_wasserstein_is_a_metric():
    rng = make_stream(31)
    states = enumerate_states(10, 3)
    for _ in range(5):
        mu, nu, rho = (LumpedMeasure(states, rng.dirichlet(np.ones(len(states)))) for _ in range(3))
        d_mn = exact_wasserstein_exchangeable(mu, nu)
        assert d_mn == pytest.approx(exact_wasserstein_exchangeable(nu, mu), abs=1e-9)
        assert exact_wasserstein_exchangeable(mu, rho) <= d_mn + exact_wasserstein_exchangeable(nu, rho) + 1e-9


def test_brute_force_gibbs():
    measure = brute_force_gibbs(cycle_graph(4), ModelParams(q=3, beta=0.0, n_vertices=4))
    assert np.allclose(measure.weights, 1 / 81)

    edge = build_graph("path", 2)
    measure = brute_force_gibbs(edge, ModelParams(q=3, beta=1.0, n_vertices=2))
    match = sum(w for c, w in zip(measure.configs, measure.weights) if c[0] == c[1])
    assert match == pytest.approx(3 * math.e / (3 * math.e + 6), abs=1e-12)
    assert match == pytest.approx(0.57611, abs=1e-5)


def test_conditional_matches_enumeration():
    rng = make_stream(32)
    graphs = [cycle_graph(6), path_graph(5), complete_graph(5), empty_graph(4), build_graph("gnp", 8, edge_prob=0.4, seed=3)]
    for g in graphs:
        params = ModelParams(q=3, beta=1.7, n_vertices=g.n_vertices)
        measure = brute_force_gibbs(g, params)
        for _ in range(10):
            config = rng.integers(0, 3, size=g.n_vertices)
            v = int(rng.integers(g.n_vertices))
            assert np.allclose(measure.conditional(config, v), conditional_spin_dist(g, config, v, params), atol=1e-12)


def test_configuration_chain_detailed_balance():
    for g in [cycle_graph(5), complete_graph(4), path_graph(6)]:
        chain = configuration_chain(g, ModelParams(q=3, beta=1.3, n_vertices=g.n_vertices))
        assert chain.detailed_balance_error() < 1e-12
        assert np.max(np.abs(np.asarray(chain.transition.sum(axis=1)).ravel() - 1.0)) < 1e-12


def test_lumping_soundness():
    n, beta = 6, 1.2
    full = configuration_chain(complete_graph(n), ModelParams(q=3, beta=beta, n_vertices=n))
    lumped = lumped_transition_matrix(n, 3, beta)
    assert np.allclose(full.measure.lumped().weights, lumped.stationary, atol=1e-12)
    dense = full.transition.toarray()
    targets = np.array([lumped.index_of(proportions(c, 3)) for c in full.states])
    for i in range(0, len(full.states), 37):
        aggregated = np.bincount(targets, weights=dense[i], minlength=lumped.size)
        expected = lumped.row(proportions(full.states[i], 3))
        assert np.allclose(aggregated, expected, atol=1e-12)


def test_write_coordinate_text(tmp_path):
    chain = lumped_transition_matrix(3, 3, 1.0)
    target = tmp_path / "chain.txt"
    write_coordinate_text(chain.transition, target, chain.states)
    lines = target.read_text().splitlines()
    assert lines[0] == f"{chain.size} {chain.size} {chain.transition.nnz}"
    row, col, value = lines[1].split()
    assert (int(row), int(col)) == (0, 0)
    assert float(value) == pytest.approx(chain.transition[0, 0])
    assert len((tmp_path / "chain.txt.states").read_text().splitlines()) == chain.size
