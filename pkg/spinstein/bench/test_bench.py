import math

import numpy as np
import pytest

from spinstein.bench import (
    LipschitzSpec,
    bounded_degree_bound,
    clt_covariance_check,
    coalescence_tail,
    concentration_run,
    contraction_envelope,
    contraction_rate_bounded_degree,
    displaced_configuration,
    exact_expectation_gap,
    influence_bound,
    mean_T_norm,
    meanfield_residual,
    restricted_tmix_scaling,
    theta_star_trend,
    tmix_upper_bound_bounded_degree,
    wasserstein_scaling,
)
from spinstein.errors import DomainError
from spinstein.exact import configuration_chain, tv_curve_and_tmix
from spinstein.macrostates import beta_c, ordered_point, s_star
from spinstein.spin_core import (
    ModelParams,
    build_graph,
    complete_graph,
    cycle_graph,
    make_stream,
    path_graph,
)


def params_for(g, beta, q=3):
    return ModelParams(q=q, beta=beta, n_vertices=g.n_vertices)


def test_contraction_rate():
    g = complete_graph(100)
    assert contraction_rate_bounded_degree(g, params_for(g, 0.0)) == pytest.approx(1 - 1 / 100)
    expected = 1 - (1 - 99 * math.tanh(0.01)) / 100
    kappa = contraction_rate_bounded_degree(g, params_for(g, 1.0))
    assert kappa == pytest.approx(expected, abs=1e-15)
    assert kappa == pytest.approx(0.9998997, abs=1e-7)
    with pytest.raises(DomainError):
        contraction_rate_bounded_degree(g, params_for(g, 2.0))


def test_bounded_degree_bound_values():
    g = cycle_graph(100)
    lipschitz = LipschitzSpec.uniform(100, 1.0)
    report = bounded_degree_bound(g, params_for(g, 0.5), lipschitz)
    assert report.bound_value == pytest.approx(1.01010, abs=1e-4)
    assert report.terms["degree_bound"] == pytest.approx(report.bound_value, abs=1e-12)
    assert report.inputs["Delta"] == 2 and report.inputs["edges"] == 100
    assert bounded_degree_bound(g, params_for(g, 0.0), lipschitz).bound_value == 0.0


def test_degree_refined_bound_never_exceeds_coarse():
    rng = make_stream(70)
    for seed in range(50):
        n = int(rng.integers(10, 40))
        g = build_graph("gnp", n, edge_prob=float(rng.uniform(0.05, 0.5)), seed=seed)
        if g.edge_count == 0:
            continue
        report = bounded_degree_bound(g, params_for(g, 0.5), LipschitzSpec.uniform(n, 1.0))
        assert report.terms["degree_bound"] <= report.bound_value + 1e-12


def test_complete_graph_bound_grows_like_sqrt_n():
    ratios = []
    for n in (100, 200, 400, 800):
        g = complete_graph(n)
        report = bounded_degree_bound(g, params_for(g, 0.5), LipschitzSpec.uniform(n, 1.0))
        ratios.append(report.bound_value / math.sqrt(n))
    assert max(ratios) / min(ratios) < 1.02


def test_lipschitz_spec():
    spec = LipschitzSpec.from_function("first-pair", lambda c: float(c[0] == c[1]), 4, 3)
    assert spec.constants == [1.0, 1.0, 0.0, 0.0]
    spec = LipschitzSpec.from_function("fraction", lambda c: float(np.mean(c == 0)), 5, 3)
    assert np.allclose(spec.constants, 0.2)
    with pytest.raises(ValueError):
        LipschitzSpec(name="bad", constants=[-1.0])


def test_bound_covers_exact_gap():
    test_functions = [
        ("fraction", lambda c: float(np.mean(c == 0))),
        ("first-pair", lambda c: float(c[0] == c[1])),
        ("energy", lambda c: float(np.sum(c[:-1] == c[1:]))),
    ]
    for g in [cycle_graph(5), path_graph(6), build_graph("gnp", 6, edge_prob=0.5, seed=4)]:
        for beta in (0.5, 1.0):
            p = params_for(g, beta)
            for name, h in test_functions:
                spec = LipschitzSpec.from_function(name, h, g.n_vertices, 3)
                report = bounded_degree_bound(g, p, spec)
                gap = exact_expectation_gap(g, p, h)
                assert gap <= report.terms["degree_bound"] + 1e-12
                assert gap <= report.bound_value + 1e-12


def test_influence_bound():
    for g in [cycle_graph(6), complete_graph(4), build_graph("gnp", 7, edge_prob=0.5, seed=5)]:
        for beta in (0.5, 3.0):
            p = params_for(g, beta)
            cap = math.tanh(beta / g.n_vertices)
            for u in range(g.n_vertices):
                for v in range(g.n_vertices):
                    value = influence_bound(g, p, u, v)
                    if u != v and u in g.neighbors(v):
                        assert 0.0 < value <= cap + 1e-12
                    else:
                        assert value == 0.0


def test_tmix_upper_bound_covers_exact_chain():
    for g, beta in [(cycle_graph(5), 1.0), (path_graph(5), 2.0), (complete_graph(4), 1.0)]:
        p = params_for(g, beta)
        exact = tv_curve_and_tmix(configuration_chain(g, p), 0.25).t_mix
        assert exact <= tmix_upper_bound_bounded_degree(g, p, 0.25)


def test_mean_T_norm_vanishes_at_beta_zero():
    g = cycle_graph(20)
    estimate = mean_T_norm(g, params_for(g, 0.0), np.full(3, 1 / 3), make_stream(71), samples=200)
    assert estimate.mean == 0.0
    assert estimate.analytic_bound == 0.0


def test_mean_T_norm_below_analytic_bound():
    graphs = [cycle_graph(100), complete_graph(50), build_graph("regular", 100, degree=4, seed=6)]
    for g in graphs:
        for beta in (0.3, 0.6):
            estimate = mean_T_norm(g, params_for(g, beta), np.full(3, 1 / 3), make_stream(72), samples=2000)
            assert estimate.mean <= estimate.analytic_bound + 3 * estimate.std_error


def test_mean_T_norm_closed_form_on_complete_graph():
    n, q, beta = 50, 3, 0.4
    g = complete_graph(n)
    estimate = mean_T_norm(g, params_for(g, beta), np.full(q, 1 / q), make_stream(73), samples=2)
    closed = beta * math.sqrt(q) * n * math.sqrt((n - 1) / n ** 2 * (q - 1) / q)
    assert estimate.analytic_bound == pytest.approx(closed, abs=1e-12)


def test_meanfield_residual():
    g = cycle_graph(20)
    assert meanfield_residual(g, params_for(g, 1.3), np.full(3, 1 / 3)) < 1e-12

    n, beta = 500, 1.6
    x = ordered_point(s_star(beta, 3), 3, 0)
    k = complete_graph(n)
    assert meanfield_residual(k, params_for(k, beta), x, self_inclusive=True) < 1e-10
    assert meanfield_residual(k, params_for(k, beta), x) < 10.0 / n

    assert meanfield_residual(g, params_for(g, 1.0), np.array([0.8, 0.1, 0.1])) > 0.01


def test_clt_product_side_is_exact():
    report = clt_covariance_check(50, 3, 0.5)
    assert report.product_diag == pytest.approx(2 / 9, abs=1e-12)
    assert report.product_offdiag == pytest.approx(-1 / 9, abs=1e-12)


def test_clt_gibbs_side():
    report = clt_covariance_check(400, 3, 1.0)
    assert report.limit_diag == pytest.approx(2 / 3)
    assert report.limit_offdiag_printed == pytest.approx(-1 / 7)
    assert abs(report.gibbs_diag - 2 / 3) < 0.05
    assert abs(report.gibbs_offdiag - report.limit_offdiag_consistent) < 0.05
    # rows of the covariance sum to zero, so the printed off-diagonal cannot be matched
    assert not report.printed_offdiag_matches


def test_clt_small_beta_approaches_product():
    report = clt_covariance_check(60, 3, 0.004)
    assert abs(report.gibbs_diag - report.product_diag) < 1e-3
    assert abs(report.gibbs_offdiag - report.product_offdiag) < 1e-3


def test_clt_guard():
    with pytest.raises(DomainError):
        clt_covariance_check(30, 3, 1.5)


def test_wasserstein_scaling_at_beta_zero():
    table = wasserstein_scaling(3, 0.0, "e", None, [10, 20])
    assert table.column("n") == [10, 20]
    assert all(value == pytest.approx(0.0, abs=1e-9) for value in table.column("d_w"))


def test_theta_star_trend():
    ordered = theta_star_trend(3, "ordered:1", [beta_c(3), 2.0, 3.0, 5.0, 10.0])
    proxies = ordered.column("proxy")
    assert all(b < a for a, b in zip(proxies, proxies[1:]))
    assert all(value > 0 for value in proxies)

    uniform = theta_star_trend(3, "e", [0.5, 0.2, 0.05])
    proxies = uniform.column("proxy")
    assert all(b < a for a, b in zip(proxies, proxies[1:]))
    assert uniform.column("theta")[-1] == pytest.approx(2 * 0.05 / 3)


def test_displaced_configuration():
    sigma = np.repeat(np.arange(3), [20, 6, 4])
    tau = displaced_configuration(sigma, 10, 3)
    assert np.count_nonzero(sigma != tau) == 10
    assert np.array_equal(np.bincount(tau, minlength=3), np.bincount(sigma, minlength=3))


def test_coalescence_tail_table():
    table = coalescence_tail(3, 1.6, "ordered:1", 0.05, 60, replicas=8, seed=11)
    ccdf = table.column("ccdf")
    assert all(b <= a for a, b in zip(ccdf, ccdf[1:]))
    assert table.column("reference") == sorted(table.column("reference"), reverse=True)
    assert table.summary["censored"] == 0


def test_concentration_run_is_reproducible():
    first = concentration_run(3, 1.6, "ordered:1", 0.05, [60], replicas=2, seed=12, steps=5000)
    second = concentration_run(3, 1.6, "ordered:1", 0.05, [60], replicas=2, seed=12, steps=5000)
    assert first.rows == second.rows
    assert len(first.rows) == 2
    for row in first.rows:
        assert row["tau_out"] is None or row["tau_out"] > 0
        assert row["tau_in"] is None or row["tau_in"] >= 0


@pytest.mark.slow
def test_coalescence_time_grows_like_n_log_n():
    n_values = [200, 800]
    tables = [coalescence_tail(3, 0.5, "e", 0.5, n, replicas=20, seed=14) for n in n_values]
    medians = [table.summary["median_tau"] for table in tables]
    assert all(table.summary["censored"] == 0 for table in tables)
    normalised = [m / (n * math.log(n)) for m, n in zip(medians, n_values)]
    assert max(normalised) / min(normalised) < 1.6
    assert 3.5 < medians[1] / medians[0] < 6.0
    for table in tables:
        for row in table.rows:
            assert row["ccdf"] <= row["reference"] + 3 * math.sqrt(row["reference"] / 20)


@pytest.mark.slow
def test_concentration_exit_fraction_and_entry_time():
    small, large, replicas = 100, 5000, 6
    table = concentration_run(3, 1.6, "ordered:1", 0.05, [small, large], replicas=replicas, seed=15, steps=100_000)

    def rows_for(n):
        return [row for row in table.rows if row["n"] == n]

    exits = {n: sum(row["tau_out"] is not None for row in rows_for(n)) for n in (small, large)}
    assert exits[small] >= replicas // 2
    assert exits[large] <= 1
    assert all(row["tau_in"] is not None for row in table.rows)
    medians = {n: float(np.median([row["tau_in"] for row in rows_for(n)])) for n in (small, large)}
    assert medians[large] > medians[small]
    assert table.summary["median_tau_in_over_n"][str(large)] < 20


def test_wasserstein_pruning_matches_full_solve():
    pruned = wasserstein_scaling(3, 0.3, "e", None, [30, 40])
    full = wasserstein_scaling(3, 0.3, "e", None, [30, 40], prune_below=0.0)
    assert pruned.column("states") == full.column("states")
    for a, b in zip(pruned.column("d_w"), full.column("d_w")):
        assert a > 0
        assert a == pytest.approx(b, rel=1e-6, abs=1e-8)


@pytest.mark.slow
def test_contraction_envelope():
    table = contraction_envelope(3, 1.6, "ordered:1", 0.05, 200, 50, replicas=200, seed=13)
    assert table.rows[0]["mean_hamming"] == 50
    for row in table.rows:
        if row["replicas"] >= 100:
            assert row["mean_hamming"] <= 1.1 * row["envelope"]


@pytest.mark.slow
def test_restricted_tmix_scaling_band():
    table = restricted_tmix_scaling(3, 1.6, "ordered:1", 0.05, [60, 120, 240])
    assert table.summary["band_ratio"] < 2.0
    assert all(row["t_mix"] > 0 for row in table.rows)


@pytest.mark.slow
def test_wasserstein_scaling_band():
    table = wasserstein_scaling(3, 1.0, "e", None, [40, 80, 160])
    assert table.summary["band_ratio"] < 1.5
    assert all(row["duality_gap"] < 1e-9 * (row["d_w"] + 1) for row in table.rows)
