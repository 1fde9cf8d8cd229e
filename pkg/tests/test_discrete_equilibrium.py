import math

import numpy as np
import pytest

from aym import (
    DomainError,
    EconomyParams,
    InfeasibleDemand,
    InstanceTooLarge,
    OccupationVector,
    SolverError,
    closed_form_ladder,
    enumerate_feasible,
    ladder_limit_form,
    log_multinomial_weight,
    make_ladder,
    solve_boltzmann,
    solve_generalized,
    stirling_consistency,
)

TOL = 1e-10


def test_flat_demand_gives_zero_beta():
    # D/n equal to the arithmetic mean of the levels forces beta = 0
    sol = solve_boltzmann(EconomyParams((1, 2, 3), 3, 6))
    assert sol.multipliers.beta == pytest.approx(0.0, abs=1e-12)
    assert sol.multipliers.nu == pytest.approx(0.0, abs=1e-12)
    assert sol.occupations == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)


def test_two_level_closed_form():
    sol = solve_boltzmann(EconomyParams((0, 1), 100, 25))
    assert sol.occupations == pytest.approx((75.0, 25.0), rel=1e-9)
    assert sol.multipliers.beta == pytest.approx(math.log(3.0), rel=1e-9)


def test_solution_residuals_below_tolerance():
    sol = solve_boltzmann(EconomyParams((1, 2, 5, 7), 40, 130), tol=TOL)
    assert sol.residuals[0] < TOL
    assert sol.residuals[1] < TOL


def test_boundary_demand_rejected_by_solver():
    with pytest.raises(InfeasibleDemand):
        solve_boltzmann(EconomyParams((1, 2, 3), 3, 9))


def test_ladder_solution_matches_closed_form():
    params = make_ladder(1.0, 500, 1000, 2000)  # r = 2
    sol = solve_boltzmann(params)
    for idx, expected in [(0, 500.0), (1, 250.0), (2, 125.0)]:
        assert sol.occupations[idx] == pytest.approx(expected, rel=1e-9)


def test_closed_form_matches_solver_on_every_rung():
    # g chosen so the worker mass beyond the top rung is < 1e-12
    n, r, g = 50.0, 3.0, 100
    params = make_ladder(1.0, g, n, n * r)
    assert n * ((r - 1) / r) ** g < 1e-12
    sol = solve_boltzmann(params)
    for i in range(g):
        assert sol.occupations[i] == pytest.approx(closed_form_ladder(r, n, i + 1), rel=1e-6)


def test_beta_strictly_decreasing_in_demand():
    betas = [solve_boltzmann(EconomyParams((1, 2, 3), 10, D)).multipliers.beta
             for D in (12, 16, 20, 24, 28)]
    assert all(a > b for a, b in zip(betas, betas[1:]))


def test_closed_form_ladder_values():
    assert closed_form_ladder(2.0, 1000.0, 1) == pytest.approx(500.0)
    assert closed_form_ladder(2.0, 1000.0, 3) == pytest.approx(125.0)


def test_closed_form_ladder_sums_to_n():
    n, r = 1000.0, 2.0
    total = sum(closed_form_ladder(r, n, i) for i in range(1, 200))
    assert total == pytest.approx(n, rel=1e-12)


def test_closed_form_ladder_rejects_r_at_most_one():
    with pytest.raises(DomainError):
        closed_form_ladder(1.0, 10.0, 1)
    with pytest.raises(DomainError):
        closed_form_ladder(0.5, 10.0, 1)


def test_limit_form_values():
    assert ladder_limit_form(100.0, 1) == pytest.approx(0.0101 * math.exp(-0.01), rel=1e-12)
    assert ladder_limit_form(10.0, 0) == pytest.approx(0.11, rel=1e-12)


def test_limit_form_close_to_exact_probability_for_small_rungs():
    r = 100.0
    gaps = []
    for i in range(1, 11):
        exact = closed_form_ladder(r, 1.0, i)  # n = 1 gives the probability
        gaps.append(abs(exact - ladder_limit_form(r, i)) / exact)
    assert max(gaps) < 1e-3


def test_generalized_c_zero_recovers_two_level_solution():
    sol = solve_generalized(EconomyParams((0, 1), 100, 25), c=0.0)
    assert sol.occupations == pytest.approx((75.0, 25.0), rel=1e-9)


def test_generalized_c_zero_matches_boltzmann_componentwise():
    rng = np.random.default_rng(20240801)
    for _ in range(5):
        g = int(rng.integers(2, 6))
        levels = tuple(sorted(rng.uniform(0.5, 10.0, g)))
        n = int(rng.integers(5, 40))
        u = rng.uniform(0.2, 0.8)
        D = n * (levels[0] + u * (levels[-1] - levels[0]))
        params = EconomyParams(levels, n, D)
        a = solve_boltzmann(params, tol=TOL)
        b = solve_generalized(params, c=0.0, tol=TOL)
        assert max(abs(x - y) for x, y in zip(a.occupations, b.occupations)) <= 10 * TOL


def test_generalized_fermi_like_satisfies_constraints():
    params = EconomyParams((1, 2, 3), 3, 6)
    sol = solve_generalized(params, c=-1.0)
    assert sol.residuals[0] < 1e-10
    assert sol.residuals[1] < 1e-10
    # occupations reproduce the closed occupation form at the returned multipliers
    nu, beta = sol.multipliers.nu, sol.multipliers.beta
    for a, occ in zip(params.levels, sol.occupations):
        assert occ == pytest.approx(1.0 / (math.exp(-nu + beta * a) + 1.0), rel=1e-9)


def test_generalized_bose_like_needs_continuation():
    # Boltzmann occupations ~75 violate positivity at c=1, so the solver must
    # walk c upward rather than step directly
    sol = solve_generalized(EconomyParams((0, 1), 100, 25), c=1.0)
    assert sol.occupations == pytest.approx((75.0, 25.0), rel=1e-9)
    assert max(sol.residuals) < 1e-10
    nu, beta = sol.multipliers.nu, sol.multipliers.beta
    assert math.exp(-nu) - 1.0 > 0  # denominator positivity at the solution


def test_generalized_without_solution_raises():
    # for c = -10, occupations are bounded by 1/|c| each, so sum < 3/10 < n
    with pytest.raises(SolverError):
        solve_generalized(EconomyParams((1, 2, 3), 3, 6), c=-10.0)


@pytest.mark.parametrize("counts,expected", [
    ((1, 2, 1), math.log(12.0)),
    ((4, 0, 0), 0.0),
    ((2, 0, 2), math.log(6.0)),
])
def test_log_multinomial_weight(counts, expected):
    assert log_multinomial_weight(OccupationVector(counts)) == pytest.approx(expected, abs=1e-12)


def test_log_multinomial_weight_large_counts():
    # 2e6 workers split evenly across two sectors: ln C(2m, m) stays finite
    m = 10**6
    value = log_multinomial_weight(OccupationVector((m, m)))
    # Stirling: ln C(2m, m) ~ 2m ln 2 - 0.5 ln(pi m)
    assert value == pytest.approx(2 * m * math.log(2) - 0.5 * math.log(math.pi * m), rel=1e-9)


def test_enumeration_oracle_instance():
    result = enumerate_feasible(EconomyParams((1, 2, 3), 4, 8))
    assert [v.counts for v in result.vectors] == [(0, 4, 0), (1, 2, 1), (2, 0, 2)]
    assert result.weights == (1, 12, 6)
    assert result.argmax.counts == (1, 2, 1)
    assert result.log_weights[1] == pytest.approx(math.log(12.0))


def test_enumeration_corner_instance():
    result = enumerate_feasible(EconomyParams((1, 2), 2, 4))
    assert [v.counts for v in result.vectors] == [(0, 2)]
    assert result.weights == (1,)


def test_enumeration_empty_economy():
    result = enumerate_feasible(EconomyParams((1, 2, 3), 0, 0))
    assert [v.counts for v in result.vectors] == [(0, 0, 0)]
    assert result.weights == (1,)
    assert result.argmax.counts == (0, 0, 0)


def test_enumeration_scaled_ladder():
    # the same instance expressed on a rescaled lattice enumerates identically
    result = enumerate_feasible(EconomyParams((0.5, 1.0, 1.5), 4, 4.0))
    assert [v.counts for v in result.vectors] == [(0, 4, 0), (1, 2, 1), (2, 0, 2)]


def test_enumeration_respects_cap():
    with pytest.raises(InstanceTooLarge):
        enumerate_feasible(EconomyParams((1, 2, 3), 100, 200), max_vectors=10)


def test_enumeration_counts_conserve_constraints():
    params = EconomyParams((1, 2, 4), 12, 30)
    result = enumerate_feasible(params)
    assert result.vectors
    for vec in result.vectors:
        assert vec.total == 12
        assert vec.output(params.levels) == 30


def test_stirling_agreement_small_instance():
    report = stirling_consistency(EconomyParams((1, 2, 3), 4, 8))
    assert report.exact_argmax.counts == (1, 2, 1)
    assert report.projected.counts == (1, 2, 1)
    assert report.coincide
    assert report.log_weight_gap == 0.0


def test_stirling_agreement_scaled_instance():
    report = stirling_consistency(EconomyParams((1, 2, 3), 100, 200))
    assert report.coincide
    assert not report.small_n_caveat


def test_stirling_small_n_flag():
    report = stirling_consistency(EconomyParams((1, 2, 3), 2, 4))
    assert report.small_n_caveat
    assert report.log_weight_gap >= 0.0


@pytest.mark.parametrize("levels,n,D", [
    ((1, 2, 3), 30, 60),
    ((1, 2, 3), 24, 50),
    ((1, 2, 4), 20, 45),
    ((1, 3, 5), 25, 71),
    ((1, 2, 3), 100, 200),
])
def test_projected_solution_near_exact_maximum(levels, n, D):
    # the rounded continuous solution loses < 0.5% of the best log weight
    params = EconomyParams(levels, n, D)
    enum = enumerate_feasible(params)
    report = stirling_consistency(params)
    best = max(enum.log_weights)
    projected_lw = log_multinomial_weight(report.projected)
    assert best - projected_lw <= 0.005 * abs(best)


def test_solution_serialization_fields():
    sol = solve_boltzmann(EconomyParams((1, 2, 3), 3, 6))
    payload = sol.to_json_dict()
    assert list(payload) == ["nu", "beta", "c", "occupations", "residuals"]
    assert all(isinstance(x, float) for x in payload["occupations"])
