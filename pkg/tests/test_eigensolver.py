import numpy as np
import pytest

from fracplap import (
    DiscreteFunction,
    FracParams,
    Interval,
    SolverConfig,
    Spectrum,
    assemble,
    build_grid,
    counting_function,
    first_eigenpair,
    linear_spectrum,
    lp_norm_p,
    percentile_window,
    rayleigh,
    seminorm_p,
    stiffness_matrix,
    weyl_slope,
)
from fracplap.errors import InvalidParams, WindowTooSmall, WrongExponent

from reference import pencil_2x2_smallest, sphere_grid_search

TIGHT = SolverConfig(max_iters=60000, tol=1e-13)


def interval_energy(n, s=0.5, p=2.0):
    grid = build_grid(Interval(0.0, 1.0), FracParams(s, p, 1), n)
    return grid, assemble(grid)


def test_solver_config_invariants():
    with pytest.raises(InvalidParams):
        SolverConfig(tol=0.0)
    with pytest.raises(InvalidParams):
        SolverConfig(backtrack=1.0)
    with pytest.raises(InvalidParams):
        SolverConfig(max_iters=0)


def test_single_node_problem():
    # one interior node: the quotient is constant, lambda1 = 2 h kappa / h
    grid, energy = interval_energy(n=2)
    result = first_eigenpair(energy, TIGHT)
    kappa = energy.kappa.kappa[0]
    assert result.lambda1 == pytest.approx(2.0 * kappa, rel=1e-12)
    assert lp_norm_p(result.eigenfunction) == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(
        result.eigenfunction.values, [grid.h ** (-1.0 / 2.0)], rtol=1e-12)


def test_two_node_pencil_closed_form():
    grid, energy = interval_energy(n=3)
    assert grid.num_nodes == 2
    ref = pencil_2x2_smallest(energy.weights[0, 1], energy.kappa.kappa, grid.h)
    result = first_eigenpair(energy, TIGHT)
    assert result.lambda1 == pytest.approx(ref, rel=1e-10)


def test_five_node_grid_search_p15():
    grid, energy = interval_energy(n=6, p=1.5)
    assert grid.num_nodes == 5
    ref, _ = sphere_grid_search(energy.weights, energy.kappa.kappa, grid.h, 1.5)
    result = first_eigenpair(energy, TIGHT)
    assert result.lambda1 == pytest.approx(ref, rel=1e-3)
    assert result.lambda1 <= ref + 1e-12  # solver at least as good as search


def test_eigenfunction_properties():
    grid, energy = interval_energy(n=16, p=2.5, s=0.6)
    result = first_eigenpair(energy, TIGHT)
    u = result.eigenfunction
    assert lp_norm_p(u) == pytest.approx(1.0, rel=1e-12)
    assert rayleigh(energy, u) == pytest.approx(result.lambda1, rel=1e-12)
    assert (u.values > 0).all()


def test_monotone_descent_history():
    grid, energy = interval_energy(n=32)
    result = first_eigenpair(energy, SolverConfig(tol=1e-10))
    ray = result.history[:, 1]
    assert (np.diff(ray) <= ray[:-1] * 1e-13).all()


def test_solver_determinism():
    _, energy = interval_energy(n=24, p=2.5)
    a = first_eigenpair(energy, TIGHT)
    b = first_eigenpair(energy, TIGHT)
    assert a.lambda1 == b.lambda1
    assert a.eigenfunction.values.tobytes() == b.eigenfunction.values.tobytes()
    assert a.history.tobytes() == b.history.tobytes()


def test_rayleigh_never_below_minimum():
    grid, energy = interval_energy(n=16)
    lam1 = first_eigenpair(energy, TIGHT).lambda1
    rng = np.random.default_rng(23)
    for _ in range(100):
        u = DiscreteFunction(rng.standard_normal(grid.num_nodes), grid)
        assert rayleigh(energy, u) >= lam1 * (1.0 - 1e-12)


def test_stiffness_matrix_reproduces_energy():
    grid, energy = interval_energy(n=20, s=0.7)
    k = stiffness_matrix(energy)
    rng = np.random.default_rng(29)
    for _ in range(20):
        v = rng.standard_normal(grid.num_nodes)
        quad = float(v @ k @ v)
        assert quad == pytest.approx(
            seminorm_p(energy, DiscreteFunction(v, grid)), rel=1e-12)


def test_linear_spectrum_counts_and_positivity():
    grid, energy = interval_energy(n=24)
    spec = linear_spectrum(energy)
    assert len(spec.eigenvalues) == grid.num_nodes
    assert (spec.eigenvalues > 0).all()
    assert (np.diff(spec.eigenvalues) >= 0).all()


def test_linear_spectrum_orthonormality():
    grid, energy = interval_energy(n=32, s=0.6)
    spec = linear_spectrum(energy)
    v = spec.eigenvectors
    gram = v.T @ (grid.measure_weight * v)
    np.testing.assert_allclose(gram, np.eye(grid.num_nodes), atol=1e-10)


def test_linear_spectrum_matches_nonlinear_solver():
    grid, energy = interval_energy(n=64)
    spec = linear_spectrum(energy)
    result = first_eigenpair(energy, TIGHT)
    assert result.lambda1 == pytest.approx(float(spec.eigenvalues[0]), rel=1e-8)


def test_wrong_exponent():
    _, energy = interval_energy(n=8, p=2.5)
    with pytest.raises(WrongExponent):
        linear_spectrum(energy)
    with pytest.raises(WrongExponent):
        stiffness_matrix(energy)


def _synthetic_spectrum(values):
    return Spectrum(eigenvalues=np.asarray(values, dtype=float),
                    eigenvectors=None, grid=None, params=None)


def test_counting_function_examples():
    spec = _synthetic_spectrum([1.0, 2.0, 3.0])
    assert counting_function(spec, 2.5) == 2
    assert counting_function(spec, 2.0) == 1      # strict inequality
    assert counting_function(spec, 0.5) == 0
    assert counting_function(spec, 100.0) == 3


def test_counting_function_monotone():
    rng = np.random.default_rng(31)
    spec = _synthetic_spectrum(np.sort(rng.uniform(1, 100, size=50)))
    grid_vals = np.geomspace(0.5, 200, 300)
    counts = [counting_function(spec, lam) for lam in grid_vals]
    assert (np.diff(counts) >= 0).all()


def test_weyl_slope_exact_power_laws():
    k = np.arange(1, 201, dtype=float)
    quad = _synthetic_spectrum(k**2)
    fit = weyl_slope(quad, (quad.eigenvalues[4], quad.eigenvalues[-5]))
    assert fit.slope == pytest.approx(0.5, abs=1e-6)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    lin = _synthetic_spectrum(k)
    fit = weyl_slope(lin, (5.0, 150.0))
    assert fit.slope == pytest.approx(1.0, abs=1e-6)


def test_weyl_slope_window_too_small():
    spec = _synthetic_spectrum(np.arange(1.0, 30.0))
    with pytest.raises(WindowTooSmall):
        weyl_slope(spec, (1.0, 5.0))


def test_weyl_slope_tail_flag():
    spec = _synthetic_spectrum(np.arange(1.0, 101.0))
    flagged = weyl_slope(spec, (50.0, 95.0))
    assert flagged.upper_tail_flag
    clean = weyl_slope(spec, (5.0, 40.0))
    assert not clean.upper_tail_flag


def test_discrete_spectrum_recovers_conjectured_exponent():
    # the mid log-range of the discrete spectrum follows lambda^(N/sp)
    grid, energy = interval_energy(n=256, s=0.5)
    spec = linear_spectrum(energy)
    window = percentile_window(spec, 50.0, 80.0)
    fit = weyl_slope(spec, window)
    assert not fit.upper_tail_flag
    assert fit.points >= 10
    assert abs(fit.slope - 1.0) / 1.0 < 0.15


def test_no_convergence_returns_best_iterate_with_flag():
    _, energy = interval_energy(n=32)
    result = first_eigenpair(energy, SolverConfig(max_iters=3, tol=1e-13))
    assert not result.converged
    assert result.status in ("max_iters", "float_limited")
    assert result.lambda1 > 0
    assert np.isfinite(result.residual)


def test_restart_consistency():
    from fracplap.eigensolver import random_positive_init
    grid, energy = interval_energy(n=20, p=2.5, s=0.4)
    rng = np.random.default_rng(37)
    lams = [
        first_eigenpair(energy, TIGHT, init=random_positive_init(energy, rng)).lambda1
        for _ in range(10)
    ]
    assert (max(lams) - min(lams)) / min(lams) < 1e-6
