import numpy as np
import pytest

from vlasovsym.odes import (GalileiProfilePair, NumericFn1D, OdeError,
                            ScalarFn, SingularDriftError, closed_b12_z2,
                            closed_d12_z2, const_fn, make_grid,
                            ode_residual_max, quadrature_d12, solve_b0,
                            solve_b12, solve_d12)

PHI1 = const_fn(1.0)


def test_closed_d12_values():
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    assert closed(1.0) == pytest.approx(-0.5)
    assert closed(0.0) == 0.0
    # odd function
    assert closed(0.7) == -closed(-0.7)


def test_closed_d12_satisfies_ode_pointwise():
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    rng = np.random.default_rng(7)
    for u in rng.uniform(0.2, 5.0, size=100):
        res = 2 * u * closed(u) + (u * u + 1) * closed.derivative(u) + 1.0
        assert abs(res) < 1e-14


def test_solve_d12_matches_closed_form():
    grid = make_grid(0.5, 5.0, 1e-3)
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    sol = solve_d12(2, PHI1, 1.0, 1.0, grid, anchor=closed(0.5))
    dev = max(abs(sol.values[i] - closed(u)) for i, u in enumerate(grid))
    assert dev <= 1e-8
    assert sol.residual_max <= 1e-9


def test_solve_d12_zero_source():
    grid = make_grid(0.5, 2.0, 1e-3)
    sol = solve_d12(2, PHI1, 1.0, 0.0, grid, anchor=0.0)
    assert float(np.max(np.abs(sol.values))) == 0.0


def test_solve_d12_self_residual_z3():
    grid = make_grid(0.5, 5.0, 1e-3)
    sol = solve_d12(3, PHI1, 1.0, 1.0, grid, anchor=0.2)
    assert sol.residual_max <= 1e-9


def test_solve_d12_fourth_order():
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    res = []
    for h in (0.05, 0.025):
        grid = make_grid(0.5, 4.0, h)
        sol = solve_d12(2, PHI1, 1.0, 1.0, grid, anchor=closed(0.5))
        res.append(sol.residual_max)
    assert res[0] / res[1] >= 8.0


def test_singular_drift_detected():
    # at z = 1/2, Phi = -u^2/2 + 1 crosses zero at sqrt(2)
    grid = make_grid(0.5, 4.0, 0.01)
    with pytest.raises(SingularDriftError):
        solve_d12("1/2", PHI1, 1.0, 1.0, grid, anchor=0.0)


def test_solve_b12_zero_source_at_z2():
    grid = make_grid(0.5, 4.0, 1e-3)
    sol = solve_b12(2, PHI1, 1.0, grid, init=(0.0, 0.0))
    assert float(np.max(np.abs(sol.values))) == 0.0


@pytest.mark.parametrize("b120,b121", [(1.0, 0.0), (0.0, 1.0)])
def test_solve_b12_matches_closed_branches(b120, b121):
    grid = make_grid(0.5, 4.0, 1e-3)
    closed = closed_b12_z2(1.0, b120, b121)
    sol = solve_b12(2, PHI1, 1.0, grid,
                    init=(closed(0.5), closed.derivative(0.5)))
    scale = max(abs(closed(u)) for u in grid)
    dev = max(abs(sol.values[i] - closed(u)) for i, u in enumerate(grid))
    assert dev / scale <= 1e-7


def test_solve_b12_fourth_order():
    closed = closed_b12_z2(1.0, 1.0, 1.0)
    res = []
    for h in (0.05, 0.025):
        grid = make_grid(0.5, 4.0, h)
        sol = solve_b12(2, PHI1, 1.0, grid,
                        init=(closed(0.5), closed.derivative(0.5)))
        res.append(sol.residual_max)
    assert res[0] / res[1] >= 8.0


def test_solve_b0_two_solutions():
    grid = make_grid(0.5, 4.0, 1e-3)
    pair = solve_b0(2, PHI1, 1.0, grid)
    assert isinstance(pair, GalileiProfilePair)
    assert pair.independent
    assert float(np.min(np.abs(pair.wronskian.values))) > 1e-10
    assert pair.first.residual_max <= 1e-9
    assert pair.second.residual_max <= 1e-9


def test_solve_b0_zero_data():
    grid = make_grid(0.5, 2.0, 1e-3)

    def f(u, y):
        return y

    # s = 0 with zero data stays zero: check through the public solver by
    # integrating the homogeneous equation from (0, 0) initial data
    from vlasovsym.odes import _rk4_march
    states = _rk4_march(lambda u, y: np.array([y[1], -y[0]]), grid,
                        [0.0, 0.0])
    assert float(np.max(np.abs(states))) == 0.0


def test_quadrature_d12_solves_inhomogeneous():
    grid = make_grid(0.5, 4.0, 1e-3)
    # delta0 = 2 mu x / z reproduces the source normalization
    quad = quadrature_d12(2, 1.0, 1.0, 0.5, grid)
    res = ode_residual_max(
        quad, lambda u, d, dd: 2 * u * d + (u * u + 1.0) * dd + 1.0)
    assert res <= 1e-8


def test_quadrature_d12_prefactor_is_homogeneous_solution():
    # with a zero running integral only the prefactor survives; it solves
    # the homogeneous equation z u d + Phi d' = 0
    grid = make_grid(0.5, 4.0, 1e-3)
    pref = lambda u: (u * u + 1.0) ** -1.0
    dpref = lambda u: -2.0 * u * (u * u + 1.0) ** -2.0
    worst = max(abs(2 * u * pref(u) + (u * u + 1.0) * dpref(u))
                for u in grid)
    assert worst <= 1e-12


def test_quadrature_d12_zero_scale():
    grid = make_grid(0.5, 2.0, 1e-3)
    quad = quadrature_d12(2, 1.0, 0.0, 0.5, grid)
    assert float(np.max(np.abs(quad.values))) == 0.0


def test_quadrature_vs_march_differ_by_homogeneous_solution():
    grid = make_grid(0.5, 4.0, 1e-3)
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    march = solve_d12(2, PHI1, 1.0, 1.0, grid, anchor=closed(0.5))
    quad = quadrature_d12(2, 1.0, 1.0, 0.5, grid)
    diff = quad.values - march.values
    pref = 1.0 / (grid ** 2 + 1.0)
    lam = diff[0] / pref[0]
    assert float(np.max(np.abs(diff - lam * pref))) <= 1e-7


def test_quadrature_requires_positive_drift():
    grid = make_grid(0.5, 4.0, 0.01)
    with pytest.raises(OdeError):
        quadrature_d12("1/2", 1.0, 1.0, 0.5, grid)


def test_numeric_fn_interpolation_and_csv(tmp_path):
    grid = make_grid(0.5, 4.0, 0.01)
    closed = closed_d12_z2(1.0, 1.0, 1.0)
    sol = solve_d12(2, PHI1, 1.0, 1.0, grid, anchor=closed(0.5))
    for u in (0.77, 1.33, 2.5):
        assert sol(u) == pytest.approx(closed(u), abs=1e-8)
    out = tmp_path / "d12.csv"
    sol.to_csv(out)
    header = out.read_text().splitlines()[0]
    assert header == "u,value,derivative,residual"
    assert len(out.read_text().splitlines()) == len(grid) + 1


def test_make_grid_validation():
    with pytest.raises(OdeError):
        make_grid(1.0, 0.5, 0.1)
    with pytest.raises(OdeError):
        make_grid(0.5, 1.0, -0.1)


def test_scalar_fn_derivative_fallback():
    fn = ScalarFn(lambda u: u ** 3)
    assert fn.derivative(2.0) == pytest.approx(12.0, rel=1e-6)
