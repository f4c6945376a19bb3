import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from nonlocal_lwr.exceptions import PreconditionError
from nonlocal_lwr.field import DensityField, PeriodicGrid, l2_distance_to_mean
from nonlocal_lwr.kernels import KernelSpec, compute_moments
from nonlocal_lwr.oracles import (LocalLinearSolution, check_hardy_littlewood, check_nonlinear_poincare,
                                  check_nonlocal_poincare, local_linear_exact, poincare_form,
                                  random_trig_polynomial, traveling_wave_exact, upsample)
from nonlocal_lwr.spectral import fourier_coefficients, stability_constant

TWO_PI = 2 * np.pi
flux = lambda r: r * (1 - r)


# -- local LWR with linear data --------------------------------------------

def test_initial_data():
    assert local_linear_exact(0.5, 0.4, 0.0) == pytest.approx(0.2)


def test_shock_structure():
    sol = LocalLinearSolution(0.5)
    assert sol.shock_time == 1.0
    assert sol.shock_speed == 0.5
    assert LocalLinearSolution(0.0).shock_time == np.inf
    with pytest.raises(ValueError):
        LocalLinearSolution(1.5)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("t", [1.7, 3.0, 8.0, 20.0])
def test_rankine_hugoniot(beta, t):
    sol = LocalLinearSolution(beta)
    if t <= sol.shock_time:
        pytest.skip("no shock yet")
    # one-sided limits read off the solution itself
    xs = sol.shock_position(t)
    left = float(sol(xs - 1e-9, t))
    right = float(sol(xs + 1e-9, t))
    assert (left, right) == pytest.approx(sol.jump(t), abs=1e-8)
    rl, rr = sol.jump(t)
    speed = (flux(rr) - flux(rl)) / (rr - rl)
    assert speed == pytest.approx(1 - beta, abs=1e-12)
    assert speed == pytest.approx(sol.shock_speed, abs=1e-12)
    # entropy condition: characteristics run into the shock
    assert 1 - 2 * rl > speed > 1 - 2 * rr


def _l2_by_adaptive_quadrature(sol, t):
    pts = np.sort(np.concatenate([[0.0, 1.0], sol.breakpoints(t)]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b > a:
            val, _ = integrate.quad(lambda x: (float(sol(x, t)) - sol.beta / 2) ** 2, a, b, epsabs=1e-14)
            total += val
    return np.sqrt(total)


@pytest.mark.parametrize("t", [1.2, 2.0, 4.0, 8.0])
def test_l2_decays_like_inverse_t(t):
    sol = LocalLinearSolution(0.5)
    expected = 1 / (2 * np.sqrt(12) * t)
    assert sol.l2_distance_to_mean(t) == pytest.approx(expected, rel=1e-12)
    assert _l2_by_adaptive_quadrature(sol, t) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.7, 1.0])
def test_l2_constant_before_shock(t):
    sol = LocalLinearSolution(0.5)
    at_zero, _ = integrate.quad(lambda x: (0.5 * x - 0.25) ** 2, 0, 1)
    assert sol.l2_distance_to_mean(t) == pytest.approx(np.sqrt(at_zero), rel=1e-12)
    assert sol.l2_distance_to_mean(t) == pytest.approx(0.5 / np.sqrt(12), rel=1e-12)


@given(st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=0.0, max_value=15.0))
def test_mass_conserved(beta, t):
    sol = LocalLinearSolution(beta)
    grid = PeriodicGrid(400)
    avg = sol.cell_averages(grid, t)
    assert abs(avg.mean() - beta / 2) <= 1e-12


def test_continuity_across_shock_time():
    sol = LocalLinearSolution(0.5)
    x = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(sol(x, 1.0), sol(x, 1.0 + 1e-9), atol=1e-7)


def test_cell_averages_match_pointwise_for_smooth_cells():
    sol = LocalLinearSolution(0.5)
    grid = PeriodicGrid(100)
    avg = sol.cell_averages(grid, 3.0)
    # away from the shock the solution is linear, so the average is the midpoint value
    far = np.abs(grid.cell_centers - np.mod(sol.shock_position(3.0), 1)) > 2 * grid.dx
    np.testing.assert_allclose(avg[far], sol(grid.cell_centers[far], 3.0), atol=1e-12)


# -- traveling wave ---------------------------------------------------------

def test_traveling_wave_constant():
    grid = PeriodicGrid(200)
    rho0 = DensityField.constant(grid, 0.4)
    np.testing.assert_allclose(traveling_wave_exact(rho0, 0.5, 3.3).values, 0.4, atol=1e-14)


def test_traveling_wave_full_period_identity():
    grid = PeriodicGrid(1000)
    rho0 = DensityField.from_function(grid, lambda x: 0.5 + 0.4 * np.sin(4 * np.pi * x))
    out = traveling_wave_exact(rho0, 0.5, 1.0)
    np.testing.assert_allclose(out.values, rho0.values, atol=1e-12)


def test_traveling_wave_matches_formula():
    grid = PeriodicGrid(1000)
    rho0 = DensityField.from_function(grid, lambda x: 0.5 + 0.4 * np.sin(4 * np.pi * x))
    out = traveling_wave_exact(rho0, 0.5, 0.37)
    np.testing.assert_allclose(out.values, 0.5 + 0.4 * np.sin(4 * np.pi * (grid.cell_centers - 0.5 * 0.37)),
                               atol=1e-12)
    assert l2_distance_to_mean(out) == pytest.approx(l2_distance_to_mean(rho0), rel=1e-12)


@given(st.floats(min_value=0, max_value=2), st.floats(min_value=0, max_value=2))
def test_traveling_wave_composition(t1, t2):
    grid = PeriodicGrid(300)
    rho0 = DensityField.from_function(grid, lambda x: 0.6 + 0.2 * np.cos(6 * np.pi * x) + 0.1 * np.sin(12 * np.pi * x))
    delta = 1 / 3
    twice = traveling_wave_exact(traveling_wave_exact(rho0, delta, t1), delta, t2)
    once = traveling_wave_exact(rho0, delta, t1 + t2)
    np.testing.assert_allclose(twice.values, once.values, atol=1e-10)


def test_traveling_wave_preconditions():
    grid = PeriodicGrid(200)
    with pytest.raises(PreconditionError):
        traveling_wave_exact(DensityField.from_function(grid, lambda x: 0.5 + 0.1 * np.sin(TWO_PI * x)), 0.5, 1)
    with pytest.raises(PreconditionError):
        traveling_wave_exact(DensityField.constant(grid, 0.5), 0.3, 1)


# -- inequality checkers ----------------------------------------------------

def test_upsample_is_exact_for_trig_polynomials():
    grid = PeriodicGrid(64)
    f = lambda x: 0.5 + 0.1 * np.sin(TWO_PI * 3 * x) - 0.05 * np.cos(TWO_PI * 31 * x)
    fine = upsample(DensityField.from_function(grid, f))
    assert fine.grid.n_cells == 128
    np.testing.assert_allclose(fine.values, f(fine.x), atol=1e-13)


def test_poincare_constant_field():
    rho = DensityField.constant(PeriodicGrid(1000), 0.4)
    lhs, rhs, holds = check_nonlocal_poincare(rho, KernelSpec.linear(0.2), 30.0)
    assert abs(lhs) < 1e-20 and abs(rhs) < 1e-20 and holds
    lhs, rhs, holds = check_nonlinear_poincare(rho, KernelSpec.linear(0.2))
    assert abs(lhs) < 1e-20 and holds


@pytest.mark.parametrize("k", [1, 2, 4])
@pytest.mark.parametrize("spec", [KernelSpec.linear(0.2), KernelSpec.constant(0.3)], ids=lambda s: s.shape)
def test_single_mode_ratio(spec, k):
    grid = PeriodicGrid(6000)
    rho = DensityField.from_function(grid, lambda x: 0.5 + 0.2 * np.cos(TWO_PI * k * x))
    dev = rho.values - rho.mean
    ratio = poincare_form(rho, spec, extrapolate=True) / (np.sum(dev * dev) * grid.dx)
    b, _ = fourier_coefficients(spec, None, k)
    assert ratio == pytest.approx(TWO_PI * k * b, rel=1e-8)


def test_special_kernel_identity():
    grid = PeriodicGrid(5000)
    rng = np.random.default_rng(3)
    spec = KernelSpec.linear(1.0)
    for _ in range(5):
        rho = random_trig_polynomial(rng, grid)
        dev = rho.values - rho.mean
        assert poincare_form(rho, spec, extrapolate=True) == pytest.approx(6 * np.sum(dev * dev) * grid.dx, rel=1e-6)


def test_extrapolation_improves_accuracy():
    grid = PeriodicGrid(1000)
    spec = KernelSpec.linear(0.5)
    rho = DensityField.from_function(grid, lambda x: 0.5 + 0.1 * np.sin(TWO_PI * x))
    exact = 24 * 0.01 / 2
    plain = abs(poincare_form(rho, spec) - exact)
    extrap = abs(poincare_form(rho, spec, extrapolate=True) - exact)
    assert extrap < 1e-3 * plain


def test_nonlinear_poincare_example():
    grid = PeriodicGrid(2000)
    rho = DensityField.from_function(grid, lambda x: 0.5 + 0.4 * np.sin(TWO_PI * x))
    lhs, rhs, holds = check_nonlinear_poincare(rho, KernelSpec.linear(0.2))
    assert holds and lhs > rhs > 0


def test_nonlinear_poincare_rejects_negative():
    rho = DensityField.from_function(PeriodicGrid(100), lambda x: np.sin(TWO_PI * x))
    with pytest.raises(PreconditionError):
        check_nonlinear_poincare(rho, KernelSpec.linear(0.2))


def test_random_polynomials_satisfy_inequalities():
    grid = PeriodicGrid(2000)
    rng = np.random.default_rng(11)
    spec = KernelSpec.linear(0.2)
    m = compute_moments(spec)
    alpha = stability_constant(spec, moments=m).alpha
    for _ in range(100):
        rho = random_trig_polynomial(rng, grid)
        assert rho.min > 0
        assert check_nonlocal_poincare(rho, spec, alpha, m, extrapolate=True).holds
        assert check_nonlinear_poincare(rho, spec, m, extrapolate=True).holds


def test_centered_derivative_option():
    grid = PeriodicGrid(4000)
    rho = DensityField.from_function(grid, lambda x: 0.5 + 0.1 * np.sin(TWO_PI * x))
    spec = KernelSpec.linear(0.2)
    a = poincare_form(rho, spec, derivative="centered")
    b = poincare_form(rho, spec, derivative="spectral")
    assert a == pytest.approx(b, rel=1e-5)
    with pytest.raises(ValueError):
        poincare_form(rho, spec, derivative="upwind")


def test_hardy_littlewood_shift_zero_is_equality():
    rho = np.random.default_rng(0).uniform(size=8)
    f = lambda r: r**3
    assert check_hardy_littlewood(rho, f, 0, tol=0.0)
    with pytest.raises(ValueError):
        check_hardy_littlewood(rho, f, 8)


@given(st.lists(st.floats(min_value=0, max_value=1), min_size=2, max_size=16))
def test_hardy_littlewood_all_shifts(values):
    rho = np.array(values)
    f = lambda r: 0.5 * (r - rho.min()) ** 2
    assert all(check_hardy_littlewood(rho, f, s) for s in range(len(rho)))


def test_hardy_littlewood_sorted_strict():
    rng = np.random.default_rng(5)
    for _ in range(10):
        rho = np.sort(rng.uniform(size=8))
        identity = lambda r: r
        shifted = rho @ np.roll(rho, -1)
        assert shifted < rho @ rho
        assert check_hardy_littlewood(rho, identity, 1, tol=0.0)
    const = np.full(8, 0.3)
    assert const @ np.roll(const, -1) == pytest.approx(const @ const)


def test_random_trig_polynomial_is_seeded():
    grid = PeriodicGrid(128)
    a = random_trig_polynomial(np.random.default_rng(9), grid)
    b = random_trig_polynomial(np.random.default_rng(9), grid)
    np.testing.assert_array_equal(a.values, b.values)
    assert a.mean == pytest.approx(0.5, abs=1e-12)
