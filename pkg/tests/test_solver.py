import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from nonlocal_lwr.exceptions import CFLError, NumericalFailure
from nonlocal_lwr.field import DensityField, PeriodicGrid
from nonlocal_lwr.kernels import KernelSpec
from nonlocal_lwr.oracles import LocalLinearSolution, traveling_wave_exact
from nonlocal_lwr.solver import (DesiredSpeed, SolverConfig, lax_friedrichs_step, max_wave_speed, run)

TWO_PI = 2 * np.pi


def bell(x):
    return 0.4 + 0.6 * np.exp(-100 * (x - 0.5) ** 2)


class StepMonitor:
    """Tracks mass drift and the range of the density after every step."""

    def __init__(self, initial):
        self.mass0 = initial.mass
        self.lo, self.hi = initial.min, initial.max
        self.max_drift = 0.0
        self.min_seen, self.max_seen = self.lo, self.hi

    def __call__(self, t, values):
        self.max_drift = max(self.max_drift, abs(values.mean() - self.mass0))
        self.min_seen = min(self.min_seen, values.min())
        self.max_seen = max(self.max_seen, values.max())


def test_speed_law():
    u = DesiredSpeed()
    assert u(0.25) == 0.75
    with pytest.raises(ValueError):
        DesiredSpeed("underwood")


def test_config_validation():
    g = PeriodicGrid(100)
    with pytest.raises(ValueError):
        SolverConfig(g, 1.0, cfl=1.5)
    with pytest.raises(ValueError):
        SolverConfig(g, -1.0)
    with pytest.raises(ValueError):
        SolverConfig(g, 1.0, snapshot_times=(2.0,))
    assert SolverConfig(g, 1.0).model == "local"
    assert SolverConfig(g, 1.0, KernelSpec.linear(0.2)).model == "nonlocal"


def test_wave_speed_examples():
    g = PeriodicGrid(100)
    local = SolverConfig(g, 1.0)
    assert max_wave_speed(DensityField.constant(g, 0.5), local) == 1e-6
    two = DensityField.from_function(g, lambda x: np.where(x < 0.5, 0.25, 0.75))
    assert max_wave_speed(two, local) == pytest.approx(0.5)


@given(arrays(np.float64, 64, elements=st.floats(min_value=0, max_value=1)))
def test_nonlocal_wave_speed_bounded(values):
    g = PeriodicGrid(64)
    for spec in (KernelSpec.linear(0.2), KernelSpec.constant(0.5)):
        assert 1e-6 <= max_wave_speed(DensityField(g, values), SolverConfig(g, 1.0, spec)) <= 2.0


@pytest.mark.parametrize("kernel", [None, KernelSpec.linear(0.2), KernelSpec.constant(0.5)])
def test_uniform_flow_is_fixed_point(kernel):
    g = PeriodicGrid(200)
    rho = DensityField.constant(g, 0.37)
    out = run(SolverConfig(g, 0.5, kernel), rho)
    np.testing.assert_allclose(out.final.values, 0.37, atol=1e-15)


def test_cfl_violation():
    g = PeriodicGrid(100)
    cfg = SolverConfig(g, 1.0, KernelSpec.linear(0.2))
    rho = DensityField.from_function(g, bell)
    limit = cfg.cfl * g.dx / max_wave_speed(rho, cfg)
    lax_friedrichs_step(rho, cfg, limit)
    with pytest.raises(CFLError):
        lax_friedrichs_step(rho, cfg, 1.01 * limit)
    with pytest.raises(CFLError):
        lax_friedrichs_step(rho, cfg, 0.0)


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_non_finite_state_aborts():
    g = PeriodicGrid(50)
    huge = DensityField.from_function(g, lambda x: 1e300 * (1 + x))
    with pytest.raises(NumericalFailure):
        run(SolverConfig(g, 1.0), huge)


def test_step_matches_hand_computation():
    g = PeriodicGrid(8)
    v = np.array([0.1, 0.2, 0.4, 0.8, 0.6, 0.3, 0.2, 0.1])
    cfg = SolverConfig(g, 1.0)
    dt = 0.1 * g.dx
    out = lax_friedrichs_step(DensityField(g, v), cfg, dt).values
    f = v * (1 - v)
    j = 3
    assert out[j] == pytest.approx(0.5 * (v[2] + v[4]) - dt / (2 * g.dx) * (f[4] - f[2]), abs=1e-15)


def test_t_end_zero():
    g = PeriodicGrid(100)
    rho = DensityField.from_function(g, bell)
    out = run(SolverConfig(g, 0.0, KernelSpec.linear(0.2), snapshot_times=(0.0,)), rho)
    assert out.steps == 0
    assert out.diagnostics.times == [0.0]
    assert len(out.snapshots) == 1 and out.snapshots[0][0] == 0.0
    np.testing.assert_array_equal(out.final.values, rho.values)


def test_event_times_are_hit_exactly():
    g = PeriodicGrid(200)
    cfg = SolverConfig(g, 0.3, KernelSpec.linear(0.2), snapshot_times=(0.0, 0.07, 0.123, 0.3),
                       diagnostic_interval=0.01)
    out = run(cfg, DensityField.from_function(g, bell))
    assert [t for t, _ in out.snapshots] == [0.0, 0.07, 0.123, 0.3]
    np.testing.assert_allclose(out.diagnostics.times, np.round(np.arange(31) * 0.01, 12))


@pytest.mark.parametrize("kernel", [KernelSpec.linear(0.2), KernelSpec.constant(0.5), KernelSpec.linear(0.05)])
def test_mass_and_maximum_principle(kernel):
    g = PeriodicGrid(500)
    rho = DensityField.from_function(g, bell)
    mon = StepMonitor(rho)
    out = run(SolverConfig(g, 1.0, kernel), rho, on_step=mon)
    assert out.steps > 100
    assert mon.max_drift <= 1e-12
    assert mon.min_seen >= rho.min - 1e-10
    assert mon.max_seen <= rho.max + 1e-10
    np.testing.assert_allclose(out.diagnostics.mass, rho.mass, atol=1e-12)


def test_energy_decreases_for_a3_kernel():
    g = PeriodicGrid(500)
    rho = DensityField.from_function(g, bell)
    energies = []
    run(SolverConfig(g, 2.0, KernelSpec.linear(0.2)), rho,
        on_step=lambda t, v: energies.append(0.5 * np.mean((v - v.mean()) ** 2)))
    assert np.all(np.diff(energies) <= 1e-10)


def test_outside_theory_tag():
    g = PeriodicGrid(200)
    compact = DensityField.from_function(g, lambda x: np.where(np.abs(x - 0.5) < 0.1, 0.8, 0.0))
    assert run(SolverConfig(g, 0.05, KernelSpec.linear(0.2)), compact).outside_theory
    assert not run(SolverConfig(g, 0.05), compact).outside_theory
    assert not run(SolverConfig(g, 0.05, KernelSpec.linear(0.2)), DensityField.from_function(g, bell)).outside_theory


def test_conv_methods_agree():
    g = PeriodicGrid(200)
    rho = DensityField.from_function(g, bell)
    a = run(SolverConfig(g, 0.2, KernelSpec.linear(0.2), conv_method="fft"), rho)
    b = run(SolverConfig(g, 0.2, KernelSpec.linear(0.2), conv_method="direct"), rho)
    np.testing.assert_allclose(a.final.values, b.final.values, atol=1e-12)


def _traveling_wave_l1(n, t=1.0):
    g = PeriodicGrid(n)
    rho0 = DensityField.from_function(g, lambda x: 0.5 + 0.4 * np.sin(4 * np.pi * x))
    out = run(SolverConfig(g, t, KernelSpec.constant(0.5)), rho0)
    exact = traveling_wave_exact(rho0, 0.5, t)
    return float(np.sum(np.abs(out.final.values - exact.values)) * g.dx)


def test_first_order_convergence_to_traveling_wave():
    coarse, fine = _traveling_wave_l1(500), _traveling_wave_l1(1000)
    assert fine < coarse
    assert 1.7 <= coarse / fine <= 2.3


def test_local_ramp_against_exact_solution():
    g = PeriodicGrid(2000)
    sol = LocalLinearSolution(0.5)
    rho0 = DensityField(g, sol.cell_averages(g, 0.0))
    out = run(SolverConfig(g, 2.0, snapshot_times=(0.5, 2.0)), rho0)
    for t, snap in out.snapshots:
        l1 = np.sum(np.abs(snap.values - sol.cell_averages(g, t))) * g.dx
        assert l1 < 0.01, (t, l1)
