"""Moment-closure state handling, integration, and steady states."""

import math
from dataclasses import replace

import numpy as np
import pytest

from nvcool import lindblad
from nvcool.cumulant import (DriveParams, DrivenMomentState, MomentState,
                             Phase, default_atol, driven_rhs, integrate,
                             pack_params, steady_state, thermal_state,
                             undriven_rhs)
from nvcool.errors import NumericalFailureError
from nvcool.params import preset


def _with_resonator(params, **kw):
    return params.replace(resonator=replace(params.resonator, **kw))


class TestStates:
    def test_moment_state_round_trip(self):
        state = MomentState(pop=np.linspace(0.1, 0.2, 7), photon_n=12.0,
                            spin_photon=1 + 2j, spin_spin=3 - 4j)
        again = MomentState.from_flat(state.to_flat())
        assert np.allclose(again.pop, state.pop)
        assert again.photon_n == state.photon_n
        assert again.spin_photon == state.spin_photon
        assert again.spin_spin == state.spin_spin

    def test_driven_state_round_trip(self):
        state = DrivenMomentState(
            pop=np.full(7, 1 / 7), photon_n=3.0, spin_photon=1j,
            spin_spin=2.0, a_mean=0.5 - 0.5j, sigma13_mean=0.25j,
            aa=1 + 1j, a_sigma13=-2j, a_pop1=0.125, a_pop3=0.5j,
            sigma13_sigma13=-1.0, pop1_sigma13=0.75j, pop3_sigma13=-0.25)
        again = DrivenMomentState.from_flat(state.to_flat())
        assert np.allclose(again.to_flat(), state.to_flat())

    def test_embedding_keeps_shared_moments(self):
        base = MomentState(pop=np.full(7, 1 / 7), photon_n=5.0,
                           spin_photon=2j, spin_spin=1.5)
        driven = DrivenMomentState.from_undriven(base)
        assert driven.photon_n == base.photon_n
        assert driven.spin_photon == base.spin_photon
        assert driven.a_mean == 0j and driven.aa == 0j

    def test_population_defect(self):
        state = thermal_state(preset("high-frequency"))
        assert state.population_defect() < 1e-15

    def test_phase_validation(self):
        with pytest.raises(ValueError):
            Phase(1.0, 1.0)

    def test_default_atol(self):
        atol = default_atol(12)
        assert atol[7] == 1e-6 and atol[0] == 1e-12


class TestRhsInvariants:
    def test_thermal_state_stationary_without_coupling(self, hf_params):
        params = _with_resonator(hf_params, g31=0.0)
        rhs = undriven_rhs(thermal_state(params), params, xi=0.0)
        assert np.max(np.abs(rhs.to_flat())) < 1e-12

    def test_population_flow_sums_to_zero(self, hf_params):
        rng = np.random.default_rng(5)
        for _ in range(10):
            pop = rng.uniform(0.0, 1.0, 7)
            pop /= pop.sum()
            state = MomentState(pop=pop, photon_n=rng.uniform(0, 700),
                                spin_photon=complex(*rng.normal(size=2)),
                                spin_spin=complex(rng.normal(), 0))
            rhs = undriven_rhs(state, hf_params, xi=rng.uniform(0, 1e5))
            assert abs(rhs.pop.sum()) < 1e-6 * np.abs(rhs.pop).max()

    def test_pack_params_uses_current_xi(self, hf_params):
        par_a = pack_params(hf_params, xi=0.0)
        par_b = pack_params(hf_params, xi=123.0)
        from nvcool import kernels
        assert par_a[kernels.PAR_XI] == 0.0
        assert par_b[kernels.PAR_XI] == 123.0

    def test_generator_matches_exact_solver_at_product_states(self):
        """At diagonal product states the closure's factorizations are
        exact, so the moment derivatives must match the density-matrix
        generator (single spin)."""
        fixture = lindblad.oracle_fixtures()[0]
        params, xi = fixture.params, fixture.xi
        # cutoff high enough that the truncated thermal reference holds the
        # full occupation to well below the comparison tolerance
        cutoff = 50
        liouv = lindblad.build_liouvillian(params, xi, 1, cutoff)
        for pops in ((1 / 3, 1 / 3, 1 / 3, 0, 0, 0, 0),
                     (0.5, 0.2, 0.1, 0.1, 0.05, 0.03, 0.02)):
            rho = lindblad.DensityState.product(pops, 1, cutoff,
                                                params.thermal_occupation())
            drho = (liouv.matrix @ rho.matrix.reshape(-1, order="F"))
            drho = np.asarray(drho).reshape(rho.dim, rho.dim, order="F")
            state = MomentState(pop=np.array(pops, dtype=float),
                                photon_n=liouv.expect(
                                    "photon_n", rho.matrix).real)
            rhs = undriven_rhs(state, params, xi=xi)
            for level in range(7):
                exact = liouv.expect(f"pop{level + 1}", drho).real
                assert rhs.pop[level] == pytest.approx(exact, abs=1e-8)
            exact_n = liouv.expect("photon_n", drho).real
            assert rhs.photon_n == pytest.approx(exact_n, abs=1e-6)


class TestIntegration:
    def test_photon_relaxes_analytically_when_decoupled(self, hf_params):
        params = _with_resonator(hf_params, g31=0.0)
        nth = params.thermal_occupation()
        start = MomentState(pop=np.r_[np.full(3, 1 / 3), np.zeros(4)],
                            photon_n=100.0)
        kappa = params.resonator.kappa
        t_end = 5.0 / kappa
        traj = integrate(params, start, [Phase(0.0, t_end, xi=0.0)],
                         rtol=1e-10, points_per_phase=200)
        expected = nth + (100.0 - nth) * np.exp(-kappa * traj.times)
        np.testing.assert_allclose(traj.photon_n, expected, rtol=1e-6)

    def test_driven_with_zero_amplitude_reduces_to_undriven(self, hf_params):
        phases_u = [Phase(0.0, 2e-3, xi=2195.8)]
        start = thermal_state(hf_params)
        traj_u = integrate(hf_params, start, phases_u, points_per_phase=100)

        drive = DriveParams(amplitude=0.0)
        phases_d = [Phase(0.0, 2e-3, xi=2195.8, drive=drive)]
        traj_d = integrate(hf_params, DrivenMomentState.from_undriven(start),
                           phases_d, points_per_phase=100)
        np.testing.assert_allclose(traj_d.states[:, :12], traj_u.states,
                                   rtol=1e-6, atol=1e-12)
        # the drive-only moments must stay identically zero
        assert np.max(np.abs(traj_d.states[:, 12:])) < 1e-9

    def test_population_conservation_along_pulse(self, cooling_run):
        defect = np.abs(cooling_run.trajectory.populations.sum(axis=1) - 1.0)
        assert defect.max() < 10 * 1e-8

    def test_pair_correlation_stays_real(self, cooling_run):
        imag = np.abs(cooling_run.trajectory.states[:, 11])
        assert imag.max() < 1e-12

    def test_phases_must_be_contiguous(self, hf_params):
        with pytest.raises(ValueError):
            integrate(hf_params, thermal_state(hf_params),
                      [Phase(0.0, 1e-3), Phase(2e-3, 3e-3)])

    def test_nan_initial_state_rejected(self, hf_params):
        bad = thermal_state(hf_params)
        bad.photon_n = float("nan")
        with pytest.raises(NumericalFailureError):
            integrate(hf_params, bad, [Phase(0.0, 1e-3)])

    def test_drive_window_splits_trajectory(self, hf_params):
        # decoupled spins: thermal is exactly stationary until the window
        params = _with_resonator(hf_params, g31=0.0)
        drive = DriveParams(amplitude=2e6, on_window=(1e-6, 2e-6))
        start = DrivenMomentState.from_undriven(thermal_state(params))
        traj = integrate(params, start,
                         [Phase(0.0, 3e-6, xi=0.0, drive=drive)],
                         points_per_phase=50)
        n = traj.photon_n
        before = n[traj.times <= 1e-6]
        during = n[(traj.times > 1.2e-6) & (traj.times <= 2e-6)]
        assert np.allclose(before, before[0], rtol=1e-6)
        assert during.max() > before[0] * 1.5


class TestSteadyState:
    def test_thermal_fixed_point_when_decoupled(self, hf_params):
        params = _with_resonator(hf_params, g31=0.0)
        state, info = steady_state(params, xi=0.0)
        assert info["converged"]
        assert state.photon_n == pytest.approx(params.thermal_occupation(),
                                               rel=1e-9)
        assert state.pop[0:3] == pytest.approx(np.full(3, 1 / 3), abs=1e-9)

    def test_unpumped_fixed_point_is_stationary(self, hf_params):
        state, info = steady_state(hf_params, xi=0.0)
        assert info["converged"]
        rhs = undriven_rhs(state, hf_params, xi=0.0)
        scale = max(1.0, state.photon_n)
        assert np.max(np.abs(rhs.to_flat())) < (
            1e-6 * scale * hf_params.resonator.kappa)
        # unpolarized spins push the mode slightly above thermal occupation
        nth = hf_params.thermal_occupation()
        assert nth < state.photon_n < nth + 3.0

    def test_warm_start_continuation(self, hf_params):
        cold, _ = steady_state(hf_params, xi=1e4)
        warm, info = steady_state(hf_params, xi=1.2e4, guess=cold)
        assert info["converged"]
        assert not info["fallback_integration"]
        assert warm.photon_n < cold.photon_n  # deeper cooling at higher xi

    def test_empty_cavity_driven_fixed_point(self, hf_params):
        """With the spins decoupled the driven steady state is a displaced
        thermal state: alpha = -i eta / (i delta + kappa/2)."""
        params = _with_resonator(hf_params, g31=0.0)
        kappa = params.resonator.kappa
        nth = params.thermal_occupation()
        drive = DriveParams(amplitude=3e5, detuning_mode=0.4 * kappa,
                            detuning_spin=0.0)
        eta = drive.amplitude * math.sqrt(kappa / 2.0)
        alpha = -1j * eta / (1j * drive.detuning_mode + kappa / 2.0)

        state, info = steady_state(params, xi=0.0, drive=drive)
        assert info["converged"]
        assert state.a_mean == pytest.approx(alpha, rel=1e-8)
        assert state.photon_n == pytest.approx(nth + abs(alpha) ** 2,
                                               rel=1e-8)
        assert state.aa == pytest.approx(alpha ** 2, rel=1e-6)
        assert abs(state.sigma13_mean) < 1e-10

    def test_driven_requires_drive(self, hf_params):
        with pytest.raises(ValueError):
            steady_state(hf_params, model="driven")


class TestThermalState:
    def test_layout(self, hf_params):
        state = thermal_state(hf_params)
        assert state.pop[0:3] == pytest.approx(np.full(3, 1 / 3))
        assert state.pop[3:].max() == 0.0
        assert state.photon_n == pytest.approx(hf_params.thermal_occupation())
        assert state.spin_photon == 0j


def test_trajectory_views(cooling_run):
    traj = cooling_run.trajectory
    assert traj.kind == "undriven"
    assert traj.populations.shape == (traj.times.size, 7)
    final = traj.final_state()
    assert isinstance(final, MomentState)
    assert final.photon_n == traj.photon_n[-1]
    temps = traj.mode_temperature()
    assert temps.shape == traj.times.shape
    assert temps.min() > 0.0


def test_driven_rhs_honors_window(hf_params):
    state = DrivenMomentState.from_undriven(thermal_state(hf_params))
    drive = DriveParams(amplitude=1e6, on_window=(1.0, 2.0))
    rhs_off = driven_rhs(state, hf_params, drive, t=0.0, xi=0.0)
    rhs_on = driven_rhs(state, hf_params, drive, t=1.5, xi=0.0)
    # the injection term acts on the field mean only while the window is on
    assert rhs_off.a_mean == 0j
    assert abs(rhs_on.a_mean) > 0.0
