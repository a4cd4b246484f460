"""High-level experiment drivers: collective angular-momentum bookkeeping,
parameter resolution, and the shapes/invariants of each run product."""

import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvcool.errors import ClampWarning, DomainError
from nvcool.experiments import (ExperimentSpec, collective_coupling,
                                dicke_numbers, resolve, run_cooling_pulse,
                                run_mode_detuning_sweep,
                                run_rabi_oscillation)
from nvcool.params import TWO_PI, preset, pump_rate_from_power


class TestDickeNumbers:
    def test_fully_polarized(self):
        state = dicke_numbers(1.0, 0.0, 1e6)
        assert state.j_mean == pytest.approx(5e5)
        assert state.m_mean == pytest.approx(-5e5)
        assert not state.clamped

    def test_fully_inverted(self):
        state = dicke_numbers(0.0, 1.0, 1e6)
        assert state.j_mean == pytest.approx(5e5)
        assert state.m_mean == pytest.approx(5e5)

    def test_unpolarized_clamps(self):
        with pytest.warns(ClampWarning):
            state = dicke_numbers(0.5, 0.5, 1e6)
        assert state.clamped
        assert state.j_mean >= 0.0

    def test_reference_polarization(self):
        """Measured anchor: the pumped working point of the
        high-frequency device."""
        state = dicke_numbers(0.73, 0.13, 4e13)
        assert state.j_mean / 4e13 == pytest.approx(0.35, abs=0.01)

    @given(p1=st.floats(0.0, 1.0), p3=st.floats(0.0, 1.0),
           n=st.floats(2.0, 1e16))
    @settings(max_examples=80, deadline=None)
    def test_bounds(self, p1, p3, n):
        if p1 + p3 <= 1e-12:
            return
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ClampWarning)
            state = dicke_numbers(p1, p3, n)
        j0 = n / 2.0
        assert 0.0 <= state.j_mean <= j0 * (1 + 1e-9)
        assert abs(state.m_mean) <= j0 * (1 + 1e-9)

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            dicke_numbers(-0.1, 0.5, 100.0)
        with pytest.raises(DomainError):
            dicke_numbers(0.0, 0.0, 100.0)


class TestCollectiveCoupling:
    def test_zero_j(self):
        assert collective_coupling(0.0, 0.69) == 0.0

    def test_reference_values(self):
        """Measured anchors for the pumped working point at two ensemble
        sizes of the high-frequency device."""
        small = collective_coupling(dicke_numbers(0.73, 0.13, 4e13).j_mean,
                                    0.69)
        assert small == pytest.approx(TWO_PI * 0.57e6, rel=0.05)
        large = collective_coupling(dicke_numbers(0.73, 0.13, 4e14).j_mean,
                                    0.69)
        assert large == pytest.approx(TWO_PI * 1.8e6, rel=0.05)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            collective_coupling(-1.0, 0.69)


class TestResolve:
    def test_defaults(self):
        spec = ExperimentSpec(preset_name="high-frequency")
        params, xi, notes = resolve(spec)
        assert params.resonator.g31 == preset("high-frequency").resonator.g31
        assert xi == pytest.approx(
            pump_rate_from_power(spec.laser_power, params.optics))
        assert notes == []

    def test_explicit_xi_wins_over_power(self):
        spec = ExperimentSpec(preset_name="high-frequency", xi=123.0,
                              laser_power=5.0)
        _params, xi, _notes = resolve(spec)
        assert xi == 123.0

    def test_overrides(self):
        spec = ExperimentSpec(
            preset_name="high-frequency",
            overrides={"resonator.g31": 0.5, "rates.k31": 100.0})
        params, _xi, _notes = resolve(spec)
        assert params.resonator.g31 == 0.5
        assert params.rates.k31 == 100.0

    def test_unknown_override_rejected(self):
        spec = ExperimentSpec(preset_name="high-frequency",
                              overrides={"resonator.bogus": 1.0})
        with pytest.raises(DomainError):
            resolve(spec)

    def test_heating_scales_rates_and_shifts_lines(self):
        """A managed-heating device: 1.25 K/W instead of the default."""
        spec = ExperimentSpec(preset_name="high-frequency", heating=True,
                              overrides={"heating.dT_per_watt": 1.25},
                              laser_power=100.0)
        params, _xi, notes = resolve(spec)
        base = preset("high-frequency")
        scale = ((293.0 + 125.0) / 293.0) ** 5
        assert params.rates.k31 == pytest.approx(base.rates.k31 * scale)
        shift = base.heating.dD_per_kelvin * 125.0
        assert params.resonator.omega31 == pytest.approx(
            base.resonator.omega31 + shift)
        assert params.resonator.omega21 == pytest.approx(
            base.resonator.omega21 + shift)
        # pump cycle rates are not lattice-mediated
        assert params.rates.k_sp == base.rates.k_sp
        assert len(notes) == 1 and "heating" in notes[0]

    def test_invalid_model_rejected(self):
        with pytest.raises(DomainError):
            ExperimentSpec(preset_name="high-frequency", model="bogus")


class TestCoolingPulse:
    def test_mode_cools_then_recovers(self, cooling_run):
        traj = cooling_run.trajectory
        n = traj.photon_n
        assert n.min() < n[0] * 0.6
        assert abs(n[-1] - n[0]) < 2.0

    def test_summary_fields(self, cooling_run):
        s = cooling_run.summary
        for key in ("photon_initial", "photon_min", "T_eff_min_K",
                    "photon_final", "rate_photon_min", "rate_T_eff_min_K",
                    "xi_rad_s"):
            assert key in s
        assert s["photon_min"] < s["photon_initial"]
        assert s["T_eff_min_K"] == pytest.approx(
            cooling_run.trajectory.mode_temperature().min(), rel=1e-9)

    def test_companion_rate_model_tracks(self, cooling_run):
        companion = cooling_run.companion
        assert companion is not None
        assert companion.kind == "rate"
        # the rate reduction cools deeper (no dressed-state repulsion)
        assert companion.states[:, 7].min() < \
            cooling_run.trajectory.photon_n.min()

    def test_populations_polarize_during_pulse(self, cooling_run):
        traj = cooling_run.trajectory
        on_mask = traj.times <= 1e-3
        pop1 = traj.populations[on_mask, 0]
        assert pop1[0] == pytest.approx(1 / 3, abs=1e-6)
        assert pop1[-1] > pop1[0] + 0.1


class TestPumpSweep:
    def test_columns_and_shapes(self, hf_sweep):
        for name in ("xi_rad_s", "power_W", "photon_n_cumulant",
                     "T_eff_K_cumulant", "photon_n_rate", "T_eff_K_rate"):
            assert name in hf_sweep.columns
            assert hf_sweep.columns[name].shape == hf_sweep.axis.shape

    def test_u_shape(self, hf_sweep):
        """Cooling deepens with pump rate, then saturation heating takes
        over: exactly one interior minimum."""
        n = hf_sweep.columns["photon_n_cumulant"]
        sign = np.sign(np.diff(n))
        changes = np.nonzero(np.diff(sign) != 0)[0]
        assert len(changes) == 1
        k = int(np.argmin(n))
        assert 0 < k < n.size - 1

    def test_rate_model_cools_deeper(self, hf_sweep):
        assert (hf_sweep.summary["T_eff_min_rate_K"]
                < hf_sweep.summary["T_eff_min_cumulant_K"])

    def test_monotone_axis(self, hf_sweep):
        assert np.all(np.diff(hf_sweep.axis) > 0)


class TestRabiOscillation:
    def test_strong_drive_oscillates(self, oscillation_runs):
        strong = oscillation_runs[10.0]
        assert strong.summary["n_local_maxima"] >= 3

    def test_weak_pump_does_not(self, oscillation_runs):
        weak = oscillation_runs[0.01]
        assert weak.summary["n_local_maxima"] <= 1

    def test_zero_drive_flat(self):
        spec = ExperimentSpec(preset_name="high-frequency",
                              overrides={"resonator.n_spins": 4e14},
                              laser_power=10.0, drive_amplitude=0.0,
                              drive_stop=2e-6, points_per_phase=400)
        result = run_rabi_oscillation(spec)
        assert result.summary["n_local_maxima"] == 0
        assert result.summary["photon_contrast"] < 1e-6


class TestRabiSplitting:
    def test_peak_count_grows_with_power(self, splitting_run):
        per_power = splitting_run.summary["per_power"]
        weak = per_power[min(per_power)]
        strong = per_power[max(per_power)]
        assert weak["n_peaks"] == 1
        assert strong["n_peaks"] == 2

    def test_split_matches_collective_coupling(self, splitting_run):
        per_power = splitting_run.summary["per_power"]
        strong = per_power[max(per_power)]
        assert strong["peak_separation_rad_s"] == pytest.approx(
            strong["expected_separation_rad_s"], rel=0.2)

    def test_columns(self, splitting_run):
        for name in ("power_W", "drive_detuning_rad_s", "photon_n"):
            assert name in splitting_run.columns
        power = splitting_run.columns["power_W"]
        det = splitting_run.columns["drive_detuning_rad_s"]
        assert power.shape == det.shape


class TestModeDetuningSweep:
    def test_second_transition_contributes(self):
        spec = ExperimentSpec(preset_name="high-frequency",
                              laser_power=2.0, detuning_points=41)
        result = run_mode_detuning_sweep(spec)
        n_both = result.columns["photon_n"]
        n_only31 = result.columns["photon_n_only_31"]
        # the detuned 2<->1 transition is a net absorber everywhere
        assert np.all(n_both <= n_only31 + 1e-9)
        assert result.summary["off_resonant_contribution"] > 0.0

    def test_axis_covers_both_lines(self):
        spec = ExperimentSpec(preset_name="high-frequency",
                              laser_power=2.0, detuning_points=21)
        result = run_mode_detuning_sweep(spec)
        res = preset("high-frequency").resonator
        center = 0.5 * (res.omega31 + res.omega21)
        omega = center + result.columns["omega_m_offset_rad_s"]
        assert omega.min() < res.omega21 < res.omega31 < omega.max()
