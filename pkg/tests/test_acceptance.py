"""Acceptance gate.

Each test prints exactly one ``ACCEPTANCE`` line with the measured values
against the stated bounds, then asserts them.  Bounds and tolerances are
stated inline; every numeric anchor was measured against an independent
computation before being frozen here.
"""

import time

import numpy as np

from nvcool.cumulant import Phase, integrate, steady_state, thermal_state
from nvcool.experiments import (ExperimentSpec, collective_coupling,
                                dicke_numbers, run_mode_detuning_sweep)
from nvcool.params import (TWO_PI, HeatingModel, NvRates,
                           effective_temperature, heated_rates,
                           pump_rate_from_power, preset,
                           thermal_photon_number)


def _report(number: int, slug: str, checks) -> None:
    """checks: list of (label, value, lo, hi); prints one line, then
    asserts every value lies inside its bounds."""
    parts = []
    ok = True
    for label, value, lo, hi in checks:
        inside = lo <= value <= hi
        ok = ok and inside
        parts.append(f"{label}={value:.6g} in [{lo:.6g}, {hi:.6g}]"
                     + ("" if inside else " <-- out"))
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number:02d} {slug}: {status} ({'; '.join(parts)})")
    assert ok, f"criterion {number} ({slug}): " + "; ".join(parts)


def test_01_thermal_anchors():
    n_hf = thermal_photon_number(TWO_PI * 9.22e9, 293.0)
    n_lf = thermal_photon_number(TWO_PI * 2.872e9, 293.0)
    _report(1, "thermal-anchors", [
        ("n_th(9.22GHz)", n_hf, 660.0, 662.0),
        ("n_th(2.872GHz)", n_lf, 2123.0, 2127.0),
    ])


def test_02_cooling_dynamics_anchors(hf_params):
    xi = pump_rate_from_power(2.0, hf_params.optics)
    state_c, info_c = steady_state(hf_params, xi=xi)
    assert info_c["converged"]
    t_c = hf_params.mode_temperature(state_c.photon_n)
    flat_r, info_r = steady_state(hf_params, xi=xi, model="rate")
    assert info_r["converged"]
    t_r = hf_params.mode_temperature(flat_r[7])

    started = time.perf_counter()
    integrate(hf_params, thermal_state(hf_params),
              [Phase(0.0, 0.02, xi=xi), Phase(0.02, 0.04, xi=0.0)],
              points_per_phase=200)
    runtime = time.perf_counter() - started

    _report(2, "cooling-dynamics", [
        ("cumulant_n", state_c.photon_n, 290.0, 300.0),
        ("cumulant_T_K", t_c, 129.0, 135.0),
        ("rate_n", flat_r[7], 252.0, 262.0),
        ("rate_T_K", t_r, 111.0, 117.0),
        ("trajectory_runtime_s", runtime, 0.0, 30.0),
    ])


def test_03_pump_sweep_minima(hf_sweep):
    s = hf_sweep.summary
    _report(3, "pump-sweep-minima", [
        ("T_min_cumulant_K", s["T_eff_min_cumulant_K"], 113.0, 119.0),
        ("xi_at_min", s["xi_at_min_cumulant"], 3e4, 3e5),
        ("T_min_rate_K", s["T_eff_min_rate_K"], 83.0, 91.0),
        ("cumulant_minus_rate_K", s["T_eff_gap_K"], 24.0, 34.0),
    ])


def test_04_ensemble_scaling(hf_sweep_large):
    s = hf_sweep_large.summary
    _report(4, "ensemble-scaling", [
        ("photon_min", s["photon_min_cumulant"], 68.0, 74.0),
        ("T_min_K", s["T_eff_min_cumulant_K"], 30.0, 34.0),
    ])


def test_05_low_frequency_replication(lf_params, lf_sweep):
    xi = pump_rate_from_power(2.0, lf_params.optics)
    state, info = steady_state(lf_params, xi=xi)
    assert info["converged"]
    t_2w = lf_params.mode_temperature(state.photon_n)

    n_cum = lf_sweep.columns["photon_n_cumulant"]
    n_rate = lf_sweep.columns["photon_n_rate"]
    pointwise = float(np.max(np.abs(n_cum - n_rate) / n_cum))

    _report(5, "low-frequency-replication", [
        ("T_at_2W_K", t_2w, 185.0, 191.0),
        ("T_sweep_min_K", lf_sweep.summary["T_eff_min_cumulant_K"],
         167.0, 173.0),
        ("model_agreement", pointwise, 0.0, 0.01),
    ])


def test_06_collective_coupling_anchors():
    state = dicke_numbers(0.73, 0.13, 4e13)
    j_over_n = state.j_mean / 4e13
    small = collective_coupling(state.j_mean, 0.69)
    large = collective_coupling(dicke_numbers(0.73, 0.13, 4e14).j_mean,
                                0.69)
    anchor_small = TWO_PI * 0.57e6
    anchor_large = TWO_PI * 1.8e6
    _report(6, "collective-coupling", [
        ("J_over_N", j_over_n, 0.34, 0.36),
        ("coupling_4e13", small, 0.95 * anchor_small, 1.05 * anchor_small),
        ("coupling_4e14", large, 0.95 * anchor_large, 1.05 * anchor_large),
    ])


def test_07_cqed_gates(splitting_run, oscillation_runs):
    per_power = splitting_run.summary["per_power"]
    weak_peaks = per_power[min(per_power)]["n_peaks"]
    checks = [("peaks_at_lowest_power", float(weak_peaks), 1.0, 1.0)]
    for power, entry in sorted(per_power.items()):
        if power < 1.0:
            continue
        checks.append((f"peaks_at_{power:g}W", float(entry["n_peaks"]),
                       2.0, 2.0))
        checks.append((f"separation_ratio_{power:g}W",
                       entry["separation_over_expected"], 0.8, 1.2))
    checks.append(("maxima_at_10W",
                   float(oscillation_runs[10.0].summary["n_local_maxima"]),
                   2.0, np.inf))
    checks.append(("maxima_at_0.01W",
                   float(oscillation_runs[0.01].summary["n_local_maxima"]),
                   0.0, 0.0))
    _report(7, "cqed-gates", checks)


def test_08_two_transition_contribution():
    spec = ExperimentSpec(preset_name="low-frequency", laser_power=2.0,
                          detuning_points=21)
    result = run_mode_detuning_sweep(spec)
    contribution = result.summary["off_resonant_contribution"]
    _report(8, "two-transition-contribution", [
        ("off_resonant_contribution", contribution, 0.04, 0.06),
    ])


def test_09_oracle_gates(oracle_results):
    checks = []
    for gate in oracle_results:
        worst = max(gate.deviations[c] / gate.tolerances[c]
                    for c in gate.tolerances)
        checks.append((f"{gate.name}_worst_ratio", worst, 0.0, 1.0))
    _report(9, "oracle-gates", checks)
    for gate in oracle_results:
        assert gate.passed, gate.summary()


def test_10_property_suites(hf_params, cooling_run):
    # population conservation along an emitted trajectory
    defect = float(np.max(np.abs(
        cooling_run.trajectory.populations.sum(axis=1) - 1.0)))

    # the pump-off fixed point is stationary to solver tolerance
    state, info = steady_state(hf_params, xi=0.0)
    assert info["converged"]
    traj = integrate(hf_params, state, [Phase(0.0, 2e-3, xi=0.0)],
                     rtol=1e-8, points_per_phase=100)
    drift = float(np.max(np.abs(traj.photon_n - state.photon_n)))

    # inverse identity between occupation and effective temperature
    rng = np.random.default_rng(3)
    worst_rel = 0.0
    for _ in range(200):
        omega = rng.uniform(1e8, 1e11)
        temp = rng.uniform(1.0, 600.0)
        n = thermal_photon_number(omega, temp)
        if n == 0.0:
            continue
        back = effective_temperature(omega, n)
        worst_rel = max(worst_rel, abs(back - temp) / temp)

    # heated spin-lattice rates at +125 K
    heating = HeatingModel(dT_per_watt=1.25)
    rates = NvRates(k31=26.0, k13=26.0, k21=83.0, k12=83.0)
    heated = heated_rates(rates, 100.0, heating)

    _report(10, "property-suites", [
        ("conservation_defect", defect, 0.0, 1e-7),
        ("fixed_point_drift", drift, 0.0, 1e-3),
        ("inverse_identity_rel", worst_rel, 0.0, 1e-12),
        ("heated_26", heated.rates.k31, 152.0, 156.0),
        ("heated_83", heated.rates.k21, 488.0, 492.0),
    ])


def test_presets_importable():
    # sanity: both presets resolve and expose the documented frequencies
    hf = preset("high-frequency")
    lf = preset("low-frequency")
    assert hf.resonator.omega_m == TWO_PI * 9.22e9
    assert lf.resonator.omega_m == TWO_PI * 2.872e9
