"""High-level experiment drivers.

Each driver resolves a preset plus overrides into a concrete parameter
set, runs the requested model(s), and returns plain-data results that the
output layer can serialize: cooling pulses, pump-rate sweeps, driven Rabi
oscillations, steady-state response spectra (normal-mode splitting), and
mode-frequency sweeps across the two spin transitions.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.signal import find_peaks

from . import cumulant, ratemodel
from .cumulant import DriveParams, DrivenMomentState, Phase, Trajectory
from .errors import ClampWarning, DomainError
from .params import (SystemParams, heated_rates, power_from_pump_rate,
                     preset, pump_rate_from_power)

__all__ = [
    "ExperimentSpec", "DickeState", "CoolingResult", "SweepResult",
    "dicke_numbers", "collective_coupling", "resolve",
    "run_cooling_pulse", "run_pump_sweep", "run_rabi_oscillation",
    "run_rabi_splitting", "run_mode_detuning_sweep",
]

TWO_PI = 2.0 * math.pi


@dataclass
class ExperimentSpec:
    """Declarative description of one run.

    Only the fields relevant to the chosen driver are used; the rest keep
    their defaults.  ``overrides`` maps dotted parameter paths (for example
    ``"resonator.n_spins"``) onto replacement values applied after the
    preset is loaded.
    """

    preset_name: str = "high-frequency"
    overrides: dict = field(default_factory=dict)
    model: str = "cumulant"             # "cumulant" or "rate"
    heating: bool = False
    laser_power: float = 2.0            # W
    xi: float | None = None             # explicit pump rate wins over power
    # pulse schedule
    laser_on: float = 0.0
    laser_off: float = 0.02
    t_end: float = 0.04
    # coherent drive
    drive_amplitude: float = TWO_PI * 9.7e5
    drive_start: float = 0.0
    drive_stop: float = 5e-6
    drive_detuning: float = 0.0         # omega_drive - omega_m
    # sweep axes
    xi_grid: np.ndarray | None = None
    xi_min: float = 1.0
    xi_max: float = 1e7
    xi_points: int = 40
    powers: tuple = (0.01, 0.3, 1.0, 10.0)
    detuning_points: int = 201
    detuning_span: float = 0.0          # 0 -> automatic
    # solver
    rtol: float = 1e-8
    atol_populations: float = 1e-12
    atol_photon: float = 1e-6
    points_per_phase: int = 1000
    label: str = ""

    def __post_init__(self):
        if self.model not in ("cumulant", "rate"):
            raise DomainError(f"unknown model {self.model!r}")
        if self.xi_grid is not None:
            grid = np.asarray(self.xi_grid, dtype=float)
            if grid.ndim != 1 or grid.size < 1 or not np.all(np.isfinite(grid)):
                raise DomainError("xi_grid must be a finite 1-d array")
            if np.any(np.diff(grid) <= 0.0):
                raise DomainError("xi_grid must be strictly increasing")

    def atol_vector(self, dim: int) -> np.ndarray:
        atol = np.full(dim, self.atol_populations)
        atol[7] = self.atol_photon
        return atol


def _apply_override(params: SystemParams, path: str, value) -> SystemParams:
    group, _, name = path.partition(".")
    if not name:
        raise DomainError(f"override path {path!r} must look like "
                          "'group.field'")
    try:
        holder = getattr(params, group)
        replaced = replace(holder, **{name: value})
    except (AttributeError, TypeError) as exc:
        raise DomainError(f"unknown parameter override {path!r}") from exc
    return replace(params, **{group: replaced})


def resolve(spec: ExperimentSpec):
    """Preset + overrides + optional heating -> (params, xi, notes)."""
    params = preset(spec.preset_name)
    for path in sorted(spec.overrides):
        params = _apply_override(params, path, spec.overrides[path])
    notes = []
    if spec.heating:
        heated = heated_rates(params.rates, spec.laser_power, params.heating)
        res = params.resonator
        params = replace(
            params, rates=heated.rates,
            resonator=replace(res,
                              omega31=res.omega31 + heated.resonance_shift,
                              omega21=res.omega21 + heated.resonance_shift))
        notes.append(
            f"heating applied: lattice +{heated.delta_T:.6g} K, spin-lattice "
            f"rates x{heated.scale_factor:.6g}, transitions shifted by "
            f"{heated.resonance_shift:.6g} rad/s")
    xi = spec.xi if spec.xi is not None else pump_rate_from_power(
        spec.laser_power, params.optics, params.constants)
    return params, xi, notes


@dataclass(frozen=True)
class DickeState:
    """Collective-spin numbers of the two coupled levels.

    ``branch_probability`` is the share of the coupled-pair population
    sitting in the upper level; ``j_mean``/``m_mean`` are the averaged
    collective quantum numbers.  When the closed-form j(j+1) value turns
    negative (nearly unpolarized ensembles) ``j_mean`` is clamped to zero
    and ``clamped`` is set.
    """

    j0: float
    branch_probability: float
    j_mean: float
    m_mean: float
    clamped: bool = False


def dicke_numbers(pop1: float, pop3: float, n_spins: float) -> DickeState:
    """Collective quantum numbers of a product state with the given level
    populations (restricted to the two coupled levels)."""
    total = pop1 + pop3
    if total <= 0.0 or pop1 < 0.0 or pop3 < 0.0:
        raise DomainError("populations of the coupled levels must be "
                          "non-negative with a positive sum")
    p = pop3 / total
    j0 = 0.5 * n_spins
    bias = 2.0 * p - 1.0
    m_mean = j0 * bias
    jj1 = bias * bias * j0 * (j0 + 1.0) + 6.0 * p * (p - 1.0) * j0
    clamped = False
    if jj1 < 0.0:
        _warnings.warn(
            "collective j(j+1) came out negative (nearly unpolarized "
            "ensemble); clamping j to 0", ClampWarning, stacklevel=2)
        j_mean = 0.0
        clamped = True
    else:
        j_mean = 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * jj1))
    return DickeState(j0=j0, branch_probability=p, j_mean=j_mean,
                      m_mean=m_mean, clamped=clamped)


def collective_coupling(j_mean: float, g: float) -> float:
    """Enhanced coupling sqrt(2 j) * g of a collective state."""
    if j_mean < 0.0:
        raise DomainError("j_mean must be >= 0")
    return math.sqrt(2.0 * j_mean) * g


@dataclass
class CoolingResult:
    trajectory: Trajectory
    companion: Trajectory | None
    summary: dict
    warnings: list
    params: SystemParams
    xi: float


@dataclass
class SweepResult:
    axis_name: str
    axis: np.ndarray
    columns: dict
    summary: dict
    warnings: list
    params: SystemParams


def _rate_trajectory(params, xi_phases, y0, spec) -> Trajectory:
    plan = [(a, b, cumulant.pack_params(params, x)) for (a, b, x) in xi_phases]
    times, states = cumulant.integrate_flat(
        ratemodel.kernels.rate_rhs_flat, y0, plan, rtol=spec.rtol,
        atol=spec.atol_vector(8), points_per_phase=spec.points_per_phase)
    return Trajectory(times=times, states=states, kind="rate", params=params)


def run_cooling_pulse(spec: ExperimentSpec) -> CoolingResult:
    """Laser pulse on the thermal system: pump window, then relaxation.

    Integrates the selected model and, when that model is the moment
    closure, also the rate model as a companion for direct comparison.
    """
    params, xi, notes = resolve(spec)
    windows = []
    if spec.laser_on > 0.0:
        windows.append((0.0, spec.laser_on, 0.0))
    windows.append((spec.laser_on, spec.laser_off, xi))
    if spec.t_end > spec.laser_off:
        windows.append((spec.laser_off, spec.t_end, 0.0))

    init = cumulant.thermal_state(params)
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        if spec.model == "cumulant":
            phases = [Phase(a, b, xi=x) for (a, b, x) in windows]
            traj = cumulant.integrate(
                params, init, phases, rtol=spec.rtol,
                atol=spec.atol_vector(12),
                points_per_phase=spec.points_per_phase)
            companion = _rate_trajectory(params, windows,
                                         _rate_initial(params), spec)
        else:
            traj = _rate_trajectory(params, windows,
                                    _rate_initial(params), spec)
            companion = None

    notes += [str(w.message) for w in caught]
    summary = _pulse_summary(traj, params, spec, prefix="")
    if companion is not None:
        summary.update(_pulse_summary(companion, params, spec, prefix="rate_"))
    summary["xi_rad_s"] = xi
    summary["laser_power_W"] = spec.laser_power if spec.xi is None else \
        float("nan")
    return CoolingResult(trajectory=traj, companion=companion,
                         summary=summary, warnings=notes, params=params,
                         xi=xi)


def _rate_initial(params) -> np.ndarray:
    y = np.zeros(8)
    y[0:3] = 1.0 / 3.0
    y[7] = params.thermal_occupation()
    return y


def _pulse_summary(traj: Trajectory, params, spec, prefix: str) -> dict:
    n = traj.photon_n
    i_min = int(np.argmin(n))
    i_off = int(np.searchsorted(traj.times, spec.laser_off))
    i_off = min(i_off, n.size - 1)
    return {
        prefix + "photon_initial": float(n[0]),
        prefix + "photon_min": float(n[i_min]),
        prefix + "t_at_min_s": float(traj.times[i_min]),
        prefix + "photon_at_laser_off": float(n[i_off]),
        prefix + "photon_final": float(n[-1]),
        prefix + "T_eff_min_K": params.mode_temperature(max(n[i_min], 0.0)),
        prefix + "T_eff_at_laser_off_K":
            params.mode_temperature(max(n[i_off], 0.0)),
        prefix + "T_eff_final_K": params.mode_temperature(max(n[-1], 0.0)),
    }


def run_pump_sweep(spec: ExperimentSpec) -> SweepResult:
    """Steady state of both models across a grid of pump rates.

    The grid is walked in ascending order; each point warm-starts the
    Newton solve from its predecessor.
    """
    params, _, notes = resolve(spec)
    if spec.xi_grid is not None:
        grid = np.asarray(spec.xi_grid, dtype=float)
    else:
        grid = np.logspace(math.log10(spec.xi_min), math.log10(spec.xi_max),
                           spec.xi_points)

    n_cum = np.empty(grid.size)
    n_rate = np.empty(grid.size)
    pops = np.empty((grid.size, 7))
    guess_c = None
    guess_r = None
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        for i, xi in enumerate(grid):
            state_c, _ = cumulant.steady_state(params, xi=xi,
                                               model="cumulant",
                                               guess=guess_c, rtol=spec.rtol)
            y_r, _ = cumulant.steady_state(params, xi=xi, model="rate",
                                           guess=guess_r, rtol=spec.rtol)
            guess_c, guess_r = state_c, y_r
            n_cum[i] = state_c.photon_n
            n_rate[i] = y_r[7]
            pops[i] = state_c.pop
    notes += [str(w.message) for w in caught]

    t_cum = np.array([params.mode_temperature(max(v, 0.0)) for v in n_cum])
    t_rate = np.array([params.mode_temperature(max(v, 0.0)) for v in n_rate])
    power = np.array([power_from_pump_rate(xi, params.optics,
                                           params.constants) for xi in grid])

    columns = {"xi_rad_s": grid, "power_W": power,
               "photon_n_cumulant": n_cum, "T_eff_K_cumulant": t_cum,
               "photon_n_rate": n_rate, "T_eff_K_rate": t_rate}
    for level in range(7):
        columns[f"pop{level + 1}"] = pops[:, level]

    i_c = int(np.argmin(n_cum))
    i_r = int(np.argmin(n_rate))
    summary = {
        "photon_min_cumulant": float(n_cum[i_c]),
        "xi_at_min_cumulant": float(grid[i_c]),
        "T_eff_min_cumulant_K": float(t_cum[i_c]),
        "photon_min_rate": float(n_rate[i_r]),
        "xi_at_min_rate": float(grid[i_r]),
        "T_eff_min_rate_K": float(t_rate[i_r]),
        "T_eff_gap_K": float(t_cum[i_c] - t_rate[i_r]),
        "pop1_at_min": float(pops[i_c, 0]),
        "pop3_at_min": float(pops[i_c, 2]),
    }
    return SweepResult(axis_name="xi_rad_s", axis=grid, columns=columns,
                       summary=summary, warnings=notes, params=params)


def _resonant_drive(spec: ExperimentSpec, params: SystemParams,
                    window=None) -> DriveParams:
    """Drive at omega_m + drive_detuning, expressed in frame detunings."""
    res = params.resonator
    omega_d = res.omega_m + spec.drive_detuning
    return DriveParams(amplitude=spec.drive_amplitude,
                       detuning_mode=res.omega_m - omega_d,
                       detuning_spin=res.omega31 - omega_d,
                       on_window=window)


def run_rabi_oscillation(spec: ExperimentSpec) -> CoolingResult:
    """Coherent tone on the pre-cooled ensemble; photon-number dynamics.

    The laser stays on throughout: the system is first relaxed to the
    pumped steady state, then the tone is switched on at t = 0.
    """
    params, xi, notes = resolve(spec)
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        settled, info = cumulant.steady_state(params, xi=xi,
                                              model="cumulant",
                                              rtol=spec.rtol)
        window = (spec.drive_start, spec.drive_stop) \
            if spec.drive_start > 0.0 else None
        drive = _resonant_drive(spec, params, window=window)
        initial = DrivenMomentState.from_undriven(settled)
        phases = [Phase(0.0, spec.drive_stop, xi=xi, drive=drive)]
        traj = cumulant.integrate(params, initial, phases, rtol=spec.rtol,
                                  atol=spec.atol_vector(30),
                                  points_per_phase=max(
                                      spec.points_per_phase, 2000))
    notes += [str(w.message) for w in caught]

    n = traj.photon_n
    span = float(np.max(n) - np.min(n))
    prominence = max(1e-3 * span, 1e-12)
    peaks, _ = find_peaks(n, prominence=prominence)
    summary = {
        "photon_initial": float(n[0]),
        "photon_max": float(np.max(n)),
        "photon_contrast": span,
        "n_local_maxima": int(peaks.size),
        "maxima_times_s": [float(traj.times[k]) for k in peaks[:16]],
        "drive_amplitude_rad_s": spec.drive_amplitude,
        "xi_rad_s": xi,
    }
    return CoolingResult(trajectory=traj, companion=None, summary=summary,
                         warnings=notes, params=params, xi=xi)


def _collective_coupling_at(params, xi: float) -> tuple[float, DickeState]:
    pops = ratemodel.analytic_ground_populations(xi, params.rates)
    state = dicke_numbers(pops[0], pops[2], params.resonator.n_spins)
    return collective_coupling(state.j_mean, params.resonator.g31), state


def run_rabi_splitting(spec: ExperimentSpec) -> SweepResult:
    """Steady-state photon number versus drive detuning, per laser power.

    For each power the ensemble is pre-cooled to its pumped steady state;
    the driven steady state is then tracked across the detuning grid with
    warm-started Newton solves.
    """
    params, _, notes = resolve(spec)
    res = params.resonator

    xis = [pump_rate_from_power(p, params.optics, params.constants)
           for p in spec.powers]
    couplings = []
    dicke_states = []
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        for xi in xis:
            coup, state = _collective_coupling_at(params, xi)
            couplings.append(coup)
            dicke_states.append(state)
        span = spec.detuning_span if spec.detuning_span > 0.0 else \
            5.0 * max(max(couplings), 0.2 * res.kappa)
        grid = np.linspace(-span, span, spec.detuning_points)

        rows_power = []
        rows_detuning = []
        rows_photon = []
        per_power = {}
        for power, xi, coup, dstate in zip(spec.powers, xis, couplings,
                                           dicke_states):
            settled, _ = cumulant.steady_state(params, xi=xi,
                                               model="cumulant",
                                               rtol=spec.rtol)
            guess = DrivenMomentState.from_undriven(settled)
            photon = np.empty(grid.size)
            for i, det in enumerate(grid):
                drive = DriveParams(
                    amplitude=spec.drive_amplitude,
                    detuning_mode=-det,
                    detuning_spin=(res.omega31 - res.omega_m) - det)
                state, _ = cumulant.steady_state(params, xi=xi, drive=drive,
                                                 model="driven", guess=guess,
                                                 rtol=spec.rtol)
                guess = state
                photon[i] = state.photon_n
            rows_power.append(np.full(grid.size, power))
            rows_detuning.append(grid)
            rows_photon.append(photon)
            per_power[power] = _splitting_summary(grid, photon, coup, dstate)
    notes += [str(w.message) for w in caught]

    columns = {"power_W": np.concatenate(rows_power),
               "drive_detuning_rad_s": np.concatenate(rows_detuning),
               "photon_n": np.concatenate(rows_photon)}
    summary = {"detuning_span_rad_s": float(span),
               "drive_amplitude_rad_s": spec.drive_amplitude,
               "per_power": per_power}
    return SweepResult(axis_name="drive_detuning_rad_s",
                       axis=grid, columns=columns, summary=summary,
                       warnings=notes, params=params)


def _splitting_summary(grid, photon, coupling, dstate: DickeState) -> dict:
    span = float(np.max(photon) - np.min(photon))
    peaks, _ = find_peaks(photon, prominence=max(1e-3 * span, 1e-12))
    # plateau edges do not count; interior maxima only
    out = {
        "n_peaks": int(peaks.size),
        "peak_detunings_rad_s": [float(grid[k]) for k in peaks],
        "collective_coupling_rad_s": float(coupling),
        "expected_separation_rad_s": float(2.0 * coupling),
        "j_over_n": float(dstate.j_mean / (2.0 * dstate.j0)),
        "photon_peak": float(np.max(photon)),
    }
    if peaks.size == 2:
        sep = float(grid[peaks[1]] - grid[peaks[0]])
        out["peak_separation_rad_s"] = sep
        if coupling > 0.0:
            out["separation_over_expected"] = sep / (2.0 * coupling)
    return out


def run_mode_detuning_sweep(spec: ExperimentSpec) -> SweepResult:
    """Adiabatic photon number as the mode is tuned across both spin
    transitions, with single-transition overlays.

    The ground populations are taken from the full rate-model steady state
    at the nominal mode frequency (the mode exchange is far too weak to
    alter them) and reused across the grid.
    """
    params, xi, notes = resolve(spec)
    res = params.resonator
    center = 0.5 * (res.omega31 + res.omega21)
    split = abs(res.omega31 - res.omega21)
    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        coup, _ = _collective_coupling_at(params, xi)
        span = spec.detuning_span if spec.detuning_span > 0.0 else \
            max(5.0 * coup, 0.75 * split)
        grid = np.linspace(-span, span, spec.detuning_points)

        y_rate, _ = cumulant.steady_state(params, xi=xi, model="rate",
                                          rtol=spec.rtol)
        pops3 = y_rate[0:3]

        n_both = np.empty(grid.size)
        n_only31 = np.empty(grid.size)
        n_only21 = np.empty(grid.size)
        only21 = _apply_override(params, "resonator.g31", 0.0)
        for i, offset in enumerate(grid):
            omega = center + offset
            n_both[i] = ratemodel.two_transition_photon_number(
                pops3, params, xi, omega_m=omega)
            n_only31[i] = ratemodel.two_transition_photon_number(
                pops3, params, xi, omega_m=omega, include_21=False)
            n_only21[i] = ratemodel.two_transition_photon_number(
                pops3, only21, xi, omega_m=omega)
    notes += [str(w.message) for w in caught]

    t_eff = np.array([params.mode_temperature(max(v, 0.0)) for v in n_both])
    columns = {"omega_m_offset_rad_s": grid, "photon_n": n_both,
               "photon_n_only_31": n_only31, "photon_n_only_21": n_only21,
               "T_eff_K": t_eff}

    # contribution of the detuned 2<->1 channel at the 3<->1 resonance
    at31 = ratemodel.two_transition_photon_number(pops3, params, xi,
                                                  omega_m=res.omega31)
    at31_single = ratemodel.two_transition_photon_number(
        pops3, params, xi, omega_m=res.omega31, include_21=False)
    summary = {
        "xi_rad_s": xi,
        "span_rad_s": float(span),
        "dip_offset_rad_s": float(grid[int(np.argmin(n_both))]),
        "photon_at_31_resonance": float(at31),
        "photon_at_31_resonance_single": float(at31_single),
        "off_resonant_contribution": float(at31_single / at31 - 1.0),
        "pop1": float(pops3[0]), "pop2": float(pops3[1]),
        "pop3": float(pops3[2]),
    }
    return SweepResult(axis_name="omega_m_offset_rad_s", axis=grid,
                       columns=columns, summary=summary, warnings=notes,
                       params=params)
