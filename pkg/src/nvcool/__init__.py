"""Cooling a microwave mode with an optically pumped spin ensemble.

The package models nitrogen-vacancy–like seven-level emitters collectively
coupled to a single microwave resonator mode:

* :mod:`nvcool.params` — device presets, unit helpers, laser heating;
* :mod:`nvcool.cumulant` — second-order moment closure (undriven and
  coherently driven), stiff integration and steady-state solves;
* :mod:`nvcool.ratemodel` — adiabatic rate model, effective optical
  pumping rates, closed-form populations and photon numbers;
* :mod:`nvcool.lindblad` — exact density-matrix solver for small systems,
  used as a correctness oracle;
* :mod:`nvcool.experiments` — cooling pulses, pump sweeps, Rabi
  oscillations/splittings, mode-detuning sweeps;
* :mod:`nvcool.config` / :mod:`nvcool.output` / :mod:`nvcool.cli` — run
  configuration, serialization, command line.
"""

from ._version import __version__
from .cumulant import (DriveParams, DrivenMomentState, MomentState, Phase,
                       Trajectory, integrate, steady_state, thermal_state)
from .errors import (ClampWarning, ConfigError, DegenerateRatesError,
                     DomainError, FallbackWarning, MasingThresholdError,
                     NonConvergenceError, NumericalFailureError,
                     StiffnessError, TruncationWarning)
from .experiments import (CoolingResult, DickeState, ExperimentSpec,
                          SweepResult, collective_coupling, dicke_numbers,
                          resolve, run_cooling_pulse, run_mode_detuning_sweep,
                          run_pump_sweep, run_rabi_oscillation,
                          run_rabi_splitting)
from .kernels import BACKEND
from .params import (HeatedRates, HeatingModel, NvRates, OpticsParams,
                     PhysicalConstants, ResonatorParams, SystemParams,
                     PRESET_NAMES, effective_temperature, heated_rates,
                     preset, power_from_pump_rate, pump_rate_from_power,
                     thermal_photon_number)
from .ratemodel import (AnalyticCoefficients, ComplexDetuning,
                        EffectiveGroundRates, adiabatic_photon_number,
                        analytic_ground_populations,
                        analytic_population_dynamics, effective_ground_rates,
                        energy_transfer_rate, extend_to_seven_levels,
                        population_decay_rate, reduced_rate_rhs,
                        two_transition_photon_number)

__all__ = [
    "__version__", "BACKEND",
    # parameters
    "PhysicalConstants", "NvRates", "ResonatorParams", "OpticsParams",
    "HeatingModel", "HeatedRates", "SystemParams", "PRESET_NAMES", "preset",
    "thermal_photon_number", "effective_temperature",
    "pump_rate_from_power", "power_from_pump_rate", "heated_rates",
    # moment closure
    "MomentState", "DrivenMomentState", "DriveParams", "Phase", "Trajectory",
    "thermal_state", "integrate", "steady_state",
    # rate model
    "ComplexDetuning", "EffectiveGroundRates", "AnalyticCoefficients",
    "energy_transfer_rate", "effective_ground_rates", "reduced_rate_rhs",
    "adiabatic_photon_number", "two_transition_photon_number",
    "analytic_ground_populations", "analytic_population_dynamics",
    "population_decay_rate", "extend_to_seven_levels",
    # experiments
    "ExperimentSpec", "DickeState", "CoolingResult", "SweepResult",
    "dicke_numbers", "collective_coupling", "resolve", "run_cooling_pulse",
    "run_pump_sweep", "run_rabi_oscillation", "run_rabi_splitting",
    "run_mode_detuning_sweep",
    # errors
    "ConfigError", "DomainError", "MasingThresholdError",
    "DegenerateRatesError", "NumericalFailureError", "StiffnessError",
    "NonConvergenceError", "TruncationWarning", "ClampWarning",
    "FallbackWarning",
]
