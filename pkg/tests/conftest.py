"""Shared fixtures.

The expensive artifacts (exact-solver comparisons, steady-state sweeps,
the reference cooling pulse) are computed once per session and shared
between the module tests and the acceptance gate.
"""

import warnings

import numpy as np
import pytest

from nvcool import lindblad, preset
from nvcool.experiments import (ExperimentSpec, run_cooling_pulse,
                                run_pump_sweep, run_rabi_oscillation,
                                run_rabi_splitting)


@pytest.fixture()
def hf_params():
    return preset("high-frequency")


@pytest.fixture()
def lf_params():
    return preset("low-frequency")


@pytest.fixture(scope="session")
def oracle_results():
    """Full exact-solver comparison suite (the slowest fixture)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return lindblad.run_oracle_suite()


@pytest.fixture(scope="session")
def hf_sweep():
    """Default pump-rate sweep on the high-frequency device."""
    return run_pump_sweep(ExperimentSpec())


@pytest.fixture(scope="session")
def hf_sweep_large():
    """Pump-rate sweep with the 1.6e15-spin ensemble."""
    return run_pump_sweep(
        ExperimentSpec(overrides={"resonator.n_spins": 1.6e15}))


@pytest.fixture(scope="session")
def lf_sweep():
    """Pump-rate sweep on the low-frequency device."""
    return run_pump_sweep(ExperimentSpec(preset_name="low-frequency"))


@pytest.fixture(scope="session")
def cooling_run():
    """2 W pump pulse (20 ms on, 20 ms off) on the high-frequency device."""
    return run_cooling_pulse(ExperimentSpec(points_per_phase=400))


@pytest.fixture(scope="session")
def splitting_run():
    """Steady drive-detuning sweep at N = 4e14 over the standard powers."""
    return run_rabi_splitting(
        ExperimentSpec(overrides={"resonator.n_spins": 4e14}))


@pytest.fixture(scope="session")
def oscillation_runs():
    """Driven photon dynamics at 10 W and 0.01 W, N = 4e14."""
    runs = {}
    for power in (10.0, 0.01):
        runs[power] = run_rabi_oscillation(
            ExperimentSpec(overrides={"resonator.n_spins": 4e14},
                           laser_power=power))
    return runs
