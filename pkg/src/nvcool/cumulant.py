"""Closed moment equations of the spin ensemble coupled to the microwave mode.

Expectation values are propagated with a second-order closure: two-operator
correlations between the mode and the coupled spin transition (and between
pairs of spins) are kept, three-operator moments are factorized.  Identical
spins are exploited so the system size is independent of the ensemble size.

Two variants are implemented:

* undriven (12 equations) -- laser pumping and thermal contact only, in the
  frame rotating at the 3<->1 transition frequency;
* driven (30 equations) -- adds a coherent microwave tone, in the frame
  rotating at the drive frequency, where first moments and further mixed
  second moments acquire nonzero values.

States are exposed as dataclasses; the integrators work on flat float
vectors whose layout is documented in :mod:`nvcool.kernels_py`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .errors import (FallbackWarning, NonConvergenceError,
                     NumericalFailureError, StiffnessError)
from .params import SystemParams, thermal_photon_number

__all__ = [
    "MomentState", "DrivenMomentState", "DriveParams", "Phase", "Trajectory",
    "thermal_state", "undriven_rhs", "driven_rhs", "integrate",
    "steady_state",
]


@dataclass
class MomentState:
    """Moments tracked by the undriven closure.

    Attributes
    ----------
    pop : ndarray, shape (7,)
        Populations of the seven levels.
    photon_n : float
        Mode occupation <a^dag a>.
    spin_photon : complex
        <a^dag sigma1^13>, the mode/spin-transition correlation.
    spin_spin : complex
        <sigma1^31 sigma2^13>, the pair correlation between two spins.
    """

    pop: np.ndarray
    photon_n: float
    spin_photon: complex = 0j
    spin_spin: complex = 0j

    def to_flat(self) -> np.ndarray:
        y = np.empty(kernels.N_UNDRIVEN)
        y[0:7] = self.pop
        y[7] = self.photon_n
        y[8] = self.spin_photon.real
        y[9] = self.spin_photon.imag
        y[10] = self.spin_spin.real
        y[11] = self.spin_spin.imag
        return y

    @classmethod
    def from_flat(cls, y) -> "MomentState":
        return cls(pop=np.array(y[0:7]), photon_n=float(y[7]),
                   spin_photon=complex(y[8], y[9]),
                   spin_spin=complex(y[10], y[11]))

    def population_defect(self) -> float:
        """Deviation of the total population from one."""
        return abs(float(np.sum(self.pop)) - 1.0)


@dataclass
class DrivenMomentState(MomentState):
    """Moments tracked by the driven closure (frame of the drive).

    Adds the first moments and the mixed second moments that a coherent
    tone makes nonzero: <a>, <sigma1^13>, <a a>, <a sigma1^13>,
    <a sigma1^11>, <a sigma1^33>, <sigma1^13 sigma2^13>,
    <sigma1^11 sigma2^13>, and <sigma1^33 sigma2^13>.
    """

    a_mean: complex = 0j
    sigma13_mean: complex = 0j
    aa: complex = 0j
    a_sigma13: complex = 0j
    a_pop1: complex = 0j
    a_pop3: complex = 0j
    sigma13_sigma13: complex = 0j
    pop1_sigma13: complex = 0j
    pop3_sigma13: complex = 0j

    def to_flat(self) -> np.ndarray:
        y = np.empty(kernels.N_DRIVEN)
        y[0:12] = super().to_flat()
        pairs = (self.a_mean, self.sigma13_mean, self.aa, self.a_sigma13,
                 self.a_pop1, self.a_pop3, self.sigma13_sigma13,
                 self.pop1_sigma13, self.pop3_sigma13)
        for k, value in enumerate(pairs):
            y[12 + 2 * k] = value.real
            y[13 + 2 * k] = value.imag
        return y

    @classmethod
    def from_flat(cls, y) -> "DrivenMomentState":
        pairs = [complex(y[12 + 2 * k], y[13 + 2 * k]) for k in range(9)]
        return cls(pop=np.array(y[0:7]), photon_n=float(y[7]),
                   spin_photon=complex(y[8], y[9]),
                   spin_spin=complex(y[10], y[11]),
                   a_mean=pairs[0], sigma13_mean=pairs[1], aa=pairs[2],
                   a_sigma13=pairs[3], a_pop1=pairs[4], a_pop3=pairs[5],
                   sigma13_sigma13=pairs[6], pop1_sigma13=pairs[7],
                   pop3_sigma13=pairs[8])

    @classmethod
    def from_undriven(cls, state: MomentState) -> "DrivenMomentState":
        """Embed an undriven state; the added moments start at zero.

        The kept correlations are invariant under the frame change because
        mode and spin phases cancel inside them.
        """
        return cls(pop=np.array(state.pop), photon_n=state.photon_n,
                   spin_photon=state.spin_photon, spin_spin=state.spin_spin)


@dataclass(frozen=True)
class DriveParams:
    """Coherent microwave tone.

    Attributes
    ----------
    amplitude : float
        Drive strength Omega (rad/s); it enters the equations only as the
        injection rate Omega * sqrt(kappa/2).
    detuning_mode : float
        omega_m - omega_drive (rad/s).
    detuning_spin : float
        omega31 - omega_drive (rad/s).
    on_window : tuple(float, float) or None
        Time window [start, stop] during which the tone is applied;
        ``None`` means always on.
    """

    amplitude: float
    detuning_mode: float = 0.0
    detuning_spin: float = 0.0
    on_window: tuple[float, float] | None = None

    def active(self, t: float) -> bool:
        if self.on_window is None:
            return True
        return self.on_window[0] <= t <= self.on_window[1]


@dataclass(frozen=True)
class Phase:
    """One segment of a piecewise-constant schedule."""

    t_start: float
    t_stop: float
    xi: float = 0.0
    drive: DriveParams | None = None

    def __post_init__(self):
        if not (self.t_stop > self.t_start):
            raise ValueError("phase must have t_stop > t_start")


@dataclass
class Trajectory:
    """Result of :func:`integrate`.

    ``states[i]`` is the flat moment vector at ``times[i]``; convenience
    views decode the common channels.
    """

    times: np.ndarray
    states: np.ndarray
    kind: str                      # "undriven" | "driven" | "rate"
    params: SystemParams
    warnings: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def populations(self) -> np.ndarray:
        return self.states[:, 0:7]

    @property
    def photon_n(self) -> np.ndarray:
        return self.states[:, 7]

    def mode_temperature(self) -> np.ndarray:
        """Effective mode temperature along the trajectory."""
        out = np.empty_like(self.photon_n)
        for i, n in enumerate(self.photon_n):
            out[i] = self.params.mode_temperature(max(n, 0.0))
        return out

    def state_at(self, index: int):
        y = self.states[index]
        if self.kind == "driven":
            return DrivenMomentState.from_flat(y)
        if self.kind == "undriven":
            return MomentState.from_flat(y)
        return y.copy()

    def final_state(self):
        return self.state_at(-1)


def thermal_state(params: SystemParams) -> MomentState:
    """Room-temperature starting point: equally populated ground triplet,
    empty excited levels, mode in thermal equilibrium, no correlations."""
    pop = np.zeros(7)
    pop[0:3] = 1.0 / 3.0
    return MomentState(pop=pop, photon_n=params.thermal_occupation())


def pack_params(params: SystemParams, xi: float,
                drive: DriveParams | None = None,
                drive_active: bool = True,
                omega_m: float | None = None) -> np.ndarray:
    """Build the flat parameter vector shared by all kernels."""
    r = params.rates
    res = params.resonator
    omega = res.omega_m if omega_m is None else omega_m
    par = np.zeros(kernels.N_PAR)
    par[kernels.PAR_XI] = xi
    par[kernels.PAR_KSP] = r.k_sp
    par[kernels.PAR_K47] = r.k47
    par[kernels.PAR_K57] = r.k57
    par[kernels.PAR_K67] = r.k67
    par[kernels.PAR_K71] = r.k71
    par[kernels.PAR_K72] = r.k72
    par[kernels.PAR_K73] = r.k73
    par[kernels.PAR_K31] = r.k31
    par[kernels.PAR_K13] = r.k13
    par[kernels.PAR_K21] = r.k21
    par[kernels.PAR_K12] = r.k12
    par[kernels.PAR_CHI3] = r.chi3
    par[kernels.PAR_KAPPA] = res.kappa
    par[kernels.PAR_NTH] = thermal_photon_number(omega, res.bath_temperature,
                                                 params.constants)
    par[kernels.PAR_G] = res.g31
    par[kernels.PAR_NSPINS] = res.n_spins
    par[kernels.PAR_DELTA] = omega - res.omega31
    if drive is not None:
        if drive_active:
            par[kernels.PAR_ETA] = drive.amplitude * math.sqrt(res.kappa / 2.0)
        par[kernels.PAR_DELTA_M] = drive.detuning_mode + (omega - res.omega_m)
        par[kernels.PAR_DELTA_3] = drive.detuning_spin
    return par


def undriven_rhs(state: MomentState, params: SystemParams,
                 xi: float | None = None) -> MomentState:
    """Time derivative of an undriven moment state."""
    par = pack_params(params, params.rates.xi if xi is None else xi)
    out = np.empty(kernels.N_UNDRIVEN)
    kernels.undriven_rhs_flat(state.to_flat(), out, par)
    return MomentState.from_flat(out)


def driven_rhs(state: DrivenMomentState, params: SystemParams,
               drive: DriveParams, t: float = 0.0,
               xi: float | None = None) -> DrivenMomentState:
    """Time derivative of a driven moment state at time ``t`` (the drive's
    on-window is honored)."""
    par = pack_params(params, params.rates.xi if xi is None else xi,
                      drive=drive, drive_active=drive.active(t))
    out = np.empty(kernels.N_DRIVEN)
    kernels.driven_rhs_flat(state.to_flat(), out, par)
    return DrivenMomentState.from_flat(out)


def default_atol(dim: int) -> np.ndarray:
    """Absolute tolerances: tight on populations and correlations, looser
    on the (large) photon number."""
    atol = np.full(dim, 1e-12)
    atol[7] = 1e-6
    return atol


_KERNELS = {
    "undriven": (kernels.undriven_rhs_flat, kernels.N_UNDRIVEN),
    "driven": (kernels.driven_rhs_flat, kernels.N_DRIVEN),
    "rate": (kernels.rate_rhs_flat, kernels.N_RATE),
}


def _segments_for_phase(phase: Phase):
    """Split a phase at its drive window edges so each integrator segment
    has a constant right-hand side."""
    drive = phase.drive
    if drive is None or drive.on_window is None:
        return [(phase.t_start, phase.t_stop, True)]
    lo, hi = drive.on_window
    cuts = sorted({phase.t_start, phase.t_stop,
                   min(max(lo, phase.t_start), phase.t_stop),
                   min(max(hi, phase.t_start), phase.t_stop)})
    segments = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            mid = 0.5 * (a + b)
            segments.append((a, b, drive.active(mid)))
    return segments


def integrate_flat(rhs_flat, y0: np.ndarray, plan, *, rtol: float = 1e-8,
                   atol=None, points_per_phase: int = 1000,
                   method: str = "BDF") -> tuple[np.ndarray, np.ndarray]:
    """Integrate a flat system across ``plan = [(t0, t1, par), ...]``.

    Returns (times, states) with ``points_per_phase + 1`` samples per
    segment and exact continuity at the joins.
    """
    y0 = np.asarray(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise NumericalFailureError("initial state contains NaN/Inf")
    if atol is None:
        atol = default_atol(y0.size)

    dim = y0.size
    times = []
    states = []
    y = y0.copy()
    for seg_index, (t0, t1, par) in enumerate(plan):
        def f(t, yy, _par=par):
            # fresh output buffer every call (the solver may keep references);
            # the state may arrive as a non-contiguous column view
            buf = np.empty(dim)
            rhs_flat(np.ascontiguousarray(yy), buf, _par)
            return buf

        t_eval = np.linspace(t0, t1, points_per_phase + 1)
        sol = solve_ivp(f, (t0, t1), y, method=method, rtol=rtol, atol=atol,
                        t_eval=t_eval)
        if not sol.success:
            t_fail = float(sol.t[-1]) if sol.t.size else t0
            raise StiffnessError(
                f"integrator stalled in segment {seg_index}: {sol.message}",
                t_fail)
        if not np.all(np.isfinite(sol.y)):
            raise NumericalFailureError(
                f"integration produced non-finite values in segment {seg_index}")
        start = 1 if times else 0  # drop the duplicated join point
        times.append(sol.t[start:])
        states.append(sol.y[:, start:].T)
        y = sol.y[:, -1].copy()
    return np.concatenate(times), np.vstack(states)


def integrate(params: SystemParams, initial, phases, *, rtol: float = 1e-8,
              atol=None, points_per_phase: int = 1000,
              method: str = "BDF") -> Trajectory:
    """Propagate a moment state through a piecewise-constant schedule.

    Parameters
    ----------
    initial : MomentState or DrivenMomentState
        Starting point; the driven system is selected automatically when a
        driven state is passed.
    phases : sequence of Phase
        Laser/drive schedule.  Phases must be contiguous in time.
    """
    driven = isinstance(initial, DrivenMomentState)
    kind = "driven" if driven else "undriven"
    rhs_flat, dim = _KERNELS[kind]

    plan = []
    prev_stop = None
    for phase in phases:
        if prev_stop is not None and not math.isclose(
                phase.t_start, prev_stop, rel_tol=0.0, abs_tol=1e-15):
            raise ValueError("phases must be contiguous in time")
        prev_stop = phase.t_stop
        if driven and phase.drive is not None:
            for (a, b, active) in _segments_for_phase(phase):
                par = pack_params(params, phase.xi, drive=phase.drive,
                                  drive_active=active)
                plan.append((a, b, par))
        else:
            par = pack_params(params, phase.xi,
                              drive=phase.drive if driven else None,
                              drive_active=False)
            plan.append((phase.t_start, phase.t_stop, par))

    times, states = integrate_flat(rhs_flat, initial.to_flat(), plan,
                                   rtol=rtol, atol=atol,
                                   points_per_phase=points_per_phase,
                                   method=method)
    return Trajectory(times=times, states=states, kind=kind, params=params,
                      meta={"rtol": rtol, "method": method,
                            "points_per_phase": points_per_phase})


def _residual_scales(par, y, dim):
    """Componentwise residual scale: 1e-10 of the fastest rate, weighted by
    the magnitude of the state channel."""
    rate_scale = max(par[kernels.PAR_KAPPA],
                     par[kernels.PAR_KSP] + par[kernels.PAR_XI],
                     par[kernels.PAR_K47], par[kernels.PAR_K57],
                     par[kernels.PAR_K67], par[kernels.PAR_CHI3],
                     abs(par[kernels.PAR_DELTA]),
                     abs(par[kernels.PAR_DELTA_M]),
                     abs(par[kernels.PAR_DELTA_3]), 1.0)
    weights = np.maximum(1.0, np.abs(y))
    if dim > 7:
        weights[7] = max(weights[7], par[kernels.PAR_NTH])
    return rate_scale * weights


def steady_state(params: SystemParams, *, xi: float | None = None,
                 drive: DriveParams | None = None, model: str | None = None,
                 guess=None, rtol: float = 1e-8, residual_factor: float = 1e-10,
                 max_newton: int = 60, relax_time: float | None = None,
                 omega_m: float | None = None):
    """Stationary state of one of the three models.

    A damped Newton iteration runs on the flat system with the redundant
    level-7 population row replaced by the conservation constraint
    ``sum(pop) = 1``.  Without a warm-start ``guess`` the system is first
    relaxed by integration over roughly ten times the slowest timescale;
    with a ``guess`` the integration is skipped and only re-tried if Newton
    stalls.

    Returns
    -------
    (state, info) : info carries ``converged``, ``residual``,
        ``newton_iterations``, ``fallback_integration`` and ``warnings``.
    """
    if model is None:
        model = "driven" if drive is not None else "cumulant"
    kind = {"cumulant": "undriven", "undriven": "undriven",
            "driven": "driven", "rate": "rate"}[model]
    if kind == "driven" and drive is None:
        raise ValueError("driven steady state needs drive parameters")
    rhs_flat, dim = _KERNELS[kind]
    xi_val = params.rates.xi if xi is None else xi
    par = pack_params(params, xi_val, drive=drive if kind == "driven" else None,
                      omega_m=omega_m)

    r = params.rates
    if relax_time is None:
        slow = min(x for x in (r.k31, r.k13, r.k21, r.k12,
                               params.resonator.kappa) if x > 0.0)
        relax_time = 10.0 / slow

    def residual(y):
        out = np.empty(dim)
        rhs_flat(y, out, par)
        out[6] = np.sum(y[0:7]) - 1.0  # conservation replaces the p7 row
        return out

    def newton(y):
        y = y.copy()
        for iteration in range(max_newton):
            f0 = residual(y)
            scales = _residual_scales(par, y, dim)
            if np.all(np.abs(f0) <= residual_factor * scales):
                return y, iteration, float(np.max(np.abs(f0) / scales)), True
            # finite-difference Jacobian (system is small)
            jac = np.empty((dim, dim))
            h = 1e-7 * np.abs(y) + 1e-12 * np.maximum(
                1.0, par[kernels.PAR_NTH])
            for j in range(dim):
                yp = y.copy()
                yp[j] += h[j]
                jac[:, j] = (residual(yp) - f0) / h[j]
            try:
                step = np.linalg.solve(jac, -f0)
            except np.linalg.LinAlgError:
                step, *_ = np.linalg.lstsq(jac, -f0, rcond=None)
            norm0 = float(np.max(np.abs(f0) / scales))
            lam = 1.0
            while lam >= 1.0 / 1024.0:
                y_try = y + lam * step
                f_try = residual(y_try)
                if np.all(np.isfinite(f_try)) and \
                        float(np.max(np.abs(f_try) / scales)) < norm0:
                    y = y_try
                    break
                lam *= 0.5
            else:
                break  # line search failed
        f0 = residual(y)
        scales = _residual_scales(par, y, dim)
        worst = float(np.max(np.abs(f0) / scales))
        return y, max_newton, worst, bool(worst <= residual_factor)

    info = {"fallback_integration": False, "warnings": []}

    if guess is not None:
        y0 = guess.to_flat() if hasattr(guess, "to_flat") else \
            np.asarray(guess, dtype=float).copy()
    else:
        y0 = _cold_start(params, kind, dim)

    integrated = False
    if guess is None:
        y0 = _relax(rhs_flat, y0, par, relax_time, rtol, dim)
        integrated = True

    y, iters, res, ok = newton(y0)
    if not ok and not integrated:
        # warm start landed outside the Newton basin: relax and retry
        info["fallback_integration"] = True
        y0 = _relax(rhs_flat, y0, par, relax_time, rtol, dim)
        y, iters, res, ok = newton(y0)
    if not ok:
        # accept the relaxed point only if it is close to stationary
        if res <= 1e-4:
            info["warnings"].append(
                f"Newton polish did not reach tolerance (residual {res:.2e}); "
                "returning the relaxed state")
            warnings.warn(info["warnings"][-1], FallbackWarning, stacklevel=2)
        else:
            raise NonConvergenceError("steady-state solve failed", res)

    info.update(converged=bool(ok), newton_iterations=iters, residual=res)
    if kind == "driven":
        state = DrivenMomentState.from_flat(y)
    elif kind == "undriven":
        state = MomentState.from_flat(y)
    else:
        state = y
    return state, info


def _cold_start(params, kind, dim):
    base = thermal_state(params)
    if kind == "driven":
        return DrivenMomentState.from_undriven(base).to_flat()
    if kind == "undriven":
        return base.to_flat()
    y = np.zeros(dim)
    y[0:3] = 1.0 / 3.0
    y[7] = params.thermal_occupation()
    return y


def _relax(rhs_flat, y0, par, relax_time, rtol, dim):
    _, states = integrate_flat(rhs_flat, y0, [(0.0, relax_time, par)],
                               rtol=rtol, atol=default_atol(dim),
                               points_per_phase=2)
    return states[-1]
