"""Rate-equation reductions of the moment system.

Adiabatic elimination of the mode/spin coherence turns the coherent 3<->1
exchange into an incoherent energy-transfer channel whose rate combines the
coupling, the mutual detuning, and the total linewidth.  Further
elimination of the optically excited levels folds the pump cycle into
effective rates between the three ground levels, for which closed-form
steady states and exponential population dynamics exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateRatesError, DomainError, MasingThresholdError
from .params import NvRates, SystemParams, thermal_photon_number

__all__ = [
    "ComplexDetuning", "EffectiveGroundRates", "AnalyticCoefficients",
    "energy_transfer_rate", "rate_rhs", "effective_ground_rates",
    "reduced_rate_rhs", "adiabatic_photon_number",
    "two_transition_photon_number", "analytic_ground_populations",
    "analytic_population_dynamics", "population_decay_rate",
    "extend_to_seven_levels",
]


@dataclass(frozen=True)
class ComplexDetuning:
    """Detuning of the mode from a spin transition, broadened into the
    complex plane by the combined linewidth: value = delta + i*chi."""

    value: complex

    @classmethod
    def for_transition(cls, params: SystemParams, xi: float,
                       transition: str = "31",
                       omega_m: float | None = None) -> "ComplexDetuning":
        r = params.rates
        res = params.resonator
        omega = res.omega_m if omega_m is None else omega_m
        if transition == "31":
            delta = omega - res.omega31
            chi = 0.5 * (res.kappa + r.k12 + r.k13 + r.k31) + xi + r.chi3
        elif transition == "21":
            delta = omega - res.omega21
            chi = 0.5 * (res.kappa + r.k12 + r.k13 + r.k21) + xi + r.chi2
        else:
            raise DomainError(f"unknown transition {transition!r}")
        return cls(complex(delta, chi))

    @property
    def detuning(self) -> float:
        return self.value.real

    @property
    def linewidth(self) -> float:
        return self.value.imag


def energy_transfer_rate(g: float, detuning: ComplexDetuning) -> float:
    """Incoherent photon/spin energy-transfer rate, -2 g^2 Im(1/(delta+i*chi)).

    Equals 2 g^2 chi / (delta^2 + chi^2): a Lorentzian in the detuning with
    half width chi, maximal on resonance.
    """
    d = detuning.value
    if d.imag <= 0.0:
        raise DomainError("linewidth must be positive")
    return -2.0 * g * g * (1.0 / d).imag


def rate_rhs(pops, photon_n: float, params: SystemParams,
             xi: float | None = None, omega_m: float | None = None):
    """Time derivative of the seven populations and the photon number."""
    from .cumulant import pack_params  # local import to avoid a cycle
    par = pack_params(params, params.rates.xi if xi is None else xi,
                      omega_m=omega_m)
    y = np.empty(kernels.N_RATE)
    y[0:7] = pops
    y[7] = photon_n
    out = np.empty(kernels.N_RATE)
    kernels.rate_rhs_flat(y, out, par)
    return out[0:7], float(out[7])


@dataclass(frozen=True)
class EffectiveGroundRates:
    """Pump-cycle rates folded onto the ground triplet.

    ``k[i-1][j-1]`` for i != j is the effective transfer rate from ground
    level i to ground level j through the excited levels and the singlet;
    ``k[i-1][i-1]`` is the net rate at which level i loses population into
    that pathway (flux that returns to i cancels out).  Consequently the
    diagonal satisfies ``k[i][i] == sum over j != i of k[i][j]`` exactly.
    """

    xi: float
    k: np.ndarray  # shape (3, 3)

    def rate(self, i: int, j: int) -> float:
        """1-based accessor: rate(i, j) = effective i -> j rate."""
        return float(self.k[i - 1, j - 1])


def effective_ground_rates(xi: float, rates: NvRates) -> EffectiveGroundRates:
    """Effective ground-triplet rates after eliminating levels 4..7.

    Level i feeds its excited partner at xi; the partner branches into the
    singlet with probability f_i = k_(i+3)7 / (k_sp + xi + k_(i+3)7), and
    the singlet redistributes into ground level j with branching
    k_7j / (k71 + k72 + k73).
    """
    if xi < 0.0 or not math.isfinite(xi):
        raise DomainError(f"xi must be >= 0, got {xi}")
    isc = (rates.k47, rates.k57, rates.k67)
    sum7 = rates.singlet_decay_total
    if sum7 <= 0.0:
        raise DomainError("singlet decay rates must not all vanish")
    branch = (rates.k71 / sum7, rates.k72 / sum7, rates.k73 / sum7)
    k = np.zeros((3, 3))
    for i in range(3):
        f_i = xi * isc[i] / (rates.k_sp + xi + isc[i])
        for j in range(3):
            if i == j:
                k[i, j] = f_i * (1.0 - branch[i])
            else:
                k[i, j] = f_i * branch[j]
    return EffectiveGroundRates(xi=xi, k=k)


def reduced_rate_rhs(pops3, photon_n: float, params: SystemParams,
                     xi: float, eff: EffectiveGroundRates | None = None,
                     omega_m: float | None = None):
    """Time derivative of the three ground populations and the photon
    number after eliminating both the coherences and levels 4..7."""
    if eff is None:
        eff = effective_ground_rates(xi, params.rates)
    r = params.rates
    res = params.resonator
    k = eff.k
    p1, p2, p3 = float(pops3[0]), float(pops3[1]), float(pops3[2])
    keet = energy_transfer_rate(
        res.g31, ComplexDetuning.for_transition(params, xi, "31", omega_m))
    transfer = keet * (p3 * (1.0 + photon_n) - p1 * photon_n)

    dp1 = -(k[0, 0] + r.k12 + r.k13) * p1 + (k[1, 0] + r.k21) * p2 \
        + (k[2, 0] + r.k31) * p3 + transfer
    dp2 = (k[0, 1] + r.k12) * p1 - (k[1, 1] + r.k21) * p2 + k[2, 1] * p3
    dp3 = (k[0, 2] + r.k13) * p1 + k[1, 2] * p2 \
        - (k[2, 2] + r.k31) * p3 - transfer

    omega = res.omega_m if omega_m is None else omega_m
    nth = thermal_photon_number(omega, res.bath_temperature, params.constants)
    dn = res.kappa * (nth - photon_n) + res.n_spins * transfer
    return np.array([dp1, dp2, dp3]), float(dn)


def adiabatic_photon_number(pop1: float, pop3: float, params: SystemParams,
                            xi: float, omega_m: float | None = None,
                            simplified: bool = False) -> float:
    """Photon number that follows the ground populations adiabatically.

    n = (N*k_transfer*pop1 + kappa*n_th) / (N*k_transfer*(pop1-pop3) + kappa)

    ``simplified=True`` drops the spin-emission term from the numerator,
    valid when N*k_transfer is small against kappa*n_th.

    Raises
    ------
    MasingThresholdError
        If the denominator is not positive (population inversion beyond the
        gain threshold): no adiabatic steady state exists.
    """
    res = params.resonator
    keet = energy_transfer_rate(
        res.g31, ComplexDetuning.for_transition(params, xi, "31", omega_m))
    omega = res.omega_m if omega_m is None else omega_m
    nth = thermal_photon_number(omega, res.bath_temperature, params.constants)
    collective = res.n_spins * keet
    denom = collective * (pop1 - pop3) + res.kappa
    if denom <= 0.0:
        raise MasingThresholdError(
            f"gain threshold exceeded (denominator {denom:.3e} <= 0); "
            "the photon number has no adiabatic steady state")
    numer = res.kappa * nth if simplified else collective * pop1 + res.kappa * nth
    return numer / denom


def two_transition_photon_number(pops3, params: SystemParams, xi: float,
                                 omega_m: float | None = None,
                                 include_21: bool = True) -> float:
    """Adiabatic photon number when the mode exchanges energy with both the
    3<->1 and the (detuned) 2<->1 spin transitions.

    n = (N*(k31_t*p1 + k21_t*p1) + kappa*n_th)
        / (N*(k31_t*(p1-p3) + k21_t*(p1-p2)) + kappa)

    with each transfer rate evaluated at its own detuning and linewidth.
    """
    res = params.resonator
    p1, p2, p3 = float(pops3[0]), float(pops3[1]), float(pops3[2])
    k31_t = energy_transfer_rate(
        res.g31, ComplexDetuning.for_transition(params, xi, "31", omega_m))
    k21_t = 0.0
    if include_21 and res.g21 > 0.0:
        k21_t = energy_transfer_rate(
            res.g21, ComplexDetuning.for_transition(params, xi, "21", omega_m))
    omega = res.omega_m if omega_m is None else omega_m
    nth = thermal_photon_number(omega, res.bath_temperature, params.constants)
    nsp = res.n_spins
    denom = nsp * (k31_t * (p1 - p3) + k21_t * (p1 - p2)) + res.kappa
    if denom <= 0.0:
        raise MasingThresholdError(
            f"gain threshold exceeded (denominator {denom:.3e} <= 0); "
            "the photon number has no adiabatic steady state")
    numer = nsp * (k31_t + k21_t) * p1 + res.kappa * nth
    return numer / denom


@dataclass(frozen=True)
class AnalyticCoefficients:
    """Coefficients of the closed-form ground-triplet steady state."""

    A: float
    B: float
    C: float
    D: float

    @classmethod
    def compute(cls, xi: float, rates: NvRates,
                eff: EffectiveGroundRates | None = None,
                ) -> "AnalyticCoefficients":
        if eff is None:
            eff = effective_ground_rates(xi, rates)
        k = eff.k
        return cls(A=k[1, 1] + rates.k21 + k[0, 1] + rates.k12,
                   B=k[2, 2] + rates.k31 + k[0, 2] + rates.k13,
                   C=k[0, 1] + rates.k12 - k[2, 1],
                   D=k[0, 2] + rates.k13 - k[1, 2])

    @property
    def determinant(self) -> float:
        return self.A * self.B - self.C * self.D


def analytic_ground_populations(xi: float, rates: NvRates):
    """Closed-form steady state of the reduced three-level system (photon
    channel ignored).  Returns (pop1, pop2, pop3), normalized within the
    ground triplet."""
    eff = effective_ground_rates(xi, rates)
    co = AnalyticCoefficients.compute(xi, rates, eff)
    det = co.determinant
    scale = abs(co.A * co.B) + abs(co.C * co.D)
    if scale == 0.0 or abs(det) < 1e-14 * scale:
        raise DegenerateRatesError(
            "steady-state determinant vanishes; populations are undefined "
            "for these rates")
    in2 = eff.k[0, 1] + rates.k12
    in3 = eff.k[0, 2] + rates.k13
    pop2 = (co.B * in2 - co.C * in3) / det
    pop3 = (co.A * in3 - co.D * in2) / det
    return 1.0 - pop2 - pop3, pop2, pop3


def population_decay_rate(xi: float, rates: NvRates) -> float:
    """Exponential rate at which the level-1 population approaches its
    steady value: pump-cycle loss and return plus spin-lattice mixing."""
    eff = effective_ground_rates(xi, rates)
    return eff.k[0, 0] + rates.k12 + rates.k13 + eff.k[2, 0] + rates.k31


def analytic_population_dynamics(t, xi: float, rates: NvRates,
                                 start_value: float | None = None):
    """Single-exponential level-1 population dynamics.

    pop1(t) = (pop1(0) - pop1(inf)) * exp(-R t) + pop1(inf), with
    R = :func:`population_decay_rate` and
    pop1(inf) = (k_tilde_31 + k31) / R.  With the laser off (xi = 0) this
    describes re-thermalization towards 1/3 (exact for symmetric
    spin-lattice rates).  ``start_value`` defaults to the equal-population
    value 1/3.

    Returns the level-1 population at times ``t``; the two other ground
    levels follow as (1 - pop1) / 2 in the symmetric case.
    """
    t = np.asarray(t, dtype=float)
    rate = population_decay_rate(xi, rates)
    eff = effective_ground_rates(xi, rates)
    if rate <= 0.0:
        raise DegenerateRatesError("population decay rate must be positive")
    settle = (eff.k[2, 0] + rates.k31) / rate
    start = 1.0 / 3.0 if start_value is None else float(start_value)
    return (start - settle) * np.exp(-rate * t) + settle


def extend_to_seven_levels(pops3, xi: float, rates: NvRates) -> np.ndarray:
    """Embed ground-triplet populations into the seven-level system.

    The excited levels carry the adiabatic fractions
    e_i = xi / (k_sp + xi + k_(i+3)7) of their ground partners and the
    singlet collects their crossing flux; the result is renormalized to
    total population one.
    """
    isc = (rates.k47, rates.k57, rates.k67)
    sum7 = rates.singlet_decay_total
    pop = np.zeros(7)
    pop[0:3] = pops3
    for i in range(3):
        pop[3 + i] = pop[i] * xi / (rates.k_sp + xi + isc[i])
    pop[6] = (rates.k47 * pop[3] + rates.k57 * pop[4] + rates.k67 * pop[5]) \
        / sum7
    return pop / np.sum(pop)
