"""Physical constants, device parameter sets, and unit helpers.

Everything on the numerical side of the package runs in angular units:
rates, linewidths, couplings, and frequencies are all rad/s.  Hardware
tables often mix "2*pi*f" entries with bare linewidth numbers; the presets
below are fully converted, and the config loader accepts an explicit
``2pi*`` prefix so either spelling can be entered.

Two device presets are provided:

* ``high-frequency`` -- a 9.22 GHz resonator coupled to ``N = 4e13`` spins.
* ``low-frequency``  -- a 2.872 GHz resonator coupled to ``N = 1.6e15``
  spins, where a second, slightly detuned spin transition also couples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import DomainError

__all__ = [
    "PhysicalConstants",
    "NvRates",
    "ResonatorParams",
    "OpticsParams",
    "HeatingModel",
    "HeatedRates",
    "SystemParams",
    "DEFAULT_CONSTANTS",
    "PRESET_NAMES",
    "preset",
    "thermal_photon_number",
    "effective_temperature",
    "pump_rate_from_power",
    "power_from_pump_rate",
    "heated_rates",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants (SI units).

    ``reduced_planck`` is derived from ``planck_h`` unless given explicitly,
    in which case it must equal ``planck_h / (2*pi)``.
    """

    planck_h: float = 6.63e-34          # J s
    boltzmann_kB: float = 1.380649e-23  # J / K
    light_speed_c: float = 2.99e8       # m / s
    reduced_planck: float | None = None  # J s, h / (2*pi)

    def __post_init__(self):
        hbar = self.planck_h / TWO_PI
        if self.reduced_planck is None:
            object.__setattr__(self, "reduced_planck", hbar)
        elif abs(self.reduced_planck - hbar) > 1e-9 * hbar:
            raise DomainError(
                f"reduced_planck = {self.reduced_planck} is inconsistent with "
                f"planck_h / (2*pi) = {hbar}")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class NvRates:
    """Incoherent rates of the seven-level spin model (all rad/s).

    Levels 1-3 are the ground triplet (m = 0, -1, +1), levels 4-6 their
    optically excited partners, and level 7 the metastable singlet.

    Attributes
    ----------
    xi : optical pump rate driving 1->4, 2->5, 3->6.
    k_sp : radiative decay rate of each excited level to its partner.
    k47, k57, k67 : intersystem crossing rates from levels 4, 5, 6 into
        the singlet.
    k71, k72, k73 : singlet decay rates into ground levels 1, 2, 3.
    k31, k13, k21, k12 : spin-lattice relaxation rates inside the ground
        triplet (first index = source level).
    chi2, chi3 : pure dephasing rates of the 2<->1 and 3<->1 ground
        coherences.
    """

    xi: float = 0.0
    k_sp: float = 66e6
    k47: float = 7.9e6
    k57: float = 53e6
    k67: float = 53e6
    k71: float = 1.0e6
    k72: float = 0.73e6
    k73: float = 0.73e6
    k31: float = 208.0
    k13: float = 208.0
    k21: float = 208.0
    k12: float = 208.0
    chi2: float = TWO_PI * 0.64e6
    chi3: float = TWO_PI * 0.64e6

    def __post_init__(self):
        for name in ("xi", "k_sp", "k47", "k57", "k67", "k71", "k72", "k73",
                     "k31", "k13", "k21", "k12", "chi2", "chi3"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise DomainError(f"rate {name} must be finite and >= 0, "
                                  f"got {value}")

    @property
    def singlet_decay_total(self) -> float:
        """Total decay rate out of the singlet, k71 + k72 + k73."""
        return self.k71 + self.k72 + self.k73


@dataclass(frozen=True)
class ResonatorParams:
    """Microwave mode, spin transitions, and their coupling (rad/s, K).

    Attributes
    ----------
    omega_m : angular frequency of the microwave mode.
    kappa : mode energy damping rate.
    omega31, omega21 : angular frequencies of the 3<->1 and 2<->1 spin
        transitions.
    g31 : single-spin coupling of the mode to the 3<->1 transition.
    g21 : single-spin coupling to the 2<->1 transition; ``None`` means
        "same as g31".
    n_spins : number of spins coupled to the mode.
    bath_temperature : temperature of the thermal bath feeding the mode (K).
    """

    omega_m: float = TWO_PI * 9.22e9
    kappa: float = 1.88e6
    omega31: float = TWO_PI * 9.22e9
    omega21: float = TWO_PI * 3.48e9
    g31: float = 0.69
    g21: float | None = None
    n_spins: float = 4e13
    bath_temperature: float = 293.0

    def __post_init__(self):
        if self.omega_m <= 0.0 or self.omega31 <= 0.0 or self.omega21 <= 0.0:
            raise DomainError("angular frequencies must be positive")
        if self.kappa <= 0.0:
            raise DomainError("kappa must be positive")
        if self.g31 < 0.0 or self.n_spins < 1.0:
            raise DomainError("g31 must be >= 0 and n_spins >= 1")
        if self.bath_temperature < 0.0:
            raise DomainError("bath_temperature must be >= 0")
        if self.g21 is None:
            object.__setattr__(self, "g21", self.g31)

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.kappa


@dataclass(frozen=True)
class OpticsParams:
    """Laser and diamond-sample parameters for the pump-rate conversion.

    Attributes
    ----------
    wavelength : pump laser wavelength (m).
    cross_section : optical absorption cross-section per NV (m^2).
    beam_area : illuminated area (m^2).
    thickness : sample thickness along the beam (m).
    absorption_coeff : absorption coefficient of the sample (1/m).
    refr_index_in, refr_index_sample : refractive indices on either side
        of the entry facet (Fresnel reflection loss).
    """

    wavelength: float = 532e-9
    cross_section: float = 3.1e-21
    beam_area: float = 1.76e-6
    thickness: float = 1.5e-3
    absorption_coeff: float = 2.3e3
    refr_index_in: float = 1.0
    refr_index_sample: float = 2.42

    def __post_init__(self):
        for name in ("wavelength", "cross_section", "beam_area", "thickness",
                     "absorption_coeff", "refr_index_in", "refr_index_sample"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"optics parameter {name} must be positive")

    @property
    def facet_reflectance(self) -> float:
        n1, n2 = self.refr_index_in, self.refr_index_sample
        return ((n1 - n2) / (n1 + n2)) ** 2


@dataclass(frozen=True)
class HeatingModel:
    """Laser-heating model for the diamond lattice.

    Attributes
    ----------
    dT_per_watt : lattice temperature rise per watt of laser power (K/W).
        The default 87.5 K/W describes an unmanaged sample; with active
        heat-sinking an effective value around 1.25 K/W is realistic.
    dD_per_kelvin : drift of the zero-field splitting per kelvin (rad/s/K).
    t_initial : lattice temperature without laser load (K).
    raman_exponent : temperature exponent of the two-phonon (Raman)
        spin-lattice relaxation, rate ~ T**exponent.
    """

    dT_per_watt: float = 87.5
    dD_per_kelvin: float = -TWO_PI * 0.074e6
    t_initial: float = 293.0
    raman_exponent: float = 5.0

    def __post_init__(self):
        if self.dT_per_watt < 0.0 or self.t_initial <= 0.0:
            raise DomainError("dT_per_watt must be >= 0 and t_initial > 0")


@dataclass(frozen=True)
class HeatedRates:
    """Result of :func:`heated_rates`."""

    rates: NvRates
    delta_T: float            # lattice temperature rise (K)
    temperature: float        # resulting lattice temperature (K)
    resonance_shift: float    # zero-field-splitting drift (rad/s)
    scale_factor: float       # applied to the spin-lattice rates


@dataclass(frozen=True)
class SystemParams:
    """Complete parameter set of one device."""

    rates: NvRates = field(default_factory=NvRates)
    resonator: ResonatorParams = field(default_factory=ResonatorParams)
    optics: OpticsParams = field(default_factory=OpticsParams)
    heating: HeatingModel = field(default_factory=HeatingModel)
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def thermal_occupation(self) -> float:
        """Thermal photon number of the mode at the bath temperature."""
        return thermal_photon_number(self.resonator.omega_m,
                                     self.resonator.bath_temperature,
                                     self.constants)

    def mode_temperature(self, photon_n: float) -> float:
        """Effective mode temperature for a given photon number."""
        return effective_temperature(self.resonator.omega_m, photon_n,
                                     self.constants)

    def replace(self, **kwargs) -> "SystemParams":
        return replace(self, **kwargs)


def preset(name: str) -> SystemParams:
    """Return one of the built-in device parameter sets by name."""
    if name == "high-frequency":
        return SystemParams()
    if name == "low-frequency":
        return SystemParams(
            rates=NvRates(k31=83.0, k13=83.0, k21=83.0, k12=83.0,
                          chi2=TWO_PI * 2.6e6, chi3=TWO_PI * 2.6e6),
            resonator=ResonatorParams(
                omega_m=TWO_PI * 2.872e9,
                kappa=6.22e6,
                omega31=TWO_PI * 2.872e9,
                omega21=TWO_PI * 2.867e9,
                g31=0.084,
                n_spins=1.6e15,
            ),
        )
    raise DomainError(f"unknown preset {name!r}; "
                      f"available: {', '.join(PRESET_NAMES)}")


PRESET_NAMES = ("high-frequency", "low-frequency")


def thermal_photon_number(omega: float, temperature: float,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS,
                          ) -> float:
    """Bose-Einstein occupation 1 / (exp(hbar*omega / kB*T) - 1).

    Parameters
    ----------
    omega : float
        Mode angular frequency (rad/s), must be positive.
    temperature : float
        Bath temperature (K), must be >= 0.  T = 0 returns 0.
    """
    if omega <= 0.0 or not math.isfinite(omega):
        raise DomainError(f"omega must be positive and finite, got {omega}")
    if temperature < 0.0 or not math.isfinite(temperature):
        raise DomainError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0.0:
        return 0.0
    x = constants.reduced_planck * omega / (constants.boltzmann_kB * temperature)
    if x > 700.0:  # exp would overflow; occupation is zero to double precision
        return 0.0
    return 1.0 / math.expm1(x)


def effective_temperature(omega: float, photon_n: float,
                          constants: PhysicalConstants = DEFAULT_CONSTANTS,
                          ) -> float:
    """Temperature at which a thermal state has occupation ``photon_n``.

    Exact inverse of :func:`thermal_photon_number`: returns
    hbar*omega / (kB * log(1 + 1/n)).
    """
    if omega <= 0.0 or not math.isfinite(omega):
        raise DomainError(f"omega must be positive and finite, got {omega}")
    if photon_n < 0.0 or not math.isfinite(photon_n):
        raise DomainError(f"photon_n must be >= 0, got {photon_n}")
    if photon_n == 0.0:
        return 0.0
    x = math.log1p(1.0 / photon_n)
    return constants.reduced_planck * omega / (constants.boltzmann_kB * x)


def pump_rate_from_power(power: float,
                         optics: OpticsParams = OpticsParams(),
                         constants: PhysicalConstants = DEFAULT_CONSTANTS,
                         ) -> float:
    """Optical pump rate (rad/s) produced by a given laser power (W).

    The rate is the absorption cross-section times the photon flux inside
    the sample, averaged over the sample thickness and corrected for the
    entry-facet reflection:

        xi = sigma * P / (E_photon * A)
             * (1 - exp(-alpha*l)) / (alpha*l) * (1 - R)

    with photon energy E = h*c/lambda.
    """
    if power < 0.0 or not math.isfinite(power):
        raise DomainError(f"power must be >= 0, got {power}")
    return power * _pump_rate_coefficient(optics, constants)


def power_from_pump_rate(xi: float,
                         optics: OpticsParams = OpticsParams(),
                         constants: PhysicalConstants = DEFAULT_CONSTANTS,
                         ) -> float:
    """Laser power (W) required for a given optical pump rate (rad/s)."""
    if xi < 0.0 or not math.isfinite(xi):
        raise DomainError(f"xi must be >= 0, got {xi}")
    return xi / _pump_rate_coefficient(optics, constants)


def _pump_rate_coefficient(optics: OpticsParams,
                           constants: PhysicalConstants) -> float:
    photon_energy = constants.planck_h * constants.light_speed_c / optics.wavelength
    flux_factor = optics.cross_section / (photon_energy * optics.beam_area)
    depth = optics.absorption_coeff * optics.thickness
    attenuation = -math.expm1(-depth) / depth
    return flux_factor * attenuation * (1.0 - optics.facet_reflectance)


def heated_rates(rates: NvRates, power: float,
                 model: HeatingModel = HeatingModel()) -> HeatedRates:
    """Spin-lattice rates and resonance drift at elevated lattice temperature.

    The lattice heats by ``dT_per_watt * power``; the two-phonon (Raman)
    spin-lattice relaxation rates k31, k13, k21, k12 scale with lattice
    temperature as T**raman_exponent, and the zero-field splitting (and with
    it the spin transition frequencies) drifts by ``dD_per_kelvin`` per
    kelvin.  All other rates are temperature-independent here.
    """
    if power < 0.0 or not math.isfinite(power):
        raise DomainError(f"power must be >= 0, got {power}")
    delta_T = model.dT_per_watt * power
    temperature = model.t_initial + delta_T
    scale = (temperature / model.t_initial) ** model.raman_exponent
    shifted = replace(rates,
                      k31=rates.k31 * scale, k13=rates.k13 * scale,
                      k21=rates.k21 * scale, k12=rates.k12 * scale)
    return HeatedRates(rates=shifted, delta_T=delta_T, temperature=temperature,
                       resonance_shift=model.dD_per_kelvin * delta_T,
                       scale_factor=scale)
