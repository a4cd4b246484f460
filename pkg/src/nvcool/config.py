"""Plain-text run configuration.

The format is a sectioned key/value file::

    # cooling run on the 9.22 GHz device
    [run]
    preset = high-frequency
    model = cumulant

    [schedule]
    laser_power = 2 W
    laser_off = 0.02 s

    [resonator]
    n_spins = 4e13

Rules
-----
* ``#`` starts a comment (full line or trailing).
* Dimensioned values may carry a unit suffix separated by whitespace.
  Rates and frequencies are stored in rad/s; the suffixes ``Hz`` and
  ``rad_s`` are synonyms for that base unit (device tables quote angular
  rates in hertz).  A true cyclic frequency is entered with the ``2pi*``
  prefix, e.g. ``2pi*9.22e9 Hz``.
* Other suffixes: ``W``, ``K``, ``s``, ``m``, ``m2``, ``per_m``,
  ``K_per_W``, ``Hz_per_K``/``rad_s_per_K``.  A bare number is taken in
  the base unit.  A suffix of the wrong dimension is an error.
* Unknown sections or keys are errors.  All problems are collected and
  reported together with their line numbers.

Values given under ``[rates]``, ``[resonator]``, ``[optics]`` and
``[heating]`` override the chosen preset field by field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .params import PRESET_NAMES

__all__ = ["RunConfig", "parse_config", "apply_assignments",
           "canonical_text", "EXPERIMENT_NAMES"]

TWO_PI = 2.0 * math.pi

EXPERIMENT_NAMES = ("cool-dynamics", "pump-sweep", "rabi-oscillation",
                    "rabi-splitting", "mode-detuning-sweep")


@dataclass
class RunConfig:
    """Fully resolved run options (base units throughout)."""

    preset: str = "high-frequency"
    experiment: str = ""
    model: str = "cumulant"
    heating: bool = False
    label: str = ""
    output_dir: str = "."
    overrides: dict = field(default_factory=dict)
    # schedule
    laser_power: float = 2.0
    xi: float | None = None
    laser_on: float = 0.0
    laser_off: float = 0.02
    t_end: float = 0.04
    drive_amplitude: float = TWO_PI * 9.7e5
    drive_start: float = 0.0
    drive_stop: float = 5e-6
    drive_detuning: float = 0.0
    # sweep
    xi_min: float = 1.0
    xi_max: float = 1e7
    xi_points: int = 40
    powers: tuple = (0.01, 0.3, 1.0, 10.0)
    detuning_points: int = 201
    detuning_span: float = 0.0
    # solver
    rtol: float = 1e-8
    atol_populations: float = 1e-12
    atol_photon: float = 1e-6
    points_per_phase: int = 1000
    # output
    csv: str = ""
    json: str = ""

    def to_spec(self):
        from .experiments import ExperimentSpec
        return ExperimentSpec(
            preset_name=self.preset, overrides=dict(self.overrides),
            model=self.model, heating=self.heating,
            laser_power=self.laser_power, xi=self.xi,
            laser_on=self.laser_on, laser_off=self.laser_off,
            t_end=self.t_end, drive_amplitude=self.drive_amplitude,
            drive_start=self.drive_start, drive_stop=self.drive_stop,
            drive_detuning=self.drive_detuning,
            xi_min=self.xi_min, xi_max=self.xi_max, xi_points=self.xi_points,
            powers=tuple(self.powers),
            detuning_points=self.detuning_points,
            detuning_span=self.detuning_span,
            rtol=self.rtol, atol_populations=self.atol_populations,
            atol_photon=self.atol_photon,
            points_per_phase=self.points_per_phase, label=self.label)


# ---------------------------------------------------------------------------
# key table: (section, key) -> (kind, destination)
#   destination: ("field", attr) on RunConfig, or ("override", dotted path)
# ---------------------------------------------------------------------------

_ANGULAR = ("angular", ("", "Hz", "rad_s"))
_ANGULAR_PER_K = ("angular", ("", "Hz_per_K", "rad_s_per_K"))
_WATT = ("plain", ("", "W"))
_KELVIN = ("plain", ("", "K"))
_KELVIN_PER_WATT = ("plain", ("", "K_per_W"))
_SECOND = ("plain", ("", "s"))
_METER = ("plain", ("", "m"))
_AREA = ("plain", ("", "m2"))
_PER_METER = ("plain", ("", "per_m"))
_PLAIN = ("plain", ("",))


def _field(section, names, unit):
    return {(section, n): (unit, ("field", n)) for n in names}


def _override(section, names, unit):
    return {(section, n): (unit, ("override", f"{section}.{n}"))
            for n in names}


_KEYS: dict = {}
_KEYS[("run", "preset")] = ("choice:" + ",".join(PRESET_NAMES),
                            ("field", "preset"))
_KEYS[("run", "experiment")] = ("choice:" + ",".join(EXPERIMENT_NAMES),
                                ("field", "experiment"))
_KEYS[("run", "model")] = ("choice:cumulant,rate", ("field", "model"))
_KEYS[("run", "heating")] = ("bool", ("field", "heating"))
_KEYS[("run", "label")] = ("str", ("field", "label"))
_KEYS[("run", "output_dir")] = ("str", ("field", "output_dir"))

_KEYS.update(_override("rates", (
    "xi", "k_sp", "k47", "k57", "k67", "k71", "k72", "k73",
    "k31", "k13", "k21", "k12", "chi2", "chi3"), _ANGULAR))
_KEYS.update(_override("resonator", (
    "omega_m", "omega31", "omega21", "kappa", "g31", "g21"), _ANGULAR))
_KEYS.update(_override("resonator", ("n_spins",), _PLAIN))
_KEYS.update(_override("resonator", ("bath_temperature",), _KELVIN))
_KEYS.update(_override("optics", ("wavelength", "thickness"), _METER))
_KEYS.update(_override("optics", ("cross_section", "beam_area"), _AREA))
_KEYS.update(_override("optics", ("absorption_coeff",), _PER_METER))
_KEYS.update(_override("optics", ("refr_index_in", "refr_index_sample"),
                       _PLAIN))
_KEYS.update(_override("heating", ("dT_per_watt",), _KELVIN_PER_WATT))
_KEYS.update(_override("heating", ("dD_per_kelvin",), _ANGULAR_PER_K))
_KEYS.update(_override("heating", ("t_initial",), _KELVIN))
_KEYS.update(_override("heating", ("raman_exponent",), _PLAIN))

_KEYS.update(_field("schedule", ("laser_power",), _WATT))
_KEYS.update(_field("schedule", ("xi",), _ANGULAR))
_KEYS.update(_field("schedule",
                    ("laser_on", "laser_off", "t_end",
                     "drive_start", "drive_stop"), _SECOND))
_KEYS.update(_field("schedule", ("drive_amplitude", "drive_detuning"),
                    _ANGULAR))
_KEYS.update(_field("sweep", ("xi_min", "xi_max"), _ANGULAR))
_KEYS[("sweep", "xi_points")] = ("int", ("field", "xi_points"))
_KEYS[("sweep", "powers")] = ("power_list", ("field", "powers"))
_KEYS[("sweep", "detuning_points")] = ("int", ("field", "detuning_points"))
_KEYS.update(_field("sweep", ("detuning_span",), _ANGULAR))
_KEYS.update(_field("solver",
                    ("rtol", "atol_populations", "atol_photon"), _PLAIN))
_KEYS[("solver", "points_per_phase")] = ("int",
                                         ("field", "points_per_phase"))
_KEYS[("output", "csv")] = ("str", ("field", "csv"))
_KEYS[("output", "json")] = ("str", ("field", "json"))

_SECTIONS = ("run", "rates", "resonator", "optics", "heating",
             "schedule", "sweep", "solver", "output")

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _parse_number(text: str, kind, errors, line: int, where: str):
    unit_kind, suffixes = kind
    tokens = text.split()
    if not tokens:
        errors.append((line, f"{where}: empty value"))
        return None
    if len(tokens) > 2:
        errors.append((line, f"{where}: expected 'number [unit]', got "
                       f"{text!r}"))
        return None
    number = tokens[0]
    suffix = tokens[1] if len(tokens) == 2 else ""
    if suffix not in suffixes:
        allowed = ", ".join(s or "<none>" for s in suffixes)
        errors.append((line, f"{where}: unit {suffix!r} not valid here "
                       f"(allowed: {allowed})"))
        return None
    scale = 1.0
    if number.startswith("2pi*"):
        if unit_kind != "angular":
            errors.append((line, f"{where}: the 2pi* prefix only applies to "
                           "rates/frequencies"))
            return None
        scale = TWO_PI
        number = number[len("2pi*"):]
    try:
        value = float(number)
    except ValueError:
        errors.append((line, f"{where}: cannot parse number {number!r}"))
        return None
    return scale * value


def _parse_value(text: str, kind, errors, line: int, where: str):
    if isinstance(kind, tuple):
        return _parse_number(text, kind, errors, line, where)
    if kind == "str":
        return text
    if kind == "bool":
        word = text.strip().lower()
        if word not in _BOOL_WORDS:
            errors.append((line, f"{where}: expected true/false, got "
                           f"{text!r}"))
            return None
        return _BOOL_WORDS[word]
    if kind == "int":
        try:
            return int(text.strip(), 10)
        except ValueError:
            errors.append((line, f"{where}: expected an integer, got "
                           f"{text!r}"))
            return None
    if kind.startswith("choice:"):
        choices = kind[len("choice:"):].split(",")
        value = text.strip()
        if value not in choices:
            errors.append((line, f"{where}: {value!r} is not one of "
                           f"{', '.join(choices)}"))
            return None
        return value
    if kind == "power_list":
        values = []
        for part in text.split(","):
            value = _parse_number(part.strip(), _WATT, errors, line, where)
            if value is None:
                return None
            if value <= 0.0:
                errors.append((line, f"{where}: powers must be positive"))
                return None
            values.append(value)
        if not values:
            errors.append((line, f"{where}: empty power list"))
            return None
        return tuple(values)
    raise AssertionError(f"unhandled kind {kind!r}")


def _strip_comment(raw: str) -> str:
    cut = raw.find("#")
    return raw if cut < 0 else raw[:cut]


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse a configuration document into a :class:`RunConfig`.

    Raises :class:`~nvcool.errors.ConfigError` carrying every problem
    found, each tagged with its line number.
    """
    config = RunConfig()
    errors: list = []
    seen: set = set()
    section = None
    section_ok = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            section_ok = section in _SECTIONS
            if not section_ok:
                errors.append((line_no, f"unknown section [{section}] "
                               f"(known: {', '.join(_SECTIONS)})"))
            continue
        if "=" not in line:
            errors.append((line_no, f"expected 'key = value', got {line!r}"))
            continue
        if section is None:
            errors.append((line_no, "key outside of any [section]"))
            continue
        if not section_ok:
            continue  # already reported at the header
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        spec = _KEYS.get((section, key))
        if spec is None:
            errors.append((line_no, f"unknown key {key!r} in [{section}]"))
            continue
        if (section, key) in seen:
            errors.append((line_no, f"duplicate key {key!r} in [{section}]"))
            continue
        seen.add((section, key))
        parsed = _parse_value(value, spec[0], errors, line_no,
                              f"[{section}] {key}")
        if parsed is None:
            continue
        _store(config, spec[1], parsed)
    _validate(config, errors)
    if errors:
        raise ConfigError(source, errors)
    return config


def _store(config: RunConfig, destination, value):
    target, name = destination
    if target == "field":
        setattr(config, name, value)
    else:
        config.overrides[name] = value


def _validate(config: RunConfig, errors: list):
    def bad(message):
        errors.append((0, message))

    if not (0.0 <= config.laser_on < config.laser_off):
        bad("schedule: need 0 <= laser_on < laser_off")
    if config.t_end < config.laser_off:
        bad("schedule: t_end must not precede laser_off")
    if not (0.0 <= config.drive_start < config.drive_stop):
        bad("schedule: need 0 <= drive_start < drive_stop")
    if config.drive_amplitude < 0.0:
        bad("schedule: drive_amplitude must be >= 0")
    if not (0.0 < config.xi_min < config.xi_max):
        bad("sweep: need 0 < xi_min < xi_max")
    if config.xi_points < 2:
        bad("sweep: xi_points must be >= 2")
    if config.detuning_points < 3:
        bad("sweep: detuning_points must be >= 3")
    if config.detuning_span < 0.0:
        bad("sweep: detuning_span must be >= 0 (0 selects automatic)")
    if config.rtol <= 0.0 or config.atol_populations <= 0.0 \
            or config.atol_photon <= 0.0:
        bad("solver: tolerances must be positive")
    if config.points_per_phase < 2:
        bad("solver: points_per_phase must be >= 2")


def apply_assignments(config: RunConfig, assignments) -> RunConfig:
    """Apply ``section.key=value`` strings (CLI ``--set``) on a copy."""
    updated = replace(config, overrides=dict(config.overrides),
                      powers=tuple(config.powers))
    errors: list = []
    for index, text in enumerate(assignments, start=1):
        head, eq, value = text.partition("=")
        section, dot, key = head.strip().partition(".")
        if not eq or not dot or not key:
            errors.append((index, f"--set needs section.key=value, got "
                           f"{text!r}"))
            continue
        spec = _KEYS.get((section, key.strip()))
        if spec is None:
            errors.append((index, f"unknown option {head.strip()!r}"))
            continue
        parsed = _parse_value(value.strip(), spec[0], errors, index,
                              head.strip())
        if parsed is None:
            continue
        _store(updated, spec[1], parsed)
    _validate(updated, errors)
    if errors:
        raise ConfigError("--set", errors)
    return updated


def _render(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return str(value)


# run metadata that does not influence the computed numbers; kept out of
# the canonical text so identical physics yields an identical config hash
_NON_PHYSICS = {("run", "label"), ("run", "output_dir"),
                ("output", "csv"), ("output", "json")}


def canonical_text(config: RunConfig) -> str:
    """Deterministic rendering of everything that determines the numbers;
    re-parsing it reproduces those fields."""
    by_section: dict = {name: [] for name in _SECTIONS}
    for (section, key), (kind, destination) in _KEYS.items():
        if (section, key) in _NON_PHYSICS:
            continue
        target, name = destination
        if target == "field":
            value = getattr(config, name)
            if name == "xi" and value is None:
                continue
        else:
            if name not in config.overrides:
                continue
            value = config.overrides[name]
        by_section[section].append((key, _render(value)))
    lines = []
    for section in _SECTIONS:
        entries = sorted(by_section[section])
        if not entries:
            continue
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {value}" for key, value in entries)
        lines.append("")
    return "\n".join(lines)
