"""Line-oriented configuration format: ``key = value`` with ``[section]`` headers.

Sections: cavity, mech1, mech2, coupling, drive, sweep.  Every physical
value carries an explicit unit suffix; frequency-family suffixes (Hz, kHz,
MHz) denote ordinary frequencies and are converted by 2*pi, while ``rad_s``
is stored as-is.  In dimensionless mode every physical value uses the
``dimensionless`` suffix.  ``preset = <name>`` imports a named preset and
later lines override it, in file order.  Unknown keys are hard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .params import (
    DIMENSIONLESS,
    SI,
    CavityParams,
    CouplingParams,
    DriveParams,
    MechanicalMode,
    SystemParams,
    default_g_cav,
)
from .presets import PRESET_NAMES, preset_state

TWO_PI = 2.0 * math.pi

SCENARIOS = ("spectrum", "phase", "delay-vs-power", "delay-vs-kappa", "splitting-vs-gc", "validate")
AXIS_NAMES = ("delta_bar", "P_l", "Omega_l", "g_coulomb", "kappa", "g_cav")
SPACINGS = ("linear", "log")

FREQUENCY = "frequency"
RATE = "rate"
LENGTH = "length"
MASS = "mass"
POWER = "power"
PURE = "pure"

_SI_SUFFIXES = {
    FREQUENCY: {"Hz": TWO_PI, "kHz": TWO_PI * 1e3, "MHz": TWO_PI * 1e6, "rad_s": 1.0},
    RATE: {"rad_s": 1.0},
    LENGTH: {"m": 1.0, "mm": 1e-3, "nm": 1e-9},
    MASS: {"kg": 1.0, "ng": 1e-12},
    POWER: {"W": 1.0, "uW": 1e-6},
    PURE: {"dimensionless": 1.0},
}

AXIS_KINDS = {
    "delta_bar": FREQUENCY,
    "P_l": POWER,
    "Omega_l": RATE,
    "g_coulomb": FREQUENCY,
    "kappa": FREQUENCY,
    "g_cav": FREQUENCY,
}

# key -> (kind or special handler tag)
_SECTION_KEYS = {
    "": {"preset": "preset", "units": "units"},
    "cavity": {
        "kappa": FREQUENCY,
        "detuning": FREQUENCY,
        "detuning_mode": "detuning_mode",
        "length": LENGTH,
        "wavelength": LENGTH,
    },
    "mech1": {"mass": MASS, "omega": FREQUENCY, "gamma": FREQUENCY, "quality": PURE},
    "mech2": {"mass": MASS, "omega": FREQUENCY, "gamma": FREQUENCY, "quality": PURE},
    "coupling": {"g_cav": FREQUENCY, "g_coulomb": FREQUENCY},
    "drive": {
        "power": POWER,
        "pump_amplitude": RATE,
        "probe_power": POWER,
        "probe_amplitude": RATE,
    },
    "sweep": {
        "scenario": "scenario",
        "convention": "convention",
        "axis1": "axis",
        "axis2": "axis",
        "axis1_min": "axis_value",
        "axis1_max": "axis_value",
        "axis2_min": "axis_value",
        "axis2_max": "axis_value",
        "axis1_points": "int",
        "axis2_points": "int",
        "axis1_spacing": "spacing",
        "axis2_spacing": "spacing",
    },
}


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter with an inclusive range."""

    name: str
    lo: float
    hi: float
    points: int
    spacing: str = "linear"

    def values(self):
        import numpy as np

        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepSpec:
    """Scenario, swept axes and the reporting convention."""

    scenario: str
    axes: tuple[SweepAxis, ...] = ()
    convention: str = "paper-corrected"


def _blank_state() -> dict:
    mech = {"mass": None, "omega": None, "gamma": None, "quality": None}
    return {
        "unit_mode": None,
        "cavity": {
            "kappa": None,
            "detuning_mode": "explicit",
            "detuning": None,
            "length": None,
            "wavelength": None,
        },
        "mech1": dict(mech),
        "mech2": dict(mech),
        "coupling": {"g_cav": None, "g_coulomb": 0.0},
        "drive": {
            "pump_power": None,
            "pump_amplitude": None,
            "probe_power": None,
            "probe_amplitude": None,
        },
    }


def _parse_physical(value_text: str, kind: str, unit_mode: str, line_no: int) -> float:
    tokens = value_text.split()
    if len(tokens) == 1:
        raise ConfigError(f"missing unit suffix on physical value {value_text!r}", line=line_no)
    if len(tokens) != 2:
        raise ConfigError(f"expected '<number> <unit>', got {value_text!r}", line=line_no)
    number_text, suffix = tokens
    try:
        number = float(number_text)
    except ValueError:
        raise ConfigError(f"not a number: {number_text!r}", line=line_no) from None
    mode = unit_mode or SI
    if kind == PURE:
        allowed = {"dimensionless": 1.0}
    elif mode == DIMENSIONLESS:
        allowed = {"dimensionless": 1.0}
    else:
        allowed = _SI_SUFFIXES[kind]
    if suffix not in allowed:
        raise ConfigError(
            f"unit {suffix!r} not valid for a {kind} value in {mode} mode "
            f"(allowed: {', '.join(sorted(allowed))})",
            line=line_no,
        )
    return number * allowed[suffix]


def _parse_enum(value: str, choices, what: str, line_no: int) -> str:
    if value not in choices:
        raise ConfigError(f"{what} must be one of {', '.join(choices)}; got {value!r}", line=line_no)
    return value


def parse_config(text: str):
    """Parse configuration text into (SystemParams, SweepSpec | None)."""
    state = _blank_state()
    sweep_raw: dict = {}
    section = ""
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTION_KEYS or section == "":
                raise ConfigError(f"unknown section [{section}]", line=line_no)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ConfigError(f"empty value for key {key!r}", line=line_no)
        keys = _SECTION_KEYS.get(section, {})
        if key not in keys:
            where = f"section [{section}]" if section else "top level"
            raise ConfigError(f"unknown key {key!r} in {where}", line=line_no)
        kind = keys[key]

        if kind == "preset":
            if value not in PRESET_NAMES:
                raise ConfigError(
                    f"unknown preset {value!r} (available: {', '.join(PRESET_NAMES)})",
                    line=line_no,
                )
            state = preset_state(value)
        elif kind == "units":
            mode = _parse_enum(value, (SI, DIMENSIONLESS), "units", line_no)
            state["unit_mode"] = mode
        elif kind == "detuning_mode":
            state["cavity"]["detuning_mode"] = _parse_enum(
                value, ("explicit", "locked"), "detuning_mode", line_no
            )
        elif kind == "scenario":
            sweep_raw["scenario"] = _parse_enum(value, SCENARIOS, "scenario", line_no)
        elif kind == "convention":
            sweep_raw["convention"] = _parse_enum(
                value, ("paper-corrected", "intracavity"), "convention", line_no
            )
        elif kind == "axis":
            sweep_raw[key] = _parse_enum(value, AXIS_NAMES, key, line_no)
        elif kind == "axis_value":
            sweep_raw[key] = (value, line_no)  # kind known once the axis name is
        elif kind == "int":
            try:
                sweep_raw[key] = int(value)
            except ValueError:
                raise ConfigError(f"expected an integer for {key}, got {value!r}", line=line_no) from None
        elif kind == "spacing":
            sweep_raw[key] = _parse_enum(value, SPACINGS, key, line_no)
        else:
            number = _parse_physical(value, kind, state["unit_mode"], line_no)
            _assign(state, section, key, number, line_no)

    params = resolve_state(state)
    sweep = _resolve_sweep(sweep_raw, state["unit_mode"] or SI) if sweep_raw else None
    return params, sweep


def _assign(state: dict, section: str, key: str, number: float, line_no: int) -> None:
    if section == "cavity":
        if key == "detuning":
            state["cavity"]["detuning"] = number
            state["cavity"]["detuning_mode"] = "explicit"
        else:
            state["cavity"][key] = number
    elif section in ("mech1", "mech2"):
        state[section][key] = number
        if key == "gamma":
            state[section]["quality"] = None
        elif key == "quality":
            state[section]["gamma"] = None
    elif section == "coupling":
        state["coupling"][key] = number
    elif section == "drive":
        if key == "power":
            state["drive"]["pump_power"] = number
            state["drive"]["pump_amplitude"] = None
        elif key == "pump_amplitude":
            state["drive"]["pump_amplitude"] = number
            state["drive"]["pump_power"] = None
        elif key == "probe_power":
            state["drive"]["probe_power"] = number
            state["drive"]["probe_amplitude"] = None
        else:
            state["drive"]["probe_amplitude"] = number
            state["drive"]["probe_power"] = None
    else:  # pragma: no cover - key table prevents this
        raise ConfigError(f"unhandled section {section!r}", line=line_no)


def _require(value, what):
    if value is None:
        raise ConfigError(f"missing required parameter: {what}")
    return value


def _resolve_mech(entry: dict, label: str, unit_mode: str) -> MechanicalMode:
    mass = entry["mass"]
    if mass is None:
        if unit_mode != DIMENSIONLESS:
            raise ConfigError(f"missing required parameter: {label}.mass")
        mass = 1.0
    omega = _require(entry["omega"], f"{label}.omega")
    gamma = entry["gamma"]
    if gamma is None:
        quality = _require(entry["quality"], f"{label}.gamma (or {label}.quality)")
        if quality <= 0:
            raise ConfigError(f"{label}.quality must be positive")
        gamma = omega / quality
    try:
        return MechanicalMode(mass=mass, omega=omega, gamma=gamma)
    except ValueError as exc:
        raise ConfigError(f"{label}: {exc}") from exc


def resolve_state(state: dict) -> SystemParams:
    """Turn raw builder state into validated SystemParams."""
    unit_mode = state["unit_mode"] or SI
    cav = state["cavity"]
    mech1 = _resolve_mech(state["mech1"], "mech1", unit_mode)
    mech2 = _resolve_mech(state["mech2"], "mech2", unit_mode)
    kappa = _require(cav["kappa"], "cavity.kappa")
    detuning_mode = cav["detuning_mode"]
    detuning = 0.0
    if detuning_mode == "explicit":
        detuning = _require(cav["detuning"], "cavity.detuning (or detuning_mode = locked)")
    try:
        cavity = CavityParams(
            kappa=kappa,
            detuning_mode=detuning_mode,
            detuning=detuning,
            length=cav["length"],
            pump_wavelength=cav["wavelength"],
        )
    except ValueError as exc:
        raise ConfigError(f"cavity: {exc}") from exc
    g_cav = state["coupling"]["g_cav"]
    if g_cav is None:
        if unit_mode == DIMENSIONLESS:
            raise ConfigError("missing required parameter: coupling.g_cav")
        g_cav = default_g_cav(cavity, mech1.omega)
    try:
        coupling = CouplingParams(g_cav=g_cav, g_coulomb=state["coupling"]["g_coulomb"])
        drive = DriveParams(**state["drive"])
        return SystemParams(
            cavity=cavity,
            mech1=mech1,
            mech2=mech2,
            coupling=coupling,
            drive=drive,
            unit_mode=unit_mode,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_sweep(raw: dict, unit_mode: str) -> SweepSpec:
    if "scenario" not in raw:
        raise ConfigError("sweep section needs a scenario")
    axes = []
    for idx in (1, 2):
        name = raw.get(f"axis{idx}")
        extras = [k for k in raw if k.startswith(f"axis{idx}_")]
        if name is None:
            if extras:
                raise ConfigError(f"axis{idx}_* keys given without axis{idx}")
            continue
        kind = AXIS_KINDS[name]
        bounds = {}
        for end in ("min", "max"):
            key = f"axis{idx}_{end}"
            if key not in raw:
                raise ConfigError(f"missing {key} for axis {name}")
            text, line_no = raw[key]
            bounds[end] = _parse_physical(text, kind, unit_mode, line_no)
        points = raw.get(f"axis{idx}_points")
        if points is None:
            raise ConfigError(f"missing axis{idx}_points for axis {name}")
        spacing = raw.get(f"axis{idx}_spacing", "linear")
        axis = SweepAxis(name=name, lo=bounds["min"], hi=bounds["max"], points=points, spacing=spacing)
        _validate_axis(axis)
        axes.append(axis)
    if len(axes) == 2 and axes[0].name == axes[1].name:
        raise ConfigError("swept parameter names must be distinct")
    return SweepSpec(
        scenario=raw["scenario"],
        axes=tuple(axes),
        convention=raw.get("convention", "paper-corrected"),
    )


def _validate_axis(axis: SweepAxis) -> None:
    if axis.points < 2:
        raise ConfigError(f"axis {axis.name}: points must be >= 2, got {axis.points}")
    if not (math.isfinite(axis.lo) and math.isfinite(axis.hi)):
        raise ConfigError(f"axis {axis.name}: range must be finite")
    if axis.spacing == "log" and (axis.lo <= 0 or axis.hi <= 0):
        raise ConfigError(f"axis {axis.name}: log spacing requires positive bounds")
    if axis.spacing not in SPACINGS:
        raise ConfigError(f"axis {axis.name}: unknown spacing {axis.spacing!r}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def serialize_config(params: SystemParams, sweep: SweepSpec | None = None) -> str:
    """Canonical config text that parses back to identical values.

    SI quantities are emitted in base units (rad_s, kg, m, W); dimensionless
    runs use the dimensionless suffix throughout.
    """
    dimless = params.unit_mode == DIMENSIONLESS
    freq = mass = length = power = rate = "dimensionless"
    if not dimless:
        freq, mass, length, power, rate = "rad_s", "kg", "m", "W", "rad_s"
    lines = [f"units = {params.unit_mode}"]
    lines.append("[cavity]")
    lines.append(f"kappa = {_fmt(params.cavity.kappa)} {freq}")
    if params.cavity.detuning_mode == "locked":
        lines.append("detuning_mode = locked")
    else:
        lines.append(f"detuning = {_fmt(params.cavity.detuning)} {freq}")
    if params.cavity.length is not None:
        lines.append(f"length = {_fmt(params.cavity.length)} {length}")
    if params.cavity.pump_wavelength is not None:
        lines.append(f"wavelength = {_fmt(params.cavity.pump_wavelength)} {length}")
    for label, mech in (("mech1", params.mech1), ("mech2", params.mech2)):
        lines.append(f"[{label}]")
        lines.append(f"mass = {_fmt(mech.mass)} {mass}")
        lines.append(f"omega = {_fmt(mech.omega)} {freq}")
        lines.append(f"gamma = {_fmt(mech.gamma)} {freq}")
    lines.append("[coupling]")
    lines.append(f"g_cav = {_fmt(params.coupling.g_cav)} {freq}")
    lines.append(f"g_coulomb = {_fmt(params.coupling.g_coulomb)} {freq}")
    lines.append("[drive]")
    drive = params.drive
    if drive.pump_power is not None:
        lines.append(f"power = {_fmt(drive.pump_power)} {power}")
    else:
        lines.append(f"pump_amplitude = {_fmt(drive.pump_amplitude)} {rate}")
    if drive.probe_power is not None:
        lines.append(f"probe_power = {_fmt(drive.probe_power)} {power}")
    elif drive.probe_amplitude is not None:
        lines.append(f"probe_amplitude = {_fmt(drive.probe_amplitude)} {rate}")
    if sweep is not None:
        lines.append("[sweep]")
        lines.append(f"scenario = {sweep.scenario}")
        lines.append(f"convention = {sweep.convention}")
        axis_unit = {"delta_bar": freq, "P_l": power, "Omega_l": rate,
                     "g_coulomb": freq, "kappa": freq, "g_cav": freq}
        for idx, axis in enumerate(sweep.axes, start=1):
            unit = axis_unit[axis.name]
            lines.append(f"axis{idx} = {axis.name}")
            lines.append(f"axis{idx}_min = {_fmt(axis.lo)} {unit}")
            lines.append(f"axis{idx}_max = {_fmt(axis.hi)} {unit}")
            lines.append(f"axis{idx}_points = {axis.points}")
            lines.append(f"axis{idx}_spacing = {axis.spacing}")
    return "\n".join(lines) + "\n"


def parse_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
