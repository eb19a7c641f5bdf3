"""Parameter-sweep engine: grid evaluation, parallel workers, tabular output.

Grid points are independent pure computations; a process pool evaluates
them concurrently and aggregation preserves declared row-major order
(axis1 outermost), so serial and parallel runs emit identical bytes.
A fresh steady state is solved at every grid point, since kappa, pump and
coupling sweeps all move the operating point.  Physics failures at a point
(instability, singular response) mark the row and the run continues.
"""
from __future__ import annotations

import datetime
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .config import SweepAxis, SweepSpec, serialize_config
from .errors import ConfigError, SimulationError
from .params import DriveParams, SystemParams
from .response import group_delay, transmission, transmission_maxima
from .steady import solve_steady_state

SPLITTING_WINDOW_FRACTION = 0.2  # half-width of the inner detuning scan, in units of omega1
SPLITTING_POINTS = 4001
DEFAULT_SPECTRUM_POINTS = 2001
NO_ERROR = "-"

_SPECTRUM_COLUMNS = (
    "delta",
    "re_X",
    "im_X",
    "re_t_p",
    "im_t_p",
    "transmission",
    "transmission_corrected",
    "transmission_intracavity",
    "photon_number",
    "branch_count",
)
_DELAY_COLUMNS = (
    "tau_g_fd",
    "tau_g_analytic",
    "transmission",
    "photon_number",
    "branch_count",
)
_SPLITTING_COLUMNS = (
    "n_maxima",
    "peak_lo",
    "peak_hi",
    "separation",
    "height_lo",
    "height_hi",
    "photon_number",
    "branch_count",
)


@dataclass(frozen=True)
class SweepResult:
    """Rows of one sweep plus everything needed to reproduce them."""

    params: SystemParams
    spec: SweepSpec
    columns: tuple[str, ...]
    rows: list[tuple]


def apply_override(params: SystemParams, name: str, value: float) -> SystemParams:
    """Return params with one swept quantity replaced."""
    if name == "kappa":
        return replace(params, cavity=replace(params.cavity, kappa=value))
    if name == "g_coulomb":
        return replace(params, coupling=replace(params.coupling, g_coulomb=value))
    if name == "g_cav":
        return replace(params, coupling=replace(params.coupling, g_cav=value))
    if name == "P_l":
        drive = params.drive
        return replace(
            params,
            drive=DriveParams(
                pump_power=value,
                probe_power=drive.probe_power,
                probe_amplitude=drive.probe_amplitude,
            ),
        )
    if name == "Omega_l":
        drive = params.drive
        return replace(
            params,
            drive=DriveParams(
                pump_amplitude=value,
                probe_power=drive.probe_power,
                probe_amplitude=drive.probe_amplitude,
            ),
        )
    raise ValueError(f"cannot override parameter {name!r}")


def _evaluate_point(params, scenario, convention, names, values):
    """One grid point -> data tuple (without the axis columns) + error slug."""
    overridden = params
    delta = None
    for name, value in zip(names, values):
        if name == "delta_bar":
            delta = params.mech1.omega + value
        else:
            overridden = apply_override(overridden, name, value)
    try:
        op = solve_steady_state(overridden)
        if scenario in ("spectrum", "phase"):
            sample = transmission(delta, overridden, op, convention)
            data = (
                sample.delta,
                sample.X.real,
                sample.X.imag,
                sample.t_p.real,
                sample.t_p.imag,
                sample.transmission,
                sample.transmission_corrected,
                sample.transmission_intracavity,
                op.photon_number,
                float(op.branch_count),
            )
        elif scenario in ("delay-vs-power", "delay-vs-kappa"):
            center = overridden.mech1.omega
            tau_fd = group_delay(center, overridden, op, "finite-difference", convention)
            tau_an = group_delay(center, overridden, op, "analytic", convention)
            sample = transmission(center, overridden, op, convention)
            data = (tau_fd, tau_an, sample.transmission, op.photon_number, float(op.branch_count))
        elif scenario == "splitting-vs-gc":
            w1 = overridden.mech1.omega
            peaks = transmission_maxima(
                overridden,
                op,
                convention,
                half_width=SPLITTING_WINDOW_FRACTION * w1,
                points=SPLITTING_POINTS,
            )
            top_two = sorted(sorted(peaks, key=lambda p: p[1])[-2:])
            if len(top_two) == 2:
                (lo, hlo), (hi, hhi) = top_two
                sep = hi - lo
            elif len(top_two) == 1:
                (lo, hlo), (hi, hhi), sep = top_two[0], (math.nan, math.nan), math.nan
            else:
                (lo, hlo), (hi, hhi), sep = (math.nan, math.nan), (math.nan, math.nan), math.nan
            data = (
                float(len(peaks)),
                lo,
                hi,
                sep,
                hlo,
                hhi,
                op.photon_number,
                float(op.branch_count),
            )
        else:
            raise ValueError(f"scenario {scenario!r} is not grid-evaluable")
        return data, NO_ERROR
    except SimulationError as exc:
        slug = type(exc).__name__.removesuffix("Error")
        n_data = {
            "spectrum": len(_SPECTRUM_COLUMNS),
            "phase": len(_SPECTRUM_COLUMNS),
            "delay-vs-power": len(_DELAY_COLUMNS),
            "delay-vs-kappa": len(_DELAY_COLUMNS),
            "splitting-vs-gc": len(_SPLITTING_COLUMNS),
        }[scenario]
        return (math.nan,) * n_data, slug


def _evaluate_chunk(task):
    params, scenario, convention, names, chunk = task
    return [_evaluate_point(params, scenario, convention, names, values) for values in chunk]


def _resolve_axes(params: SystemParams, spec: SweepSpec) -> SweepSpec:
    scenario = spec.scenario
    axes = spec.axes
    if scenario in ("spectrum", "phase"):
        if not any(a.name == "delta_bar" for a in axes):
            if axes and scenario == "phase":
                raise ConfigError("phase sweeps need a delta_bar axis (innermost)")
            hw = SPLITTING_WINDOW_FRACTION * params.mech1.omega
            axes = axes + (SweepAxis("delta_bar", -hw, hw, DEFAULT_SPECTRUM_POINTS),)
        if scenario == "phase" and axes[-1].name != "delta_bar":
            raise ConfigError("phase sweeps need delta_bar as the innermost axis")
    elif scenario in ("delay-vs-power", "delay-vs-kappa"):
        wanted = ("P_l", "Omega_l") if scenario == "delay-vs-power" else ("kappa",)
        if len(axes) != 1 or axes[0].name not in wanted:
            raise ConfigError(f"{scenario} needs exactly one axis from {wanted}")
    elif scenario == "splitting-vs-gc":
        if len(axes) != 1 or axes[0].name != "g_coulomb":
            raise ConfigError("splitting-vs-gc needs exactly one g_coulomb axis")
    else:
        raise ConfigError(f"scenario {scenario!r} cannot run as a sweep")
    return replace(spec, axes=axes)


def run_sweep(params: SystemParams, spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate the sweep grid; row order is row-major over axes as declared."""
    spec = _resolve_axes(params, spec)
    names = tuple(axis.name for axis in spec.axes)
    grids = [axis.values() for axis in spec.axes]
    mesh = [g.ravel() for g in np.meshgrid(*grids, indexing="ij")] if grids else []
    points = list(zip(*(m.tolist() for m in mesh))) if mesh else [()]

    if jobs > 1 and len(points) > 1:
        chunk_size = max(1, len(points) // (jobs * 4))
        chunks = [points[i : i + chunk_size] for i in range(0, len(points), chunk_size)]
        tasks = [(params, spec.scenario, spec.convention, names, chunk) for chunk in chunks]
        outcomes = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk_result in pool.map(_evaluate_chunk, tasks):
                outcomes.extend(chunk_result)
    else:
        outcomes = [
            _evaluate_point(params, spec.scenario, spec.convention, names, values)
            for values in points
        ]

    scenario_columns = {
        "spectrum": _SPECTRUM_COLUMNS,
        "phase": _SPECTRUM_COLUMNS + ("phase",),
        "delay-vs-power": _DELAY_COLUMNS,
        "delay-vs-kappa": _DELAY_COLUMNS,
        "splitting-vs-gc": _SPLITTING_COLUMNS,
    }[spec.scenario]
    columns = names + scenario_columns + ("error",)

    rows = []
    for values, (data, err) in zip(points, outcomes):
        rows.append(tuple(values) + tuple(data) + (err,))
    if spec.scenario == "phase":
        rows = _attach_phase(rows, names, columns)
    return SweepResult(params=params, spec=spec, columns=columns, rows=rows)


def _attach_phase(rows, names, columns):
    """Unwrap arg(t_p) along each innermost delta_bar block."""
    i_re = len(names) + _SPECTRUM_COLUMNS.index("re_t_p")
    i_im = len(names) + _SPECTRUM_COLUMNS.index("im_t_p")
    # input rows do not carry the phase column yet; error is their last entry
    i_err = len(names) + len(_SPECTRUM_COLUMNS)
    block = len(rows)
    if len(names) > 1:
        # rows are row-major, so contiguous runs of the last axis form blocks
        block = _infer_block(rows, len(names))
    out = []
    for start in range(0, len(rows), block):
        previous = None
        for row in rows[start : start + block]:
            if row[i_err] != NO_ERROR:
                out.append(row[:i_err] + (math.nan,) + row[i_err:])
                previous = None
                continue
            raw = math.atan2(row[i_im], row[i_re])
            if previous is None:
                phase = raw
            else:
                jump = raw - previous
                jump -= 2.0 * math.pi * round(jump / (2.0 * math.pi))
                phase = previous + jump
            previous = phase
            out.append(row[:i_err] + (phase,) + row[i_err:])
    return out


def _infer_block(rows, n_names):
    first = rows[0][: n_names - 1]
    for i, row in enumerate(rows[1:], start=1):
        if row[: n_names - 1] != first:
            return i
    return len(rows)


def _format_value(v) -> str:
    if isinstance(v, str):
        return v
    return f"{v:.17g}"


def render_table(result: SweepResult, fmt: str = "csv", timestamp: bool = True) -> str:
    """Render a sweep table with a provenance header that reproduces the run.

    ``csv`` is comma-separated with a plain column-header row; ``gnuplot``
    is whitespace-separated with a blank line between outer-axis blocks.
    Doubles carry 17 significant digits; the header echoes the resolved
    configuration between config-begin/config-end markers.
    """
    if fmt not in ("csv", "gnuplot"):
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"# oemsim {__version__} sweep output"]
    if timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        lines.append(f"# generated: {stamp}")
    lines.append(f"# convention = {result.spec.convention}")
    lines.append("# config-begin")
    for cfg_line in serialize_config(result.params, result.spec).rstrip("\n").split("\n"):
        lines.append(f"# {cfg_line}")
    lines.append("# config-end")
    lines.append("# columns: " + ",".join(result.columns))
    sep = "," if fmt == "csv" else " "
    if fmt == "csv":
        lines.append(",".join(result.columns))
    block = None
    if fmt == "gnuplot" and len(result.spec.axes) > 1:
        block = _infer_block(result.rows, len(result.spec.axes))
    for i, row in enumerate(result.rows):
        if block and i > 0 and i % block == 0:
            lines.append("")
        lines.append(sep.join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(result: SweepResult, path, fmt: str = "csv", timestamp: bool = True) -> None:
    """Write `render_table` output to ``path``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_table(result, fmt=fmt, timestamp=timestamp))


def read_sweep_csv(path):
    """Read back an emitted table: (config_text, columns, rows)."""
    config_lines: list[str] = []
    columns: tuple[str, ...] = ()
    rows = []
    in_config = False
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("# config-begin"):
                in_config = True
                continue
            if line.startswith("# config-end"):
                in_config = False
                continue
            if in_config:
                config_lines.append(line[2:] if line.startswith("# ") else line)
                continue
            if line.startswith("# columns: "):
                columns = tuple(line[len("# columns: ") :].split(","))
                continue
            if line.startswith("#") or not line.strip():
                continue
            parts = line.split(",") if "," in line else line.split()
            if parts == list(columns):
                continue
            values = [parts[i] if columns[i] == "error" else float(parts[i]) for i in range(len(parts))]
            rows.append(tuple(values))
    return "\n".join(config_lines) + "\n", columns, rows
