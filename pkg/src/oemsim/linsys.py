"""Independent sideband oracle: linearize the mean-value equations and solve.

The fluctuation ansatz h = h_s + h_- e^{-i delta t} + h_+ e^{+i delta t}
turns the equations of motion, linearized about the operating point, into a
6x6 complex system for (c_-, c_+^*, q1_-, q1_+^*, q2_-, q2_+^*).  Nothing
here reuses the closed-form response; agreement between the two is the
central cross-validation of the package.  The solve also yields the
four-wave-mixing amplitude c_+ that the closed form does not provide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularResponseError
from .params import SystemParams
from .steady import OperatingPoint

CONDITION_LIMIT = 1e12
RESIDUAL_LIMIT = 1e-12
REFINEMENT_STEPS = 3


@dataclass(frozen=True)
class SidebandSolution:
    """Sideband amplitudes per unit probe drive."""

    c_minus: complex  # units s, comparable to the closed-form X
    c_plus: complex  # normalized by eps_p^*, units s
    q1_minus: complex  # m s
    q2_minus: complex  # m s
    condition_estimate: float


def build_linear_system(
    delta: float,
    params: SystemParams,
    op: OperatingPoint,
    use_gauge_rotation: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix and right-hand side for the sideband unknowns.

    The right-hand side carries the probe only in the c_- row, normalized
    to one.  With the default gauge rotation the steady field enters as its
    magnitude; observables are unaffected (tested), the rotated system is
    just easier to reason about.
    """
    m1, m2 = params.mech1, params.mech2
    hbar = params.hbar
    kappa = params.cavity.kappa
    g_cav = params.coupling.g_cav
    g_c = params.coupling.g_coulomb
    big_delta = op.delta_eff
    cs = abs(op.cs) if use_gauge_rotation else op.cs
    chi1 = delta**2 - m1.omega**2 + 1j * delta * m1.gamma
    chi2 = delta**2 - m2.omega**2 + 1j * delta * m2.gamma

    a = np.zeros((6, 6), dtype=complex)
    # cavity sideband rows
    a[0, 0] = kappa + 1j * (big_delta - delta)
    a[0, 2] = -1j * g_cav * cs
    a[1, 1] = kappa - 1j * (big_delta + delta)
    a[1, 3] = 1j * g_cav * np.conj(cs)
    # mirror 1, e^{-i delta t} and conjugated e^{+i delta t} rows
    a[2, 0] = -hbar * g_cav * np.conj(cs)
    a[2, 1] = -hbar * g_cav * cs
    a[2, 2] = -m1.mass * chi1
    a[2, 4] = hbar * g_c
    a[3, 0] = -hbar * g_cav * np.conj(cs)
    a[3, 1] = -hbar * g_cav * cs
    a[3, 3] = -m1.mass * chi1
    a[3, 5] = hbar * g_c
    # mirror 2 rows
    a[4, 2] = hbar * g_c
    a[4, 4] = -m2.mass * chi2
    a[5, 3] = hbar * g_c
    a[5, 5] = -m2.mass * chi2

    b = np.zeros(6, dtype=complex)
    b[0] = 1.0
    return a, b


def _column_scales(params: SystemParams) -> np.ndarray:
    """Express displacements in zero-point lengths so entries are commensurate."""
    hbar = params.hbar
    x1 = math.sqrt(hbar / (params.mech1.mass * params.mech1.omega))
    x2 = math.sqrt(hbar / (params.mech2.mass * params.mech2.omega))
    return np.array([1.0, 1.0, x1, x1, x2, x2])


def solve_sidebands(
    delta: float,
    params: SystemParams,
    op: OperatingPoint,
    use_gauge_rotation: bool = True,
) -> SidebandSolution:
    """Direct dense solve of the sideband system with residual control."""
    a, b = build_linear_system(delta, params, op, use_gauge_rotation)
    col = _column_scales(params)
    a_scaled = a * col[np.newaxis, :]
    row = np.max(np.abs(a_scaled), axis=1)
    if np.any(row == 0.0):
        raise SingularResponseError("sideband system has an empty row", delta=delta)
    a_eq = a_scaled / row[:, np.newaxis]
    b_eq = b / row
    condition = float(np.linalg.cond(a_eq))
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularResponseError(
            f"sideband system near-singular (condition {condition:.3g})", delta=delta
        )
    x = np.linalg.solve(a_eq, b_eq)
    norm_b = np.linalg.norm(b_eq)
    for _ in range(REFINEMENT_STEPS):
        residual = b_eq - a_eq @ x
        if np.linalg.norm(residual) <= RESIDUAL_LIMIT * norm_b:
            break
        x = x + np.linalg.solve(a_eq, residual)
    residual_norm = float(np.linalg.norm(b_eq - a_eq @ x))
    if residual_norm > RESIDUAL_LIMIT * norm_b:
        raise SingularResponseError(
            f"sideband solve residual {residual_norm:.3g} exceeds tolerance", delta=delta
        )
    x = x * col
    return SidebandSolution(
        c_minus=complex(x[0]),
        c_plus=complex(np.conj(x[1])),
        q1_minus=complex(x[2]),
        q2_minus=complex(x[4]),
        condition_estimate=condition,
    )
