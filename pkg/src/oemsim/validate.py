"""Self-validation: cross-checks between the closed form and both oracles.

Runs deterministic randomized suites (fixed seed) and reports one
pass/fail entry per check with a machine-readable JSON rendering.  This is
what the ``validate`` CLI subcommand executes; exit status 0 means every
check passed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .linsys import build_linear_system, solve_sidebands
from .params import (
    DIMENSIONLESS,
    CavityParams,
    CouplingParams,
    DriveParams,
    MechanicalMode,
    SystemParams,
)
from .response import group_delay, sideband_amplitude, transmission
from .steady import photon_number_roots, solve_steady_state
from .timedomain import TrajectoryConfig, probe_response

DEFAULT_SEED = 20260810
ORACLE_TOL = 1e-9
CONDITION_ACCEPT = 1e8
QUALITY_GAMMA = 1.0 / 6700.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        payload = {
            "seed": self.seed,
            "passed": bool(self.passed),
            "checks": [
                {"name": c.name, "passed": bool(c.passed), "detail": c.detail}
                for c in self.checks
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def summary_lines(self):
        for c in self.checks:
            yield f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.detail}"


def dimensionless_system(
    kappa: float,
    gamma1: float = QUALITY_GAMMA,
    gamma2: float = QUALITY_GAMMA,
    g_cav: float = 0.1,
    g_coulomb: float = 0.0,
    pump_amplitude: float | None = None,
    pump_power: float | None = None,
    probe_amplitude: float = 0.0,
    omega2: float = 1.0,
    mass2: float = 1.0,
    detuning_mode: str = "locked",
    detuning: float = 1.0,
) -> SystemParams:
    """Convenience constructor for dimensionless parameter sets."""
    if pump_amplitude is None and pump_power is None:
        pump_amplitude = 0.0
    return SystemParams(
        cavity=CavityParams(kappa=kappa, detuning_mode=detuning_mode, detuning=detuning),
        mech1=MechanicalMode(mass=1.0, omega=1.0, gamma=gamma1),
        mech2=MechanicalMode(mass=mass2, omega=omega2, gamma=gamma2),
        coupling=CouplingParams(g_cav=g_cav, g_coulomb=g_coulomb),
        drive=DriveParams(
            pump_power=pump_power,
            pump_amplitude=pump_amplitude,
            probe_amplitude=probe_amplitude if probe_amplitude > 0 else None,
        ),
        unit_mode=DIMENSIONLESS,
    )


def system_for_beta(kappa: float, beta: float, g_coulomb: float = 0.0, g_cav: float = 0.1,
                    **kwargs) -> SystemParams:
    """Locked-detuning dimensionless system with a requested beta coefficient."""
    n = 2.0 * beta / g_cav**2
    pump = math.sqrt(n * (kappa**2 + 1.0))
    return dimensionless_system(
        kappa=kappa, g_cav=g_cav, g_coulomb=g_coulomb, pump_amplitude=pump, **kwargs
    )


def draw_oracle_case(rng: np.random.Generator):
    """One random dimensionless case for the closed-form/linear-system check."""
    kappa = rng.uniform(0.05, 0.5)
    beta = rng.uniform(0.0, 1e-2)
    alpha_strength = rng.uniform(0.0, 1e-2)  # hbar^2 g_c^2 / (m1 m2)
    delta = rng.uniform(0.5, 1.5)
    params = system_for_beta(kappa, beta, g_coulomb=math.sqrt(alpha_strength))
    return params, delta


def check_closed_form_vs_linsys(rng: np.random.Generator, cases: int = 200) -> CheckResult:
    worst = 0.0
    accepted = 0
    tries = 0
    while accepted < cases and tries < cases * 20:
        tries += 1
        params, delta = draw_oracle_case(rng)
        op = solve_steady_state(params)
        sol = solve_sidebands(delta, params, op)
        if sol.condition_estimate >= CONDITION_ACCEPT:
            continue
        accepted += 1
        x = sideband_amplitude(delta, params, op)
        worst = max(worst, abs(x - sol.c_minus) / abs(sol.c_minus))
    passed = accepted == cases and worst <= ORACLE_TOL
    return CheckResult(
        "closed_form_vs_linsys",
        passed,
        f"{accepted} cases, max relative error {worst:.3e} (tol {ORACLE_TOL:.0e})",
    )


def check_pump_off_allpass(rng: np.random.Generator) -> CheckResult:
    worst_mag = 0.0
    worst_tau = 0.0
    for _ in range(50):
        kappa = rng.uniform(0.02, 0.5)
        delta_c = rng.uniform(0.2, 2.0)
        params = dimensionless_system(
            kappa=kappa, pump_amplitude=0.0, detuning_mode="explicit", detuning=delta_c
        )
        op = solve_steady_state(params)
        for delta in np.linspace(delta_c - 3.0, delta_c + 3.0, 41):
            sample = transmission(float(delta), params, op)
            worst_mag = max(worst_mag, abs(abs(sample.t_p) - 1.0))
        tau = group_delay(delta_c, params, op)
        worst_tau = max(worst_tau, abs(tau - 2.0 / kappa) / (2.0 / kappa))
    passed = worst_mag <= 1e-12 and worst_tau <= 1e-9
    return CheckResult(
        "pump_off_allpass",
        passed,
        f"max | |t_p|-1 | = {worst_mag:.3e}, max tau error {worst_tau:.3e}",
    )


def check_factorization_identity(rng: np.random.Generator, draws: int = 1000) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        kappa = rng.uniform(0.02, 0.5)
        delta_c = rng.uniform(0.2, 2.0)
        delta = rng.uniform(-2.0, 2.0)
        params = dimensionless_system(
            kappa=kappa, pump_amplitude=0.0, detuning_mode="explicit", detuning=delta_c
        )
        op = solve_steady_state(params)
        x = sideband_amplitude(delta, params, op)
        reference = -1j / (delta_c - delta - 1j * kappa)
        worst = max(worst, abs(x - reference) / abs(x))
    passed = worst <= 1e-12
    return CheckResult(
        "factorization_identity", passed, f"{draws} draws, max relative deviation {worst:.3e}"
    )


def check_group_delay_methods(rng: np.random.Generator, draws: int = 1000) -> CheckResult:
    worst = 0.0
    used = 0
    while used < draws:
        params, delta = draw_oracle_case(rng)
        op = solve_steady_state(params)
        sample = transmission(delta, params, op)
        if abs(sample.t_p) <= 1e-6:
            continue
        used += 1
        analytic = group_delay(delta, params, op, "analytic")
        fd = group_delay(delta, params, op, "finite-difference")
        worst = max(worst, abs(analytic - fd) / max(abs(analytic), 1e-300))
    passed = worst <= 1e-6
    return CheckResult(
        "group_delay_methods", passed, f"{used} points, max relative disagreement {worst:.3e}"
    )


def check_linsys_properties(rng: np.random.Generator) -> CheckResult:
    problems = []
    # exact linearity under power-of-two and pure-imaginary rhs scalings
    params, delta = draw_oracle_case(rng)
    op = solve_steady_state(params)
    a, b = build_linear_system(delta, params, op)
    x = np.linalg.solve(a, b)
    for s in (2.0, 0.5, 1j, 2j):
        if not np.array_equal(np.linalg.solve(a, s * b), s * x):
            problems.append(f"linearity violated for s = {s}")
    # gauge invariance
    sol_rot = solve_sidebands(delta, params, op, use_gauge_rotation=True)
    sol_raw = solve_sidebands(delta, params, op, use_gauge_rotation=False)
    gauge_err = abs(sol_rot.c_minus - sol_raw.c_minus) / abs(sol_rot.c_minus)
    if gauge_err > 1e-12:
        problems.append(f"gauge dependence {gauge_err:.3e}")
    # residuals over random draws
    for _ in range(50):
        params, delta = draw_oracle_case(rng)
        op = solve_steady_state(params)
        a, b = build_linear_system(delta, params, op)
        sol = solve_sidebands(delta, params, op)
        x_vec = np.array(
            [sol.c_minus, np.conj(sol.c_plus), sol.q1_minus, sol.q1_minus, sol.q2_minus, sol.q2_minus],
            dtype=complex,
        )
        residual = np.linalg.norm(a @ x_vec - b) / np.linalg.norm(b)
        if residual > 1e-10:
            problems.append(f"reconstructed residual {residual:.3e} at delta {delta:.3f}")
            break
    # Coulomb decoupling limit
    base = 0.0
    errors = []
    params0 = system_for_beta(0.3, 5e-3, g_coulomb=0.0)
    op0 = solve_steady_state(params0)
    reference = solve_sidebands(1.2, params0, op0).c_minus
    for g_c in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
        params_g = system_for_beta(0.3, 5e-3, g_coulomb=g_c)
        op_g = solve_steady_state(params_g)
        errors.append(abs(solve_sidebands(1.2, params_g, op_g).c_minus - reference))
    if not all(b < a for a, b in zip(errors, errors[1:])):
        problems.append(f"g_c -> 0 limit not monotone: {errors}")
    if errors[-1] >= 1e-10:
        problems.append(f"g_c -> 0 limit does not reach 1e-10: {errors[-1]:.3e}")
    passed = not problems
    return CheckResult("linsys_properties", passed, "; ".join(problems) or "all properties hold")


def check_steady_state(rng: np.random.Generator) -> CheckResult:
    problems = []
    worst_residual = 0.0
    for _ in range(100):
        params, _ = draw_oracle_case(rng)
        op = solve_steady_state(params)
        omega_sq = params.pump_amplitude() ** 2
        worst_residual = max(worst_residual, op.residual / max(omega_sq, 1.0))
    if worst_residual > 1e-12:
        problems.append(f"residual {worst_residual:.3e}")
    # bistability on the reference dimensionless scan
    found = None
    previous_n = -1.0
    for pump in np.linspace(0.05, 0.45, 81):
        params = dimensionless_system(
            kappa=0.1, g_cav=1.0, pump_amplitude=float(pump),
            detuning_mode="explicit", detuning=1.0,
        )
        op = solve_steady_state(params)
        if op.branch_count == 3 and found is None:
            found = float(pump)
        if found is None:
            if op.photon_number < previous_n:
                problems.append("lowest branch not monotone below the knee")
            previous_n = op.photon_number
    if found is None:
        problems.append("no bistable region found on the reference scan")
    # quadratic pump scaling for a linear cavity
    params1 = dimensionless_system(kappa=0.3, g_cav=0.0, pump_amplitude=0.2,
                                   detuning_mode="explicit", detuning=0.7)
    params2 = dimensionless_system(kappa=0.3, g_cav=0.0, pump_amplitude=0.6,
                                   detuning_mode="explicit", detuning=0.7)
    n1 = solve_steady_state(params1).photon_number
    n2 = solve_steady_state(params2).photon_number
    if abs(n2 - 9.0 * n1) > 1e-12 * n2:
        problems.append(f"pump scaling violated: {n2} vs {9 * n1}")
    passed = not problems
    detail = "; ".join(problems) or (
        f"max residual {worst_residual:.3e}; bistability first at pump {found:.4f}"
    )
    return CheckResult("steady_state", passed, detail)


def check_timedomain(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for kappa, gamma, g_cav, g_c, power, delta in (
        (0.2, 0.05, 0.10, 0.10, 1.0, 1.03),
        (0.3, 0.06, 0.08, 0.00, 1.5, 0.97),
    ):
        pump = math.sqrt(2.0 * kappa * power)
        params = dimensionless_system(
            kappa=kappa, gamma1=gamma, gamma2=gamma, g_cav=g_cav, g_coulomb=g_c,
            pump_power=power, pump_amplitude=None, probe_amplitude=1e-3 * pump,
        )
        config = TrajectoryConfig(
            duration=20.0 * 2.0 * math.pi / gamma,
            dt=(2.0 * math.pi / delta) / 16.0,
            integrator_tolerance=1e-9,
        )
        op = solve_steady_state(params)
        reference = solve_sidebands(delta, params, op).c_minus
        demod = probe_response(params, delta, config)
        worst = max(worst, abs(demod.c_minus_est - reference) / abs(reference))
    passed = worst <= 1e-2
    return CheckResult(
        "timedomain_end_to_end", passed, f"max relative error {worst:.3e} (tol 1e-02)"
    )


def check_demodulation(rng: np.random.Generator) -> CheckResult:
    from .timedomain import Trajectory, demodulate

    problems = []
    delta = 1.1
    t = np.arange(0.0, 4000.0, 0.3)
    field = 2.0 + 0.1 * np.exp(-1j * delta * t)
    states = np.zeros((t.size, 6))
    states[:, 4] = field.real
    states[:, 5] = field.imag
    config = TrajectoryConfig(duration=float(t[-1]), dt=0.3, transient_fraction=0.5)
    result = demodulate(Trajectory(t=t, states=states), delta, config)
    if abs(result.cs_est - 2.0) > 1e-12 or abs(result.c_minus_est - 0.1) > 1e-12:
        problems.append("exact three-tone projection failed")
    if abs(result.c_plus_est) > 1e-12 or result.leakage > 1e-24:
        problems.append("spurious tone content on a clean signal")
    noise = 1e-3 * (rng.standard_normal(t.size) + 1j * rng.standard_normal(t.size))
    states2 = states.copy()
    states2[:, 4] += noise.real
    states2[:, 5] += noise.imag
    noisy = demodulate(Trajectory(t=t, states=states2), delta, config)
    if abs(noisy.c_minus_est - 0.1) > 1e-3:
        problems.append(f"noisy coefficient error {abs(noisy.c_minus_est - 0.1):.2e}")
    expected_leak = float(np.sum(np.abs(noise) ** 2) / np.sum(np.abs(field + noise) ** 2))
    if not 0.1 * expected_leak < noisy.leakage < 10 * expected_leak:
        problems.append(f"leakage {noisy.leakage:.2e} vs expected {expected_leak:.2e}")
    passed = not problems
    return CheckResult("demodulation", passed, "; ".join(problems) or "exact and noisy cases hold")


def run_validation(seed: int = DEFAULT_SEED) -> ValidationReport:
    """Run every cross-check with a deterministic RNG stream per check."""
    checks = []
    suites = (
        check_closed_form_vs_linsys,
        check_pump_off_allpass,
        check_factorization_identity,
        check_group_delay_methods,
        check_linsys_properties,
        check_steady_state,
        check_demodulation,
        check_timedomain,
    )
    for index, fn in enumerate(suites):
        rng = np.random.default_rng([seed, index])
        checks.append(fn(rng))
    return ValidationReport(seed=seed, checks=tuple(checks))
