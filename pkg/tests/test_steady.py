import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oemsim.errors import StaticInstabilityError
from oemsim.steady import photon_number_roots, solve_steady_state
from oemsim.validate import dimensionless_system, system_for_beta


def bistable_system(pump):
    """Reference dimensionless configuration with a bistable knee."""
    return dimensionless_system(
        kappa=0.1, g_cav=1.0, pump_amplitude=pump, detuning_mode="explicit", detuning=1.0
    )


def brute_force_root_count(a, delta_c, kappa, omega_l, n_max, samples=200_001):
    """Independent oracle: count sign changes of the fixed-point function."""
    n = np.linspace(0.0, n_max, samples)
    f = n * (kappa**2 + (delta_c - a * n) ** 2) - omega_l**2
    signs = np.sign(f)
    crossings = np.nonzero(np.diff(signs) != 0)[0]
    return len(crossings)


def test_undriven_cavity():
    params = dimensionless_system(kappa=0.3, pump_amplitude=0.0,
                                  detuning_mode="explicit", detuning=0.8)
    op = solve_steady_state(params)
    assert op.photon_number == 0.0
    assert op.q1s == 0.0 and op.q2s == 0.0
    assert op.delta_eff == 0.8
    assert op.branch_count == 1


def test_linear_cavity_on_resonance():
    params = dimensionless_system(kappa=0.25, g_cav=0.0, pump_amplitude=0.4,
                                  detuning_mode="explicit", detuning=0.0)
    op = solve_steady_state(params)
    assert op.photon_number == pytest.approx(0.4**2 / 0.25**2, rel=1e-15)


def test_bistable_scan_finds_three_branches():
    scan = np.linspace(0.05, 0.45, 81)
    bistable = [
        float(p) for p in scan if solve_steady_state(bistable_system(float(p))).branch_count == 3
    ]
    assert bistable, "no bistable point located on the scan"
    # probe mid-window, away from the knees where two roots nearly coincide
    pump = bistable[len(bistable) // 2]
    count = brute_force_root_count(1.0, 1.0, 0.1, pump, n_max=2.0)
    assert count == 3
    # every reported root satisfies the fixed point to 1e-12
    roots = photon_number_roots(1.0, 1.0, 0.1, pump)
    assert len(roots) == 3
    for n in roots:
        residual = abs(n * (0.1**2 + (1.0 - n) ** 2) - pump**2)
        assert residual <= 1e-12 * max(pump**2, 1.0)
    op = solve_steady_state(bistable_system(pump))
    assert op.photon_number == pytest.approx(roots[0])


def test_lowest_branch_continuity_below_knee():
    previous = -1.0
    previous_count = None
    for pump in np.linspace(0.01, 0.45, 120):
        op = solve_steady_state(bistable_system(float(pump)))
        if previous_count is not None and op.branch_count == previous_count:
            assert op.photon_number >= previous
        previous, previous_count = op.photon_number, op.branch_count


def test_residual_bound_holds_on_random_draws(rng):
    for _ in range(200):
        params = system_for_beta(
            kappa=float(rng.uniform(0.05, 0.5)),
            beta=float(rng.uniform(0.0, 1e-2)),
            g_coulomb=float(rng.uniform(0.0, 0.1)),
        )
        op = solve_steady_state(params)
        assert op.residual <= 1e-12 * max(params.pump_amplitude() ** 2, 1.0)


def test_mirror2_displacement_ratio_is_exact():
    params = system_for_beta(kappa=0.3, beta=4e-3, g_coulomb=0.17)
    op = solve_steady_state(params)
    hbar = params.hbar
    m2 = params.mech2
    assert op.q2s == -hbar * params.coupling.g_coulomb * op.q1s / (m2.mass * m2.omega**2)


def test_locked_mode_pins_effective_detuning():
    params = system_for_beta(kappa=0.2, beta=5e-3)
    op = solve_steady_state(params)
    assert op.delta_eff == 1.0
    a = params.hbar * params.coupling.g_cav**2 / params.stiffness()
    assert op.delta_c == pytest.approx(1.0 + a * op.photon_number, rel=1e-15)


def test_static_instability_propagates():
    params = dimensionless_system(kappa=0.2, g_coulomb=1.5, pump_amplitude=0.1,
                                  detuning_mode="explicit", detuning=1.0)
    with pytest.raises(StaticInstabilityError):
        solve_steady_state(params)


def test_solver_is_pure():
    params = system_for_beta(kappa=0.31, beta=3e-3, g_coulomb=0.12)
    a = solve_steady_state(params)
    b = solve_steady_state(params)
    assert (a.q1s, a.q2s, a.cs, a.photon_number, a.delta_eff) == (
        b.q1s,
        b.q2s,
        b.cs,
        b.photon_number,
        b.delta_eff,
    )


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(min_value=0.1, max_value=10.0), pump=st.floats(min_value=0.01, max_value=2.0))
def test_quadratic_pump_scaling_without_backaction(scale, pump):
    base = dimensionless_system(kappa=0.3, g_cav=0.0, pump_amplitude=pump,
                                detuning_mode="explicit", detuning=0.6)
    scaled = dimensionless_system(kappa=0.3, g_cav=0.0, pump_amplitude=scale * pump,
                                  detuning_mode="explicit", detuning=0.6)
    n_base = solve_steady_state(base).photon_number
    n_scaled = solve_steady_state(scaled).photon_number
    assert n_scaled == pytest.approx(scale**2 * n_base, rel=1e-12)
