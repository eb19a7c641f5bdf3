import math
import warnings

import numpy as np
import pytest

from oemsim.errors import (
    DivergenceError,
    InsufficientDataError,
    PerturbativeRegimeWarning,
    TrajectoryConfigWarning,
)
from oemsim.linsys import solve_sidebands
from oemsim.steady import solve_steady_state
from oemsim.timedomain import (
    Trajectory,
    TrajectoryConfig,
    demodulate,
    hamiltonian_value,
    integrate,
    probe_response,
)
from oemsim.validate import dimensionless_system


def quick_system(kappa=0.2, gamma=0.05, g_cav=0.1, g_c=0.1, power=1.0, ratio=1e-3):
    pump = math.sqrt(2.0 * kappa * power)
    return dimensionless_system(
        kappa=kappa, gamma1=gamma, gamma2=gamma, g_cav=g_cav, g_coulomb=g_c,
        pump_power=power, pump_amplitude=None,
        probe_amplitude=(ratio * pump if ratio else 0.0),
    )


def quick_config(gamma=0.05, delta=1.03, rtol=1e-9, transient=0.75):
    return TrajectoryConfig(
        duration=20.0 * 2.0 * math.pi / gamma,
        dt=(2.0 * math.pi / delta) / 16.0,
        transient_fraction=transient,
        integrator_tolerance=rtol,
    )


class TestTrajectoryConfig:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            TrajectoryConfig(duration=0.0, dt=0.1)
        with pytest.raises(ValueError):
            TrajectoryConfig(duration=10.0, dt=-0.1)
        with pytest.raises(ValueError):
            TrajectoryConfig(duration=10.0, dt=0.1, transient_fraction=0.2)
        with pytest.raises(ValueError):
            TrajectoryConfig(duration=10.0, dt=0.1, integrator_tolerance=0.0)

    def test_beat_undersampling_rejected(self):
        params = quick_system()
        config = TrajectoryConfig(duration=3000.0, dt=1.0)  # > (2 pi / delta) / 16
        with pytest.raises(ValueError, match="undersamples"):
            integrate(params, 1.03, config)

    def test_short_duration_warns(self):
        params = quick_system(ratio=0.0)
        config = TrajectoryConfig(duration=200.0, dt=0.35)
        with pytest.warns(TrajectoryConfigWarning):
            integrate(params, 1.0, config)

    def test_nonperturbative_probe_warns(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # construction-time warning
            params = quick_system(ratio=0.2)
        config = quick_config()
        with pytest.warns(PerturbativeRegimeWarning):
            integrate(params, 1.03, config)


class TestIntegrate:
    def test_fixed_point_is_stationary(self):
        params = quick_system(ratio=0.0)
        config = quick_config()
        trajectory = integrate(params, 1.03, config)
        scale = np.max(np.abs(trajectory.states[0]))
        drift = np.max(np.abs(trajectory.states - trajectory.states[0]))
        assert drift <= 1e-6 * scale

    def test_ring_down_rate(self):
        # decoupled mirror 1: energy decays as exp(-gamma t) within 5 percent
        gamma = 0.05
        params = quick_system(gamma=gamma, g_cav=0.0, g_c=0.0, ratio=0.0)
        op = solve_steady_state(params)
        y0 = np.array([op.q1s + 1e-3, 0.0, op.q2s, 0.0, op.cs.real, op.cs.imag])
        duration = 10.0 * 2.0 / gamma
        config = TrajectoryConfig(duration=duration, dt=0.3)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrajectoryConfigWarning)
            trajectory = integrate(params, 1.0, config, initial_state=y0)
        q1 = trajectory.states[:, 0]
        p1 = trajectory.states[:, 1]
        energy = 0.5 * (p1**2 + q1**2)
        keep = energy > energy[0] * 1e-12
        slope = np.polyfit(trajectory.t[keep], np.log(energy[keep]), 1)[0]
        assert -slope == pytest.approx(gamma, rel=0.05)

    def test_energy_conservation_without_dissipation(self):
        # kappa = 1e-300 is exactly zero dissipation at double precision;
        # measured RK45 drift is ~23x the local tolerance over 100 periods
        params = dimensionless_system(
            kappa=1e-300, gamma1=0.0, gamma2=0.0, g_cav=0.3, g_coulomb=0.2,
            pump_amplitude=0.0, detuning_mode="explicit", detuning=1.0,
        )
        rtol = 1e-10
        config = TrajectoryConfig(duration=100.0 * 2.0 * math.pi, dt=0.35,
                                  integrator_tolerance=rtol)
        y0 = np.array([0.3, 0.0, -0.2, 0.1, 0.8, 0.5])
        trajectory = integrate(params, 1.0, config, initial_state=y0)
        values = np.array([hamiltonian_value(params, 1.0, s) for s in trajectory.states])
        drift = np.max(np.abs(values - values[0])) / abs(values[0])
        assert drift <= 30.0 * rtol

    def test_determinism(self):
        params = quick_system()
        config = quick_config()
        a = integrate(params, 1.03, config)
        b = integrate(params, 1.03, config)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.t, b.t)

    def test_divergence_reported_with_time(self):
        # a field amplitude whose photon number overflows drives the state
        # out of the finite domain within the first step
        params = quick_system(ratio=0.0)
        config = TrajectoryConfig(duration=200.0, dt=0.3)
        y0 = np.array([0.0, 0.0, 0.0, 0.0, 1e160, 0.0])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrajectoryConfigWarning)
            warnings.simplefilter("ignore", RuntimeWarning)  # overflow inside the stages
            with pytest.raises(DivergenceError) as err:
                integrate(params, 1.0, config, initial_state=y0)
        assert err.value.time is not None

    def test_csv_dump_round_trip(self, tmp_path):
        params = quick_system(ratio=0.0)
        config = TrajectoryConfig(duration=300.0, dt=0.35)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrajectoryConfigWarning)
            trajectory = integrate(params, 1.0, config)
        path = tmp_path / "trajectory.csv"
        trajectory.dump_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "t,q1,p1,q2,p2,re_c,im_c"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.array_equal(data[:, 0], trajectory.t)
        assert np.array_equal(data[:, 1:], trajectory.states)


class TestDemodulate:
    def synthetic(self, delta, coefficients, t_end=4000.0, dt=0.3):
        t = np.arange(0.0, t_end, dt)
        cs, c_minus, c_plus = coefficients
        field = cs + c_minus * np.exp(-1j * delta * t) + c_plus * np.exp(1j * delta * t)
        states = np.zeros((t.size, 6))
        states[:, 4] = field.real
        states[:, 5] = field.imag
        return Trajectory(t=t, states=states)

    def test_exact_three_tone(self):
        delta = 1.1
        trajectory = self.synthetic(delta, (2.0, 0.1, 0.0))
        config = TrajectoryConfig(duration=float(trajectory.t[-1]), dt=0.3,
                                  transient_fraction=0.5)
        result = demodulate(trajectory, delta, config)
        assert result.cs_est == pytest.approx(2.0, abs=1e-12)
        assert result.c_minus_est == pytest.approx(0.1, abs=1e-12)
        assert abs(result.c_plus_est) <= 1e-12
        assert result.leakage <= 1e-24
        assert result.accepted

    def test_probe_normalization(self):
        delta = 0.9
        trajectory = self.synthetic(delta, (1.0, 0.05, 0.01))
        config = TrajectoryConfig(duration=float(trajectory.t[-1]), dt=0.3,
                                  transient_fraction=0.5)
        result = demodulate(trajectory, delta, config, probe_amplitude=0.5)
        assert result.c_minus_est == pytest.approx(0.1, abs=1e-12)
        assert result.c_plus_est == pytest.approx(0.02, abs=1e-12)

    def test_additive_noise_bounds(self, rng):
        delta = 1.1
        trajectory = self.synthetic(delta, (2.0, 0.1, 0.0))
        noise = 1e-3 * (rng.standard_normal(trajectory.t.size)
                        + 1j * rng.standard_normal(trajectory.t.size))
        states = trajectory.states.copy()
        states[:, 4] += noise.real
        states[:, 5] += noise.imag
        noisy = Trajectory(t=trajectory.t, states=states)
        config = TrajectoryConfig(duration=float(trajectory.t[-1]), dt=0.3,
                                  transient_fraction=0.5)
        result = demodulate(noisy, delta, config)
        assert abs(result.c_minus_est - 0.1) <= 1e-3
        window = trajectory.t >= 0.5 * trajectory.t[-1]
        expected = float(np.sum(np.abs(noise[window]) ** 2)
                         / np.sum(np.abs(noisy.cavity_field[window]) ** 2))
        assert result.leakage == pytest.approx(expected, rel=0.2)

    def test_pump_only_trajectory_has_no_sidebands(self):
        params = quick_system(ratio=0.0)
        config = quick_config()
        trajectory = integrate(params, 1.03, config)
        result = demodulate(trajectory, 1.03, config)
        assert abs(result.c_minus_est) <= 1e-8
        assert abs(result.c_plus_est) <= 1e-8

    def test_window_shorter_than_one_beat_raises(self):
        delta = 1.0
        trajectory = self.synthetic(delta, (1.0, 0.1, 0.0), t_end=8.0, dt=0.2)
        config = TrajectoryConfig(duration=8.0, dt=0.2, transient_fraction=0.5)
        with pytest.raises(InsufficientDataError):
            demodulate(trajectory, delta, config)

    def test_few_beats_warns(self):
        delta = 1.0
        trajectory = self.synthetic(delta, (1.0, 0.1, 0.0), t_end=100.0, dt=0.2)
        config = TrajectoryConfig(duration=100.0, dt=0.2, transient_fraction=0.5)
        with pytest.warns(TrajectoryConfigWarning):
            demodulate(trajectory, delta, config)


class TestEndToEnd:
    def test_demodulated_sideband_matches_linear_oracle(self):
        params = quick_system()
        config = quick_config()
        op = solve_steady_state(params)
        reference = solve_sidebands(1.03, params, op).c_minus
        result = probe_response(params, 1.03, config)
        error = abs(result.c_minus_est - reference) / abs(reference)
        assert error <= 1e-2
        assert result.accepted
        # halving the probe must not increase the error
        half = quick_system(ratio=5e-4)
        result_half = probe_response(half, 1.03, config)
        error_half = abs(result_half.c_minus_est - reference) / abs(reference)
        assert error_half <= error

    def test_probe_required(self):
        params = quick_system(ratio=0.0)
        with pytest.raises(ValueError):
            probe_response(params, 1.03, quick_config())
