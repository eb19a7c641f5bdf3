"""Named parameter presets.

``paper-2012`` carries the millimeter Fabry-Perot experiment values
(L = 25 mm, lambda = 1064 nm, omega/2pi = 947 kHz, Q = 6700, m = 145 ng,
kappa/2pi = 215 kHz, P_l = 6 uW, g_c/2pi = 8 MHz m^-2) with the detuning
locked to the first mechanical frequency.

``dimensionless-slowfast`` is the working point for all qualitative window
and delay studies: rates in units of the mechanical frequency
(omega1 = omega2 = 1, gamma = 1/6700, kappa = 0.227, locked detuning).
The radiation-pressure scale is set through a dimensionless pump power so
kappa sweeps rescale the pump amplitude the way a fixed laser power would.
Two pump levels are bundled: a spectrum level (beta = 5e-3) strong enough
that the split transparency windows rise above the all-pass baseline, and
a weak delay level (beta = 1e-6) where the line-center response switches
sign between the Coulomb-on and Coulomb-off configurations.
"""
from __future__ import annotations

import math

PAPER_2012 = "paper-2012"
SLOWFAST = "dimensionless-slowfast"

PRESET_NAMES = (PAPER_2012, SLOWFAST)

# dimensionless-slowfast knobs
SLOWFAST_KAPPA = 0.227
SLOWFAST_GAMMA = 1.0 / 6700.0
SLOWFAST_G_CAV = 0.1
SLOWFAST_BETA_SPECTRUM = 5e-3
SLOWFAST_BETA_DELAY = 1e-6
SLOWFAST_GC_GRID = (0.05, 0.10, 0.15, 0.20)
SLOWFAST_KAPPA_GRID = (0.113, 0.227, 0.340)


def slowfast_pump_power(beta_target: float, kappa: float = SLOWFAST_KAPPA,
                        g_cav: float = SLOWFAST_G_CAV) -> float:
    """Dimensionless pump power giving the requested radiation-pressure beta.

    With the detuning locked to omega1 = 1 the photon number is
    n = 2 kappa P / (kappa^2 + 1), and beta = g_cav^2 n / 2.
    """
    return beta_target * (kappa**2 + 1.0) / (g_cav**2 * kappa)


def _slowfast_state() -> dict:
    power = slowfast_pump_power(SLOWFAST_BETA_SPECTRUM)
    probe = 1e-3 * math.sqrt(2.0 * SLOWFAST_KAPPA * power)
    mech = {"mass": 1.0, "omega": 1.0, "gamma": SLOWFAST_GAMMA, "quality": None}
    return {
        "unit_mode": "dimensionless",
        "cavity": {
            "kappa": SLOWFAST_KAPPA,
            "detuning_mode": "locked",
            "detuning": None,
            "length": None,
            "wavelength": None,
        },
        "mech1": dict(mech),
        "mech2": dict(mech),
        "coupling": {"g_cav": SLOWFAST_G_CAV, "g_coulomb": 0.0},
        "drive": {
            "pump_power": power,
            "pump_amplitude": None,
            "probe_power": None,
            "probe_amplitude": probe,
        },
    }


def _paper_2012_state() -> dict:
    omega = 2.0 * math.pi * 947e3
    mech = {"mass": 145e-12, "omega": omega, "gamma": None, "quality": 6700.0}
    return {
        "unit_mode": "SI",
        "cavity": {
            "kappa": 2.0 * math.pi * 215e3,
            "detuning_mode": "locked",
            "detuning": None,
            "length": 25e-3,
            "wavelength": 1064e-9,
        },
        "mech1": dict(mech),
        "mech2": dict(mech),
        "coupling": {"g_cav": None, "g_coulomb": 2.0 * math.pi * 8e6},
        "drive": {
            "pump_power": 6e-6,
            "pump_amplitude": None,
            "probe_power": 6e-12,
            "probe_amplitude": None,
        },
    }


def preset_state(name: str) -> dict:
    """Raw builder state for a named preset (consumed by the config resolver)."""
    if name == PAPER_2012:
        return _paper_2012_state()
    if name == SLOWFAST:
        return _slowfast_state()
    raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


def get_preset(name: str):
    """Resolved SystemParams for a named preset."""
    from .config import resolve_state

    return resolve_state(preset_state(name))
