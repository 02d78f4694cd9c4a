"""Parameterized drive envelope and drive-frequency resolution.

The drive is a flat-top-free cosine-series envelope on the coupler,

    Omega_d(t) = Omega0 * [1 - 1/2 * sum_{l=1..3} lambda_l (1 - cos((t - t_f/2)/t_f * 2*l*pi))],

with lambda3 always derived as 1 - lambda1 so the envelope vanishes at both
endpoints by construction. The shape depends only on t/t_f; amplitudes are
cycle frequencies (Omega0/2pi) in GHz like everything else in the package.

The carrier frequency is expressed as a detuning from the dressed coupler
transition: omega_d = omega_c00 + Delta_d, where omega_c00 is the
|000> -> |010> transition of the coupled (undriven) device.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .device import DeviceParams
from .spectrum import coupler_transitions


@dataclass(frozen=True)
class PulseParams:
    """One drive pulse: amplitude, shape coefficients, duration, frequency.

    lambda3 is never stored; it is derived (1 - lambda1) wherever the
    envelope is evaluated. drive_freq is the resolved carrier omega_d/2pi
    and stays None until resolved against a device (presets ship unresolved
    because omega_c00 depends on the device).
    """

    amp0: float  # Omega0/2pi, GHz
    lambda1: float
    lambda2: float
    t_f: float  # ns
    detuning: float  # Delta_d/2pi, GHz
    drive_freq: float | None = None  # omega_d/2pi, GHz

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError(f"t_f must be > 0, got {self.t_f}")
        if self.drive_freq is not None and self.drive_freq < 0:
            raise ValueError(f"drive_freq must be >= 0, got {self.drive_freq}")

    @property
    def lambda3(self) -> float:
        return 1.0 - self.lambda1


def envelope(p: PulseParams, t):
    """Drive envelope Omega_d(t) in GHz at time(s) t in [0, t_f] (ns).

    Accepts a scalar or an array of times; values outside [0, t_f] are
    rejected. Negative shape coefficients are legal and the envelope may be
    non-monotone or negative; only the endpoint zeros and the midpoint value
    Omega0 are structural.
    """
    t_arr = np.asarray(t, dtype=float)
    if t_arr.size and (t_arr.min() < 0.0 or t_arr.max() > p.t_f):
        raise ValueError(f"t must lie in [0, {p.t_f}], got range "
                         f"[{t_arr.min()}, {t_arr.max()}]")
    x = (t_arr - 0.5 * p.t_f) / p.t_f
    coeffs = (p.lambda1, p.lambda2, 1.0 - p.lambda1)
    total = np.zeros_like(x)
    for l, lam in enumerate(coeffs, start=1):
        total += lam * (1.0 - np.cos(2.0 * np.pi * l * x))
    out = p.amp0 * (1.0 - 0.5 * total)
    return float(out) if np.ndim(t) == 0 else out


def resolve_drive_frequency(device: DeviceParams, detuning: float) -> float:
    """Carrier frequency omega_d/2pi = omega_c00 + Delta_d in GHz.

    omega_c00 is the dressed |000> -> |010> coupler transition, so the
    resolved frequency moves with the device (couplings shift it away from
    the bare coupler frequency). Propagates ambiguous labeling from the
    spectrum if the device cannot be labeled.
    """
    return coupler_transitions(device).omega_c[(0, 0)] + detuning


def resolve_pulse(pulse: PulseParams, device: DeviceParams) -> PulseParams:
    """Return `pulse` with drive_freq filled in from its detuning.

    A pulse whose drive_freq is already set is returned unchanged, so an
    explicit carrier override survives.
    """
    if pulse.drive_freq is not None:
        return pulse
    return replace(
        pulse, drive_freq=resolve_drive_frequency(device, pulse.detuning)
    )


# ---------------------------------------------------------------------------
# Bundled pulse presets (drive_freq unresolved; depends on the device)
# ---------------------------------------------------------------------------

PULSE_PRESETS: dict[str, PulseParams] = {
    "tableII-a": PulseParams(
        amp0=0.0083, lambda1=0.3395, lambda2=0.0601, t_f=250.0, detuning=-0.015
    ),
    "tableII-b": PulseParams(
        amp0=0.0095, lambda1=0.0481, lambda2=0.3136, t_f=150.0, detuning=-0.010
    ),
    "tableII-c": PulseParams(
        amp0=0.01086, lambda1=-0.2330, lambda2=0.2517, t_f=150.0, detuning=-0.0039
    ),
    "sec4-450ns": PulseParams(
        amp0=0.010, lambda1=-0.0178, lambda2=0.2528, t_f=450.0, detuning=0.0025
    ),
}


def pulse_preset(name: str) -> PulseParams:
    try:
        return PULSE_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PULSE_PRESETS))
        raise KeyError(f"unknown pulse preset {name!r}; known presets: {known}") from None
