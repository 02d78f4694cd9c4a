"""Gate metrics over the computational block of a propagator.

The gate is judged on the four dressed computational states (|00>, |10>,
|01>, |11>), coupler idle. Everything here reduces to the 4x4 block
U_real[a, b] = <a|U|b> over those states:

* accumulated phases theta_mn = arg of the returning diagonal amplitude,
  with the sign fixed so an undriven hold of duration t reports
  delta_theta = -2*pi*zeta*t (the static ZZ accumulation);
* conditional phase delta_theta = theta11 - theta01 - theta10 + theta00,
  wrapped to (-pi, pi];
* leakage L1 = 1 - mean column norm squared of the block (population
  that left the computational subspace, averaged over the four states);
* state-averaged fidelity F = [Tr(M M^dag) + |Tr M|^2]/20 against the
  ideal CZ diag(1, 1, 1, -1), evaluated after virtual-Z compensation.
  The Tr(M M^dag) term makes leakage lower F even when phases are exact;
  F is unchanged if the block is conjugated, so the +/-pi branch of the
  conditional phase never matters here.

The cost function for pulse calibration is phase_error^2 + L1; failed
propagations or unlabelable spectra are mapped to a large finite sentinel
so simplex optimizers can route around them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import DeviceParams
from .errors import (
    AmbiguousLabelingError,
    IntegrationFailureError,
    PhaseUndefinedError,
)
from .propagator import EvolutionSettings, evolve_states
from .pulse import PulseParams
from .spectrum import COMPUTATIONAL_LABELS, DressedSpectrum, static_spectrum

# phases are meaningless once the state has mostly left; |diag| at or
# below this raises PhaseUndefinedError
PHASE_FLOOR = 0.1

# sentinel cost for propagations that failed outright
FAILURE_COST = 1.0e6

CZ_IDEAL = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class GateReport:
    """Gate-quality summary extracted from one propagation.

    theta and return_populations follow the block order
    (|00>, |10>, |01>, |11>); angles in rad.
    """

    theta: tuple[float, float, float, float]
    cond_phase: float
    phase_error: float
    leakage: float
    fidelity: float
    return_populations: tuple[float, float, float, float]


def _wrap(angle: float) -> float:
    """Map an angle to the principal branch (-pi, pi]."""
    out = (angle + np.pi) % (2.0 * np.pi) - np.pi
    if out == -np.pi:
        out = np.pi
    return float(out)


def computational_frame(spectrum: DressedSpectrum) -> np.ndarray:
    """Column matrix (dim, 4) of the dressed computational states."""
    return np.column_stack(
        [spectrum.vector(label) for label in COMPUTATIONAL_LABELS]
    )


def extract_block(U: np.ndarray, spectrum: DressedSpectrum) -> np.ndarray:
    """4x4 computational block <a|U|b> in the order (00, 10, 01, 11).

    Sub-unitary under leakage: singular values stay at or below 1.
    """
    V = computational_frame(spectrum)
    return V.conj().T @ U @ V


def accumulated_phases(block: np.ndarray) -> np.ndarray:
    """Per-state phases theta_mn from the block diagonal, in (-pi, pi].

    The diagonal entry is |d| e^{i theta}; with this sign an undriven
    hold accumulates delta_theta = -2*pi*zeta*t. Entries with |d| at or
    below PHASE_FLOOR have no meaningful phase and raise.
    """
    diag = np.diagonal(block)
    weak = np.abs(diag) <= PHASE_FLOOR
    if np.any(weak):
        bad = [COMPUTATIONAL_LABELS[i] for i in np.flatnonzero(weak)]
        raise PhaseUndefinedError(
            f"return amplitude below {PHASE_FLOOR} for {bad}; "
            "accumulated phase is undefined"
        )
    theta = np.angle(diag)
    return np.where(theta == -np.pi, np.pi, theta)


def conditional_phase(theta: np.ndarray) -> float:
    """delta_theta = theta11 - theta01 - theta10 + theta00, wrapped."""
    return _wrap(theta[3] - theta[2] - theta[1] + theta[0])


def _block_leakage(block: np.ndarray) -> float:
    leak = 1.0 - float(np.sum(np.abs(block) ** 2)) / 4.0
    return max(leak, 0.0)


def leakage_L1(U: np.ndarray, spectrum: DressedSpectrum) -> float:
    """Average population lost from the computational subspace.

    Equals 1 - (1/4) sum_{mn} <mn|U^dag P U|mn> with P the projector
    onto the four dressed computational states, which reduces to
    1 - mean column norm squared of the extracted block.
    """
    return _block_leakage(extract_block(U, spectrum))


def virtual_z_compensate(block: np.ndarray) -> np.ndarray:
    """Strip the global and single-qubit Z phases from the block.

    Left-multiplies by e^{-i theta00} Z1(-phi1) Z2(-phi2) with
    phi1 = theta10 - theta00 and phi2 = theta01 - theta00, i.e. the
    phase updates a following drive would absorb. The compensated
    diagonal carries phases (0, 0, 0, delta_theta); magnitudes and the
    conditional phase are untouched.
    """
    theta = accumulated_phases(block)
    phi1 = theta[1] - theta[0]
    phi2 = theta[2] - theta[0]
    phases = theta[0] + np.array([0.0, phi1, phi2, phi1 + phi2])
    return np.exp(-1j * phases)[:, None] * block


def average_gate_fidelity(block: np.ndarray) -> float:
    """State-averaged fidelity of a (compensated) block against ideal CZ.

    F = [Tr(M M^dag) + |Tr M|^2]/20 with M = CZ^dag block. Identity
    scores 0.4, the exact CZ scores 1, and leakage is penalized through
    the first term.
    """
    M = CZ_IDEAL.conj().T @ block
    trace_mm = float(np.trace(M @ M.conj().T).real)
    return (trace_mm + abs(np.trace(M)) ** 2) / 20.0


def gate_report(
    device: DeviceParams,
    pulse: PulseParams,
    settings: EvolutionSettings = EvolutionSettings(),
) -> GateReport:
    """Propagate one gate and summarize it.

    Only the four computational columns are evolved, so this is much
    cheaper than forming the full unitary first.
    """
    spectrum = static_spectrum(device, require=COMPUTATIONAL_LABELS)
    V = computational_frame(spectrum)
    block = V.conj().T @ evolve_states(device, pulse, settings, V)

    theta = accumulated_phases(block)
    cond = conditional_phase(theta)
    compensated = virtual_z_compensate(block)
    populations = np.abs(np.diagonal(block)) ** 2
    return GateReport(
        theta=tuple(float(t) for t in theta),
        cond_phase=cond,
        phase_error=abs(abs(cond) - np.pi),
        leakage=_block_leakage(block),
        fidelity=average_gate_fidelity(compensated),
        return_populations=tuple(float(p) for p in populations),
    )


def cost(
    device: DeviceParams,
    t_f: float,
    detuning: float,
    amp0: float,
    lambda1: float,
    lambda2: float,
    settings: EvolutionSettings = EvolutionSettings(),
) -> float:
    """Calibration cost (||delta_theta| - pi|)^2 + L1 for one pulse.

    Unlabelable spectra, lost unitarity, and vanished return amplitudes
    all map to FAILURE_COST instead of raising, so optimizers can keep
    moving through bad parameter regions.
    """
    pulse = PulseParams(
        amp0=amp0,
        lambda1=lambda1,
        lambda2=lambda2,
        t_f=t_f,
        detuning=detuning,
    )
    try:
        report = gate_report(device, pulse, settings)
    except (AmbiguousLabelingError, IntegrationFailureError,
            PhaseUndefinedError):
        return FAILURE_COST
    return report.phase_error**2 + report.leakage
