"""Pulse-level simulator and calibration toolkit for a microwave-activated
CZ gate on a fixed-frequency transmon-coupler-transmon device."""

__version__ = "0.1.0"

from .calibrate import (
    OptimizeResult,
    OptimizeSettings,
    SweepResult,
    SweepRow,
    default_initial,
    optimize_pulse,
    sweep_2d,
    sweep_detuning,
)
from .device import (
    DEVICE_PRESETS,
    DeviceParams,
    TransmonParams,
    build_rotating_hamiltonian,
    build_static_hamiltonian,
    device_preset,
    embed,
    lowering_operator,
)
from .errors import (
    AmbiguousLabelingError,
    CzsimError,
    IntegrationFailureError,
    PhaseUndefinedError,
    SingularConfigurationError,
)
from .metrics import (
    FAILURE_COST,
    GateReport,
    accumulated_phases,
    average_gate_fidelity,
    conditional_phase,
    cost,
    extract_block,
    gate_report,
    leakage_L1,
    virtual_z_compensate,
)
from .propagator import (
    EvolutionSettings,
    Trajectory,
    evolve_states,
    evolve_trajectory,
    evolve_unitary,
)
from .pulse import (
    PULSE_PRESETS,
    PulseParams,
    envelope,
    pulse_preset,
    resolve_drive_frequency,
    resolve_pulse,
)
from .spectrum import (
    COMPUTATIONAL_LABELS,
    ChiReport,
    DressedSpectrum,
    DressedState,
    ZZReport,
    ZZSweepRow,
    coupler_transitions,
    dressed_spectrum,
    effective_J,
    static_spectrum,
    zz_exact,
    zz_perturbative,
    zz_report,
    zz_sweep,
)

__all__ = [
    "OptimizeResult",
    "OptimizeSettings",
    "SweepResult",
    "SweepRow",
    "default_initial",
    "optimize_pulse",
    "sweep_2d",
    "sweep_detuning",
    "DEVICE_PRESETS",
    "DeviceParams",
    "TransmonParams",
    "build_rotating_hamiltonian",
    "build_static_hamiltonian",
    "device_preset",
    "embed",
    "lowering_operator",
    "AmbiguousLabelingError",
    "CzsimError",
    "IntegrationFailureError",
    "PhaseUndefinedError",
    "SingularConfigurationError",
    "FAILURE_COST",
    "GateReport",
    "accumulated_phases",
    "average_gate_fidelity",
    "conditional_phase",
    "cost",
    "extract_block",
    "gate_report",
    "leakage_L1",
    "virtual_z_compensate",
    "EvolutionSettings",
    "Trajectory",
    "evolve_states",
    "evolve_trajectory",
    "evolve_unitary",
    "PULSE_PRESETS",
    "PulseParams",
    "envelope",
    "pulse_preset",
    "resolve_drive_frequency",
    "resolve_pulse",
    "COMPUTATIONAL_LABELS",
    "ChiReport",
    "DressedSpectrum",
    "DressedState",
    "ZZReport",
    "ZZSweepRow",
    "coupler_transitions",
    "dressed_spectrum",
    "effective_J",
    "static_spectrum",
    "zz_exact",
    "zz_perturbative",
    "zz_report",
    "zz_sweep",
]
