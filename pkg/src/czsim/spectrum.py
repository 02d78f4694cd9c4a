"""Dressed-state analysis of the static Hamiltonian.

Diagonalizes the coupled system, labels each eigenstate by the bare product
state it most overlaps, and derives the static quantities that matter for
gate design: the ZZ coupling zeta (exact and fourth-order perturbative), the
effective qubit-qubit coupling J, and the state-dependent coupler transition
frequencies omega_c_mn with their shifts chi_mn.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._parallel import ordered_map
from .device import TWO_PI, DeviceParams, build_static_hamiltonian
from .errors import AmbiguousLabelingError, SingularConfigurationError

OVERLAP_THRESHOLD = 0.5

Label = tuple[int, int, int]

# computational states |Q1 Qc Q2> with the coupler idle, in block order
# (|00>, |10>, |01>, |11>)
COMPUTATIONAL_LABELS: tuple[Label, ...] = (
    (0, 0, 0),
    (1, 0, 0),
    (0, 0, 1),
    (1, 0, 1),
)


@dataclass(frozen=True)
class DressedState:
    """One labeled eigenpair; energy is angular (rad/ns), energy/2pi in GHz."""

    label: Label
    energy: float
    overlap: float
    vector: np.ndarray


@dataclass(frozen=True)
class DressedSpectrum:
    """Labeled eigen-decomposition, entries ascending in energy."""

    entries: tuple[DressedState, ...]
    _by_label: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_by_label", {e.label: e for e in self.entries}
        )

    def state(self, label) -> DressedState:
        return self._by_label[tuple(label)]

    def energy(self, label) -> float:
        """Angular energy (rad/ns) of the dressed state with this bare label."""
        return self.state(label).energy

    def vector(self, label) -> np.ndarray:
        return self.state(label).vector

    def overlap(self, label) -> float:
        return self.state(label).overlap


@dataclass(frozen=True)
class ZZReport:
    """Static ZZ characterization of one device configuration."""

    zeta_exact: float  # kHz
    zeta_pert4: float  # kHz
    j_eff: float  # MHz
    delta1: float  # GHz, omega1 - omega_c
    delta2: float  # GHz, omega2 - omega_c
    delta12: float  # GHz, omega1 - omega2


@dataclass(frozen=True)
class ChiReport:
    """Coupler transition frequencies per qubit state, and their shifts.

    omega_c[(m, n)] is the dressed |m0n> -> |m1n> transition in GHz;
    chi[(m, n)] = omega_c[(m, n)] - omega_c[(0, 0)] in MHz (chi[0,0] == 0).
    """

    omega_c: dict[tuple[int, int], float]
    chi: dict[tuple[int, int], float]


def dressed_spectrum(
    H: np.ndarray, device: DeviceParams, require="all"
) -> DressedSpectrum:
    """Diagonalize H and label eigenstates by greatest bare-state overlap.

    Eigenvectors are processed in descending order of their best overlap,
    each claiming its best still-unclaimed bare label (greedy assignment,
    deterministic). An assigned overlap below 0.5 means the dressed labeling
    is not physically meaningful there; AmbiguousLabelingError (carrying the
    offending labels) is raised when that happens for a required label.

    `require` is "all" (default) or the iterable of labels whose assignment
    must be unambiguous; callers that only consume a few states (e.g. the
    computational quartet) pass those, so that hybridization high in the
    spectrum does not poison quantities that never touch it.
    """
    H = np.asarray(H)
    if H.shape != (device.dim, device.dim):
        raise ValueError(f"H shape {H.shape} does not match device dim {device.dim}")
    energies, vectors = np.linalg.eigh(H)
    overlaps = np.abs(vectors) ** 2  # overlaps[b, k] = |<bare b|eigvec k>|^2

    order = np.argsort(-overlaps.max(axis=0), kind="stable")
    claimed = np.zeros(device.dim, dtype=bool)
    assigned = np.empty(device.dim, dtype=int)
    for k in order:
        column = np.where(claimed, -1.0, overlaps[:, k])
        b = int(np.argmax(column))
        claimed[b] = True
        assigned[k] = b

    if require == "all":
        required = None  # every label
    else:
        required = {tuple(label) for label in require}
    offenders = [
        device.label_of(assigned[k])
        for k in range(device.dim)
        if overlaps[assigned[k], k] < OVERLAP_THRESHOLD
        and (required is None or device.label_of(assigned[k]) in required)
    ]
    if offenders:
        raise AmbiguousLabelingError(offenders)

    entries = tuple(
        DressedState(
            label=device.label_of(assigned[k]),
            energy=float(energies[k]),
            overlap=float(overlaps[assigned[k], k]),
            vector=vectors[:, k],
        )
        for k in range(device.dim)
    )
    return DressedSpectrum(entries=entries)


def static_spectrum(device: DeviceParams, require="all") -> DressedSpectrum:
    """Dressed spectrum of the lab-frame static Hamiltonian."""
    return dressed_spectrum(build_static_hamiltonian(device), device, require=require)


def zz_exact(device: DeviceParams) -> float:
    """ZZ coupling from the dressed computational energies, in kHz.

    zeta = E|~101> - E|~001> - E|~100> + E|~000>.
    """
    spec = static_spectrum(device, require=COMPUTATIONAL_LABELS)
    zeta_rad = (
        spec.energy((1, 0, 1))
        - spec.energy((0, 0, 1))
        - spec.energy((1, 0, 0))
        + spec.energy((0, 0, 0))
    )
    return zeta_rad / TWO_PI * 1e6  # GHz -> kHz


def _detunings(device: DeviceParams) -> tuple[float, float, float]:
    d1 = device.q1.frequency - device.coupler.frequency
    d2 = device.q2.frequency - device.coupler.frequency
    return d1, d2, device.q1.frequency - device.q2.frequency


def zz_perturbative(device: DeviceParams) -> float:
    """Fourth-order closed-form ZZ coupling, in kHz (no diagonalization).

    zeta4 = 2 g1c^2 g2c^2 [ 1/(D1^2 (D12 - a2)) - 1/(D2^2 (D12 + a1))
            + (1/(D1 + D2 - ac)) (1/D1 + 1/D2)^2 ],
    with D1 = w1 - wc, D2 = w2 - wc, D12 = w1 - w2 (all /2pi GHz).
    The second- and third-order contributions vanish identically for this
    coupling topology, so this is the leading term.
    """
    d1, d2, d12 = _detunings(device)
    a1 = device.q1.anharmonicity
    a2 = device.q2.anharmonicity
    ac = device.coupler.anharmonicity
    denominators = {
        "delta1": d1,
        "delta2": d2,
        "delta12 - alpha2": d12 - a2,
        "delta12 + alpha1": d12 + a1,
        "delta1 + delta2 - alphac": d1 + d2 - ac,
    }
    for name, value in denominators.items():
        if value == 0.0:
            raise SingularConfigurationError(f"vanishing denominator: {name}")
    zeta4 = (
        2.0
        * device.g1c**2
        * device.g2c**2
        * (
            1.0 / (d1**2 * (d12 - a2))
            - 1.0 / (d2**2 * (d12 + a1))
            + (1.0 / (d1 + d2 - ac)) * (1.0 / d1 + 1.0 / d2) ** 2
        )
    )
    return zeta4 * 1e6  # GHz -> kHz


def effective_J(device: DeviceParams) -> float:
    """Coupler-mediated qubit-qubit exchange J = g1c g2c/2 (1/D1 + 1/D2), MHz."""
    d1, d2, _ = _detunings(device)
    if d1 == 0.0 or d2 == 0.0:
        raise SingularConfigurationError("zero qubit-coupler detuning")
    return device.g1c * device.g2c / 2.0 * (1.0 / d1 + 1.0 / d2) * 1e3


def coupler_transitions(device: DeviceParams) -> ChiReport:
    """Dressed coupler transition omega_c_mn for each qubit state (m, n)."""
    needed = [(m, c, n) for m in (0, 1) for n in (0, 1) for c in (0, 1)]
    spec = static_spectrum(device, require=needed)
    omega_c = {}
    for m in (0, 1):
        for n in (0, 1):
            omega_c[(m, n)] = (
                spec.energy((m, 1, n)) - spec.energy((m, 0, n))
            ) / TWO_PI
    chi = {key: (omega_c[key] - omega_c[(0, 0)]) * 1e3 for key in omega_c}
    return ChiReport(omega_c=omega_c, chi=chi)


def zz_report(device: DeviceParams) -> ZZReport:
    """Exact and perturbative ZZ plus the closed-form J and detunings."""
    d1, d2, d12 = _detunings(device)
    return ZZReport(
        zeta_exact=zz_exact(device),
        zeta_pert4=zz_perturbative(device),
        j_eff=effective_J(device),
        delta1=d1,
        delta2=d2,
        delta12=d12,
    )


# ---------------------------------------------------------------------------
# ZZ sweep over qubit frequencies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZZSweepRow:
    omega1: float  # GHz
    omega2: float  # GHz
    zeta_exact: float | None  # kHz, None when the cell failed
    zeta_pert4: float | None  # kHz
    status: str  # "ok" or "failed"


def _zz_cell(args) -> ZZSweepRow:
    device, omega1, omega2 = args
    cell = replace(
        device,
        q1=replace(device.q1, frequency=omega1),
        q2=replace(device.q2, frequency=omega2),
    )
    try:
        zeta = zz_exact(cell)
        pert = zz_perturbative(cell)
    except (AmbiguousLabelingError, SingularConfigurationError):
        return ZZSweepRow(omega1, omega2, None, None, "failed")
    return ZZSweepRow(omega1, omega2, zeta, pert, "ok")


def zz_sweep(
    device_template: DeviceParams,
    omega1_grid,
    omega2_grid,
    workers=None,
) -> list[ZZSweepRow]:
    """zeta over a qubit-frequency grid, row-major in (omega1, omega2).

    Cells where the dressed labeling breaks down (resonant/hybridized
    regions) come back flagged "failed" with no values, never as NaN.
    """
    omega1_grid = list(omega1_grid)
    omega2_grid = list(omega2_grid)
    if not omega1_grid or not omega2_grid:
        raise ValueError("frequency grids must be nonempty")
    cells = [
        (device_template, w1, w2) for w1 in omega1_grid for w2 in omega2_grid
    ]
    return ordered_map(_zz_cell, cells, workers=workers)
