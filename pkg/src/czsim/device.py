"""Three-transmon device model: parameters, operators, Hamiltonians.

The device is two fixed-frequency data transmons (Q1, Q2) coupled through a
third transmon that acts as a coupler (Qc). Each transmon is a Duffing
oscillator truncated to `levels` states (default 4), and the qubit-coupler
couplings are excitation-preserving exchange terms.

Conventions used throughout the package:

* All configured frequencies, anharmonicities and couplings are cycle
  frequencies (omega/2pi) in GHz. Hamiltonian matrices carry the 2*pi
  factor, i.e. their entries are angular frequencies in rad/ns, so that
  ``expm(-1j*H*t)`` with t in ns propagates directly and spectral gaps
  divided by 2*pi are again in GHz.
* Product-basis states are labeled |Q1 Qc Q2> and stored q1-major/q2-minor:
  flat index = (n1*levels_c + nc)*levels_2 + n2.

The drive enters in the rotating frame at the drive frequency: the static
part keeps (omega_l - omega_d) linear terms for every mode, and the drive
operator is (a_c + a_c^dag) on the coupler, to be scaled by half the real
envelope. The envelope carries no residual carrier phase (the initial drive
phase is fixed to zero and not configurable).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

_SLOTS = ("q1", "coupler", "q2")


@dataclass(frozen=True)
class TransmonParams:
    """One transmon: frequency and anharmonicity in GHz (omega/2pi), levels."""

    frequency: float
    anharmonicity: float
    levels: int = 4

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")


@dataclass(frozen=True)
class DeviceParams:
    """Qubit-coupler-qubit device: three transmons plus two couplings (GHz)."""

    q1: TransmonParams
    coupler: TransmonParams
    q2: TransmonParams
    g1c: float
    g2c: float

    def __post_init__(self):
        if self.g1c < 0 or self.g2c < 0:
            raise ValueError("couplings g1c, g2c must be non-negative")

    @property
    def levels(self) -> tuple[int, int, int]:
        return (self.q1.levels, self.coupler.levels, self.q2.levels)

    @property
    def dim(self) -> int:
        n1, nc, n2 = self.levels
        return n1 * nc * n2

    def transmon(self, slot: str) -> TransmonParams:
        if slot not in _SLOTS:
            raise ValueError(f"unknown slot {slot!r}, expected one of {_SLOTS}")
        return {"q1": self.q1, "coupler": self.coupler, "q2": self.q2}[slot]

    def index_of(self, label) -> int:
        """Flat index of |n1 nc n2> under q1-major/q2-minor ordering."""
        n1, nc, n2 = label
        l1, lc, l2 = self.levels
        if not (0 <= n1 < l1 and 0 <= nc < lc and 0 <= n2 < l2):
            raise ValueError(f"label {tuple(label)} outside level range {self.levels}")
        return (n1 * lc + nc) * l2 + n2

    def label_of(self, index: int) -> tuple[int, int, int]:
        l1, lc, l2 = self.levels
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside [0, {self.dim})")
        n1, rest = divmod(index, lc * l2)
        nc, n2 = divmod(rest, l2)
        return (n1, nc, n2)

    def labels(self) -> list[tuple[int, int, int]]:
        """All basis labels in flat-index order."""
        return [self.label_of(i) for i in range(self.dim)]


def lowering_operator(levels: int) -> np.ndarray:
    """Truncated bosonic lowering operator: <n-1|a|n> = sqrt(n)."""
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    a = np.zeros((levels, levels), dtype=complex)
    n = np.arange(1, levels)
    a[n - 1, n] = np.sqrt(n)
    return a


def embed(op: np.ndarray, slot: str, device: DeviceParams) -> np.ndarray:
    """Tensor `op` (acting on one slot) with identities on the other two."""
    op = np.asarray(op, dtype=complex)
    want = device.transmon(slot).levels
    if op.shape != (want, want):
        raise ValueError(
            f"operator shape {op.shape} does not match slot {slot!r} with {want} levels"
        )
    factors = [np.eye(lev, dtype=complex) for lev in device.levels]
    factors[_SLOTS.index(slot)] = op
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def _number_and_duffing(tp: TransmonParams) -> np.ndarray:
    """omega*n + (alpha/2)*n(n-1) on one transmon, in GHz units (no 2*pi)."""
    n = np.arange(tp.levels, dtype=float)
    return np.diag(tp.frequency * n + 0.5 * tp.anharmonicity * n * (n - 1.0)).astype(
        complex
    )


def build_static_hamiltonian(device: DeviceParams) -> np.ndarray:
    """Lab-frame Hamiltonian of the coupled three-transmon system (rad/ns).

    H = sum_l [omega_l a_l^dag a_l + (alpha_l/2) a_l^dag a_l^dag a_l a_l]
        + sum_{l in {1,2}} g_lc (a_l^dag a_c + a_l a_c^dag),
    with every coefficient multiplied by 2*pi.
    """
    H = np.zeros((device.dim, device.dim), dtype=complex)
    for slot in _SLOTS:
        H += embed(_number_and_duffing(device.transmon(slot)), slot, device)
    a_c = embed(lowering_operator(device.coupler.levels), "coupler", device)
    for slot, g in (("q1", device.g1c), ("q2", device.g2c)):
        a_l = embed(lowering_operator(device.transmon(slot).levels), slot, device)
        H += g * (a_l.conj().T @ a_c + a_l @ a_c.conj().T)
    return TWO_PI * H


def build_rotating_hamiltonian(
    device: DeviceParams, drive_freq: float
) -> tuple[np.ndarray, np.ndarray]:
    """Static part and drive operator in the frame rotating at drive_freq.

    static = sum_l [(omega_l - omega_d) a^dag a + (alpha_l/2) a^dag a^dag a a]
             + exchange couplings (rad/ns); the full time-dependent
    Hamiltonian is static + (envelope(t)/2)*2*pi*drive_op with the envelope
    in GHz. drive_op = a_c + a_c^dag is returned unscaled (dimensionless);
    callers apply 2*pi with the envelope.

    drive_freq = 0 reproduces the lab-frame Hamiltonian exactly.
    """
    if drive_freq < 0:
        raise ValueError(f"drive_freq must be >= 0, got {drive_freq}")
    static = build_static_hamiltonian(device)
    if drive_freq != 0.0:
        for slot in _SLOTS:
            tp = device.transmon(slot)
            n_op = np.diag(np.arange(tp.levels, dtype=float)).astype(complex)
            static = static - TWO_PI * drive_freq * embed(n_op, slot, device)
    a_c = lowering_operator(device.coupler.levels)
    drive_op = embed(a_c + a_c.conj().T, "coupler", device)
    return static, drive_op


# ---------------------------------------------------------------------------
# Bundled device presets
# ---------------------------------------------------------------------------

DEVICE_PRESETS: dict[str, DeviceParams] = {
    # Straddling configuration: coupler between the qubit frequencies.
    "paper-tableI": DeviceParams(
        q1=TransmonParams(frequency=6.5, anharmonicity=-0.3),
        coupler=TransmonParams(frequency=5.5, anharmonicity=-0.3),
        q2=TransmonParams(frequency=4.5, anharmonicity=-0.3),
        g1c=0.08,
        g2c=0.08,
    ),
    # Alternate architecture: coupler above both qubits.
    "paper-tableIII": DeviceParams(
        q1=TransmonParams(frequency=5.641, anharmonicity=-0.300),
        coupler=TransmonParams(frequency=6.317, anharmonicity=-0.303),
        q2=TransmonParams(frequency=5.507, anharmonicity=-0.381),
        g1c=0.040,
        g2c=0.031,
    ),
}


def device_preset(name: str) -> DeviceParams:
    try:
        return DEVICE_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(DEVICE_PRESETS))
        raise KeyError(f"unknown device preset {name!r}; known presets: {known}") from None
