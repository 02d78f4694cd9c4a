"""Time propagation: step exactness, unitarity, states/trajectory paths."""

import numpy as np
import pytest
import scipy.linalg

from czsim import (
    EvolutionSettings,
    IntegrationFailureError,
    PulseParams,
    device_preset,
    envelope,
    evolve_states,
    evolve_trajectory,
    evolve_unitary,
    pulse_preset,
    resolve_pulse,
    static_spectrum,
)
from czsim.device import build_rotating_hamiltonian
from czsim.propagator import _check_unitary, _evolve_steps


def short_pulse(t_f=1.0):
    return PulseParams(
        amp0=0.0083, lambda1=0.3395, lambda2=0.0601,
        t_f=t_f, detuning=-0.015,
    )


def expm_reference(device, pulse, dt):
    """Midpoint-rule product of dense matrix exponentials."""
    pulse = resolve_pulse(pulse, device)
    static, drive = build_rotating_hamiltonian(device, pulse.drive_freq)
    n = round(pulse.t_f / dt)
    U = np.eye(static.shape[0], dtype=complex)
    for k in range(n):
        amp = np.pi * envelope(pulse, (k + 0.5) * dt)
        U = scipy.linalg.expm(-1j * (static + amp * drive) * dt) @ U
    return U


class TestSettings:
    def test_defaults(self):
        s = EvolutionSettings()
        assert s.dt == 0.005
        assert s.sample_stride == 100

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            EvolutionSettings(dt=0.0)
        with pytest.raises(ValueError):
            EvolutionSettings(dt=-0.01)

    def test_rejects_bad_stride(self):
        with pytest.raises(ValueError):
            EvolutionSettings(sample_stride=0)

    def test_requires_ten_steps(self):
        device = device_preset("paper-tableI")
        with pytest.raises(ValueError):
            evolve_unitary(device, short_pulse(1.0),
                           EvolutionSettings(dt=0.2))


class TestUnitaryPath:
    def test_matches_dense_expm_product(self):
        # same midpoint discretization, independent exponential algorithm
        device = device_preset("paper-tableI")
        pulse = short_pulse(1.0)
        U = evolve_unitary(device, pulse, EvolutionSettings(dt=0.1))
        R = expm_reference(device, pulse, 0.1)
        assert np.max(np.abs(U - R)) < 1e-11

    def test_matches_dense_expm_finer_grid(self):
        device = device_preset("paper-tableI")
        pulse = short_pulse(2.0)
        U = evolve_unitary(device, pulse, EvolutionSettings(dt=0.05))
        R = expm_reference(device, pulse, 0.05)
        assert np.max(np.abs(U - R)) < 1e-11

    def test_idle_pulse_is_static_exponential(self):
        device = device_preset("paper-tableI")
        idle = PulseParams(amp0=0.0, lambda1=0.3, lambda2=0.1,
                           t_f=40.0, detuning=-0.015)
        U = evolve_unitary(device, idle, EvolutionSettings(dt=0.5))
        static, _ = build_rotating_hamiltonian(
            device, resolve_pulse(idle, device).drive_freq)
        R = scipy.linalg.expm(-1j * static * 40.0)
        assert np.max(np.abs(U - R)) < 1e-10

    def test_unitarity(self):
        device = device_preset("paper-tableI")
        U = evolve_unitary(device, pulse_preset("tableII-a"),
                           EvolutionSettings(dt=0.05))
        defect = U.conj().T @ U - np.eye(U.shape[0])
        assert np.max(np.abs(defect)) < 1e-8

    def test_step_window_composition(self):
        # propagating [0, k) then [k, n) composes to the full gate
        device = device_preset("paper-tableI")
        pulse = pulse_preset("tableII-a")
        settings = EvolutionSettings(dt=0.05)
        n = round(pulse.t_f / settings.dt)
        k = 1234
        full = _evolve_steps(device, pulse, settings)
        late = _evolve_steps(device, pulse, settings, k, n)
        early = _evolve_steps(device, pulse, settings, 0, k)
        assert np.max(np.abs(full - late @ early)) < 1e-12

    def test_corrupt_matrix_fails_check(self):
        with pytest.raises(IntegrationFailureError):
            _check_unitary(1.1 * np.eye(4, dtype=complex))


class TestStatesPath:
    def test_agrees_with_unitary_columns(self):
        device = device_preset("paper-tableI")
        pulse = pulse_preset("tableII-a")
        settings = EvolutionSettings(dt=0.05)
        spectrum = static_spectrum(device)
        V = np.column_stack([
            spectrum.vector((0, 0, 0)),
            spectrum.vector((1, 0, 1)),
        ])
        U = evolve_unitary(device, pulse, settings)
        out = evolve_states(device, pulse, settings, V)
        assert np.max(np.abs(out - U @ V)) < 1e-11

    def test_single_vector_shape(self):
        device = device_preset("paper-tableI")
        pulse = short_pulse(1.0)
        settings = EvolutionSettings(dt=0.1)
        rng = np.random.default_rng(11)
        psi = rng.normal(size=64) + 1j * rng.normal(size=64)
        psi /= np.linalg.norm(psi)
        out = evolve_states(device, pulse, settings, psi)
        assert out.shape == (64,)
        U = evolve_unitary(device, pulse, settings)
        assert np.max(np.abs(out - U @ psi)) < 1e-11

    def test_norm_preserved(self):
        device = device_preset("paper-tableI")
        pulse = pulse_preset("tableII-a")
        rng = np.random.default_rng(5)
        psi = rng.normal(size=64) + 1j * rng.normal(size=64)
        psi /= np.linalg.norm(psi)
        out = evolve_states(device, pulse, EvolutionSettings(dt=0.05), psi)
        assert abs(np.linalg.norm(out) - 1.0) < 1e-10


class TestTrajectory:
    def test_sample_grid(self):
        device = device_preset("paper-tableI")
        tr = evolve_trajectory(
            device, short_pulse(1.0),
            EvolutionSettings(dt=0.1, sample_stride=3), (0, 0, 0),
        )
        assert np.allclose(tr.times, [0.0, 0.3, 0.6, 0.9, 1.0])

    def test_populations_sum_to_one(self):
        device = device_preset("paper-tableI")
        tr = evolve_trajectory(
            device, pulse_preset("tableII-a"),
            EvolutionSettings(dt=0.05, sample_stride=100), (1, 0, 1),
        )
        total = sum(np.asarray(v) for v in tr.populations.values())
        assert np.max(np.abs(total - 1.0)) < 1e-10

    def test_both_excited_leaks_through_full_coupler(self):
        # |101> transiently drives into |111> and returns by the end
        device = device_preset("paper-tableI")
        tr = evolve_trajectory(
            device, pulse_preset("tableII-a"),
            EvolutionSettings(dt=0.05, sample_stride=100), (1, 0, 1),
        )
        upper = np.asarray(tr.populations[(1, 1, 1)])
        assert np.max(upper) > 0.5
        assert upper[-1] < 1e-3
        assert tr.leakage_trace[0] < 1e-12
        assert tr.leakage_trace[-1] < 5e-4
        assert np.asarray(tr.populations[(1, 0, 1)])[-1] > 0.98

    def test_ground_drives_coupler_and_returns(self):
        device = device_preset("paper-tableI")
        tr = evolve_trajectory(
            device, pulse_preset("tableII-a"),
            EvolutionSettings(dt=0.05, sample_stride=100), (0, 0, 0),
        )
        assert np.max(np.asarray(tr.populations[(0, 1, 0)])) > 0.1
        assert np.asarray(tr.populations[(0, 0, 0)])[-1] > 0.99

    def test_idle_populations_are_stationary(self):
        device = device_preset("paper-tableI")
        idle = PulseParams(amp0=0.0, lambda1=0.3, lambda2=0.1,
                           t_f=100.0, detuning=-0.015)
        tr = evolve_trajectory(
            device, idle, EvolutionSettings(dt=0.5, sample_stride=10),
            (1, 0, 1),
        )
        span = np.asarray(tr.populations[(1, 0, 1)])
        assert np.max(np.abs(span - span[0])) < 1e-12
        assert np.max(tr.leakage_trace) < 1e-12
