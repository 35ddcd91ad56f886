import numpy as np
import pytest

from swarray import elements, modes, sigmodel, swe
from swarray.constants import (
    FREE_SPACE_ADMITTANCE,
    FREE_SPACE_IMPEDANCE,
    SPEED_OF_LIGHT,
)
from swarray.errors import DelayAmbiguityError, DomainError

OMEGA0 = 2 * np.pi * 8e9
DW = 2 * np.pi * 25e6


class TestPolarization:
    def test_pure_elevation(self):
        p = sigmodel.polarization_vector(
            sigmodel.SignalParams(0.0, 0.5, 0.1, p_theta=1.0, p_phi=0.0)
        )
        np.testing.assert_array_equal(p, [0.0, 1.0, 0.0])

    def test_linear_slant_45(self):
        params = sigmodel.LinearSignalParams(0.0, 0.5, 0.1, alpha=np.pi / 4).to_full()
        p = sigmodel.polarization_vector(params)
        np.testing.assert_allclose(p[1:], [np.sqrt(2) / 2, np.sqrt(2) / 2], rtol=1e-15)

    def test_unit_norm_for_random_params(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a = rng.uniform(0, np.pi)
            params = sigmodel.SignalParams(
                0.0, 0.5, 0.1,
                p_theta=np.sin(a), p_phi=np.cos(a),
                phase_theta=rng.uniform(0, 2 * np.pi),
                phase_phi=rng.uniform(0, 2 * np.pi),
            )
            assert np.linalg.norm(sigmodel.polarization_vector(params)) == pytest.approx(1.0, abs=1e-12)

    def test_norm_violation_rejected(self):
        # small enough to construct (derivative probes need that), beyond
        # the strict tolerance of the vector builder
        params = sigmodel.SignalParams(0.0, 0.5, 0.1, p_theta=1.0 + 5e-8, p_phi=0.0)
        with pytest.raises(DomainError):
            sigmodel.polarization_vector(params)
        with pytest.raises(DomainError):
            sigmodel.SignalParams(0.0, 0.5, 0.1, p_theta=1.1, p_phi=0.0)

    def test_theta0_domain(self):
        with pytest.raises(DomainError):
            sigmodel.SignalParams(0.0, -0.2, 0.0, 1.0, 0.0)


class TestPlaneWaveCoefficients:
    def _coeffs(self, amplitude=2.0, tau=1.5e-9, order=4):
        pol = np.array([0.0, np.sin(0.7), np.cos(0.7)])
        return sigmodel.plane_wave_swcs(
            omega=OMEGA0, theta0=0.8, phi0=2.1, polarization=pol, tau=tau,
            amplitude=amplitude, source_distance=3.0, pulse_value=1.0, order=order,
        )

    def test_amplitude_linearity(self):
        a1 = self._coeffs(amplitude=1.0)
        a2 = self._coeffs(amplitude=2.0)
        np.testing.assert_allclose(a2.values, 2.0 * a1.values, rtol=1e-15)

    def test_delay_phase_factor(self):
        base = self._coeffs(tau=1.5e-9)
        shifted = self._coeffs(tau=1.5e-9 + 0.4e-9)
        np.testing.assert_allclose(
            shifted.values, np.exp(-1j * OMEGA0 * 0.4e-9) * base.values, rtol=1e-12
        )

    def test_against_unsimplified_derivation(self):
        # second route: keep the impedance and wavenumber factors explicit
        # and project the conjugated field amplitude per mode
        order = 4
        amplitude, tau, r0, zc = 2.0, 1.5e-9, 3.0, 50.0
        pol = np.array([0.0, np.sin(0.7), np.cos(0.7)])
        got = sigmodel.plane_wave_swcs(
            OMEGA0, 0.8, 2.1, pol, tau, amplitude, r0, 1.0, order, char_impedance=zc
        ).values

        k = OMEGA0 / SPEED_OF_LIGHT
        e0 = (
            amplitude
            * np.sqrt(FREE_SPACE_IMPEDANCE / zc)
            * (1j * OMEGA0 / (2 * np.pi * SPEED_OF_LIGHT * r0))
            * pol.conj()
            * np.exp(-1j * OMEGA0 * tau)
        )
        want = np.empty(modes.mode_count(order), dtype=complex)
        for j in range(1, modes.mode_count(order) + 1):
            s, m, n = modes.triple_from_mode_index(j)
            kvec = swe.far_field_K(modes.ModeIndex(s, -m, n), 0.8, 2.1)
            proj = e0[1] * kvec.theta + e0[2] * kvec.phi
            want[j - 1] = (
                (np.sqrt(FREE_SPACE_ADMITTANCE) / (2 * k)) * (-1.0) ** m * np.sqrt(4 * np.pi) * 1j * proj
            )
        np.testing.assert_allclose(got, want, rtol=1e-12)


class TestTauVector:
    def test_zero_delay_is_all_ones(self):
        np.testing.assert_array_equal(sigmodel.tau_vector(0.0, 5, DW, OMEGA0), np.ones(5))

    def test_unit_modulus_norm(self):
        v = sigmodel.tau_vector(7e-9, 21, DW, OMEGA0)
        assert np.linalg.norm(v) ** 2 == pytest.approx(21.0, rel=1e-14)

    def test_channel_grid_delay_bound(self):
        # 25 MHz spacing gives a 40 ns unambiguous range
        sigmodel.tau_vector(39.9e-9, 21, DW, OMEGA0)
        with pytest.raises(DelayAmbiguityError):
            sigmodel.tau_vector(40e-9, 21, DW, OMEGA0)
        with pytest.raises(DelayAmbiguityError):
            sigmodel.tau_vector(-1e-12, 21, DW, OMEGA0)


class TestPulseSpectrum:
    def test_flat_default(self):
        pulse = sigmodel.PulseSpectrum.flat(7)
        np.testing.assert_array_equal(pulse.samples, np.ones(7))

    def test_prefactor_folding(self):
        raw = np.full(3, 2.0 + 0j)
        pulse = sigmodel.PulseSpectrum.from_baseband(raw, amplitude=4.0, source_distance=2.0, char_impedance=50.0)
        want = -4.0 / (2 * 2.0 * np.sqrt(np.pi * 50.0)) * raw
        np.testing.assert_allclose(pulse.samples, want, rtol=1e-15)

    def test_even_length_rejected(self):
        with pytest.raises(DomainError):
            sigmodel.PulseSpectrum.flat(4)


def _single_mode_model(j_active: int, value: complex, order: int = 1) -> elements.ReceptionModel:
    matrix = np.zeros((1, modes.mode_count(order)), dtype=complex)
    matrix[0, j_active - 1] = value
    return elements.ReceptionModel(
        ports=1, bins=1, delta_omega=0.0, omega0=OMEGA0, order=order, matrix=matrix
    )


class TestAssembleSignalVector:
    def test_scalar_path_single_mode(self):
        # one port, one bin, one receiving mode: the stacked product
        # collapses to a hand-written scalar
        j = modes.mode_index_from_triple(2, 1, 1)
        r_val = 0.8 - 0.3j
        model = _single_mode_model(j, r_val)
        pulse = sigmodel.PulseSpectrum(samples=np.array([1.7 - 0.2j]))
        params = sigmodel.SignalParams(
            3e-9, 0.9, 1.1, p_theta=np.sin(0.4), p_phi=np.cos(0.4),
            phase_theta=0.2, phase_phi=1.0,
        )
        got = sigmodel.assemble_signal_vector(params, model, pulse)

        s, m, n = modes.triple_from_mode_index(j)
        kvec = swe.far_field_K(modes.ModeIndex(s, -m, n), params.theta0, params.phi0)
        pol = sigmodel.polarization_vector(params)
        coupling = (-1.0) ** m * (np.conj(kvec.theta) * pol[1] + np.conj(kvec.phi) * pol[2])
        want = np.exp(-1j * OMEGA0 * params.tau) * r_val * coupling * pulse.samples[0]
        assert got.shape == (1,)
        assert abs(got[0] - want) <= 1e-14 * abs(want)

    def test_linear_in_polarization(self, tilted_model_p21, flat_pulse_p21):
        base = dict(tau=2e-9, theta0=0.7, phi0=0.3)
        pa = sigmodel.SignalParams(**base, p_theta=1.0, p_phi=0.0)
        pb = sigmodel.SignalParams(**base, p_theta=0.0, p_phi=1.0)
        pc = sigmodel.SignalParams(**base, p_theta=np.sqrt(0.5), p_phi=np.sqrt(0.5))
        wa = sigmodel.assemble_signal_vector(pa, tilted_model_p21, flat_pulse_p21)
        wb = sigmodel.assemble_signal_vector(pb, tilted_model_p21, flat_pulse_p21)
        wc = sigmodel.assemble_signal_vector(pc, tilted_model_p21, flat_pulse_p21)
        np.testing.assert_allclose(wc, np.sqrt(0.5) * (wa + wb), rtol=1e-12)

    def test_vector_length(self, tilted_model_p21, flat_pulse_p21):
        params = sigmodel.LinearSignalParams(0.0, 0.5, 0.25, np.pi / 3).to_full()
        w = sigmodel.assemble_signal_vector(params, tilted_model_p21, flat_pulse_p21)
        assert w.shape == (63,)

    def test_delay_shift_property(self, tilted_model_p21, flat_pulse_p21):
        base = sigmodel.SignalParams(4e-9, 0.8, 1.9, np.sin(1.0), np.cos(1.0))
        shifted = sigmodel.SignalParams(4e-9 + 2.5e-9, 0.8, 1.9, np.sin(1.0), np.cos(1.0))
        w0 = sigmodel.assemble_signal_vector(base, tilted_model_p21, flat_pulse_p21)
        w1 = sigmodel.assemble_signal_vector(shifted, tilted_model_p21, flat_pulse_p21)
        phasor = np.exp(-1j * (tilted_model_p21.omega_grid) * 2.5e-9)
        np.testing.assert_allclose(w1, np.tile(phasor, 3) * w0, rtol=1e-13)

    def test_bin_count_mismatch_rejected(self, tilted_model_p21):
        params = sigmodel.LinearSignalParams(0.0, 0.5, 0.25, 0.1).to_full()
        with pytest.raises(DomainError):
            sigmodel.assemble_signal_vector(params, tilted_model_p21, sigmodel.PulseSpectrum.flat(5))
