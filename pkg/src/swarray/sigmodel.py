"""Wideband discrete-frequency signal model.

A plane wave from direction (theta0, phi0) with polarization P and delay
tau, carrying a baseband pulse spectrum S, produces at the array ports the
stacked frequency-domain vector

    w = (1_L (x) tau(tau)) o (R M K^H P) o (1_L (x) S)

with (x) the Kronecker and o the Hadamard product.  R is the reception
model matrix, M the diagonal of (-1)^m, K the 3 x J far-field matrix whose
column j is the pattern of mode (s, -m, n), tau(tau) the vector of
exp(-i (p*delta_omega + omega_0) tau) phasors, and S the pulse samples
with the amplitude/path-loss prefactor folded in.

Everything operates in the final baseband convention; passband plane-wave
coefficients are exposed separately by :func:`plane_wave_swcs` for
coefficient-level work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modes, swe
from .constants import DEFAULT_CHARACTERISTIC_IMPEDANCE
from .elements import ReceptionModel
from .errors import DelayAmbiguityError, DomainError

__all__ = [
    "SignalParams",
    "LinearSignalParams",
    "PulseSpectrum",
    "polarization_vector",
    "plane_wave_swcs",
    "tau_vector",
    "mode_coupling",
    "assemble_signal_vector",
]

POLARIZATION_NORM_TOL = 1e-9
_CONSTRUCTOR_NORM_TOL = 1e-6


@dataclass(frozen=True)
class SignalParams:
    """The seven real signal parameters: delay, direction and polarization.

    Polarization is the complex combination
    P_theta*exp(i phi_theta) along the elevation unit vector plus
    P_phi*exp(i phi_phi) along the azimuth unit vector, constrained to unit
    norm.  The constructor admits small constraint violations (1e-6) so
    derivative probes that step off the unit circle stay representable;
    :func:`polarization_vector` enforces the tight tolerance.
    """

    tau: float
    theta0: float
    phi0: float
    p_theta: float
    p_phi: float
    phase_theta: float = 0.0
    phase_phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta0 <= np.pi:
            raise DomainError(f"theta0 must lie in [0, pi], got {self.theta0}")
        norm = np.hypot(self.p_theta, self.p_phi)
        if abs(norm - 1.0) > _CONSTRUCTOR_NORM_TOL:
            raise DomainError(
                f"polarization magnitudes must satisfy sqrt(p_theta^2 + p_phi^2) = 1, got {norm}"
            )

    def as_vector(self) -> np.ndarray:
        return np.array(
            [self.tau, self.theta0, self.phi0, self.p_theta, self.p_phi,
             self.phase_theta, self.phase_phi]
        )


@dataclass(frozen=True)
class LinearSignalParams:
    """Reduced parameters for linearly polarized waves: delay, direction, slant."""

    tau: float
    theta0: float
    phi0: float
    alpha: float

    def to_full(self) -> SignalParams:
        return SignalParams(
            tau=self.tau,
            theta0=self.theta0,
            phi0=self.phi0,
            p_theta=np.sin(self.alpha),
            p_phi=np.cos(self.alpha),
        )

    def as_vector(self) -> np.ndarray:
        return np.array([self.tau, self.theta0, self.phi0, self.alpha])


@dataclass
class PulseSpectrum:
    """Baseband pulse samples with the signal-amplitude prefactor folded in.

    ``samples[p]`` corresponds to bin p = -(bins-1)/2 .. (bins-1)/2 and
    already contains the factor -A / (2 r0 sqrt(pi Z_c)); the flat default
    sets the folded samples to one (a sinc pulse in time with the
    amplitude normalized away).
    """

    samples: np.ndarray
    amplitude: float = 1.0
    source_distance: float = 1.0
    char_impedance: float = DEFAULT_CHARACTERISTIC_IMPEDANCE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1 or len(self.samples) % 2 != 1:
            raise DomainError("pulse spectra need an odd number of bin samples")

    @property
    def bins(self) -> int:
        return len(self.samples)

    @classmethod
    def flat(cls, bins: int) -> "PulseSpectrum":
        return cls(samples=np.ones(bins, dtype=complex))

    @classmethod
    def from_baseband(
        cls,
        raw_samples,
        amplitude: float,
        source_distance: float,
        char_impedance: float = DEFAULT_CHARACTERISTIC_IMPEDANCE,
    ) -> "PulseSpectrum":
        """Fold the amplitude/path-loss prefactor into raw spectrum samples."""
        pref = -amplitude / (2.0 * source_distance * np.sqrt(np.pi * char_impedance))
        return cls(
            samples=pref * np.asarray(raw_samples, dtype=complex),
            amplitude=amplitude,
            source_distance=source_distance,
            char_impedance=char_impedance,
        )


def _polarization_components(params: SignalParams) -> np.ndarray:
    return np.array(
        [
            0.0,
            params.p_theta * np.exp(1j * params.phase_theta),
            params.p_phi * np.exp(1j * params.phase_phi),
        ]
    )


def polarization_vector(params: SignalParams) -> np.ndarray:
    """Unit polarization vector in the spherical basis (r, theta, phi)."""
    norm = np.hypot(params.p_theta, params.p_phi)
    if abs(norm - 1.0) > POLARIZATION_NORM_TOL:
        raise DomainError(
            f"polarization vector must have unit norm, got {norm}"
        )
    return _polarization_components(params)


def plane_wave_swcs(
    omega: float,
    theta0: float,
    phi0: float,
    polarization: np.ndarray,
    tau: float,
    amplitude: float,
    source_distance: float,
    pulse_value: complex,
    order: int,
    char_impedance: float = DEFAULT_CHARACTERISTIC_IMPEDANCE,
) -> swe.CoefficientSet:
    """Incident passband coefficients of a plane wave at one frequency.

    ``pulse_value`` is the transmit spectrum evaluated at the baseband
    offset of ``omega``.  Mode (s, m, n) receives the Hermitian projection
    of the polarization onto the far-field pattern of (s, -m, n), scaled by
    the amplitude, path-loss and delay factors.
    """
    pol = np.asarray(polarization, dtype=complex)
    _, m, _ = modes.mode_table(order)
    kmat = swe.far_field_matrix(order, theta0, phi0)
    proj = np.einsum("c,cj->j", pol.conj(), kmat)
    pref = -amplitude * np.exp(-1j * omega * tau) / (
        2.0 * source_distance * np.sqrt(np.pi * char_impedance)
    )
    values = pref * (-1.0) ** m * pulse_value * proj
    return swe.CoefficientSet(order=order, values=values, role="incident", omega=omega)


def tau_vector(tau: float, bins: int, delta_omega: float, omega0: float) -> np.ndarray:
    """Delay phasors exp(-i (p*delta_omega + omega_0) tau) for every bin.

    Delays at or beyond 2*pi/delta_omega advance the phase between
    neighbouring bins by a full turn and cannot be told apart from shorter
    ones, so they are rejected.
    """
    if bins % 2 != 1:
        raise DomainError(f"number of bins must be odd, got {bins}")
    if bins > 1:
        tau_max = 2.0 * np.pi / delta_omega
        if not 0.0 <= tau < tau_max:
            raise DelayAmbiguityError(
                f"delay {tau:.6g} s outside the unambiguous range [0, {tau_max:.6g} s) "
                f"set by the bin spacing"
            )
    elif tau < 0.0:
        raise DelayAmbiguityError(f"delay must be nonnegative, got {tau}")
    half = (bins - 1) // 2
    p = np.arange(-half, half + 1)
    return np.exp(-1j * (p * delta_omega + omega0) * tau)


def mode_coupling(params: SignalParams, order: int) -> np.ndarray:
    """Per-mode direction/polarization coupling (-1)^m K^H P, length J."""
    pol = _polarization_components(params)
    kmat = swe.far_field_matrix(order, params.theta0, params.phi0)
    _, m, _ = modes.mode_table(order)
    return (-1.0) ** m * np.einsum("cj,c->j", kmat.conj(), pol)


def assemble_signal_vector(
    params: SignalParams, model: ReceptionModel, pulse: PulseSpectrum
) -> np.ndarray:
    """Noise-free received vector of length ports * bins."""
    if pulse.bins != model.bins:
        raise DomainError(
            f"pulse has {pulse.bins} bins but the reception model has {model.bins}"
        )
    g = mode_coupling(params, model.order)
    q = model.matrix @ g
    phasor = tau_vector(params.tau, model.bins, model.delta_omega, model.omega0)
    return np.tile(phasor, model.ports) * q * np.tile(pulse.samples, model.ports)
