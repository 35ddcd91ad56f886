"""Vector spherical waves, far-field patterns and coefficient extraction.

The electric field outside a sphere circumscribing a radiator is expanded
in outgoing vector spherical wave functions F_j with complex coefficients;
the angular limit of each outgoing wave is its far-field pattern K_j, a
function of direction only with zero radial component.  This module
evaluates both families and their angular derivatives, and recovers
expansion coefficients from field samples on a sphere by exact quadrature
(Gauss-Legendre in cos(theta), uniform in phi).

Conventions: exp(-i omega t) time dependence, exp(+i k r) outgoing waves,
fully normalized Legendre functions from :mod:`swarray.modes`, and the
azimuthal sign factor (-m/|m|)^m taken as 1 at m = 0.

The quadrature pairing of two wave functions is the plain transposed
product (no conjugation); it couples azimuthal orders m and -m, which is
why extraction reads the numerator at the conjugate-m index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modes
from .constants import FREE_SPACE_ADMITTANCE, SPEED_OF_LIGHT
from .errors import DomainError, GridDensityError

__all__ = [
    "SphericalVec",
    "SphereGrid",
    "CoefficientSet",
    "far_field_K",
    "far_field_K_dphi",
    "far_field_K_dtheta",
    "far_field_matrix",
    "vswf_F",
    "synthesize_field",
    "extract_transmission",
    "reception_from_transmission",
]

_ROLES = ("transmission", "reception", "incident", "radiated")


@dataclass(frozen=True)
class SphericalVec:
    """A complex vector in the spherical basis (r, theta, phi).

    Components may be scalars or broadcast arrays.  Far-field patterns have
    an identically zero radial component.
    """

    r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray

    def as_array(self) -> np.ndarray:
        """Stack the components along a trailing axis of length 3."""
        return np.stack(np.broadcast_arrays(self.r, self.theta, self.phi), axis=-1)


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature grid on the unit sphere.

    Gauss-Legendre nodes/weights in cos(theta) and uniformly spaced phi
    samples.  The rule integrates products of two wave functions exactly
    when ``n_theta >= N + 1`` and ``n_phi >= 2*N + 2`` for truncation
    order N.
    """

    theta_nodes: np.ndarray
    theta_weights: np.ndarray
    phi_nodes: np.ndarray

    def __post_init__(self):
        total = np.sum(self.theta_weights) * 2.0 * np.pi
        if abs(total - 4.0 * np.pi) > 1e-9 * 4.0 * np.pi:
            raise DomainError(
                f"theta weights integrate the unit sphere to {total:.6g}, expected 4*pi"
            )

    @property
    def n_theta(self) -> int:
        return len(self.theta_nodes)

    @property
    def n_phi(self) -> int:
        return len(self.phi_nodes)

    @property
    def phi_spacing(self) -> float:
        return 2.0 * np.pi / self.n_phi

    @classmethod
    def for_order(cls, order: int, n_theta: int | None = None, n_phi: int | None = None) -> "SphereGrid":
        """Smallest grid that integrates order-``order`` expansions exactly."""
        if order < 1:
            raise DomainError(f"order must be >= 1, got {order}")
        n_theta = order + 1 if n_theta is None else n_theta
        n_phi = 2 * order + 2 if n_phi is None else n_phi
        x, w = np.polynomial.legendre.leggauss(n_theta)
        theta = np.arccos(x)[::-1].copy()
        weights = w[::-1].copy()
        phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
        grid = cls(theta_nodes=theta, theta_weights=weights, phi_nodes=phi)
        grid.require_order(order)
        return grid

    def require_order(self, order: int) -> None:
        """Raise if the grid is too coarse for the given truncation order."""
        if self.n_theta < order + 1 or self.n_phi < 2 * order + 2:
            raise GridDensityError(
                f"grid ({self.n_theta} x {self.n_phi}) too coarse for order {order}: "
                f"need n_theta >= {order + 1} and n_phi >= {2 * order + 2}"
            )


@dataclass
class CoefficientSet:
    """Spherical-wave coefficients up to truncation order N.

    ``values[j-1]`` holds the coefficient of mode j.  The role tag records
    what the coefficients describe: per-port transmission or reception, or
    the incident/radiated amplitudes of a field.
    """

    order: int
    values: np.ndarray
    role: str
    omega: float
    port: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.role not in _ROLES:
            raise DomainError(f"unknown coefficient role {self.role!r}")
        if len(self.values) != modes.mode_count(self.order):
            raise DomainError(
                f"coefficient vector has length {len(self.values)}, "
                f"expected {modes.mode_count(self.order)} for order {self.order}"
            )


def _angular_factors(order: int, theta, phi, derivative: str | None):
    """Per-mode angular component factors for all j up to the given order.

    Returns (theta_component, phi_component) arrays of shape (J, ...) where
    ... matches the broadcast shape of theta and phi, plus the mode arrays.
    """
    s, m, n = modes.mode_table(order)
    am = np.abs(m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast_shapes(theta.shape, phi.shape)
    theta_b = np.broadcast_to(theta, shape)
    phi_b = np.broadcast_to(phi, shape)

    tabs = modes.legendre_tables(order, theta_b)
    if derivative == "theta":
        tangent = tabs["d2p"][am, n]
        azim = m[(...,) + (None,) * len(shape)] * tabs["du"][am, n]
    elif derivative is None:
        tangent = tabs["dp"][am, n]
        azim = m[(...,) + (None,) * len(shape)] * tabs["u"][am, n]
    else:
        raise DomainError(f"unknown derivative selector {derivative!r}")

    lam = np.where(m > 0, (-1.0) ** m, 1.0)
    pref = np.sqrt(2.0 / (n * (n + 1.0))) * lam
    phase_s = np.where(s == 1, (-1j) ** (n + 1), (-1j) ** n)
    scale = (pref * phase_s)[(...,) + (None,) * len(shape)]
    expimphi = np.exp(1j * m[(...,) + (None,) * len(shape)] * phi_b)

    s_col = s[(...,) + (None,) * len(shape)]
    k_theta = np.where(s_col == 1, 1j * azim, tangent) * scale * expimphi
    k_phi = np.where(s_col == 1, -tangent, 1j * azim) * scale * expimphi
    return k_theta, k_phi, (s, m, n)


def far_field_matrix(order: int, theta, phi, derivative: str | None = None) -> np.ndarray:
    """Far-field patterns of all modes, stacked through the conjugate-m index.

    Returns a complex array of shape (3, J, ...) whose column j is the
    pattern of mode (s, -m, n) -- the pairing the reception model couples
    to -- evaluated at the given direction(s).  ``derivative`` may be
    ``"theta"`` or ``"phi"`` to return the corresponding angular derivative
    of each column instead.
    """
    want_phi = derivative == "phi"
    k_theta, k_phi, (s, m, n) = _angular_factors(
        order, theta, phi, None if want_phi else derivative
    )
    jhat = modes.conjugate_m_index(np.arange(1, modes.mode_count(order) + 1)) - 1
    k_theta = k_theta[jhat]
    k_phi = k_phi[jhat]
    if want_phi:
        # phi enters each pattern only through exp(i m phi)
        factor = (1j * m[jhat])[(...,) + (None,) * (k_theta.ndim - 1)]
        k_theta = factor * k_theta
        k_phi = factor * k_phi
    zero = np.zeros_like(k_theta)
    return np.stack([zero, k_theta, k_phi], axis=0)


def _single_mode_pattern(mode: modes.ModeIndex, theta, phi, derivative: str | None):
    k_theta, k_phi, _ = _angular_factors(mode.n, theta, phi, derivative)
    idx = mode.j - 1
    return SphericalVec(
        r=np.zeros_like(k_theta[idx]), theta=k_theta[idx], phi=k_phi[idx]
    )


def far_field_K(mode: modes.ModeIndex, theta, phi) -> SphericalVec:
    """Far-field pattern of one mode at direction (theta, phi)."""
    return _single_mode_pattern(mode, theta, phi, None)


def far_field_K_dtheta(mode: modes.ModeIndex, theta, phi) -> SphericalVec:
    """Elevation derivative of the far-field pattern of one mode."""
    return _single_mode_pattern(mode, theta, phi, "theta")


def far_field_K_dphi(mode: modes.ModeIndex, theta, phi) -> SphericalVec:
    """Azimuth derivative of the far-field pattern: i*m times the pattern."""
    k = far_field_K(mode, theta, phi)
    return SphericalVec(r=k.r * 0.0, theta=1j * mode.m * k.theta, phi=1j * mode.m * k.phi)


def vswf_F(kind: int, mode: modes.ModeIndex, kr, theta, phi) -> SphericalVec:
    """Vector spherical wave function of one mode at (kr, theta, phi).

    ``kind`` 3 selects the outgoing wave, 4 the incoming one.  Scaled by
    sqrt(4*pi) * kr / exp(i kr), the outgoing wave tends to the far-field
    pattern as kr grows.
    """
    if kind not in (1, 3, 4):
        raise DomainError(f"wave kind must be 1, 3 or 4, got {kind}")
    b = modes.legendre_bundle(mode.n, mode.m, theta)
    rad = modes.radial_function(kind, mode.n, kr)
    lam = (-1.0) ** mode.m if mode.m > 0 else 1.0
    norm = lam / np.sqrt(2.0 * np.pi * mode.n * (mode.n + 1.0))
    expimphi = np.exp(1j * mode.m * np.asarray(phi, dtype=float))
    if mode.s == 1:
        scale = norm * expimphi
        return SphericalVec(
            r=np.zeros_like(scale * b.p),
            theta=scale * rad.s1 * 1j * b.p_over_sin,
            phi=scale * rad.s1 * (-b.dp),
        )
    scale = norm * expimphi
    return SphericalVec(
        r=scale * mode.n * (mode.n + 1.0) * rad.s2_radial * b.p,
        theta=scale * rad.s2 * b.dp,
        phi=scale * rad.s2 * 1j * b.p_over_sin,
    )


def _vswf_basis(order: int, kind: int, kr: float, grid: SphereGrid) -> np.ndarray:
    """All wave functions of one kind on a sphere grid, shape (J, n_theta, n_phi, 3)."""
    s, m, n = modes.mode_table(order)
    am = np.abs(m)
    tabs = modes.legendre_tables(order, grid.theta_nodes)
    p = tabs["p"][am, n]
    dp = tabs["dp"][am, n]
    msin = m[:, None] * tabs["u"][am, n]

    rad = modes.radial_function(kind, np.arange(1, order + 1), kr)
    r1 = rad.s1[n - 1]
    r2 = rad.s2[n - 1]
    r2r = rad.s2_radial[n - 1]

    lam = np.where(m > 0, (-1.0) ** m, 1.0)
    norm = lam / np.sqrt(2.0 * np.pi * n * (n + 1.0))
    expimphi = np.exp(1j * np.outer(m, grid.phi_nodes))

    J = len(s)
    out = np.zeros((J, grid.n_theta, grid.n_phi, 3), dtype=complex)
    s1_mask = s == 1
    # s = 1: purely transverse
    base1 = (norm[s1_mask] * r1[s1_mask])[:, None]
    out[s1_mask, :, :, 1] = (base1 * 1j * msin[s1_mask])[:, :, None] * expimphi[s1_mask][:, None, :]
    out[s1_mask, :, :, 2] = (base1 * (-dp[s1_mask]))[:, :, None] * expimphi[s1_mask][:, None, :]
    # s = 2: transverse plus radial component
    s2_mask = ~s1_mask
    nn1 = (n * (n + 1.0))[s2_mask]
    out[s2_mask, :, :, 0] = (
        (norm[s2_mask] * nn1 * r2r[s2_mask])[:, None] * p[s2_mask]
    )[:, :, None] * expimphi[s2_mask][:, None, :]
    base2 = (norm[s2_mask] * r2[s2_mask])[:, None]
    out[s2_mask, :, :, 1] = (base2 * dp[s2_mask])[:, :, None] * expimphi[s2_mask][:, None, :]
    out[s2_mask, :, :, 2] = (base2 * 1j * msin[s2_mask])[:, :, None] * expimphi[s2_mask][:, None, :]
    return out


def _mode_norms(order: int, kr: float) -> np.ndarray:
    """Closed-form self-pairing value of each outgoing mode on a sphere.

    The quadrature of the transposed product of mode j with its
    conjugate-m partner equals (-1)^m times this quantity.
    """
    s, m, n = modes.mode_table(order)
    rad = modes.radial_function(3, np.arange(1, order + 1), kr)
    r1 = rad.s1[n - 1]
    r2 = rad.s2[n - 1]
    r2r = rad.s2_radial[n - 1]
    return np.where(s == 1, r1 * r1, r2 * r2 + n * (n + 1.0) * r2r * r2r)


def synthesize_field(coefficients: CoefficientSet, grid: SphereGrid, radius: float) -> np.ndarray:
    """Radiated field of an outgoing expansion on a sphere of the given radius.

    Returns the field samples in V/m as a complex array of shape
    (n_theta, n_phi, 3) in spherical components.
    """
    omega = coefficients.omega
    k = omega / SPEED_OF_LIGHT
    basis = _vswf_basis(coefficients.order, 3, k * radius, grid)
    scale = k / np.sqrt(FREE_SPACE_ADMITTANCE)
    return scale * np.einsum("j,jtpc->tpc", coefficients.values, basis)


def extract_transmission(
    e_field: np.ndarray, grid: SphereGrid, kr: float, order: int, omega: float, port: int | None = None
) -> CoefficientSet:
    """Transmission coefficients of a radiator from its sampled field.

    ``e_field`` holds spherical field components on the grid, shape
    (n_theta, n_phi, 3), taken on a sphere with k * radius = ``kr`` at a
    unit forward voltage-wave excitation.  The quadrature of the field
    against each outgoing wave is divided by the closed-form mode norm;
    the numerator for mode (s, m, n) is read at the conjugate-m partner
    because the unconjugated pairing couples m with -m.
    """
    if kr <= 0.0:
        raise DomainError("kr must be positive")
    grid.require_order(order)
    e_field = np.asarray(e_field, dtype=complex)
    expected = (grid.n_theta, grid.n_phi, 3)
    if e_field.shape != expected:
        raise DomainError(f"field samples have shape {e_field.shape}, expected {expected}")

    basis = _vswf_basis(order, 3, kr, grid)
    weighted = e_field * grid.theta_weights[:, None, None] * grid.phi_spacing
    pairing = np.einsum("tpc,jtpc->j", weighted, basis)

    _, m, _ = modes.mode_table(order)
    jhat = modes.conjugate_m_index(np.arange(1, modes.mode_count(order) + 1)) - 1
    k = omega / SPEED_OF_LIGHT
    denom = (k / np.sqrt(FREE_SPACE_ADMITTANCE)) * (-1.0) ** m * _mode_norms(order, kr)
    values = pairing[jhat] / denom
    return CoefficientSet(order=order, values=values, role="transmission", omega=omega, port=port)


def reception_from_transmission(tset: CoefficientSet) -> CoefficientSet:
    """Reception coefficients of a reciprocal radiator from its transmission ones.

    Mode (s, m, n) receives with (-1)^m times the transmission coefficient
    of (s, -m, n); applying the same map twice returns the original set.
    """
    if tset.role != "transmission":
        raise DomainError(f"expected a transmission set, got role {tset.role!r}")
    _, m, _ = modes.mode_table(tset.order)
    jhat = modes.conjugate_m_index(np.arange(1, modes.mode_count(tset.order) + 1)) - 1
    values = (-1.0) ** m * tset.values[jhat]
    return CoefficientSet(
        order=tset.order, values=values, role="reception", omega=tset.omega, port=tset.port
    )
