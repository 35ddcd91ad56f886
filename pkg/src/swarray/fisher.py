"""Analytic signal gradients, Fisher information and Cramer-Rao bounds.

For Gaussian noise with covariance C the information matrix is

    F[k, l] = 2 Re{ (dw/dtheta_k)^H C^{-1} (dw/dtheta_l) }

over the seven signal parameters (tau, theta0, phi0, P_theta, P_phi,
phi_theta, phi_phi).  All seven derivative columns are analytic: the delay
column is a Hadamard phasor derivative, the four polarization columns are
projections onto the elevation/azimuth polarization axes, and the two
direction columns substitute the angular derivatives of the far-field
matrix.

For linearly polarized waves the parameter set collapses to
(tau, theta0, phi0, alpha) with P_theta = sin(alpha), P_phi = cos(alpha),
and the 4 x 4 information matrix follows by congruence with the Jacobian
of the embedding (its alpha column is [cos(alpha), -sin(alpha), 0, 0] on
the polarization block).

Under white noise the delay phasor is unit-modulus and cancels inside the
column products, making the information matrix independent of the true
delay; the batched helpers exploit this by evaluating at tau = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import modes, swe
from .elements import ReceptionModel
from .errors import DomainError, SingularFimError
from .sigmodel import (
    LinearSignalParams,
    PulseSpectrum,
    SignalParams,
    _polarization_components,
    tau_vector,
)

__all__ = [
    "NoiseModel",
    "FimResult",
    "AverageCrlbResult",
    "PARAM_NAMES",
    "LINEAR_PARAM_NAMES",
    "signal_gradient",
    "fim",
    "reparameterize_linear",
    "fim_linear",
    "crlb",
    "crlb_diagonal",
    "linear_fim_batch",
    "average_crlb",
]

PARAM_NAMES = ("tau", "theta0", "phi0", "p_theta", "p_phi", "phase_theta", "phase_phi")
LINEAR_PARAM_NAMES = ("tau", "theta0", "phi0", "alpha")

EIG_FLOOR_REL = 1e-12
"""Relative eigenvalue floor below which an information matrix counts as singular."""


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian noise: white with a scalar variance, or a full
    Hermitian positive-definite covariance."""

    kind: str
    variance: float = 0.0
    covariance: np.ndarray | None = None

    @classmethod
    def white(cls, variance: float = 0.01) -> "NoiseModel":
        if variance <= 0.0:
            raise DomainError(f"noise variance must be positive, got {variance}")
        return cls(kind="white", variance=variance)

    @classmethod
    def general(cls, covariance) -> "NoiseModel":
        c = np.asarray(covariance, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DomainError("covariance must be a square matrix")
        if not np.allclose(c, c.conj().T, rtol=1e-10, atol=0.0):
            raise DomainError("covariance must be Hermitian")
        return cls(kind="general", covariance=c)

    def solve(self, columns: np.ndarray) -> np.ndarray:
        """C^{-1} applied to the given columns."""
        if self.kind == "white":
            return columns / self.variance
        try:
            factor = cho_factor(self.covariance)
        except np.linalg.LinAlgError as exc:
            raise DomainError("covariance matrix is not positive definite") from exc
        return cho_solve(factor, columns)


@dataclass(frozen=True)
class FimResult:
    """An information matrix with its parameterization tag and conditioning."""

    matrix: np.ndarray
    parameterization: str
    eig_min: float
    eig_max: float

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, parameterization: str) -> "FimResult":
        matrix = 0.5 * (matrix + matrix.T)
        eigs = np.linalg.eigvalsh(matrix)
        return cls(
            matrix=matrix,
            parameterization=parameterization,
            eig_min=float(eigs[0]),
            eig_max=float(eigs[-1]),
        )


def signal_gradient(
    params: SignalParams, model: ReceptionModel, pulse: PulseSpectrum
) -> np.ndarray:
    """All seven partial derivatives of the received vector, stacked as
    columns of a (ports*bins, 7) array in the order of PARAM_NAMES."""
    L, P = model.ports, model.bins
    phasor = np.tile(tau_vector(params.tau, P, model.delta_omega, model.omega0), L)
    pulse_t = np.tile(pulse.samples, L)
    omega_t = np.tile(model.omega_grid, L)

    _, m, _ = modes.mode_table(model.order)
    sign = (-1.0) ** m
    pol = _polarization_components(params)

    kmat = swe.far_field_matrix(model.order, params.theta0, params.phi0)
    kmat_dt = swe.far_field_matrix(model.order, params.theta0, params.phi0, derivative="theta")
    g = sign * (kmat.conj().T @ pol)
    g_dt = sign * (kmat_dt.conj().T @ pol)
    # the phi derivative of column j multiplies it by -i m; conjugation flips the sign
    g_dp = 1j * m * g
    g_theta_axis = sign * kmat.conj()[1]
    g_phi_axis = sign * kmat.conj()[2]

    base = phasor * pulse_t
    w = base * (model.matrix @ g)
    cols = np.empty((L * P, 7), dtype=complex)
    cols[:, 0] = -1j * omega_t * w
    cols[:, 1] = base * (model.matrix @ g_dt)
    cols[:, 2] = base * (model.matrix @ g_dp)
    e_t = np.exp(1j * params.phase_theta)
    e_p = np.exp(1j * params.phase_phi)
    q_theta = base * (model.matrix @ g_theta_axis)
    q_phi = base * (model.matrix @ g_phi_axis)
    cols[:, 3] = e_t * q_theta
    cols[:, 4] = e_p * q_phi
    cols[:, 5] = 1j * params.p_theta * e_t * q_theta
    cols[:, 6] = 1j * params.p_phi * e_p * q_phi
    return cols


def fim(
    params: SignalParams,
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
) -> FimResult:
    """7 x 7 information matrix of the full parameter set."""
    grad = signal_gradient(params, model, pulse)
    if noise.kind == "white":
        f = (2.0 / noise.variance) * np.real(grad.conj().T @ grad)
    else:
        if noise.covariance.shape[0] != grad.shape[0]:
            raise DomainError(
                f"covariance is {noise.covariance.shape[0]} x ..., "
                f"signal vector has length {grad.shape[0]}"
            )
        f = 2.0 * np.real(grad.conj().T @ noise.solve(grad))
    return FimResult.from_matrix(f, "full")


def _linear_jacobian(alpha: float) -> np.ndarray:
    """Jacobian of the full parameters w.r.t. (tau, theta0, phi0, alpha)."""
    jac = np.zeros((7, 4))
    jac[0, 0] = jac[1, 1] = jac[2, 2] = 1.0
    jac[3, 3] = np.cos(alpha)
    jac[4, 3] = -np.sin(alpha)
    return jac


def reparameterize_linear(full: FimResult, alpha: float) -> FimResult:
    """Collapse a 7 x 7 information matrix to the linear-polarization set."""
    if full.matrix.shape != (7, 7):
        raise DomainError("expected a 7 x 7 information matrix")
    jac = _linear_jacobian(alpha)
    return FimResult.from_matrix(jac.T @ full.matrix @ jac, "linear")


def fim_linear(
    params: LinearSignalParams,
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
) -> FimResult:
    """4 x 4 information matrix for a linearly polarized wave."""
    return reparameterize_linear(fim(params.to_full(), model, pulse, noise), params.alpha)


def _inverse_diagonal(matrix: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Diagonal of the inverse via an equilibrated eigendecomposition.

    The parameters carry different units (seconds vs radians), so the raw
    eigenvalue spread of the matrix reflects unit disparity, not rank.
    Scaling rows and columns by the square roots of the diagonal yields a
    unit-diagonal matrix whose eigenvalue floor measures genuine
    correlation degeneracy; the inverse diagonal is rescaled back.
    """
    d = np.diag(matrix)
    if np.any(d <= 0.0) or not np.all(np.isfinite(d)):
        raise SingularFimError(
            "information matrix has a nonpositive diagonal entry",
            float(np.min(d)),
            float(np.max(d)),
        )
    root = np.sqrt(d)
    scaled = matrix / root[:, None] / root[None, :]
    eigval, eigvec = np.linalg.eigh(scaled)
    floor = EIG_FLOOR_REL * eigval[-1]
    if eigval[0] <= floor or eigval[-1] <= 0.0:
        raise SingularFimError(
            "information matrix is numerically singular", float(eigval[0]), float(eigval[-1])
        )
    diag_scaled = (eigvec**2 / eigval).sum(axis=1)
    return diag_scaled / d, float(eigval[0]), float(eigval[-1])


def crlb(result: FimResult, k: int) -> float:
    """Lower bound on the variance of parameter k: entry (k, k) of the
    inverse information matrix, via a symmetric eigendecomposition.

    Raises :class:`SingularFimError` (carrying the eigenvalue extremes)
    instead of silently pseudo-inverting a singular matrix.
    """
    diag, _, _ = _inverse_diagonal(result.matrix)
    return float(diag[k])


def crlb_diagonal(result: FimResult) -> np.ndarray:
    """All variance bounds at once: the diagonal of the inverse matrix."""
    diag, _, _ = _inverse_diagonal(result.matrix)
    return diag


# ---------------------------------------------------------------------------
# batched evaluation over direction/polarization grids (white noise)

def direction_operators(model: ReceptionModel, directions: np.ndarray):
    """Reception-side operators for a stack of directions.

    ``directions`` is (n, 2) of (theta0, phi0).  Returns three complex
    arrays of shape (n, ports*bins, 3): the value operator and its theta
    and phi derivatives.  Row products of these with a polarization vector
    give the direction-dependent part of the received vector and of its
    direction gradients; the delay phasor and pulse weighting are applied
    by the caller.
    """
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    _, m, _ = modes.mode_table(model.order)
    sign = (-1.0) ** m
    rm = model.matrix * sign
    rm_dphi = model.matrix * (sign * 1j * m)

    theta = directions[:, 0]
    phi = directions[:, 1]
    k = swe.far_field_matrix(model.order, theta, phi)          # (3, J, n)
    k_dt = swe.far_field_matrix(model.order, theta, phi, derivative="theta")
    kh = np.conj(np.moveaxis(k, 0, -1))                         # (J, n, 3)
    kh_dt = np.conj(np.moveaxis(k_dt, 0, -1))
    a_val = np.einsum("ej,jnc->nec", rm, kh)
    a_dt = np.einsum("ej,jnc->nec", rm, kh_dt)
    a_dp = np.einsum("ej,jnc->nec", rm_dphi, kh)
    return a_val, a_dt, a_dp


def linear_fim_batch(
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
    directions: np.ndarray,
    alphas: np.ndarray,
    chunk: int = 128,
) -> np.ndarray:
    """4 x 4 information matrices for every (direction, alpha) pair.

    White noise only; the unit-modulus delay phasor cancels in the column
    products, so the result holds for every true delay.  Returns shape
    (n_directions, n_alphas, 4, 4).
    """
    if noise.kind != "white":
        raise DomainError("batched information matrices support white noise only")
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    L, P = model.ports, model.bins
    pulse_t = np.tile(pulse.samples, L)
    omega_t = np.tile(model.omega_grid, L)
    sin_a, cos_a = np.sin(alphas), np.cos(alphas)

    n_dir = len(directions)
    out = np.empty((n_dir, len(alphas), 4, 4))
    jac = np.stack([_linear_jacobian(a) for a in alphas])       # (A, 7, 4)

    for start in range(0, n_dir, chunk):
        sl = slice(start, min(start + chunk, n_dir))
        a_val, a_dt, a_dp = direction_operators(model, directions[sl])
        nblk = a_val.shape[0]
        d = np.empty((nblk, len(alphas), L * P, 7), dtype=complex)
        # polarization vector (0, sin a, cos a); spherical components (r, t, p)
        val = np.einsum("nec,ac->nae", a_val[..., 1:], np.stack([sin_a, cos_a], axis=1))
        d[..., 0] = (-1j * omega_t) * val * pulse_t
        d[..., 1] = np.einsum("nec,ac->nae", a_dt[..., 1:], np.stack([sin_a, cos_a], axis=1)) * pulse_t
        d[..., 2] = np.einsum("nec,ac->nae", a_dp[..., 1:], np.stack([sin_a, cos_a], axis=1)) * pulse_t
        d[..., 3] = a_val[:, None, :, 1] * pulse_t
        d[..., 4] = a_val[:, None, :, 2] * pulse_t
        d[..., 5] = 1j * sin_a[None, :, None] * a_val[:, None, :, 1] * pulse_t
        d[..., 6] = 1j * cos_a[None, :, None] * a_val[:, None, :, 2] * pulse_t
        f7 = (2.0 / noise.variance) * np.real(np.einsum("naek,nael->nakl", d.conj(), d))
        out[sl] = np.einsum("aki,nakl,alj->naij", jac, f7, jac)
    return out


def batch_inverse_diagonal(matrices: np.ndarray):
    """Inverse diagonals of a stack of symmetric PSD matrices.

    Applies the same diagonal equilibration as :func:`crlb_diagonal` but
    flags singular members instead of raising.  Returns
    ``(inverse_diagonals, scaled_min_eigenvalues, ok_mask)`` with leading
    axes matching the input stack; entries of singular members are NaN.
    """
    matrices = np.asarray(matrices, dtype=float)
    d = np.diagonal(matrices, axis1=-2, axis2=-1)
    pos = np.all(d > 0.0, axis=-1) & np.all(np.isfinite(d), axis=-1)
    root = np.sqrt(np.where(d > 0.0, d, 1.0))
    scaled = matrices / root[..., :, None] / root[..., None, :]
    scaled = np.where(pos[..., None, None], scaled, np.eye(matrices.shape[-1]))
    eigval, eigvec = np.linalg.eigh(scaled)
    floor = EIG_FLOOR_REL * eigval[..., -1]
    ok = pos & (eigval[..., 0] > floor) & (eigval[..., -1] > 0.0)
    safe_eig = np.where(ok[..., None], eigval, 1.0)
    inv_diag = np.einsum("...ik,...k->...i", eigvec**2, 1.0 / safe_eig) / d
    inv_diag = np.where(ok[..., None], inv_diag, np.nan)
    eig_min = np.where(pos, eigval[..., 0], 0.0)
    return inv_diag, eig_min, ok


@dataclass(frozen=True)
class AverageCrlbResult:
    """Direction-averaged azimuth and elevation bounds with diagnostics."""

    azimuth: float
    elevation: float
    min_eigenvalue: float
    singular_nodes: int
    total_nodes: int


def average_crlb(
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
    alpha: float,
    n_theta: int = 16,
    n_phi: int = 32,
) -> AverageCrlbResult:
    """Direction-averaged azimuth and elevation variance bounds.

    The average is 1/(2 pi^2) times the integral of each bound over
    theta0 in (0, pi) and phi0 in [0, 2 pi), evaluated with Gauss-Legendre
    nodes in theta0 (which never touch the poles, where the azimuth is a
    degenerate coordinate) and a uniform phi0 rule.  Singular nodes are
    skipped and counted; the smallest eigenvalue seen is reported.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = 0.5 * np.pi * (x + 1.0)
    w_theta = 0.5 * np.pi * w
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    w_phi = 2.0 * np.pi / n_phi

    dirs = np.column_stack(
        [np.repeat(theta, n_phi), np.tile(phi, n_theta)]
    )
    weights = np.repeat(w_theta, n_phi) * w_phi
    fims = linear_fim_batch(model, pulse, noise, dirs, np.array([alpha]))[:, 0]

    inv_diag, eig_min, ok = batch_inverse_diagonal(fims)
    if not np.any(ok):
        raise SingularFimError(
            "information matrix singular at every direction node",
            float(np.min(eig_min)),
            1.0,
        )
    w_ok = weights[ok]
    scale = 1.0 / (2.0 * np.pi**2)
    return AverageCrlbResult(
        azimuth=float(scale * np.sum(w_ok * inv_diag[ok, 2])),
        elevation=float(scale * np.sum(w_ok * inv_diag[ok, 1])),
        min_eigenvalue=float(np.min(eig_min)),
        singular_nodes=int(np.sum(~ok)),
        total_nodes=len(dirs),
    )
