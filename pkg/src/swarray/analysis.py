"""Post-hoc array diagnostics: manifold, beam patterns, rank checks and
bound maps, with CSV emission for plotting.

The array manifold is the direction/polarization part of the received
vector at unit pulse weighting; colinearity of two manifold vectors at
distinct parameters is exactly the ambiguity that breaks unique
estimation, and a full-rank reception matrix is necessary (not
sufficient) to rule it out.

All emitters write plain CSV with a one-line header; rendering is out of
scope.  Line cuts over signed elevation follow the principal-cut
convention: a negative elevation plots the direction (|theta|, phi + pi).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import modes, swe
from .elements import ReceptionModel
from .errors import DomainError
from .fisher import NoiseModel, batch_inverse_diagonal, linear_fim_batch
from .sigmodel import PulseSpectrum, SignalParams, mode_coupling, tau_vector

__all__ = [
    "BeamPatternGrid",
    "RankReport",
    "CrlbMapRow",
    "array_manifold",
    "beam_pattern",
    "beam_pattern_grid",
    "manifold_rank_check",
    "crlb_map",
    "write_beam_pattern_csv",
    "write_beam_pattern_cuts_csv",
    "write_crlb_map_csv",
    "write_principal_cut_csv",
]


def array_manifold(params: SignalParams, model: ReceptionModel) -> np.ndarray:
    """Noise-free received vector at unit pulse weighting, length ports*bins.

    Equals the assembled signal vector divided elementwise by the pulse
    block; the delay enters only as a unit-modulus phasor, so the entry
    magnitudes are delay-independent.
    """
    g = mode_coupling(params, model.order)
    phasor = tau_vector(params.tau, model.bins, model.delta_omega, model.omega0)
    return np.tile(phasor, model.ports) * (model.matrix @ g)


def _manifold_stack(model: ReceptionModel, directions: np.ndarray, pol: np.ndarray) -> np.ndarray:
    """Manifolds at zero delay for a stack of (theta, phi) directions."""
    _, m, _ = modes.mode_table(model.order)
    sign = (-1.0) ** m
    kmat = swe.far_field_matrix(model.order, directions[:, 0], directions[:, 1])
    g = sign[:, None] * np.einsum("cjn,c->jn", kmat.conj(), pol)
    return (model.matrix @ g).T


def beam_pattern(
    model: ReceptionModel,
    probe: tuple[float, float],
    true_direction: tuple[float, float],
    pol: np.ndarray,
) -> float:
    """Normalized correlation of the manifolds at a probe and the true
    direction, for a known delay and polarization.  Unity exactly at the
    true direction, at most unity anywhere else."""
    pol = np.asarray(pol, dtype=complex)
    dirs = np.array([probe, true_direction], dtype=float)
    a = _manifold_stack(model, dirs, pol)
    n_probe = np.linalg.norm(a[0])
    n_true = np.linalg.norm(a[1])
    if n_probe == 0.0 or n_true == 0.0:
        raise DomainError("manifold vanishes at the probe or true direction")
    return float(np.abs(np.vdot(a[0], a[1])) / (n_probe * n_true))


@dataclass
class BeamPatternGrid:
    """Normalized beam-pattern values over a probe grid.

    ``values[i, k]`` is the pattern at (theta_nodes[i], phi_nodes[k]);
    ``peak_value`` is the pattern evaluated at the true direction itself.
    """

    theta_nodes: np.ndarray
    phi_nodes: np.ndarray
    values: np.ndarray
    true_direction: tuple[float, float]
    polarization: np.ndarray
    peak_value: float

    def __post_init__(self):
        if np.any(self.values < 0.0) or np.any(self.values > 1.0 + 1e-12):
            raise DomainError("beam-pattern values must lie in [0, 1]")
        if abs(self.peak_value - 1.0) > 1e-12:
            raise DomainError("beam pattern must equal one at the true direction")


def beam_pattern_grid(
    model: ReceptionModel,
    true_direction: tuple[float, float],
    pol: np.ndarray,
    theta_nodes: np.ndarray,
    phi_nodes: np.ndarray,
) -> BeamPatternGrid:
    """Evaluate the normalized beam pattern over a probe grid."""
    pol = np.asarray(pol, dtype=complex)
    theta_nodes = np.asarray(theta_nodes, dtype=float)
    phi_nodes = np.asarray(phi_nodes, dtype=float)
    probes = np.column_stack(
        [
            np.repeat(theta_nodes, len(phi_nodes)),
            np.tile(phi_nodes, len(theta_nodes)),
        ]
    )
    dirs = np.vstack([probes, np.asarray(true_direction, float)])
    a = _manifold_stack(model, dirs, pol)
    a_true = a[-1]
    norms = np.linalg.norm(a[:-1], axis=1)
    n_true = np.linalg.norm(a_true)
    if n_true == 0.0 or np.any(norms == 0.0):
        raise DomainError("manifold vanishes on the probe grid")
    corr = np.abs(a[:-1].conj() @ a_true) / (norms * n_true)
    values = np.minimum(corr.reshape(len(theta_nodes), len(phi_nodes)), 1.0)
    return BeamPatternGrid(
        theta_nodes=theta_nodes,
        phi_nodes=phi_nodes,
        values=values,
        true_direction=tuple(true_direction),
        polarization=pol,
        peak_value=beam_pattern(model, tuple(true_direction), tuple(true_direction), pol),
    )


@dataclass(frozen=True)
class RankReport:
    """Numerical rank of the reception matrix, stacked and per frequency bin."""

    rank: int
    smallest_singular_value: float
    tolerance: float
    full_rank: bool
    per_bin_ranks: tuple
    per_bin_full_rank: bool


def manifold_rank_check(model: ReceptionModel) -> RankReport:
    """Numerical rank of the reception matrix.

    Full rank of the stacked matrix (and of every per-bin port block) is a
    necessary condition for the array manifold to avoid exact colinearity
    of two responses; it is not sufficient.  Analytic point radiators vary
    slowly with frequency, so their stacked matrix is typically low rank
    over a narrow band even when every per-bin block has full rank.
    """
    matrix = model.matrix
    sv = np.linalg.svd(matrix, compute_uv=False)
    tol = max(matrix.shape) * np.finfo(float).eps * sv[0]
    rank = int(np.sum(sv > tol))
    full = rank == min(matrix.shape)

    per_bin = []
    for p in range(model.bins):
        block = matrix[p :: model.bins, :]
        bsv = np.linalg.svd(block, compute_uv=False)
        btol = max(block.shape) * np.finfo(float).eps * bsv[0]
        per_bin.append(int(np.sum(bsv > btol)))
    per_bin_full = all(r == min(model.ports, model.J) for r in per_bin)
    return RankReport(
        rank=rank,
        smallest_singular_value=float(sv[-1]),
        tolerance=float(tol),
        full_rank=full,
        per_bin_ranks=tuple(per_bin),
        per_bin_full_rank=per_bin_full,
    )


@dataclass(frozen=True)
class CrlbMapRow:
    """Bounds at one (alpha, theta0, phi0) node; NaN entries mark singular nodes."""

    alpha: float
    theta0: float
    phi0: float
    bound_theta0: float
    bound_phi0: float
    singular: bool


def crlb_map(
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
    alphas,
    directions,
) -> list[CrlbMapRow]:
    """Elevation and azimuth bounds per (alpha, direction) node.

    Singular nodes are flagged, never fabricated.  Bounds are variances in
    rad^2 and do not depend on the true delay under white noise.
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    fims = linear_fim_batch(model, pulse, noise, directions, alphas)
    inv_diag, _, ok = batch_inverse_diagonal(fims)
    rows = []
    for ai, alpha in enumerate(alphas):
        for di, (theta0, phi0) in enumerate(directions):
            good = bool(ok[di, ai])
            rows.append(
                CrlbMapRow(
                    alpha=float(alpha),
                    theta0=float(theta0),
                    phi0=float(phi0),
                    bound_theta0=float(inv_diag[di, ai, 1]) if good else float("nan"),
                    bound_phi0=float(inv_diag[di, ai, 2]) if good else float("nan"),
                    singular=not good,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# CSV emission

def write_beam_pattern_csv(grid: BeamPatternGrid, path) -> None:
    """Contour-grid CSV: one row per probe with columns
    theta_deg, phi_deg, value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_deg", "phi_deg", "value"])
        for i, th in enumerate(grid.theta_nodes):
            for k, ph in enumerate(grid.phi_nodes):
                writer.writerow(
                    [f"{np.degrees(th):.6f}", f"{np.degrees(ph):.6f}", f"{grid.values[i, k]:.12g}"]
                )


def write_beam_pattern_cuts_csv(grid: BeamPatternGrid, theta_cut_path, phi_cut_path) -> None:
    """Two line cuts through the true direction.

    The elevation cut fixes phi at the true azimuth and sweeps theta; the
    azimuth cut fixes theta at the true elevation and sweeps phi.  Nodes
    are taken from the grid axes, nearest to the true coordinates.
    """
    th0, ph0 = grid.true_direction
    i0 = int(np.argmin(np.abs(grid.theta_nodes - th0)))
    k0 = int(np.argmin(np.abs(grid.phi_nodes - ph0)))
    with open(theta_cut_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_deg", "value"])
        for i, th in enumerate(grid.theta_nodes):
            writer.writerow([f"{np.degrees(th):.6f}", f"{grid.values[i, k0]:.12g}"])
    with open(phi_cut_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi_deg", "value"])
        for k, ph in enumerate(grid.phi_nodes):
            writer.writerow([f"{np.degrees(ph):.6f}", f"{grid.values[i0, k]:.12g}"])


def write_crlb_map_csv(rows: list[CrlbMapRow], path) -> None:
    """Bound-map CSV with columns alpha_deg, theta0_deg, phi0_deg,
    bound_theta0_rad2, bound_phi0_rad2, singular."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["alpha_deg", "theta0_deg", "phi0_deg", "bound_theta0_rad2", "bound_phi0_rad2", "singular"]
        )
        for row in rows:
            writer.writerow(
                [
                    f"{np.degrees(row.alpha):.6f}",
                    f"{np.degrees(row.theta0):.6f}",
                    f"{np.degrees(row.phi0):.6f}",
                    f"{row.bound_theta0:.12g}",
                    f"{row.bound_phi0:.12g}",
                    "1" if row.singular else "0",
                ]
            )


def write_principal_cut_csv(
    model: ReceptionModel,
    pulse: PulseSpectrum,
    noise: NoiseModel,
    alpha: float,
    phi0: float,
    signed_thetas,
    path,
) -> None:
    """Bound line cut over signed elevation at a fixed principal azimuth.

    Negative elevations are plotted by evaluating the direction
    (|theta|, phi0 + pi), so one curve spans both sides of the zenith.
    """
    signed = np.asarray(signed_thetas, dtype=float)
    dirs = np.column_stack(
        [np.abs(signed), np.where(signed < 0.0, phi0 + np.pi, phi0)]
    )
    rows = crlb_map(model, pulse, noise, [alpha], dirs)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta0_deg", "bound_theta0_rad2", "bound_phi0_rad2", "singular"])
        for t, row in zip(signed, rows):
            writer.writerow(
                [
                    f"{np.degrees(t):.6f}",
                    f"{row.bound_theta0:.12g}",
                    f"{row.bound_phi0:.12g}",
                    "1" if row.singular else "0",
                ]
            )
