"""Antenna elements, array field synthesis, field-file I/O and the
reception model.

Analytic point-dipole radiators stand in for a full-wave solver: each port
radiates the exact closed-form field of an elementary dipole (all near-
and far-zone terms), normalized so a centered z-oriented element excites
the single (s=2, m=0, n=1) mode with unit coefficient at a unit forward
voltage wave.  Ports are driven one at a time with the others silent, so
array fields superpose exactly and mutual coupling is absent; coupled data
enters through the field-file import path instead.

The reception model stacks, per port and per frequency bin, the reception
coefficients extracted from the (simulated or imported) radiated fields at
the positive physical frequencies omega_0 + p*delta_omega.  Because the
time-domain quantities behind exported fields are real-valued, their
spectra are Hermitian symmetric and the baseband reception coefficients
equal these positive-frequency extractions directly; no conjugation step
is applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import modes, swe
from .constants import FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT
from .errors import DomainError, FieldFileError

__all__ = [
    "ElementSpec",
    "GammaRef",
    "ElementTemplate",
    "GeometryMapping",
    "GeometryParams",
    "FieldSampleSet",
    "ReceptionModel",
    "dipole_field",
    "synthesize_array_fields",
    "save_field_samples",
    "load_field_samples",
    "extract_port_coefficients",
    "build_reception_model",
]

_KINDS = ("hertzian_dipole", "crossed_dipole", "imported")

FIELD_FILE_SCHEMA = "swarray-fields-v1"
FIELD_FILE_EXCITATION = "unit forward voltage wave, matched loads"


def _rotation_z(beta: float) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class ElementSpec:
    """One array element: kind, position offset, and z-axis rotation.

    ``axis`` orients a single dipole: 'x', 'y', 'z' or an explicit
    direction vector.  In-plane axes are rotated by ``rotation``; the
    crossed dipole exposes two ports along the rotated x and y axes.
    Imported elements carry their per-port fields in ``fields`` and must
    sit unrotated at the origin (the file already describes the full
    geometry).
    """

    kind: str
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: float = 0.0
    axis: object = "z"
    fields: object = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown element kind {self.kind!r}")
        if self.kind == "imported":
            if self.fields is None:
                raise DomainError("imported elements need a FieldSampleSet in 'fields'")
            if self.rotation != 0.0 or any(c != 0.0 for c in self.position):
                raise DomainError("imported elements must be placed unrotated at the origin")

    @property
    def port_count(self) -> int:
        if self.kind == "hertzian_dipole":
            return 1
        if self.kind == "crossed_dipole":
            return 2
        return self.fields.port_count

    def port_directions(self) -> list[np.ndarray]:
        """Unit dipole-moment direction per port, rotation applied."""
        rot = _rotation_z(self.rotation)
        if self.kind == "crossed_dipole":
            return [rot @ np.array([1.0, 0.0, 0.0]), rot @ np.array([0.0, 1.0, 0.0])]
        if self.kind == "hertzian_dipole":
            if isinstance(self.axis, str):
                base = {
                    "x": np.array([1.0, 0.0, 0.0]),
                    "y": np.array([0.0, 1.0, 0.0]),
                    "z": np.array([0.0, 0.0, 1.0]),
                }.get(self.axis)
                if base is None:
                    raise DomainError(f"unknown dipole axis {self.axis!r}")
            else:
                base = np.asarray(self.axis, dtype=float)
                norm = np.linalg.norm(base)
                if norm == 0.0:
                    raise DomainError("dipole axis vector must be nonzero")
                base = base / norm
            return [rot @ base]
        raise DomainError("imported elements have no analytic port directions")


# ---------------------------------------------------------------------------
# geometry parameterization

@dataclass(frozen=True)
class GammaRef:
    """Reference to one entry of the geometry parameter vector."""

    index: int


@dataclass(frozen=True)
class ElementTemplate:
    """Element whose fields may be bound to geometry parameters."""

    kind: str
    x: object = 0.0
    y: object = 0.0
    z: object = 0.0
    rotation: object = 0.0
    axis: object = "z"

    def build(self, gamma: np.ndarray) -> ElementSpec:
        def resolve(v):
            return float(gamma[v.index]) if isinstance(v, GammaRef) else float(v)

        return ElementSpec(
            kind=self.kind,
            position=(resolve(self.x), resolve(self.y), resolve(self.z)),
            rotation=resolve(self.rotation),
            axis=self.axis,
        )


@dataclass(frozen=True)
class GeometryMapping:
    """Maps a geometry vector onto a list of element specifications."""

    templates: tuple

    def build(self, gamma) -> list[ElementSpec]:
        gamma = np.asarray(gamma, dtype=float)
        return [t.build(gamma) for t in self.templates]

    @property
    def port_count(self) -> int:
        return sum(
            2 if t.kind == "crossed_dipole" else 1 for t in self.templates
        )


@dataclass
class GeometryParams:
    """Geometry parameter vector with box bounds and its element mapping."""

    values: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    mapping: GeometryMapping

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if not (self.values.shape == self.lower.shape == self.upper.shape):
            raise DomainError("geometry values and bounds must have matching shapes")
        if np.any(self.lower > self.upper):
            raise DomainError("lower bounds exceed upper bounds")
        if np.any(self.values < self.lower) or np.any(self.values > self.upper):
            raise DomainError("geometry values violate the box bounds")

    def build_elements(self) -> list[ElementSpec]:
        return self.mapping.build(self.values)


# ---------------------------------------------------------------------------
# analytic radiators

def _dipole_e_field(points: np.ndarray, source: np.ndarray, p_hat: np.ndarray, k: float) -> np.ndarray:
    """Exact field of an elementary dipole at Cartesian points, in V/m.

    Full near+far expression in the exp(-i omega t) basis, with the
    amplitude fixed so a z-oriented dipole at the origin radiates exactly
    the unit-coefficient (2, 0, 1) mode.
    """
    rel = points - source
    dist = np.linalg.norm(rel, axis=-1, keepdims=True)
    if np.any(dist == 0.0):
        raise DomainError("field point coincides with a dipole position")
    rhat = rel / dist
    x = k * dist[..., 0]
    phase = np.exp(1j * x)
    h1 = -phase * (x + 1j) / x**2
    r2 = -phase * (1j * x**2 - x - 1j) / x**3
    cos_axis = rhat @ p_hat
    amp = k * np.sqrt(3.0 * FREE_SPACE_IMPEDANCE / (8.0 * np.pi))
    radial = (2.0 * h1 / x - r2) * cos_axis
    return amp * (radial[..., None] * rhat + r2[..., None] * p_hat)


def _sphere_points(grid: swe.SphereGrid, radius: float):
    """Cartesian grid points and the local spherical unit vectors."""
    th = grid.theta_nodes[:, None]
    ph = grid.phi_nodes[None, :]
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ph), np.cos(ph)
    rhat = np.stack(np.broadcast_arrays(st * cp, st * sp, ct * np.ones_like(ph)), axis=-1)
    that = np.stack(np.broadcast_arrays(ct * cp, ct * sp, -st * np.ones_like(ph)), axis=-1)
    phat = np.stack(np.broadcast_arrays(-sp * np.ones_like(th), cp * np.ones_like(th), np.zeros_like(st * sp)), axis=-1)
    return radius * rhat, rhat, that, phat


def dipole_field(spec: ElementSpec, grid: swe.SphereGrid, radius: float, omega: float) -> np.ndarray:
    """Per-port field samples of one analytic element on the sphere.

    Returns spherical components, shape (ports, n_theta, n_phi, 3).
    """
    if spec.kind == "imported":
        raise DomainError("imported elements carry their own field samples")
    if omega <= 0.0:
        raise DomainError("omega must be positive")
    pos = np.asarray(spec.position, dtype=float)
    if np.linalg.norm(pos) >= radius:
        raise DomainError(
            f"element at |r| = {np.linalg.norm(pos):.4g} m lies outside the "
            f"{radius:.4g} m sampling sphere"
        )
    k = omega / SPEED_OF_LIGHT
    points, rhat, that, phat = _sphere_points(grid, radius)
    out = []
    for p_hat in spec.port_directions():
        e_cart = _dipole_e_field(points, pos, p_hat, k)
        out.append(
            np.stack(
                [
                    np.einsum("tpc,tpc->tp", e_cart, rhat.astype(complex)),
                    np.einsum("tpc,tpc->tp", e_cart, that.astype(complex)),
                    np.einsum("tpc,tpc->tp", e_cart, phat.astype(complex)),
                ],
                axis=-1,
            )
        )
    return np.stack(out, axis=0)


@dataclass
class FieldSampleSet:
    """Complex field samples on a sphere, per port and per frequency.

    ``e_field`` has shape (ports, frequencies, n_theta, n_phi, 3) holding
    spherical components in V/m at a unit forward voltage-wave excitation
    of the active port with all other ports match-terminated.
    """

    radius: float
    grid: swe.SphereGrid
    frequencies: np.ndarray
    e_field: np.ndarray

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.e_field = np.asarray(self.e_field, dtype=complex)
        if self.frequencies.ndim != 1 or np.any(np.diff(self.frequencies) <= 0.0):
            raise FieldFileError("frequencies must be a strictly increasing 1-D grid")
        expected = (self.e_field.shape[0], len(self.frequencies), self.grid.n_theta, self.grid.n_phi, 3)
        if self.e_field.shape != expected:
            raise FieldFileError(
                f"field array has shape {self.e_field.shape}, expected {expected}"
            )

    @property
    def port_count(self) -> int:
        return self.e_field.shape[0]


def synthesize_array_fields(
    elements: list[ElementSpec],
    grid: swe.SphereGrid,
    radius: float,
    frequencies,
    min_spacing: float = 0.0,
) -> FieldSampleSet:
    """Per-port fields of an array, one active port at a time.

    Analytic elements radiate their closed-form fields; imported elements
    contribute their stored per-port samples, which must share the grid,
    radius and frequency grid.  ``min_spacing`` > 0 rejects overlapping
    element positions.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    positions = [np.asarray(e.position, float) for e in elements if e.kind != "imported"]
    if min_spacing > 0.0:
        for i in range(len(positions)):
            for k2 in range(i + 1, len(positions)):
                d = np.linalg.norm(positions[i] - positions[k2])
                if d < min_spacing:
                    raise DomainError(
                        f"elements {i} and {k2} are {d * 1e3:.2f} mm apart, "
                        f"closer than the {min_spacing * 1e3:.2f} mm minimum spacing"
                    )
    blocks = []
    for spec in elements:
        if spec.kind == "imported":
            fss = spec.fields
            if fss.grid.n_theta != grid.n_theta or fss.grid.n_phi != grid.n_phi:
                raise FieldFileError("imported element grid does not match the array grid")
            if fss.radius != radius or not np.array_equal(fss.frequencies, frequencies):
                raise FieldFileError("imported element radius/frequencies do not match")
            blocks.append(fss.e_field)
        else:
            per_freq = [dipole_field(spec, grid, radius, w) for w in frequencies]
            blocks.append(np.stack(per_freq, axis=1))
    return FieldSampleSet(
        radius=radius, grid=grid, frequencies=frequencies, e_field=np.concatenate(blocks, axis=0)
    )


# ---------------------------------------------------------------------------
# field-file I/O

def save_field_samples(fss: FieldSampleSet, path, binary: bool = False) -> None:
    """Write a field-sample set to JSON, optionally with a binary sidecar.

    The header is always JSON.  Values are interleaved (Re, Im) float64 per
    spherical component, ordered port-major, then frequency, theta, phi,
    component.  With ``binary=True`` the bulk data goes to ``<path>.f64``
    (little-endian float64, same ordering) and the header references it.
    """
    path = Path(path)
    flat = np.empty(fss.e_field.size * 2)
    flat[0::2] = fss.e_field.real.ravel()
    flat[1::2] = fss.e_field.imag.ravel()
    header = {
        "schema": FIELD_FILE_SCHEMA,
        "radius_m": fss.radius,
        "theta_nodes": fss.grid.theta_nodes.tolist(),
        "theta_weights": fss.grid.theta_weights.tolist(),
        "phi_nodes": fss.grid.phi_nodes.tolist(),
        "frequencies_rad_s": fss.frequencies.tolist(),
        "ports": fss.port_count,
        "excitation": FIELD_FILE_EXCITATION,
    }
    if binary:
        sidecar = path.with_suffix(path.suffix + ".f64")
        flat.astype("<f8").tofile(sidecar)
        header["data_file"] = sidecar.name
    else:
        header["data"] = flat.tolist()
    path.write_text(json.dumps(header))


def load_field_samples(path) -> FieldSampleSet:
    """Read a field-sample set written by :func:`save_field_samples`."""
    path = Path(path)
    try:
        header = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FieldFileError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(header, dict) or header.get("schema") != FIELD_FILE_SCHEMA:
        raise FieldFileError(f"{path}: missing or unknown schema tag")
    required = (
        "radius_m",
        "theta_nodes",
        "theta_weights",
        "phi_nodes",
        "frequencies_rad_s",
        "ports",
        "excitation",
    )
    missing = [k for k in required if k not in header]
    if missing:
        raise FieldFileError(f"{path}: header lacks required keys {missing}")

    grid = swe.SphereGrid(
        theta_nodes=np.asarray(header["theta_nodes"], float),
        theta_weights=np.asarray(header["theta_weights"], float),
        phi_nodes=np.asarray(header["phi_nodes"], float),
    )
    freqs = np.asarray(header["frequencies_rad_s"], float)
    ports = int(header["ports"])
    if "data_file" in header:
        flat = np.fromfile(path.parent / header["data_file"], dtype="<f8")
    elif "data" in header:
        flat = np.asarray(header["data"], float)
    else:
        raise FieldFileError(f"{path}: header references no data")

    expected = ports * len(freqs) * grid.n_theta * grid.n_phi * 3 * 2
    if flat.size != expected:
        per_port = len(freqs) * grid.n_theta * grid.n_phi * 3 * 2
        found = flat.size / per_port if per_port else 0.0
        raise FieldFileError(
            f"{path}: data holds {found:g} port blocks, header promises {ports}"
        )
    values = flat[0::2] + 1j * flat[1::2]
    e_field = values.reshape(ports, len(freqs), grid.n_theta, grid.n_phi, 3)
    return FieldSampleSet(radius=header["radius_m"], grid=grid, frequencies=freqs, e_field=e_field)


# ---------------------------------------------------------------------------
# reception model

@dataclass
class ReceptionModel:
    """Baseband reception coefficients of an array on a frequency grid.

    ``matrix`` has shape (ports * bins, J): port-major blocks of ``bins``
    rows, row p of a block holding the reception coefficients of that port
    at physical frequency omega_0 + p*delta_omega for
    p = -(bins-1)/2 .. (bins-1)/2.
    """

    ports: int
    bins: int
    delta_omega: float
    omega0: float
    order: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.bins % 2 != 1:
            raise DomainError(f"number of frequency bins must be odd, got {self.bins}")
        expected = (self.ports * self.bins, modes.mode_count(self.order))
        if self.matrix.shape != expected:
            raise DomainError(f"matrix has shape {self.matrix.shape}, expected {expected}")

    @property
    def J(self) -> int:
        return modes.mode_count(self.order)

    @property
    def p_values(self) -> np.ndarray:
        half = (self.bins - 1) // 2
        return np.arange(-half, half + 1)

    @property
    def omega_grid(self) -> np.ndarray:
        """Physical frequencies omega_0 + p*delta_omega of the bins."""
        return self.omega0 + self.p_values * self.delta_omega

    @property
    def tau_max(self) -> float:
        """Largest unambiguously estimable delay, 2*pi/delta_omega."""
        if self.bins == 1:
            return np.inf
        return 2.0 * np.pi / self.delta_omega


def extract_port_coefficients(fss: FieldSampleSet, order: int) -> list[list[swe.CoefficientSet]]:
    """Transmission sets for every port and stored frequency."""
    fss.grid.require_order(order)
    out = []
    for port in range(fss.port_count):
        row = []
        for fi, omega in enumerate(fss.frequencies):
            kr = omega / SPEED_OF_LIGHT * fss.radius
            row.append(
                swe.extract_transmission(
                    fss.e_field[port, fi], fss.grid, kr, order, omega, port=port
                )
            )
        out.append(row)
    return out


def build_reception_model(
    fss: FieldSampleSet, order: int, omega0: float, delta_omega: float, bins: int
) -> ReceptionModel:
    """Reception model on the bin grid omega_0 + p*delta_omega.

    Every bin frequency must be present in the sample set (relative
    tolerance 1e-9); transmission coefficients are extracted there and
    converted to reception coefficients by reciprocity.
    """
    if bins % 2 != 1 or bins < 1:
        raise DomainError(f"number of frequency bins must be odd and >= 1, got {bins}")
    if bins > 1 and delta_omega <= 0.0:
        raise DomainError("delta_omega must be positive")
    fss.grid.require_order(order)
    half = (bins - 1) // 2
    targets = omega0 + np.arange(-half, half + 1) * delta_omega
    indices = []
    for w in targets:
        match = np.nonzero(np.isclose(fss.frequencies, w, rtol=1e-9, atol=0.0))[0]
        if len(match) == 0:
            raise DomainError(
                f"field samples cover no frequency near {w:.6e} rad/s; "
                f"available grid spans [{fss.frequencies[0]:.6e}, {fss.frequencies[-1]:.6e}]"
            )
        indices.append(int(match[0]))

    L = fss.port_count
    J = modes.mode_count(order)
    matrix = np.zeros((L * bins, J), dtype=complex)
    for p_row, fi in enumerate(indices):
        omega = fss.frequencies[fi]
        kr = omega / SPEED_OF_LIGHT * fss.radius
        for port in range(L):
            tset = swe.extract_transmission(
                fss.e_field[port, fi], fss.grid, kr, order, omega, port=port
            )
            rset = swe.reception_from_transmission(tset)
            matrix[port * bins + p_row] = rset.values
    return ReceptionModel(
        ports=L, bins=bins, delta_omega=delta_omega, omega0=omega0, order=order, matrix=matrix
    )
