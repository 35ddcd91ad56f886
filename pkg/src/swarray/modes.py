"""Spherical-mode index algebra and the scalar special functions behind it.

Vector spherical modes are labelled by a polarization type ``s`` in {1, 2},
an azimuthal order ``m`` and a polar order ``n`` (``|m| <= n``, ``n >= 1``).
The three labels are packed into a single positive index so coefficient
vectors can be stored contiguously::

    j = 2*(n*(n + 1) + m - 1) + s

Truncating the polar order at N keeps ``2*N*(N + 2)`` modes.

This module owns that packing, the fully normalized associated Legendre
functions (unit L2 norm over theta in [0, pi] with sin(theta) weight, no
Condon-Shortley phase) together with the derivative combinations the
far-field patterns need, and the spherical radial functions.  The Legendre
quantities are produced by upward recurrences on the normalized values,
which stay stable well past n = 40, and the pole values at theta = 0, pi
are exact analytic limits rather than clamped evaluations.

All functions are pure and safe for concurrent callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .errors import DomainError

__all__ = [
    "ModeIndex",
    "LegendreBundle",
    "RadialFunctions",
    "mode_count",
    "mode_index_from_triple",
    "triple_from_mode_index",
    "mode_table",
    "conjugate_m_index",
    "legendre_bundle",
    "legendre_tables",
    "radial_function",
]


def mode_count(order: int) -> int:
    """Number of modes with polar order up to ``order``."""
    if order < 1:
        raise DomainError(f"truncation order must be >= 1, got {order}")
    return 2 * order * (order + 2)


def _validate_triple(s: int, m: int, n: int) -> None:
    if s not in (1, 2):
        raise DomainError(f"polarization type s must be 1 or 2, got {s}")
    if n < 1:
        raise DomainError(f"polar order n must be >= 1, got {n}")
    if abs(m) > n:
        raise DomainError(f"azimuthal order |m| must not exceed n, got m={m}, n={n}")


def mode_index_from_triple(s: int, m: int, n: int) -> int:
    """Pack a valid (s, m, n) triple into the joined mode index."""
    _validate_triple(s, m, n)
    return 2 * (n * (n + 1) + m - 1) + s


def triple_from_mode_index(j: int) -> tuple[int, int, int]:
    """Unpack a joined mode index into (s, m, n); exact inverse of the packing."""
    if j < 1:
        raise DomainError(f"mode index must be >= 1, got {j}")
    s = 1 if j % 2 else 2
    q = (j - s) // 2 + 1
    n = int(np.sqrt(q))
    # guard against floating-point rounding of the square root
    while (n + 1) * (n + 1) <= q:
        n += 1
    while n * n > q:
        n -= 1
    m = q - n * (n + 1)
    return s, m, n


def mode_table(order: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (s, m, n) arrays for all mode indices j = 1 .. 2*order*(order+2)."""
    j = np.arange(1, mode_count(order) + 1)
    s = np.where(j % 2 == 1, 1, 2)
    q = (j - s) // 2 + 1
    n = np.floor(np.sqrt(q)).astype(int)
    n = np.where((n + 1) * (n + 1) <= q, n + 1, n)
    n = np.where(n * n > q, n - 1, n)
    m = q - n * (n + 1)
    return s, m, n


def conjugate_m_index(j):
    """Index of the mode (s, -m, n) paired with index j; an involution.

    Accepts a scalar or an integer array.
    """
    scalar = np.isscalar(j)
    j_arr = np.atleast_1d(np.asarray(j))
    if np.any(j_arr < 1):
        raise DomainError("mode index must be >= 1")
    s = np.where(j_arr % 2 == 1, 1, 2)
    q = (j_arr - s) // 2 + 1
    n = np.floor(np.sqrt(q)).astype(j_arr.dtype)
    n = np.where((n + 1) * (n + 1) <= q, n + 1, n)
    n = np.where(n * n > q, n - 1, n)
    m = q - n * (n + 1)
    out = j_arr - 4 * m
    return int(out[0]) if scalar else out


@dataclass(frozen=True)
class ModeIndex:
    """A single spherical mode (s, m, n)."""

    s: int
    m: int
    n: int

    def __post_init__(self):
        _validate_triple(self.s, self.m, self.n)

    @property
    def j(self) -> int:
        return mode_index_from_triple(self.s, self.m, self.n)

    @classmethod
    def from_index(cls, j: int) -> "ModeIndex":
        return cls(*triple_from_mode_index(j))


@dataclass(frozen=True)
class LegendreBundle:
    """Normalized associated Legendre value and derivative combinations.

    All fields are evaluated at a polar angle theta and have the array shape
    of the theta argument:

    * ``p``            -- normalized P(n, |m|) at cos(theta)
    * ``dp``           -- d p / d theta
    * ``d2p``          -- d^2 p / d theta^2
    * ``p_over_sin``   -- m * p / sin(theta), signed m, finite at the poles
    * ``d_p_over_sin`` -- d (m * p / sin(theta)) / d theta, finite at the poles

    The imaginary unit that multiplies ``p_over_sin`` in the far-field
    patterns is applied by the caller.
    """

    p: np.ndarray
    dp: np.ndarray
    d2p: np.ndarray
    p_over_sin: np.ndarray
    d_p_over_sin: np.ndarray


def legendre_tables(nmax: int, theta) -> dict[str, np.ndarray]:
    """Tables of normalized Legendre quantities for all 0 <= m <= n <= nmax.

    Returns arrays indexed ``[m, n]`` with trailing axes matching ``theta``:
    ``p`` (values), ``dp`` (theta derivative), ``d2p`` (second derivative),
    ``u`` (p / sin(theta), rows m >= 1 only) and ``du`` (its theta
    derivative).  Entries with m > n are zero, so ladder expressions can
    index them without special cases.

    The u/du rows are built by their own recurrences so the pole limits at
    theta in {0, pi} come out exact instead of as 0/0 quotients.
    """
    if nmax < 1:
        raise DomainError(f"nmax must be >= 1, got {nmax}")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > np.pi):
        raise DomainError("theta must lie in [0, pi]")
    x = np.cos(theta)
    sn = np.sin(theta)
    # the rounded sine at the representable pi is ~1e-16, not zero; snap it
    # so the pole limits come out exact
    sn = np.where(theta == np.pi, 0.0, sn)
    x = np.where(theta == np.pi, -1.0, x)

    shape = (nmax + 1, nmax + 1) + theta.shape
    p = np.zeros(shape)
    dp = np.zeros(shape)
    d2p = np.zeros(shape)
    u = np.zeros(shape)
    du = np.zeros(shape)

    # m = 0 column: plain normalized Legendre recurrence
    p[0, 0] = 1.0 / np.sqrt(2.0)
    p[0, 1] = np.sqrt(1.5) * x
    for n in range(2, nmax + 1):
        a = np.sqrt((4.0 * n * n - 1.0) / (n * n))
        b = np.sqrt((2.0 * n + 1.0) * (n - 1.0) ** 2 / ((2.0 * n - 3.0) * n * n))
        p[0, n] = a * x * p[0, n - 1] - b * p[0, n - 2]

    # diagonal seeds for u = p / sin(theta); u(1,1) is constant
    u[1, 1] = np.sqrt(3.0) / 2.0
    du[1, 1] = 0.0
    for m in range(2, nmax + 1):
        c = np.sqrt((2.0 * m + 1.0) / (2.0 * m))
        u[m, m] = c * sn * u[m - 1, m - 1]
        du[m, m] = c * (x * u[m - 1, m - 1] + sn * du[m - 1, m - 1])

    # upward in n for each m >= 1
    for m in range(1, nmax + 1):
        if m + 1 <= nmax:
            c = np.sqrt(2.0 * m + 3.0)
            u[m, m + 1] = c * x * u[m, m]
            du[m, m + 1] = c * (x * du[m, m] - sn * u[m, m])
        for n in range(m + 2, nmax + 1):
            a = np.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = np.sqrt(
                (2.0 * n + 1.0)
                * ((n - 1.0) ** 2 - m * m)
                / ((2.0 * n - 3.0) * (n * n - m * m))
            )
            u[m, n] = a * x * u[m, n - 1] - b * u[m, n - 2]
            du[m, n] = a * (x * du[m, n - 1] - sn * u[m, n - 1]) - b * du[m, n - 2]

    # values and first derivatives from the u rows
    p[1:] = sn * u[1:]
    dp[1:] = x * u[1:] + sn * du[1:]
    for n in range(1, nmax + 1):
        dp[0, n] = -np.sqrt(n * (n + 1.0)) * p[1, n]

    # second derivative by applying the order ladder to the first derivatives
    for n in range(1, nmax + 1):
        d2p[0, n] = -np.sqrt(n * (n + 1.0)) * dp[1, n]
        for m in range(1, n + 1):
            lo = np.sqrt((n + m) * (n - m + 1.0))
            hi = np.sqrt((n - m) * (n + m + 1.0))
            upper = dp[m + 1, n] if m + 1 <= nmax else 0.0
            d2p[m, n] = 0.5 * (lo * dp[m - 1, n] - hi * upper)

    return {"p": p, "dp": dp, "d2p": d2p, "u": u, "du": du}


def legendre_bundle(n: int, m: int, theta) -> LegendreBundle:
    """Normalized Legendre quantities for one (n, m) at the given angles.

    ``m`` may be signed; the value fields use |m| while ``p_over_sin`` and
    ``d_p_over_sin`` carry the signed factor m.
    """
    _validate_triple(1, m, n)
    tables = legendre_tables(n, theta)
    am = abs(m)
    return LegendreBundle(
        p=tables["p"][am, n],
        dp=tables["dp"][am, n],
        d2p=tables["d2p"][am, n],
        p_over_sin=m * tables["u"][am, n] if m != 0 else np.zeros_like(tables["p"][am, n]),
        d_p_over_sin=m * tables["du"][am, n] if m != 0 else np.zeros_like(tables["p"][am, n]),
    )


@dataclass(frozen=True)
class RadialFunctions:
    """Radial factors of the vector spherical waves at a fixed kr.

    * ``s1``        -- factor of the s = 1 (transverse electric) modes
    * ``s2``        -- transverse factor of the s = 2 modes,
                       (1/kr) d(kr z_n)/d(kr)
    * ``s2_radial`` -- z_n / kr, the radial-component factor of the s = 2
                       modes, which also enters the closed-form mode norms
    """

    s1: np.ndarray
    s2: np.ndarray
    s2_radial: np.ndarray


def radial_function(kind: int, n, kr) -> RadialFunctions:
    """Spherical radial functions of the given kind at argument kr.

    ``kind`` selects the radial dependence: 1 for the regular spherical
    Bessel function, 3 for the outgoing spherical Hankel function and 4 for
    the incoming one (the conjugate pair, matching the exp(-i omega t) time
    basis of the wave functions).  ``n`` may be an integer array.
    """
    kr = np.asarray(kr, dtype=float)
    if np.any(kr <= 0.0):
        raise DomainError("kr must be positive")
    n = np.asarray(n)
    jn = spherical_jn(n, kr)
    djn = spherical_jn(n, kr, derivative=True)
    if kind == 1:
        z, dz = jn.astype(complex), djn.astype(complex)
    elif kind in (3, 4):
        sign = 1.0 if kind == 3 else -1.0
        z = jn + sign * 1j * spherical_yn(n, kr)
        dz = djn + sign * 1j * spherical_yn(n, kr, derivative=True)
    else:
        raise DomainError(f"radial kind must be 1, 3 or 4, got {kind}")
    return RadialFunctions(s1=z, s2=dz + z / kr, s2_radial=z / kr)
