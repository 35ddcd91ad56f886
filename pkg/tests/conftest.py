import numpy as np
import pytest

from swarray import elements, fisher, sigmodel, swe

CARRIER = 2 * np.pi * 8e9
BIN_SPACING = 2 * np.pi * 25e6

# co-oriented, almost-z-tilted dipoles: a linearly polarized array with a
# strong co/cross polarization contrast
TILT_AXIS = (0.05, 0.0, 1.0)


def build_tilted_dipole_model(bins: int, order: int = 6, spacing: float = 0.07):
    half = (bins - 1) // 2
    freqs = CARRIER + np.arange(-half, half + 1) * BIN_SPACING
    grid = swe.SphereGrid.for_order(order)
    specs = [
        elements.ElementSpec("hertzian_dipole", (0.0, 0.0, 0.0), 0.0, axis=TILT_AXIS),
        elements.ElementSpec("hertzian_dipole", (spacing, 0.0, 0.0), 0.0, axis=TILT_AXIS),
        elements.ElementSpec("hertzian_dipole", (0.0, spacing, 0.0), 0.0, axis=TILT_AXIS),
    ]
    fss = elements.synthesize_array_fields(specs, grid, 0.15, freqs)
    return elements.build_reception_model(fss, order, CARRIER, BIN_SPACING, bins)


@pytest.fixture(scope="session")
def tilted_model_p21():
    """Three tilted dipoles, 21 bins, order 6 (L=3, P=21)."""
    return build_tilted_dipole_model(21)


@pytest.fixture(scope="session")
def tilted_model_p5():
    """Three tilted dipoles, 5 bins, order 6; cheaper for map sweeps."""
    return build_tilted_dipole_model(5)


@pytest.fixture(scope="session")
def white_noise():
    return fisher.NoiseModel.white(0.01)


@pytest.fixture
def flat_pulse_p21():
    return sigmodel.PulseSpectrum.flat(21)


@pytest.fixture
def flat_pulse_p5():
    return sigmodel.PulseSpectrum.flat(5)
