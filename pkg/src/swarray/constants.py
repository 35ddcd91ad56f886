"""Physical constants shared across the package."""

SPEED_OF_LIGHT = 299792458.0
"""Free-space propagation velocity in m/s."""

FREE_SPACE_IMPEDANCE = 376.730313668
"""Wave impedance of free space in ohm."""

FREE_SPACE_ADMITTANCE = 1.0 / FREE_SPACE_IMPEDANCE
"""Wave admittance of free space in siemens."""

DEFAULT_CHARACTERISTIC_IMPEDANCE = 50.0
"""Default characteristic impedance of the antenna-port transmission lines in ohm."""
