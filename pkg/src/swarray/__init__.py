"""Spherical-wave characterization, localization bounds and geometry
optimization for sparse wideband antenna arrays.

The package is organized bottom-up:

* :mod:`swarray.modes`     -- mode-index algebra and scalar special functions
* :mod:`swarray.swe`       -- vector spherical waves, far-field patterns and
                              coefficient extraction by spherical quadrature
* :mod:`swarray.elements`  -- analytic radiators, array field synthesis,
                              field-file I/O and the reception model
* :mod:`swarray.sigmodel`  -- the wideband discrete-frequency signal model
* :mod:`swarray.fisher`    -- analytic signal gradients, Fisher information
                              and Cramer-Rao bounds
* :mod:`swarray.optimizer` -- design objectives and differential evolution
                              over array geometries
* :mod:`swarray.analysis`  -- beam patterns, manifold diagnostics and bound
                              maps with CSV emission
* :mod:`swarray.cli`       -- command-line entry points
"""

__version__ = "0.1.0"
