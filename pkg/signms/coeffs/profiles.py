# ====================================================
# Coefficient Profiles for the Experiments
# ----------------------------------------------------
# - Flat interface: sigma = c = s+ above gamma, -s- below
# - Random inclusions: seeded negative rectangles in a
#   positive background, kept off the boundary
# - NIM slab: vertical negative-index band
# - Cell membership by the cell-center test
# ====================================================

import logging

import numpy as np

from signms.coeffs.fields import CoefficientField
from signms.errors import ConfigurationError, GenerationError

logger = logging.getLogger(__name__)

# Bounded retries when an inclusion cannot be placed
MAX_PLACEMENT_RETRIES = 100


def _check_magnitudes(**values):
    for name, value in values.items():
        if not value > 0:
            raise ConfigurationError(f"{name} must be positive, got {value}")


def uniform_field(mesh, value=1.0):
    values = np.full(mesh.n_cells, float(value))
    return CoefficientField(values, values.copy())


# =====================================================
# FLAT INTERFACE
# =====================================================
def flat_interface(mesh, sigma_plus=1.0, sigma_minus_mag=3.0, gamma=0.5):
    _check_magnitudes(sigma_plus=sigma_plus, sigma_minus_mag=sigma_minus_mag)
    if not 0.0 < gamma < 1.0:
        raise ConfigurationError(f"interface height gamma must lie in (0, 1), got {gamma}")

    yc = mesh.cell_centers[:, 1]
    values = np.where(yc > gamma, float(sigma_plus), -float(sigma_minus_mag))
    return CoefficientField(values, values.copy())


# =====================================================
# RANDOM INCLUSIONS
# =====================================================
def random_inclusions(mesh, seed=0, contrast=(1.0, 1.0e3), count=40, size_range=(4, 12)):
    sigma_plus, sigma_minus_mag = contrast
    _check_magnitudes(sigma_plus=sigma_plus, sigma_minus_mag=sigma_minus_mag)
    lo, hi = int(size_range[0]), int(size_range[1])
    if lo < 1 or hi < lo:
        raise ConfigurationError(f"invalid inclusion size range {size_range}")
    if count < 0:
        raise ConfigurationError(f"inclusion count must be >= 0, got {count}")

    n = mesh.n_fine
    rng = np.random.default_rng(seed)
    grid = np.full((n, n), float(sigma_plus))

    for k in range(count):
        for _ in range(MAX_PLACEMENT_RETRIES):
            w, hgt = rng.integers(lo, hi + 1, size=2)
            # One clear cell between the inclusion and the boundary
            if w <= n - 2 and hgt <= n - 2:
                break
        else:
            raise GenerationError(
                f"inclusion {k} of size range {size_range} does not fit on a {n}x{n} grid "
                f"without touching the boundary"
            )
        x0 = rng.integers(1, n - w)
        y0 = rng.integers(1, n - hgt)
        grid[y0:y0 + hgt, x0:x0 + w] = -float(sigma_minus_mag)

    values = grid.ravel()
    logger.debug("random inclusions: %d negative cells of %d", int((values < 0).sum()), values.size)
    return CoefficientField(values, values.copy())


# =====================================================
# NEGATIVE-INDEX SLAB
# =====================================================
def nim_slab(mesh, slab=(11.0 / 24.0, 13.0 / 24.0), sigma_plus=1.0, sigma_minus_mag=10.0):
    _check_magnitudes(sigma_plus=sigma_plus, sigma_minus_mag=sigma_minus_mag)
    left, right = slab
    xc = mesh.cell_centers[:, 0]
    inside = (xc >= left) & (xc <= right)
    values = np.where(inside, -float(sigma_minus_mag), float(sigma_plus))
    return CoefficientField(values, values.copy())
