# ====================================================
# Coefficient and Source Fields
# ----------------------------------------------------
# - sigma, c constant per fine cell (row-major cells)
# - Zero-free, and sign(sigma) == sign(c) cellwise
# - Sign partition Omega+ / Omega- and contrast ratio
# ====================================================

from dataclasses import dataclass

import numpy as np

from signms.errors import ConfigurationError, DomainError


@dataclass(frozen=True, eq=False)
class CoefficientField:
    sigma: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        sigma = np.ascontiguousarray(self.sigma, dtype=float).ravel()
        c = np.ascontiguousarray(self.c, dtype=float).ravel()
        if sigma.shape != c.shape:
            raise ConfigurationError(f"sigma has {sigma.size} cells but c has {c.size}")
        n = int(round(np.sqrt(sigma.size)))
        if n * n != sigma.size:
            raise ConfigurationError(f"field of {sigma.size} cells is not a square grid")
        if not (np.all(np.isfinite(sigma)) and np.all(np.isfinite(c))):
            raise ConfigurationError("coefficient field has non-finite values")
        if np.any(sigma == 0.0) or np.any(c == 0.0):
            raise ConfigurationError("coefficient field has zero-valued cells")
        if np.any(np.sign(sigma) != np.sign(c)):
            raise ConfigurationError("sign(sigma) and sign(c) differ on some cells")
        sigma.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "c", c)

    @property
    def n_fine(self):
        return int(round(np.sqrt(self.sigma.size)))

    @property
    def positive(self):
        return self.sigma > 0

    @property
    def negative(self):
        return self.sigma < 0

    def scaled(self, factor):
        return CoefficientField(self.sigma * factor, self.c * factor)


@dataclass(frozen=True, eq=False)
class SourceField:
    # Nodal values, row-major fine nodes
    f: np.ndarray

    def __post_init__(self):
        f = np.ascontiguousarray(self.f, dtype=float).ravel()
        if not np.all(np.isfinite(f)):
            raise ConfigurationError("source field has non-finite values")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)


# =====================================================
# CONTRAST RATIO  Upsilon = min sigma(+) / max |sigma(-)|
# =====================================================
def contrast_ratio(field):
    pos = field.sigma[field.positive]
    neg = field.sigma[field.negative]
    if pos.size == 0:
        raise DomainError("contrast ratio undefined: field has no positive cells")
    if neg.size == 0:
        return float("inf")
    return float(pos.min() / np.abs(neg).max())
