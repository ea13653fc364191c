"""Normal and chi-square distribution functions.

Thin vectorized wrappers; every exact Gaussian probability in the package
routes through these two functions.
"""

import numpy as np
from scipy import special as sps


def norm_cdf(x):
    """Standard normal CDF, computed as erfc(-x/sqrt(2))/2 to keep tail accuracy."""
    out = 0.5 * sps.erfc(-np.asarray(x, dtype=float) / np.sqrt(2.0))
    return out if np.ndim(out) else float(out)


def norm_pdf(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
    return out if np.ndim(out) else float(out)


def chi2_cdf(x, dof: int):
    """P(chi2_dof <= x) via the regularized lower incomplete gamma function."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = sps.gammainc(0.5 * dof, 0.5 * x)
    return out if np.ndim(out) else float(out)


def chi2_sf(x, dof: int):
    if dof < 1:
        raise ValueError("dof must be >= 1")
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    out = sps.gammaincc(0.5 * dof, 0.5 * x)
    return out if np.ndim(out) else float(out)
