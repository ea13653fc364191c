"""Normal approximation tools for sums of bounded decomposable random vectors.

Bound functionals built from local-dependence structure, a random-graph
coloring model, finite-family estimates of the convex-set distance to the
Gaussian, and numerical checks of the Stein-method smoothing machinery.
"""

__version__ = "0.1.0"
