"""Closed-form mean and covariance of the monochromatic edge counts against enumeration.

Prints the largest absolute discrepancy for each enumerable (graph, pi) pair.
"""

import numpy as np

from steindecomp.graphmodel import (ColoringModel, circulant_graph, covariance_matrix,
                                    exact_moments, mean_vector)

GRAPHS = [(4, 2), (6, 3), (8, 2), (8, 1), (10, 3), (12, 4)]
PIS = [(0.5, 0.5), (0.3, 0.7), (1 / 3, 1 / 3, 1 / 3), (0.1, 0.2, 0.3, 0.4)]


def main():
    print("n,m,pi,max_abs_error")
    for n, m in GRAPHS:
        for pi in PIS:
            model = ColoringModel(circulant_graph(n, m), pi)
            if len(pi) ** n > 2**22:
                continue
            lam, sig = exact_moments(model)
            err = max(np.max(np.abs(lam - mean_vector(model))),
                      np.max(np.abs(sig - covariance_matrix(model))))
            print(f"{n},{m},{'/'.join(f'{p:.3g}' for p in pi)},{err:.3e}")


if __name__ == "__main__":
    main()
