"""Classic test functions for exercising the optimizers outside of training.

All are minimization problems with known global minimum 0 at the origin
(rosenbrock: at the all-ones point).
"""

from __future__ import annotations

import numpy as np


def sphere(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


#: name -> (function, default search box)
BENCHMARKS = {
    "sphere": (sphere, (-5.0, 5.0)),
    "rastrigin": (rastrigin, (-5.12, 5.12)),
    "rosenbrock": (rosenbrock, (-5.0, 10.0)),
}
