"""Reference implementations used only by the tests.

The transport oracle enumerates every basis of the transportation polytope
(a set of m + n - 1 cells whose constraint columns are independent), solves
it directly and keeps the cheapest non-negative one. It shares no code with
the simplex solver.
"""

from functools import lru_cache
from itertools import combinations

import numpy as np


def _constraints(m, n):
    a = np.zeros((m + n, m * n))
    for i in range(m):
        for j in range(n):
            a[i, i * n + j] = 1.0
            a[m + j, i * n + j] = 1.0
    return a


@lru_cache(maxsize=None)
def _bases(m, n):
    a = _constraints(m, n)
    k = m + n - 1
    cells, solvers = [], []
    for subset in combinations(range(m * n), k):
        sub = a[:, subset]
        if np.linalg.matrix_rank(sub) == k:
            cells.append(subset)
            solvers.append(np.linalg.pinv(sub))
    return np.array(cells), np.array(solvers)


def transport_oracle(supply, demand, cost) -> float:
    """Minimum objective over all basic feasible solutions."""
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    cells, solvers = _bases(m, n)
    rhs = np.concatenate([supply, demand])
    flows = solvers @ rhs
    ok = np.all(flows >= -1e-12, axis=1)
    objectives = np.sum(np.clip(flows, 0.0, None) * cost.ravel()[cells], axis=1)
    return float(objectives[ok].min())


def random_problem(rng, m, n, dim=None):
    """Random marginals and either random costs or Euclidean costs of random points."""
    supply = rng.random(m) + 0.05
    supply /= supply.sum()
    demand = rng.random(n) + 0.05
    demand /= demand.sum()
    if dim is None:
        cost = rng.random((m, n)) * 3
    else:
        x, y = rng.normal(size=(m, dim)), rng.normal(size=(n, dim))
        cost = np.sqrt(((x[:, None, :] - y[None, :, :]) ** 2).sum(-1))
    return supply, demand, cost
