"""Exact Word Mover's Distance via the transportation simplex.

The solver keeps a basis of exactly ``m + n - 1`` cells forming a spanning tree
of the bipartite row/column graph; degenerate (zero-flow) basic cells stay in the
basis, so no perturbation of the marginals is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import NbowVector
from .embedding import EmbeddingTable, cost_matrix
from .errors import DegenerateDocument, InfeasibleMass

MASS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TransportProblem:
    supply: np.ndarray
    demand: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        supply = np.asarray(self.supply, dtype=np.float64)
        demand = np.asarray(self.demand, dtype=np.float64)
        cost = np.asarray(self.cost, dtype=np.float64)
        object.__setattr__(self, "supply", supply)
        object.__setattr__(self, "demand", demand)
        object.__setattr__(self, "cost", cost)
        if supply.ndim != 1 or demand.ndim != 1 or len(supply) == 0 or len(demand) == 0:
            raise ValueError("supply and demand must be non-empty vectors")
        if cost.shape != (len(supply), len(demand)):
            raise ValueError(f"cost shape {cost.shape} != ({len(supply)}, {len(demand)})")
        if not np.all(np.isfinite(cost)) or np.any(cost < 0):
            raise ValueError("costs must be finite and non-negative")
        if np.any(supply < 0) or np.any(demand < 0):
            raise ValueError("supply and demand must be non-negative")
        gap = abs(supply.sum() - demand.sum())
        if gap > MASS_TOLERANCE:
            raise InfeasibleMass(f"supply and demand totals differ by {gap:.3g}")


@dataclass(frozen=True)
class TransportSolution:
    flow: dict[tuple[int, int], float]  # strictly positive entries only
    objective: float
    basis: tuple[tuple[int, int], ...] = field(repr=False, default=())
    pivots: int = 0

    def dense(self, shape: tuple[int, int]) -> np.ndarray:
        out = np.zeros(shape)
        for (i, j), x in self.flow.items():
            out[i, j] = x
        return out


def _initial_basis(supply, demand, cost):
    """Matrix-minimum rule, crossing out exactly one line per allocation."""
    m, n = cost.shape
    a = supply.copy()
    b = demand.copy()
    row_on = np.ones(m, dtype=bool)
    col_on = np.ones(n, dtype=bool)
    flow = np.zeros((m, n))
    basis = []
    masked = cost.astype(np.float64, copy=True)
    for _ in range(m + n - 1):
        k = int(np.argmin(masked))
        i, j = divmod(k, n)
        rows_left = int(row_on.sum())
        cols_left = int(col_on.sum())
        if rows_left > 1 and (a[i] <= b[j] or cols_left == 1):
            x = a[i]
            b[j] = max(b[j] - x, 0.0)
            a[i] = 0.0
            row_on[i] = False
            masked[i, :] = np.inf
        else:
            x = b[j]
            a[i] = max(a[i] - x, 0.0)
            b[j] = 0.0
            col_on[j] = False
            masked[:, j] = np.inf
        flow[i, j] = x
        basis.append((i, j))
    return flow, basis


def _tree(cost, row_adj, col_adj):
    """Walk the basis tree from row 0.

    Returns the dual values (u with u[0] = 0, v) and, for every node, its parent
    and depth. Rows are nodes 0..m-1 and columns m..m+n-1; ``cost`` is a nested list.
    """
    m, n = len(row_adj), len(col_adj)
    u = [0.0] * m
    v = [0.0] * n
    parent = [-1] * (m + n)
    depth = [0] * (m + n)
    seen = [False] * (m + n)
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        ui = u[i]
        row = cost[i]
        d = depth[i] + 1
        for j in row_adj[i]:
            cj = m + j
            if seen[cj]:
                continue
            seen[cj] = True
            vj = v[j] = row[j] - ui
            parent[cj] = i
            depth[cj] = d
            for r in col_adj[j]:
                if not seen[r]:
                    seen[r] = True
                    u[r] = cost[r][j] - vj
                    parent[r] = cj
                    depth[r] = d + 1
                    stack.append(r)
    return u, v, parent, depth


def _cycle(ei, ej, m, parent, depth):
    """Basis cells on the tree path from row ``ei`` to column ``ej``, row end first."""
    a, b = ei, m + ej
    head, tail = [], []
    while a != b:
        if depth[a] >= depth[b]:
            p = parent[a]
            head.append((a, p - m) if a < m else (p, a - m))
            a = p
        else:
            p = parent[b]
            tail.append((b, p - m) if b < m else (p, b - m))
            b = p
    tail.reverse()
    return head + tail


def solve_transport(problem: TransportProblem, max_pivots: int | None = None) -> TransportSolution:
    supply, demand, cost = problem.supply, problem.demand, problem.cost
    m, n = cost.shape
    if m == 1 or n == 1:
        # the marginals force the flow
        flow = {}
        for i in range(m):
            for j in range(n):
                x = float(demand[j] if m == 1 else supply[i])
                if x > 0:
                    flow[(i, j)] = x
        obj = float(sum(x * cost[i, j] for (i, j), x in flow.items()))
        return TransportSolution(flow=flow, objective=obj, basis=tuple(flow))

    flow, basis = _initial_basis(supply, demand, cost)
    row_adj = [set() for _ in range(m)]
    col_adj = [set() for _ in range(n)]
    in_basis = np.zeros((m, n), dtype=bool)
    for i, j in basis:
        row_adj[i].add(j)
        col_adj[j].add(i)
        in_basis[i, j] = True

    tol = 1e-11 * max(1.0, float(cost.max()))
    if max_pivots is None:
        max_pivots = 50 * m * n + 1000
    degenerate_run = 0
    bland = False
    pivots = 0
    cost_rows = cost.tolist()
    while True:
        u, v, parent, depth = _tree(cost_rows, row_adj, col_adj)
        reduced = cost - np.array(u)[:, None] - np.array(v)[None, :]
        reduced[in_basis] = 0.0
        if bland:
            candidates = np.flatnonzero(reduced < -tol)
            if len(candidates) == 0:
                break
            k = int(candidates[0])
        else:
            k = int(np.argmin(reduced))
            if reduced.flat[k] >= -tol:
                break
        ei, ej = divmod(k, n)
        path = _cycle(ei, ej, m, parent, depth)
        minus = path[0::2]
        plus = path[1::2]
        theta = min(flow[c] for c in minus)
        leaving = min((c for c in minus if flow[c] == theta), key=lambda c: c[0] * n + c[1])
        for c in minus:
            flow[c] -= theta
        for c in plus:
            flow[c] += theta
        flow[ei, ej] = theta
        flow[leaving] = 0.0
        li, lj = leaving
        row_adj[li].discard(lj)
        col_adj[lj].discard(li)
        in_basis[li, lj] = False
        row_adj[ei].add(ej)
        col_adj[ej].add(ei)
        in_basis[ei, ej] = True
        pivots += 1
        if theta == 0.0:
            degenerate_run += 1
            if degenerate_run > m + n:
                bland = True  # Bland's rule cannot cycle
        else:
            degenerate_run = 0
        if pivots > max_pivots:
            raise RuntimeError(f"transportation simplex exceeded {max_pivots} pivots")

    cells = tuple(zip(*np.nonzero(in_basis)))
    sparse = {(int(i), int(j)): float(flow[i, j]) for i, j in cells if flow[i, j] > 0}
    obj = float(sum(x * cost[i, j] for (i, j), x in sparse.items()))
    return TransportSolution(
        flow=sparse, objective=obj, basis=tuple((int(i), int(j)) for i, j in cells), pivots=pivots
    )


def wmd(a: NbowVector, b: NbowVector, table: EmbeddingTable) -> float:
    """Word Mover's Distance between two nBOW vectors over their own supports."""
    if len(a) == 0 or len(b) == 0:
        raise DegenerateDocument("WMD needs two non-empty nBOW vectors")
    if a == b:
        return 0.0
    cost = cost_matrix(table, a.indices, b.indices)
    return solve_transport(TransportProblem(a.weights, b.weights, cost)).objective
