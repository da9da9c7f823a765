"""Transportation simplex: northwest-corner start, MODI (u-v) pivoting"""
import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TransportResult:
    flow: np.ndarray
    cost: float
    converged: bool
    iterations: int


def northwest_corner(supply, demand):
    """Initial basic feasible solution with exactly m + n - 1 basic cells"""
    m, n = supply.size, demand.size
    supply, demand = supply.astype(np.float64), demand.astype(np.float64)
    flow = np.zeros((m, n))
    basis = []
    i = j = 0
    while True:
        quantity = min(supply[i], demand[j])
        flow[i, j] = quantity
        basis.append((i, j))
        supply[i] -= quantity
        demand[j] -= quantity
        if i == m - 1 and j == n - 1:
            break
        # when both run out, stepping down keeps a degenerate zero cell
        if (supply[i] <= demand[j] and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return flow, basis


class _Basis:
    """Spanning tree over row nodes 0..m-1 and column nodes m..m+n-1"""

    def __init__(self, m, n, cells):
        self.m, self.n = m, n
        self.adjacent = [set() for _ in range(m + n)]
        for i, j in cells:
            self.add(i, j)

    def add(self, i, j):
        self.adjacent[i].add(self.m + j)
        self.adjacent[self.m + j].add(i)

    def remove(self, i, j):
        self.adjacent[i].discard(self.m + j)
        self.adjacent[self.m + j].discard(i)

    def potentials(self, cost):
        """u, v with u_i + v_j = c_ij on basic cells and u_0 = 0"""
        m = self.m
        values = np.full(m + self.n, np.nan)
        values[0] = 0.0
        stack = [0]
        while stack:
            node = stack.pop()
            for other in self.adjacent[node]:
                if np.isnan(values[other]):
                    i, j = (node, other - m) if node < m \
                        else (other, node - m)
                    values[other] = cost[i, j] - values[node]
                    stack.append(other)
        return values[:m], values[m:]

    def path(self, start, goal):
        """Tree path between two nodes, inclusive"""
        parent = {start: None}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            if node == goal:
                break
            for other in self.adjacent[node]:
                if other not in parent:
                    parent[other] = node
                    queue.append(other)
        route = [goal]
        while parent[route[-1]] is not None:
            route.append(parent[route[-1]])
        return route[::-1]


def transport_simplex(supply, demand, cost, max_iterations=None):
    """Minimum-cost flow for a balanced transportation problem.

    ``converged`` is False when the pivot budget runs out; the flow is then
    feasible but not proven optimal.
    """
    supply = np.asarray(supply, dtype=np.float64)
    demand = np.asarray(demand, dtype=np.float64)
    cost = np.asarray(cost, dtype=np.float64)
    m, n = supply.size, demand.size
    if cost.shape != (m, n):
        raise ValueError(f'cost shape {cost.shape} != ({m}, {n})')
    if np.any(supply <= 0) or np.any(demand <= 0):
        raise ValueError('masses must be positive')
    total = supply.sum()
    if abs(total - demand.sum()) > 1e-9 * total:
        raise ValueError('problem is not balanced')
    if max_iterations is None:
        max_iterations = 10 * m * n + 100

    flow, cells = northwest_corner(supply, demand)
    basis = _Basis(m, n, cells)
    tolerance = 1e-12 * max(1.0, float(np.abs(cost).max(initial=0.0)))

    for iteration in range(max_iterations):
        u, v = basis.potentials(cost)
        reduced = cost - u[:, np.newaxis] - v[np.newaxis, :]
        entering = np.unravel_index(int(np.argmin(reduced)), reduced.shape)
        if reduced[entering] >= -tolerance:
            return TransportResult(flow, float((flow * cost).sum()),
                                   True, iteration)

        i, j = int(entering[0]), int(entering[1])
        route = basis.path(i, m + j)
        # cycle cells along the tree path alternate -, +, -, ...
        edges = [(a, b - m) if a < m else (b, a - m)
                 for a, b in zip(route, route[1:])]
        donors = edges[0::2]
        receivers = edges[1::2]
        leaving = min(donors, key=lambda cell: flow[cell])
        theta = flow[leaving]
        for cell in donors:
            flow[cell] -= theta
        for cell in receivers:
            flow[cell] += theta
        flow[i, j] += theta
        flow[leaving] = 0.0
        basis.remove(*leaving)
        basis.add(i, j)

    logger.warning('transportation simplex stopped after %d pivots',
                   max_iterations)
    return TransportResult(flow, float((flow * cost).sum()), False,
                           max_iterations)
