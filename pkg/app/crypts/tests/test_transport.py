import numpy as np
from django.test import SimpleTestCase
from scipy.optimize import linprog

from crypts.transport import northwest_corner, transport_simplex


def linprog_cost(supply, demand, cost):
    m, n = cost.shape
    equalities = np.zeros((m + n, m * n))
    for i in range(m):
        equalities[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        equalities[m + j, j::n] = 1.0
    result = linprog(cost.ravel(), A_eq=equalities,
                     b_eq=np.concatenate([supply, demand]),
                     bounds=(0, None), method='highs')
    return result.fun


class NorthwestCornerTests(SimpleTestCase):
    """Test the initial basic feasible solution"""

    def test_basis_size_and_sums(self):
        """Test m + n - 1 basic cells and exact marginals"""
        supply = np.array([3.0, 3.0, 4.0])
        demand = np.array([5.0, 5.0])

        flow, basis = northwest_corner(supply, demand)

        self.assertEqual(len(basis), 4)
        np.testing.assert_array_equal(flow.sum(axis=1), supply)
        np.testing.assert_array_equal(flow.sum(axis=0), demand)

    def test_degenerate_cell_kept(self):
        """Test that simultaneous exhaustion still yields m + n - 1 cells"""
        flow, basis = northwest_corner(np.array([2.0, 2.0]),
                                       np.array([2.0, 2.0]))

        self.assertEqual(len(basis), 3)
        np.testing.assert_array_equal(flow, [[2, 0], [0, 2]])


class TransportSimplexTests(SimpleTestCase):
    """Test the transportation simplex"""

    def test_against_linear_program(self):
        """Test optimal costs against a generic LP solver"""
        rng = np.random.default_rng(10)
        for _ in range(50):
            m, n = (int(v) for v in rng.integers(1, 8, size=2))
            supply = rng.integers(n, n + 10, size=m).astype(float)
            demand = rng.multinomial(int(supply.sum()) - n, [1 / n] * n) + 1.0
            cost = rng.random((m, n)) * 10

            result = transport_simplex(supply, demand, cost)

            self.assertTrue(result.converged)
            self.assertAlmostEqual(result.cost,
                                   linprog_cost(supply, demand, cost),
                                   places=6)
            np.testing.assert_allclose(result.flow.sum(axis=1), supply)
            np.testing.assert_allclose(result.flow.sum(axis=0), demand)
            self.assertTrue(np.all(result.flow >= -1e-9))

    def test_identity_problem(self):
        """Test that a zero-cost diagonal is found"""
        cost = 1.0 - np.eye(4)

        result = transport_simplex(np.ones(4), np.ones(4), cost)

        self.assertEqual(result.cost, 0.0)
        np.testing.assert_array_equal(result.flow, np.eye(4))

    def test_iteration_budget(self):
        """Test that an exhausted budget reports non-convergence"""
        cost = np.eye(3)[::-1] * -1.0 + 1.0

        result = transport_simplex(np.ones(3), np.ones(3), cost,
                                   max_iterations=0)

        self.assertFalse(result.converged)
        np.testing.assert_allclose(result.flow.sum(axis=0), 1.0)

    def test_unbalanced(self):
        """Test that unequal totals are refused"""
        with self.assertRaises(ValueError):
            transport_simplex([1.0], [2.0], [[0.0]])

    def test_non_positive_mass(self):
        """Test that zero masses are refused"""
        with self.assertRaises(ValueError):
            transport_simplex([0.0, 1.0], [1.0], [[0.0], [0.0]])

    def test_cost_shape(self):
        """Test that the cost matrix must be m by n"""
        with self.assertRaises(ValueError):
            transport_simplex([1.0], [1.0], [[0.0, 0.0]])
