import unittest
import numpy as np
from polyhdiv.errors import QuadratureError
from polyhdiv.geometry import load_polygon, ACCEPTANCE_NONAGON
from polyhdiv.polyspace import (Monomial2D, monomial_basis, build_projection_space_P, EdgePolynomial,
                                edge_restriction, projector_basis, change_of_basis, edge_quadrature,
                                triangle_quadrature, triangle_monomial_integral, MAX_EXACTNESS)

def helper_test_triangle_rule(exactness):
  rule = triangle_quadrature(exactness)
  x, y = rule.points[:, 0], rule.points[:, 1]
  for a in range(exactness + 1):
    for b in range(exactness + 1 - a):
      np.testing.assert_allclose(np.sum(rule.weights * x**a * y**b), triangle_monomial_integral(a, b), rtol=1e-12,
                                 err_msg=f"x^{a} y^{b} with exactness {exactness}")

def helper_test_edge_rule(exactness):
  rule = edge_quadrature(exactness)
  s = rule.points[:, 0]
  for j in range(exactness + 1):
    want = 0.0 if j % 2 else 2.0 / (j + 1)
    np.testing.assert_allclose(np.sum(rule.weights * s**j), want, atol=1e-13)

class TestMonomials(unittest.TestCase):
  def test_sizes(self):
    self.assertEqual(len(monomial_basis('Q', 2)), 9)
    self.assertEqual(len(monomial_basis('Q[]', 2)), 5)
    self.assertEqual(len(monomial_basis('Q[]', 0)), 1)
    self.assertEqual(len(monomial_basis('P', 2)), 6)
    self.assertEqual(len(monomial_basis('Pab', 1, 2)), 6)
    self.assertEqual(monomial_basis('Q', -1), [])
    for m in range(4):
      self.assertEqual(len(monomial_basis('Q[]', m)), (m+1)**2 - m**2)

  def test_ordering(self):
    self.assertEqual([m.alpha for m in monomial_basis('Q', 1)], [(0, 0), (1, 0), (0, 1), (1, 1)])
    self.assertTrue(all(m.degree == 2 for m in monomial_basis('Q[]', 2)))

  def test_eval_and_grad(self):
    m = Monomial2D(2, 1)
    self.assertEqual(m(3.0, 2.0), 18.0)
    np.testing.assert_allclose(m.grad(3.0, 2.0), (12.0, 9.0))
    dx, dy = Monomial2D(0, 0).grad(np.ones(3), np.ones(3))
    np.testing.assert_equal(dx, np.zeros(3))
    self.assertEqual(repr(m), "x^2y")

  def test_unknown_space(self):
    with self.assertRaises(ValueError): monomial_basis('R', 1)

class TestProjectionSpace(unittest.TestCase):
  def test_sizes(self):
    self.assertEqual([len(build_projection_space_P(k)) for k in range(3)], [0, 3, 11])

  def test_k1_pairs(self):
    P = build_projection_space_P(1)
    x, y = np.array([0.3]), np.array([0.7])
    V = P.evaluate(x, y)[:, :, 0]
    np.testing.assert_allclose(V, [[1, 0], [0, 1], [0.3, 0.7]])

  def test_degrees(self):
    P = build_projection_space_P(2)
    self.assertEqual(max(P.pair_degree(i) for i in range(len(P))), 2)
    # the coupled pair closes the space: (x^k y^(k-1), x^(k-1) y^k)
    self.assertEqual([m.alpha for comp in P.pairs[-1] for _, m in comp], [(2, 1), (1, 2)])

class TestEdgePolynomials(unittest.TestCase):
  def test_t_coefficients(self):
    p = EdgePolynomial.from_t_coefficients([1.0, 2.0, 3.0])
    t = np.linspace(0, 1, 7)
    np.testing.assert_allclose(p(t), 1 + 2*t + 3*t**2)
    self.assertAlmostEqual(p.mean(), 1 + 1 + 1)

  def test_deflated(self):
    p = EdgePolynomial.from_t_coefficients([0.5, -1.0, 4.0]).deflated()
    self.assertAlmostEqual(p.mean(), 0.0)

  def test_restriction(self):
    e = load_polygon([(0, 0), (3, 4), (-1, 5)]).edges[0]
    p = edge_restriction(e, [(1.0, Monomial2D(1, 1))])
    t = np.linspace(0, 1, 5)
    np.testing.assert_allclose(p(t), 12 * t**2)
    self.assertEqual(p.edge, 0)

  def test_projector_kinds(self):
    e = load_polygon(ACCEPTANCE_NONAGON).edges[3]
    for kind in ("monomial", "orthogonal", "hermite"):
      basis = projector_basis(e, 3, kind)
      self.assertEqual([b.degree for b in basis], [0, 1, 2, 3])
      M = change_of_basis(basis, 3)
      self.assertEqual(np.linalg.matrix_rank(M), 4)
    self.assertEqual(projector_basis(e, -1), [])
    with self.assertRaises(ValueError): projector_basis(e, 1, "chebyshev")

  def test_orthogonal_kernels(self):
    rule = edge_quadrature(9)
    basis = projector_basis(load_polygon(ACCEPTANCE_NONAGON).edges[0], 3, "orthogonal")
    t = (rule.points[:, 0] + 1) / 2
    G = np.array([[np.sum(rule.weights * a(t) * b(t)) for b in basis] for a in basis])
    np.testing.assert_allclose(G - np.diag(np.diag(G)), 0, atol=1e-14)

class TestQuadrature(unittest.TestCase):
  def test_triangle_rules(self):
    for ex in (0, 1, 2, 5, 8, 13):
      helper_test_triangle_rule(ex)

  def test_edge_rules(self):
    for ex in (0, 3, 7, 12):
      helper_test_edge_rule(ex)

  def test_positive_weights(self):
    rule = triangle_quadrature(10)
    self.assertTrue(np.all(rule.weights > 0))
    self.assertAlmostEqual(np.sum(rule.weights), 0.5)
    self.assertTrue(np.all(rule.points >= 0) and np.all(rule.points.sum(axis=1) <= 1))

  def test_limits(self):
    triangle_quadrature(MAX_EXACTNESS)
    with self.assertRaises(QuadratureError): triangle_quadrature(MAX_EXACTNESS + 1)
    with self.assertRaises(QuadratureError): edge_quadrature(-1)

  def test_monomial_integrals(self):
    self.assertAlmostEqual(triangle_monomial_integral(0, 0), 0.5)
    self.assertAlmostEqual(triangle_monomial_integral(1, 0), 1/6)
    self.assertAlmostEqual(triangle_monomial_integral(1, 1), 1/24)

if __name__ == '__main__':
  unittest.main()
