import unittest
import numpy as np
from polyhdiv.rtref import (RtSpace, rt_space_basis, rt_nodal_basis, rt_interface_jump, rt_compare_normal_traces,
                            REFERENCE_TRIANGLE)

# second triangle sharing the edge (1,0)-(0,1) of the reference triangle
PARTNER = ((1.0, 0.0), (1.2, 1.1), (0.0, 1.0))

def helper_test_nodal(k):
  nb = rt_nodal_basis(k)
  assert len(nb) == (k+1)*(k+3)
  assert nb.kronecker <= 1e-12, nb.kronecker
  assert nb.internal_trace_defect() <= 1e-12
  assert nb.divergence_excess() <= 1e-12
  assert nb.trace_fit_residual() <= 1e-12
  return nb

class TestRtSpace(unittest.TestCase):
  def test_dimensions(self):
    self.assertEqual([rt_space_basis(k).dimension for k in range(3)], [3, 8, 15])

  def test_lowest_order(self):
    space = RtSpace(0)
    pts = np.array([[0.2, 0.3]])
    # (1, 0), (0, 1), (x, y)
    np.testing.assert_allclose(space.evaluate(pts)[:, :, 0], [[1, 0], [0, 1], [0.2, 0.3]])
    d = space.divergence()
    np.testing.assert_allclose(d[:, 0, 0], [0, 0, 2])

  def test_divergence(self):
    space = RtSpace(1)
    x, y = np.random.RandomState(1337).random_sample((2, 5)) * 0.3
    h = 1e-6
    for m in range(len(space)):
      fd = (space.evaluate(np.stack([x + h, y], 1), space.members[[m]])[0, 0] -
            space.evaluate(np.stack([x - h, y], 1), space.members[[m]])[0, 0] +
            space.evaluate(np.stack([x, y + h], 1), space.members[[m]])[0, 1] -
            space.evaluate(np.stack([x, y - h], 1), space.members[[m]])[0, 1]) / (2*h)
      exact = np.polynomial.polynomial.polyval2d(x, y, space.divergence(space.members[[m]])[0])
      np.testing.assert_allclose(fd, exact, atol=1e-7)

  def test_bad_order(self):
    with self.assertRaises(ValueError): RtSpace(-1)

class TestRtNodalBasis(unittest.TestCase):
  def test_nodal(self):
    for k in range(3):
      helper_test_nodal(k)

  def test_lowest_order_traces(self):
    nb = helper_test_nodal(0)
    t = np.linspace(0, 1, 5)
    edges = nb.space.polygon.edges
    for i, e in enumerate(edges):
      # the dual of the flux through edge i has normal trace 1/|f_i| there and 0 elsewhere
      np.testing.assert_allclose(nb.normal_traces(e.index, t, [i])[0], 1.0 / e.length, rtol=1e-12)
      other = edges[(i + 1) % 3]
      np.testing.assert_allclose(nb.normal_traces(other.index, t, [i])[0], 0.0, atol=1e-12)

  def test_conformity(self):
    for k in range(3):
      self.assertLess(rt_interface_jump(k, REFERENCE_TRIANGLE, PARTNER), 1e-10)

class TestComparison(unittest.TestCase):
  def test_same_trace_spaces(self):
    for k in range(2):
      out = rt_compare_normal_traces(k)
      self.assertTrue(out["passed"], out)
      self.assertTrue(all(r["joint_rank"] == k + 1 for r in out["per_edge"]))

if __name__ == '__main__':
  unittest.main()
