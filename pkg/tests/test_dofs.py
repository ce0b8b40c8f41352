import unittest
import numpy as np
from polyhdiv.errors import AdmissibilityError
from polyhdiv.geometry import load_polygon, ACCEPTANCE_NONAGON
from polyhdiv.hkspace import ElementSpec, AnalyticField, build_space
from polyhdiv.polyspace import EdgePolynomial, build_projection_space_P
from polyhdiv.dofs import (CoordinateMoment, GlobalNormalMoment, PointNormalValue, BoundaryMean, InternalMoment,
                           make_dofs, make_normal_dofs, eval_dof, validate_dof_set, admissibility_violations)

NONAGON = load_polygon(ACCEPTANCE_NONAGON)
SQUARE = load_polygon([(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)])
SLANTED = load_polygon([(0, 0), (3, 4), (-1, 5)])
UNIT = load_polygon([(0, 0), (1, 0), (0, 1)])

def helper_test_counts(p, spec, per_edge, means, internal):
  dofs = make_dofs(p, spec)
  c = dofs.counts()
  assert c["per_edge"] == [per_edge] * p.n_faces, c
  assert (c["boundary_means"], c["internal"]) == (means, internal), c
  rep = validate_dof_set(dofs)
  assert rep.passed, rep.violations
  return dofs

class TestFunctionals(unittest.TestCase):
  def test_edge_examples(self):
    e = SLANTED.edges[0]
    q = AnalyticField(lambda x, y: (1.0, 0.0), SLANTED)
    self.assertAlmostEqual(eval_dof(GlobalNormalMoment(e, EdgePolynomial.constant(1.0, 0)), q), 4.0)
    self.assertAlmostEqual(eval_dof(PointNormalValue(e), q), 0.8)
    # int_f q1 n1 x ds with x = 3t along a length 5 edge
    self.assertAlmostEqual(eval_dof(CoordinateMoment(e, 0), q), 6.0)
    self.assertAlmostEqual(eval_dof(CoordinateMoment(e, 1), q), 0.0)

  def test_internal_example(self):
    q = AnalyticField(lambda x, y: (y, -x), UNIT)
    P = build_projection_space_P(1)
    vals = [eval_dof(InternalMoment(P, i, 6), q) for i in range(len(P))]
    np.testing.assert_allclose(vals, [1/6, -1/6, 0.0], atol=1e-14)

  def test_boundary_mean(self):
    q = AnalyticField(lambda x, y: (x, 1.0), UNIT)
    # perimeter of the unit triangle, and int of x over its boundary
    self.assertAlmostEqual(BoundaryMean(UNIT, 1)(q), 2 + np.sqrt(2))
    self.assertAlmostEqual(BoundaryMean(UNIT, 0)(q), 0.5 + 0.5 * np.sqrt(2))

  def test_batched_matches_single(self):
    spec = ElementSpec(1)
    dofs = make_dofs(NONAGON, spec)
    q = AnalyticField(lambda x, y: (x*y, 1 - y**2), NONAGON)
    np.testing.assert_allclose(dofs.evaluate(q), [d(q) for d in dofs], rtol=1e-12, atol=1e-14)

class TestDofSets(unittest.TestCase):
  def test_general_counts(self):
    for k in range(3):
      helper_test_counts(NONAGON, ElementSpec(k), k + 3, 0, len(build_projection_space_P(k)))

  def test_ib(self):
    dofs = helper_test_counts(NONAGON, ElementSpec(1, normal_config="ib"), 4, 0, 3)
    self.assertEqual(len(dofs.indices(kind="PointNormalValue")), 9)
    self.assertEqual(dofs[dofs.edge_slices()[0]][-1].kind, "PointNormalValue")

  def test_reduced_counts(self):
    dofs = helper_test_counts(NONAGON, ElementSpec.reduced(1), 2, 2, 3)
    self.assertEqual(len(dofs), 23)
    self.assertEqual(dofs.indices(kind="CoordinateMoment"), [])

  def test_order(self):
    dofs = make_dofs(NONAGON, ElementSpec(2))
    kinds = [d.kind for d in dofs[dofs.edge_slices()[4]]]
    self.assertEqual(kinds, ["CoordinateMoment"] * 2 + ["GlobalNormalMoment"] * 3)
    self.assertTrue(all(d.edge.index == 4 for d in dofs[dofs.edge_slices()[4]]))
    self.assertEqual(dofs.internal_slice(), slice(45, 56))

  def test_deflated_kernels(self):
    dofs = make_dofs(NONAGON, ElementSpec(2))
    for i in dofs.indices(kind="GlobalNormalMoment"):
      d = dofs[i]
      if d.kernel.degree > 0: self.assertAlmostEqual(d.kernel.mean(), 0.0)

  def test_rt_like_on_square(self):
    # no coordinate moments, so axis parallel edges are fine
    helper_test_counts(SQUARE, ElementSpec(1, l1=-1), 2, 0, 3)

class TestAdmissibility(unittest.TestCase):
  def test_axis_parallel(self):
    with self.assertRaises(AdmissibilityError): make_normal_dofs(SQUARE, ElementSpec(1))
    self.assertTrue(any("edge conditions" in v for v in admissibility_violations(ElementSpec(1), SQUARE)))
    self.assertEqual(admissibility_violations(ElementSpec.reduced(1), SQUARE), [])

  def test_coefficients(self):
    v = admissibility_violations(ElementSpec(1, l1=1))
    self.assertTrue(any("coefficient conditions" in s for s in v))

  def test_duplicate_fails(self):
    dofs = make_dofs(NONAGON, ElementSpec(2)).with_duplicate(3)
    rep = validate_dof_set(dofs)
    self.assertFalse(rep.passed)
    self.assertLess(rep.per_edge[3]["rank"], rep.per_edge[3]["count"])
    self.assertEqual(rep.per_edge[2]["rank"], rep.per_edge[2]["count"])

  def test_count_mismatch(self):
    spec = ElementSpec(0, h_target=NONAGON.diameter / 2)
    space = build_space(NONAGON, spec)
    dofs = make_dofs(NONAGON, ElementSpec(1))
    self.assertFalse(validate_dof_set(dofs, space).passed)

if __name__ == '__main__':
  unittest.main()
