import os
import inspect
import tempfile
import unittest
import numpy as np
from polyhdiv.errors import UsageError
from polyhdiv.geometry import load_polygon, shared_edge, ACCEPTANCE_NONAGON
from polyhdiv.hkspace import ElementSpec
from polyhdiv.element import build_element
from polyhdiv.dofs import make_dofs
from polyhdiv.utils import dump_document, load_document
from polyhdiv.verify import (Thresholds, monotone, run_suite, make_glue_partner, pick_glue_edge, check_trace_degree,
                             check_interface_conformity, check_rt_oracle, check_divergence, check_dimensions,
                             check_scaling, check_block_structure, check_linearity, away_from_vertices,
                             boundary_fluxes, divergence_integrals, expected_degenerate, low_order_dof, CheckResult,
                             VerificationReport, CHECKS)

NONAGON = load_polygon(ACCEPTANCE_NONAGON)
SQUARE = load_polygon([(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)])
H = NONAGON.diameter / 4

def helper_test_suite(spec, p=NONAGON, **kwargs):
  report = run_suite(p, spec, **dict({"levels": 1, "compare_projectors": False}, **kwargs))
  assert report.errors == [], report.errors
  failed = [r for r in report.results if not r.passed]
  assert not failed, failed
  return report

def helper_test_interface(spec, refine=False):
  _, q = pick_glue_edge(NONAGON, spec)
  levels = [H, H / 2] if refine else [H]
  pairs = [(build_element(NONAGON, spec.replace(h_target=h)), build_element(q, spec.replace(h_target=h))) for h in levels]
  r = check_interface_conformity(pairs[0][0], pairs[0][1], Thresholds(), refined=tuple(pairs[1:]))
  assert r.passed, (r.value, r.refinement)
  return r

class TestThresholds(unittest.TestCase):
  def test_defaults(self):
    th = Thresholds()
    self.assertEqual(th.tol_kron, 1e-6)
    self.assertEqual(th.tol_zero, 1e-4)
    self.assertEqual(th.cond_singular, 1e12)
    self.assertEqual((th.min_spread, th.tol_block, th.tol_linearity), (0.01, 1e-9, 1e-10))
    self.assertEqual(set(th.to_dict()), set(Thresholds.DEFAULTS))

  def test_overrides(self):
    th = Thresholds.from_document({"tol_kron": 1e-8})
    self.assertEqual(th.tol_kron, 1e-8)
    with tempfile.TemporaryDirectory() as d:
      path = dump_document({"tol_zero": 1e-3}, os.path.join(d, "th.json"))
      self.assertEqual(Thresholds.from_document(path).tol_zero, 1e-3)
    with self.assertRaises(UsageError): Thresholds(tol_nothing=1.0)

  def test_monotone(self):
    self.assertTrue(monotone([1e-4, 5e-5, 2e-5], 1.5, 1e-10))
    self.assertFalse(monotone([1e-4, 9e-5], 1.5, 1e-10))
    # already at round-off
    self.assertTrue(monotone([1e-12, 3e-12], 1.5, 1e-10))

  def test_expected_degenerate(self):
    self.assertEqual(expected_degenerate(ElementSpec(1)), 2)
    self.assertEqual(expected_degenerate(ElementSpec.reduced(1)), 0)
    self.assertEqual(expected_degenerate(ElementSpec(1, l1=-1)), 0)

  def test_low_order_dofs(self):
    self.assertEqual(len([d for d in make_dofs(NONAGON, ElementSpec(2)) if low_order_dof(d)]), 9)
    self.assertEqual(len([d for d in make_dofs(NONAGON, ElementSpec(0, normal_config="ib")) if low_order_dof(d)]), 9)
    # only coordinate moments remain on the edges
    self.assertEqual([d for d in make_dofs(NONAGON, ElementSpec(1, l2=-1)) if low_order_dof(d)], [])

  def test_refinement_rows(self):
    report = VerificationReport(NONAGON, ElementSpec(1), Thresholds())
    report.add(CheckResult("kronecker", 1e-9, 1e-6, True, refinement=[[0.4, 1e-9], [0.2, 4e-10], [0.1, 1e-10]]))
    report.add(CheckResult("unisolvence", 1e3, 1e10, True))
    report.add(CheckResult("interface_conformity", 1e-13, 1e-6, True, refinement=[[0.4, 1e-13], [0.2, 2e-13], [0.1, 1e-13]]))
    headers, rows = report.refinement_rows()
    self.assertEqual(headers, ["h", "kronecker", "interface_conformity"])
    self.assertEqual(rows[1], [0.2, 4e-10, 2e-13])
    self.assertIn("interface_conformity", report.refinement_table())
    self.assertEqual(report.to_document()["refinement"]["rows"], rows)

class TestChecks(unittest.TestCase):
  @classmethod
  def setUpClass(cls):
    cls.nb = build_element(NONAGON, ElementSpec(1, h_target=H))
    cls.th = Thresholds()

  def test_trace_degree_control(self):
    self.assertTrue(check_trace_degree(self.nb, self.th).passed)
    control = check_trace_degree(self.nb, self.th, degree=0)
    self.assertEqual(control.name, "trace_degree_control")
    self.assertTrue(control.passed)
    self.assertGreater(control.value, 1e-3)

  def test_stokes(self):
    total, l2, l1 = divergence_integrals(self.nb)
    flux = boundary_fluxes(self.nb)
    np.testing.assert_allclose(total, flux, rtol=1e-8, atol=1e-10)
    self.assertTrue(np.all(l1 >= np.abs(total) - 1e-12))
    self.assertTrue(check_divergence(self.nb, self.th).passed)
    # internal functions carry no flux
    idx = self.nb.indices("internal")
    np.testing.assert_allclose(flux[idx], 0.0, atol=1e-8)

  def test_vertex_filter(self):
    cells = away_from_vertices(self.nb, 0.1)
    self.assertGreater(len(cells), 0)
    self.assertLess(len(cells), self.nb.space.mesh.n_triangles)

  def test_glue_partner(self):
    e, q = pick_glue_edge(NONAGON, self.nb.spec)
    i, j = shared_edge(NONAGON, q)
    self.assertEqual(i, e)
    self.assertAlmostEqual(q.area, NONAGON.area)   # reflection and shear keep the area
    r = make_glue_partner(NONAGON, 0, shear=0.0)
    self.assertAlmostEqual(r.area, NONAGON.area)

  def test_interface(self):
    _, q = pick_glue_edge(NONAGON, self.nb.spec)
    partner = build_element(q, ElementSpec(1, h_target=H))
    ok = check_interface_conformity(self.nb, partner, self.th)
    self.assertTrue(ok.passed, ok.value)
    control = check_interface_conformity(self.nb, partner, self.th, flip=False)
    self.assertEqual(control.name, "interface_mismatch_control")
    self.assertTrue(control.passed)
    self.assertAlmostEqual(control.value, 2.0, places=6)

  def test_configurable_tolerances(self):
    th = Thresholds(tol_block=1e-3, tol_linearity=1e-4)
    self.assertEqual(check_block_structure(self.nb, th).threshold, 1e-3)
    self.assertEqual(check_linearity(self.nb, th).threshold, 1e-4)
    self.assertTrue(check_block_structure(self.nb, self.th).passed)
    self.assertTrue(check_linearity(self.nb, self.th).passed)

  def test_scaling_flux_duals(self):
    nb = build_element(NONAGON, ElementSpec(0, h_target=H))
    r = check_scaling(nb, self.th)
    self.assertTrue(r.passed, r.details)
    # 1/|f| on edges of different length
    self.assertGreater(r.details["length_spread"], 0.01)
    self.assertGreater(r.details["spread"], 0.01)
    for row in r.details["per_edge"]: self.assertAlmostEqual(row["value"] * row["length"], 1.0, places=6)

  def test_scaling_point_duals(self):
    nb = build_element(NONAGON, ElementSpec(0, normal_config="ib", h_target=H))
    r = check_scaling(nb, self.th)
    self.assertTrue(r.passed, r.details)
    self.assertEqual({row["kind"] for row in r.details["per_edge"]}, {"PointNormalValue"})
    for row in r.details["per_edge"]: self.assertLess(abs(row["value"] - 1.0), 1e-6)
    self.assertLess(r.details["spread"], 1e-6)

  def test_scaling_equal_edges(self):
    # a regular hexagon has one edge length, so no spread is asked for
    a = 0.1 + np.arange(6) * np.pi / 3
    hexagon = load_polygon(np.stack([3 + np.cos(a), 2 + np.sin(a)], 1).tolist())
    nb = build_element(hexagon, ElementSpec(0, h_target=hexagon.diameter / 4))
    r = check_scaling(nb, self.th)
    self.assertTrue(r.passed, r.details)
    self.assertLess(r.details["length_spread"], 1e-9)
    self.assertLess(r.details["spread"], 1e-5)

  def test_interface_levels(self):
    r = helper_test_interface(ElementSpec(0, h_target=H), refine=True)
    self.assertEqual(len(r.refinement), 2)
    self.assertLess(r.refinement[1][0], r.refinement[0][0])

  def test_interface_orders_and_settings(self):
    for spec in (ElementSpec.reduced(0), ElementSpec(2, normal_config="ib"), ElementSpec.reduced(2)):
      helper_test_interface(spec.replace(h_target=H))

  def test_rt_oracle(self):
    for k in range(2):
      r = check_rt_oracle(k, self.th)
      self.assertTrue(r.passed, r.details)
      self.assertEqual(r.details["dimension"], (k+1)*(k+3))

class TestSuite(unittest.TestCase):
  def test_registry(self):
    for name in ("dimensions", "kronecker", "internal_vanishing", "trace_degree", "degeneration", "divergence", "interface"):
      self.assertIn(name, CHECKS)

  def test_general(self):
    report = helper_test_suite(ElementSpec(1, h_target=H))
    self.assertTrue(report.passed)
    self.assertEqual(report["dimensions"].details["formula"], 39)
    self.assertEqual(report["degeneration"].value, 18)
    self.assertIn("kronecker", report.table())
    with tempfile.TemporaryDirectory() as d:
      doc = load_document(dump_document(report.to_document(), os.path.join(d, "report.json")))
    self.assertTrue(doc["passed"])
    self.assertEqual(doc["thresholds"]["tol_kron"], 1e-6)

  def test_default_levels(self):
    self.assertEqual(inspect.signature(run_suite).parameters["levels"].default, 3)

  def test_lowest_order(self):
    report = helper_test_suite(ElementSpec(0, h_target=H))
    self.assertTrue(report["interface_conformity"].passed)
    self.assertGreater(report["scaling"].details["spread"], 0.01)

  def test_reduced(self):
    report = helper_test_suite(ElementSpec.reduced(1, normal_config="ib", h_target=H))
    self.assertEqual(report["dimensions"].details["closed_form"], 17)
    self.assertEqual(report["degeneration"].value, 0)

  def test_reduced_dimension_on_triangle(self):
    tri = load_polygon([(1.0, 0.5), (3.0, 1.0), (1.5, 2.5)])
    nb = build_element(tri, ElementSpec.reduced(1, h_target=tri.diameter / 4))
    r = check_dimensions(nb, Thresholds())
    # judged on the constructed rank, the closed form is only reported
    self.assertTrue(r.passed, r.details)
    self.assertEqual(r.value, 11)
    self.assertEqual((r.details["closed_form"], r.details["overshoot"]), (5, 6))
    self.assertTrue(r.details["discrepancy"])

  def test_inadmissible(self):
    report = run_suite(SQUARE, ElementSpec(1, h_target=0.5), levels=1)
    self.assertFalse(report.passed)
    self.assertEqual(report.errors[0]["kind"], "AdmissibilityError")

  @unittest.skipUnless(os.getenv("SLOW"), "refinement study")
  def test_refinement(self):
    for spec in (ElementSpec(1), ElementSpec(2), ElementSpec(1, normal_config="ib"), ElementSpec.reduced(1)):
      report = helper_test_suite(spec, levels=3, compare_projectors=True, rt_oracle=True)
      self.assertIsNotNone(report["kronecker"].refinement)
      headers, rows = report.refinement_rows()
      self.assertEqual(len(rows), 3)
      self.assertIn("interface_conformity", headers)
      self.assertLessEqual(report.condition_numbers["hermite"], report.condition_numbers["monomial"])

if __name__ == '__main__':
  unittest.main()
