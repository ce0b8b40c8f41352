import os
import json
import tempfile
import unittest
import numpy as np
from polyhdiv.cli import main, parser, RunConfig, TRACE_COLUMNS, FIELD_COLUMNS
from polyhdiv.geometry import ACCEPTANCE_NONAGON
from polyhdiv.utils import dump_document, load_document

def helper_test_run(argv, status):
  got = main(argv)
  assert got == status, f"{argv} exited {got}, expected {status}"

class TestCli(unittest.TestCase):
  @classmethod
  def setUpClass(cls):
    cls.tmp = tempfile.TemporaryDirectory()
    cls.dir = cls.tmp.name
    cls.nonagon = str(dump_document({"vertices": [list(v) for v in ACCEPTANCE_NONAGON]}, os.path.join(cls.dir, "nonagon.json")))
    cls.square = str(dump_document({"vertices": [[1, 1], [2, 1], [2, 2], [1, 2]]}, os.path.join(cls.dir, "square.json")))
    cls.archive = os.path.join(cls.dir, "element")
    helper_test_run(["build", "--polygon", cls.nonagon, "--k", "1", "--h-target", "0.8", "--out", cls.archive], 0)

  @classmethod
  def tearDownClass(cls):
    cls.tmp.cleanup()

  def test_config(self):
    args = parser().parse_args(["verify", "--polygon", "p.json", "--k", "2", "--config", "ib", "--no-glue"])
    cfg = RunConfig(args)
    self.assertEqual((cfg.spec.k, cfg.spec.normal_config), (2, "ib"))
    self.assertFalse(cfg.glue)
    self.assertTrue(cfg.compare)
    self.assertEqual(cfg.thresholds.tol_kron, 1e-6)
    self.assertEqual(cfg.levels, 3)

  def test_archive(self):
    meta = load_document(os.path.join(self.archive, "meta.json"))
    self.assertEqual(len(meta["dofs"]), 39)
    self.assertEqual(meta["arrays"]["transfer"], [39, 39])
    self.assertEqual(meta["classification"]["counts"]["degenerate-normal"], 18)

  def test_trace(self):
    out = os.path.join(self.dir, "traces")
    helper_test_run(["trace", "--archive", self.archive, "--dof", "3", "--samples", "9", "--out", out, "--plot"], 0)
    d = np.genfromtxt(os.path.join(out, "trace_dof3.csv"), delimiter=",", names=True)
    self.assertEqual(list(d.dtype.names), TRACE_COLUMNS)
    self.assertEqual(len(d), 9 * 9)
    self.assertTrue(os.path.exists(os.path.join(out, "plot_traces.py")))

  def test_trace_edge(self):
    out = os.path.join(self.dir, "edge_traces")
    helper_test_run(["trace", "--archive", self.archive, "--edge", "2", "--out", out], 0)
    self.assertEqual(len([f for f in os.listdir(out) if f.startswith("trace_dof")]), 4)

  def test_export(self):
    out = os.path.join(self.dir, "fields")
    helper_test_run(["export", "--archive", self.archive, "--dof", "0", "--out", out], 0)
    d = np.genfromtxt(os.path.join(out, "field_dof0.csv"), delimiter=",", names=True)
    self.assertEqual(list(d.dtype.names), FIELD_COLUMNS)
    self.assertTrue(np.all(np.isfinite(d["div_phi"])))

  def test_verify(self):
    out = os.path.join(self.dir, "verify")
    helper_test_run(["verify", "--polygon", self.nonagon, "--k", "0", "--h-target", "0.8", "--levels", "1",
                     "--no-glue", "--no-compare", "--out", out], 0)
    self.assertTrue(load_document(os.path.join(out, "report.json"))["passed"])

  def test_exit_codes(self):
    out = os.path.join(self.dir, "bad")
    # axis parallel edges with coordinate moments
    helper_test_run(["build", "--polygon", self.square, "--k", "1", "--out", out], 2)
    helper_test_run(["verify", "--polygon", self.square, "--k", "1", "--levels", "1", "--out", out], 2)
    helper_test_run(["build", "--polygon", os.path.join(self.dir, "missing.json"), "--out", out], 2)
    helper_test_run(["build", "--out", out], 2)
    helper_test_run(["build", "--polygon", self.nonagon, "--k", "-1", "--out", out], 2)
    helper_test_run(["trace", "--archive", self.archive, "--dof", "1000", "--out", out], 2)
    helper_test_run(["export", "--archive", self.archive, "--out", out], 2)

  def test_threshold_document(self):
    path = str(dump_document({"tol_bogus": 1.0}, os.path.join(self.dir, "th.json")))
    helper_test_run(["verify", "--polygon", self.nonagon, "--thresholds", path, "--out", self.dir], 2)

if __name__ == '__main__':
  unittest.main()
