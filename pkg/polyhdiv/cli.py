#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# python -m polyhdiv {build,verify,trace,export}

import sys, json, pathlib, argparse
import numpy as np
from polyhdiv.errors import PolyhdivError, UsageError, INPUT_ERRORS
from polyhdiv.element import build_element, save_element, load_element, normal_trace
from polyhdiv.geometry import load_polygon
from polyhdiv.hkspace import ElementSpec
from polyhdiv.utils import dump_document, write_csv, to_jsonable
from polyhdiv.verify import Thresholds, run_suite

TRACE_COLUMNS = ["edge", "t", "x", "y", "phi_1", "phi_2", "phi_dot_n"]
FIELD_COLUMNS = ["x", "y", "phi_1", "phi_2", "div_phi"]

PLOT_SCRIPT = '''# plots the normal traces written by `python -m polyhdiv trace`
import sys, glob
import numpy as np
import matplotlib.pyplot as plt

files = sys.argv[1:] or sorted(glob.glob("trace_dof*.csv"))
for f in files:
  d = np.genfromtxt(f, delimiter=",", names=True)
  for e in np.unique(d["edge"]):
    m = d["edge"] == e
    plt.plot(d["t"][m] + e, d["phi_dot_n"][m], label=f"{f} edge {int(e)}")
plt.axhline(0, color="k", lw=0.5)
plt.xlabel("edge index + t")
plt.ylabel("phi . n")
plt.show()
'''

class RunConfig:
  """
  everything one command needs, resolved from the command line
  """
  def __init__(self, args):
    self.command = args.command
    self.polygon_path = args.polygon
    self.out = pathlib.Path(args.out)
    self.seed = args.seed
    self.thresholds = Thresholds.from_document(args.thresholds) if getattr(args, "thresholds", None) else Thresholds()
    self.spec = ElementSpec(args.k, setting=args.setting, normal_config=args.config, projector=args.projector,
                            h_target=args.h_target, fe_order=args.fe_order)
    self.archive = pathlib.Path(getattr(args, "archive", None) or args.out)
    self.dof, self.edge = getattr(args, "dof", None), getattr(args, "edge", None)
    self.samples, self.plot = getattr(args, "samples", 33), getattr(args, "plot", False)
    self.levels = getattr(args, "levels", 3)
    self.glue, self.compare = not getattr(args, "no_glue", False), not getattr(args, "no_compare", False)
    self.rt_oracle = getattr(args, "rt_oracle", False)

  def polygon(self):
    if self.polygon_path is None: raise UsageError("--polygon is required")
    return load_polygon(self.polygon_path)

# ************ commands ************

def cmd_build(cfg):
  nb = build_element(cfg.polygon(), cfg.spec, tol_kron=cfg.thresholds.tol_kron, tol_zero=cfg.thresholds.tol_zero)
  save_element(nb, cfg.out)
  dims = nb.space.dimension_report()
  print(f"{len(nb)} basis functions, cond {nb.cond:.3e}, kronecker {nb.kronecker:.2e}")
  print(f"classification {nb.classification.counts}, effective internal {nb.classification.effective_internal}")
  if "closed_form" in dims:
    print(f"reduced dimension: constructed {dims['constructed']}, gram rank {dims['gram_rank']}, "
          f"closed form {dims['closed_form']}{' (differs)' if dims['discrepancy'] else ''}")
  print(f"wrote {cfg.out}")
  return 0

def cmd_verify(cfg):
  report = run_suite(cfg.polygon(), cfg.spec, cfg.thresholds, seed=cfg.seed, levels=cfg.levels,
                     glue=cfg.glue, compare_projectors=cfg.compare, rt_oracle=cfg.rt_oracle)
  print(report.table())
  if report.refinement_table(): print(report.refinement_table())
  dump_document(report.to_document(), cfg.out / "report.json")
  if report.errors:
    print(json.dumps(report.errors), file=sys.stderr)
    inputs = {c.__name__ for c in INPUT_ERRORS}
    return 2 if any(e["kind"] in inputs for e in report.errors) else 3
  return 0 if report.passed else 1

def _trace_rows(nb, i, edges, samples):
  t = np.linspace(0, 1, samples)
  rows = []
  for j in edges:
    e = nb.polygon.edges[j]
    X, v = e.point(t), nb.traces(j, t, [i])[0]
    vn = normal_trace(nb, i, j, t)
    rows += [(j, t[m], X[m, 0], X[m, 1], v[0, m], v[1, m], vn[m]) for m in range(samples)]
  return rows

def cmd_trace(cfg):
  nb, _ = load_element(cfg.archive)
  if cfg.dof is None and cfg.edge is None: raise UsageError("trace needs --dof or --edge")
  if cfg.edge is not None and not 0 <= cfg.edge < nb.polygon.n_faces:
    raise UsageError(f"edge {cfg.edge} out of range [0, {nb.polygon.n_faces})")
  if cfg.dof is not None and not 0 <= cfg.dof < len(nb): raise UsageError(f"dof {cfg.dof} out of range [0, {len(nb)})")
  if cfg.dof is not None:
    jobs = [(cfg.dof, range(nb.polygon.n_faces) if cfg.edge is None else [cfg.edge])]
  else:
    jobs = [(i, [cfg.edge]) for i in nb.dofs.indices(edge=cfg.edge)]
  for i, edges in jobs:
    path = write_csv(cfg.out / f"trace_dof{i}.csv", TRACE_COLUMNS, _trace_rows(nb, i, edges, cfg.samples))
    print(f"dof {i} ({nb.classification.labels[i]}): wrote {path}")
  if cfg.plot:
    (cfg.out / "plot_traces.py").write_text(PLOT_SCRIPT)
    print(f"wrote {cfg.out / 'plot_traces.py'}")
  return 0

def cmd_export(cfg):
  """
  one basis function at the sub-mesh vertices, divergence averaged over the incident cells
  """
  nb, _ = load_element(cfg.archive)
  if cfg.dof is None or not 0 <= cfg.dof < len(nb): raise UsageError(f"export needs --dof in [0, {len(nb)})")
  mesh = nb.space.mesh
  nv = len(mesh.nodes)
  phi = nb.node_values(np.arange(nv), [cfg.dof])[0]
  corners = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
  div = nb.cell_divergence(corners, idx=[cfg.dof])[0]
  tri = mesh.triangles.ravel()
  div = np.bincount(tri, weights=div.ravel(), minlength=nv) / np.bincount(tri, minlength=nv)
  rows = [(mesh.nodes[m, 0], mesh.nodes[m, 1], phi[0, m], phi[1, m], div[m]) for m in range(nv)]
  path = write_csv(cfg.out / f"field_dof{cfg.dof}.csv", FIELD_COLUMNS, rows)
  print(f"wrote {path}")
  return 0

COMMANDS = {}
def register(name, fxn):
  COMMANDS[name] = fxn

register("build", cmd_build)
register("verify", cmd_verify)
register("trace", cmd_trace)
register("export", cmd_export)

# ************ entry point ************

def parser():
  common = argparse.ArgumentParser(add_help=False)
  common.add_argument("--polygon", help="json document {\"vertices\": [[x, y], ...]}")
  common.add_argument("--k", type=int, default=1)
  common.add_argument("--setting", choices=["general", "reduced"], default="general")
  common.add_argument("--config", choices=["ia", "ib"], default="ia")
  common.add_argument("--projector", choices=["monomial", "orthogonal", "hermite"], default="hermite")
  common.add_argument("--h-target", type=float, default=None)
  common.add_argument("--fe-order", type=int, default=None)
  common.add_argument("--out", default="element")
  common.add_argument("--seed", type=int, default=1337)
  common.add_argument("--thresholds", default=None, help="json document overriding check thresholds")
  p = argparse.ArgumentParser(prog="polyhdiv", description="H(div) conforming elements on polygons")
  sub = p.add_subparsers(dest="command", required=True)
  sub.add_parser("build", parents=[common])
  v = sub.add_parser("verify", parents=[common])
  v.add_argument("--levels", type=int, default=3)
  v.add_argument("--no-glue", action="store_true")
  v.add_argument("--no-compare", action="store_true")
  v.add_argument("--rt-oracle", action="store_true")
  for name in ("trace", "export"):
    s = sub.add_parser(name, parents=[common])
    s.add_argument("--archive", default=None, help="directory written by build, defaults to --out")
    s.add_argument("--dof", type=int, default=None)
    if name == "trace":
      s.add_argument("--edge", type=int, default=None)
      s.add_argument("--samples", type=int, default=33)
      s.add_argument("--plot", action="store_true")
  return p

def main(argv=None):
  args = parser().parse_args(argv)
  try:
    return COMMANDS[args.command](RunConfig(args))
  except INPUT_ERRORS as e:
    print(json.dumps(e.to_record()), file=sys.stderr)
    return 2
  except PolyhdivError as e:
    print(json.dumps(e.to_record()), file=sys.stderr)
    return 3
  except Exception as e:
    print(json.dumps(to_jsonable({"kind": type(e).__name__, "message": str(e)})), file=sys.stderr)
    return 3
