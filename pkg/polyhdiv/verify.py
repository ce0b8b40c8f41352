#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# executable property checks on built elements, with refinement studies

import numpy as np
from tabulate import tabulate
from polyhdiv.errors import PolyhdivError, UsageError
from polyhdiv.dofs import make_dofs
from polyhdiv.element import assemble_transfer_matrix, build_nodal_basis, invert
from polyhdiv.geometry import load_polygon, check_admissibility, shared_edge
from polyhdiv.hkspace import Combination, build_space, dimension, reduced_dimension_formula, reduced_constructed_count
from polyhdiv.polyspace import edge_quadrature, triangle_quadrature
from polyhdiv.rtref import rt_nodal_basis, rt_compare_normal_traces
from polyhdiv.utils import debug, load_document, parallel_map, progress

# ************ configuration ************

class Thresholds:
  DEFAULTS = {"tol_kron": 1e-6, "tol_zero": 1e-4, "tol_vanish": 1e-6, "tol_trace": 1e-6, "tol_conformity": 1e-6,
              "tol_stokes": 1e-6, "tol_gram_rank": 1e-8, "cond_max": 1e10, "cond_singular": 1e12,
              "div_stability": 0.1, "refine_factor": 1.5, "round_off_floor": 1e-10,
              "degenerate_norm_ratio": 1e-3, "vertex_exclusion": 0.1, "min_spread": 0.01,
              "tol_block": 1e-9, "tol_linearity": 1e-10}

  def __init__(self, **overrides):
    unknown = set(overrides) - set(self.DEFAULTS)
    if unknown: raise UsageError(f"unknown thresholds {sorted(unknown)}")
    for k, v in dict(self.DEFAULTS, **overrides).items(): setattr(self, k, float(v))

  @staticmethod
  def from_document(source):
    d = load_document(source) if not isinstance(source, dict) else source
    return Thresholds(**d)

  def to_dict(self): return {k: getattr(self, k) for k in self.DEFAULTS}

class CheckResult:
  def __init__(self, name, value, threshold, passed, details=None, refinement=None):
    self.name, self.value, self.threshold = name, float(value), threshold
    self.passed, self.details, self.refinement = bool(passed), details or {}, refinement

  def to_dict(self):
    d = {"name": self.name, "value": self.value, "threshold": self.threshold, "passed": self.passed, "details": self.details}
    if self.refinement is not None: d["refinement"] = self.refinement
    return d

  def __repr__(self): return f"<{self.name} {'pass' if self.passed else 'FAIL'} {self.value:.3e}>"

def monotone(values, factor, floor):
  # each refinement divides the defect by factor, unless it already sits at round-off
  return all(b <= a / factor or b <= floor for a, b in zip(values, values[1:]))

# ************ individual checks ************

def _scale(nb): return nb.space.scale

def internal_defect(nb):
  idx = nb.indices("internal")
  if not idx: return 0.0
  fe, t = nb.space.fe, np.linspace(0, 1, 17)
  nodes = np.max(np.abs(nb.node_values(fe.boundary, idx)))
  traces = max(np.max(np.abs(nb.traces(e.index, t, idx))) for e in nb.polygon.edges)
  return float(max(nodes, traces) / _scale(nb))

def check_internal_vanishing(nb, th, refined=()):
  vals = [internal_defect(b) for b in (nb,) + tuple(refined)]
  ok = vals[0] <= th.tol_vanish and monotone(vals, 2.0, th.round_off_floor)
  return CheckResult("internal_vanishing", vals[0], th.tol_vanish, ok, {"internal": len(nb.indices("internal"))},
                     [[b.space.mesh.h, v] for b, v in zip((nb,) + tuple(refined), vals)] if refined else None)

def _fit_residual(y, degree):
  # relative least squares residual of rows of y against polynomials of degree in s = 2t - 1
  if degree < 0: return np.ones(len(y))
  s = np.linspace(-1, 1, y.shape[1])
  V = np.polynomial.polynomial.polyvander(s, degree)
  coef, *_ = np.linalg.lstsq(V, y.T, rcond=None)
  return np.linalg.norm(V @ coef - y.T, axis=0) / np.maximum(np.linalg.norm(y, axis=1), 1e-300)

def trace_degree_residual(nb, degree, th, samples=33):
  t = np.linspace(0, 1, samples)
  worst = 0.0
  for e in nb.polygon.edges:
    y = nb.normal_traces(e.index, t)
    live = np.max(np.abs(y), axis=1) > th.round_off_floor * _scale(nb)
    if np.any(live): worst = max(worst, float(np.max(_fit_residual(y[live], degree))))
  return worst

def check_trace_degree(nb, th, degree=None):
  spec = nb.spec
  deg = max(spec.l1, spec.l2) if degree is None else degree
  r = trace_degree_residual(nb, deg, th)
  if degree is None:
    return CheckResult("trace_degree", r, th.tol_trace, r <= th.tol_trace, {"degree": deg})
  # negative control: a lower degree must leave genuine content unexplained
  return CheckResult("trace_degree_control", r, th.tol_trace, r > th.tol_trace, {"degree": deg})

def check_trace_span(nb, th, samples=33):
  """
  the normal duals of each edge span all polynomials of degree l2 on that edge
  """
  t, s = np.linspace(0, 1, samples), np.linspace(-1, 1, samples)
  want = nb.spec.l2 + 1
  V = np.polynomial.polynomial.polyvander(s, nb.spec.l2)
  ranks = []
  for e in nb.polygon.edges:
    idx = [i for i in nb.dofs.indices(edge=e.index) if nb.classification.labels[i] == "normal"]
    y = nb.normal_traces(e.index, t, idx)
    coef, *_ = np.linalg.lstsq(V, y.T, rcond=None)
    sv = np.linalg.svd(coef, compute_uv=False)
    ranks.append(int(np.sum(sv > 1e-8 * sv.max())) if sv.size and sv.max() > 0 else 0)
  return CheckResult("trace_span", min(ranks), want, all(r == want for r in ranks), {"ranks": ranks})

def expected_degenerate(spec):
  return 2 if (not spec.reduced_setting and spec.l1 == 0 and spec.l2 >= 0) else 0

def interior_norms(nb, idx):
  fe = nb.space.fe
  rule = triangle_quadrature(2 * fe.r + 2)
  V = nb.cell_values(rule.points, idx=idx)
  return np.sqrt(np.einsum('jcxq,xq->j', V**2, fe.weights(rule)))

def check_degeneration(nb, th):
  want = expected_degenerate(nb.spec)
  per_edge = [e["degenerate-normal"] for e in nb.classification.per_edge]
  deg, normal = nb.indices("degenerate-normal"), nb.indices("normal")
  ratio = np.inf
  if deg and normal:
    ratio = float(np.min(interior_norms(nb, deg)) / np.median(interior_norms(nb, normal)))
  ok = all(c == want for c in per_edge) and ratio >= th.degenerate_norm_ratio
  return CheckResult("degeneration", sum(per_edge), want * nb.polygon.n_faces, ok,
                     {"per_edge": per_edge, "expected_per_edge": want, "interior_norm_ratio": ratio,
                      "effective_internal": nb.classification.effective_internal})

def check_scaling(nb, th, samples=9):
  """
  the low order dual of each edge has a constant normal trace: 1 for a point value,
  1/|f| for the constant moment
  """
  t = np.linspace(0, 1, samples)
  rows, skipped, worst = [], [], 0.0
  for e in nb.polygon.edges:
    low = [i for i in nb.dofs.indices(edge=e.index) if low_order_dof(nb.dofs[i])]
    if not low:
      skipped.append(e.index)
      continue
    i = low[-1]
    v = nb.normal_traces(e.index, t, [i])[0]
    point = nb.dofs[i].kind == "PointNormalValue"
    want = 1.0 if point else 1.0 / e.length
    dev = max(abs(v.mean() - want), float(np.max(np.abs(v - v.mean())))) / want
    worst = max(worst, dev)
    rows.append({"edge": e.index, "length": e.length, "kind": nb.dofs[i].kind, "value": float(v.mean()), "expected": want})
  details = {"per_edge": rows, "skipped_edges": skipped}
  if not rows: return CheckResult("scaling", 0.0, th.tol_trace, True, details)
  details["spread"] = _spread([r["value"] for r in rows])
  ok = worst <= th.tol_trace
  # flux duals follow 1/|f|, so edges of different length must give different values
  moments = [r for r in rows if r["kind"] == "GlobalNormalMoment"]
  details["length_spread"] = _spread([1.0 / r["length"] for r in moments]) if moments else 0.0
  if moments and details["length_spread"] > th.min_spread:
    ok = ok and _spread([r["value"] for r in moments]) > th.min_spread
  return CheckResult("scaling", worst, th.tol_trace, ok, details)

def _spread(vals):
  return float((max(vals) - min(vals)) / abs(np.mean(vals)))

def low_order_dof(d):
  if d.kind == "PointNormalValue": return True
  return d.kind == "GlobalNormalMoment" and d.kernel.degree == 0

def check_kronecker(nb, th, refined=()):
  vals = [b.kronecker for b in (nb,) + tuple(refined)]
  ok = vals[0] <= th.tol_kron and monotone(vals, th.refine_factor, th.round_off_floor)
  return CheckResult("kronecker", vals[0], th.tol_kron, ok, {},
                     [[b.space.mesh.h, v] for b, v in zip((nb,) + tuple(refined), vals)] if refined else None)

def check_unisolvence(nb, th):
  return CheckResult("unisolvence", nb.cond, th.cond_max, nb.cond < th.cond_max)

def check_dimensions(nb, th):
  spec, space, n = nb.spec, nb.space, nb.polygon.n_faces
  details = {"generators": len(space), "dofs": len(nb.dofs), "gram_rank": space.gram_rank, "blocks": space.block_counts()}
  if spec.reduced_setting:
    want = reduced_constructed_count(n, spec.k)
    details["closed_form"] = reduced_dimension_formula(n, spec.k)
    details["discrepancy"] = details["closed_form"] != space.gram_rank
    details["overshoot"] = space.gram_rank - details["closed_form"]
  else:
    want = dimension(spec, n)
    details["formula"] = want
  ok = len(space) == len(nb.dofs) == space.gram_rank == want
  return CheckResult("dimensions", space.gram_rank, want, ok, details)

def check_block_structure(nb, th):
  """
  boundary functionals see nothing of the interior generators
  """
  T = nb.transfer.matrix
  rows = [i for i, d in enumerate(nb.dofs) if d.kind != "InternalMoment"]
  cols = [j for j, g in enumerate(nb.space.generators) if g.block in ("A-int", "B-int")]
  if not rows or not cols: return CheckResult("block_structure", 0.0, th.tol_block, True)
  B = np.abs(T[np.ix_(rows, cols)]) / np.maximum(np.max(np.abs(T[rows]), axis=1, keepdims=True), 1e-300)
  v = float(B.max())
  return CheckResult("block_structure", v, th.tol_block, v <= th.tol_block)

def check_edge_locality(nb, th, edge=0, factor=2.0):
  """
  rescaling the global moment kernels of one edge leaves every other dual unchanged
  """
  dofs = nb.dofs.scaled_edge(edge, factor)
  T = np.array(nb.transfer.matrix)
  rows = nb.dofs.indices(kind="GlobalNormalMoment", edge=edge)
  for i in rows: T[i] = [dofs[i](g) for g in nb.space.generators]
  C = invert(T)
  others = [j for j in range(len(nb)) if j not in rows]
  ref = np.maximum(np.max(np.abs(nb.coeffs[:, others]), axis=0), 1e-300)
  v = float(np.max(np.max(np.abs(C[:, others] - nb.coeffs[:, others]), axis=0) / ref))
  tol = max(th.round_off_floor, 10 * nb.cond * np.finfo(float).eps)
  return CheckResult("edge_locality", v, tol, v <= tol, {"edge": edge, "factor": factor})

def check_linearity(nb, th, seed=1337):
  rng = np.random.RandomState(seed)
  i, j = rng.choice(len(nb.space), 2, replace=False)
  a, b = rng.randn(2)
  g, h = nb.space.generators[i], nb.space.generators[j]
  sq, sg, sh = nb.dofs.evaluate(Combination([g, h], [a, b])), nb.dofs.evaluate(g), nb.dofs.evaluate(h)
  den = abs(a) * np.max(np.abs(sg)) + abs(b) * np.max(np.abs(sh))
  v = float(np.max(np.abs(sq - a*sg - b*sh)) / den)
  return CheckResult("linearity", v, th.tol_linearity, v <= th.tol_linearity,
                     {"generators": [int(i), int(j)], "a": float(a), "b": float(b)})

def boundary_fluxes(nb, idx=None):
  """
  int over the sub-mesh boundary of phi.n with the FE boundary values
  """
  mesh, fe = nb.space.mesh, nb.space.fe
  rule = edge_quadrature(fe.r + 1)
  a, b = mesh.nodes[mesh.facets[:, 0]], mesh.nodes[mesh.facets[:, 1]]
  s = (rule.points[:, 0] + 1) / 2
  pts = (a[:, None, :] + s[None, :, None] * (b - a)[:, None, :]).reshape(-1, 2)
  w = (np.hypot(*(b - a).T)[:, None] * rule.weights[None, :] / 2).ravel()
  normals = np.repeat(np.array([nb.polygon.edges[e].normal for e in mesh.facet_edge]), len(s), axis=0)
  vals = nb.evaluate(pts, idx)
  return np.einsum('jcm,mc,m->j', vals, normals, w)

def divergence_integrals(nb, idx=None, cells=None):
  fe = nb.space.fe
  rule = triangle_quadrature(fe.r + 1)
  D = nb.cell_divergence(rule.points, cells, idx)
  w = fe.weights(rule, cells)
  return np.einsum('jxq,xq->j', D, w), np.sqrt(np.einsum('jxq,xq->j', D**2, w)), np.einsum('jxq,xq->j', np.abs(D), w)

def away_from_vertices(nb, fraction):
  mesh, p = nb.space.mesh, nb.polygon
  c = mesh.nodes[mesh.triangles].mean(axis=1)
  d = np.min(np.hypot(*(c[:, None, :] - p.vertices[None, :, :]).transpose(2, 0, 1)), axis=1)
  return np.nonzero(d > fraction * p.diameter)[0]

def check_divergence(nb, th, refined=()):
  """
  discrete divergence theorem for every dual, and stability of ||div phi|| away from the
  polygon vertices under refinement
  """
  total, _, mass = divergence_integrals(nb)
  flux = boundary_fluxes(nb)
  stokes = float(np.max(np.abs(total - flux) / np.maximum(mass + np.abs(flux), 1e-300)))
  details = {"stokes": stokes}
  internal = nb.indices("internal")
  if internal: details["internal_flux"] = float(np.max(np.abs(flux[internal])) / _scale(nb))
  ok = stokes <= th.tol_stokes
  table = None
  if refined:
    norms = [divergence_integrals(b, cells=away_from_vertices(b, th.vertex_exclusion))[1] for b in (nb,) + tuple(refined)]
    live = norms[0] > 1e-6 * np.max(norms[0])
    drift = [float(np.max(np.abs(m[live] - n[live]) / n[live])) for n, m in zip(norms, norms[1:])]
    details["drift"] = drift
    ok = ok and all(d <= th.div_stability for d in drift)
    table = [[b.space.mesh.h, float(np.max(n))] for b, n in zip((nb,) + tuple(refined), norms)]
  return CheckResult("divergence", stokes, th.tol_stokes, ok, details, table)

# ************ two cell conformity ************

def make_glue_partner(p, edge, shear=0.35):
  """
  reflection of p across one of its edges followed by a shear along that edge,
  the shared edge keeps its endpoints
  """
  e = p.edges[edge]
  V = np.array(p.vertices)
  R = V - 2 * ((V - e.start) @ e.normal)[:, None] * e.normal
  S = R + shear * ((R - e.start) @ e.normal)[:, None] * e.tangent
  S[edge], S[(edge + 1) % len(S)] = e.start, e.end
  return load_polygon(S[::-1].tolist())

def pick_glue_edge(p, spec):
  for e in p.edges:
    q = make_glue_partner(p, e.index)
    adm = check_admissibility(q)
    if adm.ok_for_radial_block and (spec.reduced_setting or spec.l1 < 0 or adm.ok_for_coordinate_dofs):
      return e.index, q
  raise UsageError("no edge gives an admissible glue partner")

def interface_jump(nb1, nb2, flip=True, samples=33):
  e1, e2 = shared_edge(nb1.polygon, nb2.polygon)
  t = np.linspace(0, 1, samples)
  idx = nb1.dofs.indices(edge=e1)
  flux_rows = [j for j in nb2.dofs.indices(edge=e2) if nb2.dofs[j].flux_only]
  G = nb1.normal_traces(e1, t, idx)
  top = np.max(np.abs(G)) if G.size else 0.0
  sign = -1.0 if flip else 1.0
  worst, rows = 0.0, []
  for a, i in enumerate(idx):
    if np.max(np.abs(G[a])) <= 1e-8 * top: continue   # degenerate dual, nothing to transmit
    g = lambda s, i=i: nb1.normal_traces(e1, s, [i])[0]
    vals = np.zeros(len(nb2))
    for j in flux_rows: vals[j] = nb2.dofs[j].apply_flux(lambda s: sign * g(1 - s))
    psi = vals @ nb2.normal_traces(e2, 1 - t)
    jump = float(np.max(np.abs(G[a] + psi)) / np.max(np.abs(G[a])))
    rows.append({"dof": i, "jump": jump})
    worst = max(worst, jump)
  return worst, rows

def check_interface_conformity(nb1, nb2, th, flip=True, refined=()):
  """
  refined holds (element, partner) pairs built on the finer sub-meshes
  """
  v, rows = interface_jump(nb1, nb2, flip)
  if flip:
    vals = [v] + [interface_jump(a, b)[0] for a, b in refined]
    ok = all(j <= th.tol_conformity for j in vals) and monotone(vals, th.refine_factor, th.round_off_floor)
    table = [[a.space.mesh.h, j] for a, j in zip((nb1,) + tuple(a for a, _ in refined), vals)] if refined else None
    return CheckResult("interface_conformity", v, th.tol_conformity, ok, {"per_dof": rows}, table)
  return CheckResult("interface_mismatch_control", v, 0.1, v > 0.1, {"per_dof": rows})

def check_conditioning(builds, th):
  conds = {kind: nb.cond for kind, nb in builds.items()}
  ok = conds["hermite"] <= conds["monomial"] * (1 + 1e-9)
  return CheckResult("conditioning", conds["hermite"], conds["monomial"], ok, {"condition_numbers": conds})

def check_rt_oracle(k, th):
  nb = rt_nodal_basis(k)
  cmp = rt_compare_normal_traces(k)
  vals = {"kronecker": nb.kronecker, "internal_trace": nb.internal_trace_defect(),
          "divergence_excess": nb.divergence_excess(), "trace_fit": nb.trace_fit_residual()}
  v = max(vals.values())
  return CheckResult(f"rt_oracle_k{k}", v, 1e-12, v <= 1e-12 and cmp["passed"] and len(nb) == (k+1)*(k+3),
                     dict(vals, dimension=len(nb), comparison=cmp["per_edge"]))

# ************ suite ************

CHECKS = {}
def register(name, fxn):
  CHECKS[name] = fxn

register("dimensions", lambda ctx: check_dimensions(ctx.nb, ctx.th))
register("unisolvence", lambda ctx: check_unisolvence(ctx.nb, ctx.th))
register("kronecker", lambda ctx: check_kronecker(ctx.nb, ctx.th, ctx.refined))
register("internal_vanishing", lambda ctx: check_internal_vanishing(ctx.nb, ctx.th, ctx.refined))
register("trace_degree", lambda ctx: check_trace_degree(ctx.nb, ctx.th))
register("trace_degree_control", lambda ctx: check_trace_degree(ctx.nb, ctx.th, max(ctx.spec.l1, ctx.spec.l2) - 1))
register("trace_span", lambda ctx: check_trace_span(ctx.nb, ctx.th))
register("degeneration", lambda ctx: check_degeneration(ctx.nb, ctx.th))
register("scaling", lambda ctx: check_scaling(ctx.nb, ctx.th))
register("block_structure", lambda ctx: check_block_structure(ctx.nb, ctx.th))
register("edge_locality", lambda ctx: check_edge_locality(ctx.nb, ctx.th))
register("linearity", lambda ctx: check_linearity(ctx.nb, ctx.th, ctx.seed))
register("divergence", lambda ctx: check_divergence(ctx.nb, ctx.th, ctx.refined))
register("interface", lambda ctx: [check_interface_conformity(ctx.nb, ctx.partners[0], ctx.th, refined=tuple(zip(ctx.refined, ctx.partners[1:]))),
                                   check_interface_conformity(ctx.nb, ctx.partners[0], ctx.th, flip=False)] if ctx.partners else [])
register("conditioning", lambda ctx: check_conditioning(ctx.projectors, ctx.th) if ctx.projectors else [])

class SuiteContext:
  def __init__(self, p, spec, th, seed, nb, refined, partners, projectors):
    self.p, self.spec, self.th, self.seed = p, spec, th, seed
    self.nb, self.refined, self.partners, self.projectors = nb, tuple(refined), list(partners or []), projectors

class VerificationReport:
  def __init__(self, polygon, spec, thresholds):
    self.polygon, self.spec, self.thresholds = polygon, spec, thresholds
    self.results, self.errors = [], []
    self.condition_numbers = {}

  def add(self, result):
    self.results += result if isinstance(result, list) else [result]

  def __getitem__(self, name):
    for r in self.results:
      if r.name == name: return r
    raise KeyError(name)

  @property
  def passed(self): return not self.errors and all(r.passed for r in self.results)

  def table(self):
    rows = [[r.name, f"{r.value:.3e}", r.threshold if isinstance(r.threshold, int) else f"{float(r.threshold):.1e}",
             "pass" if r.passed else "FAIL"] for r in self.results]
    rows += [[e["kind"], "-", "-", "ERROR"] for e in self.errors]
    return tabulate(rows, headers=["check", "value", "threshold", "result"])

  def refinement_rows(self):
    """
    one row per sub-mesh level: h, then the value of every check with a refinement study
    """
    cols = [r for r in self.results if r.refinement]
    if not cols: return [], []
    rows = [[h] + [r.refinement[i][1] for r in cols] for i, (h, _) in enumerate(cols[0].refinement)]
    return ["h"] + [r.name for r in cols], rows

  def refinement_table(self):
    headers, rows = self.refinement_rows()
    return tabulate(rows, headers=headers, floatfmt=".3e") if rows else ""

  def to_document(self):
    return {"polygon": self.polygon.to_document(), "spec": self.spec.to_dict(), "thresholds": self.thresholds.to_dict(),
            "checks": [r.to_dict() for r in self.results], "errors": self.errors,
            "condition_numbers": self.condition_numbers,
            "refinement": dict(zip(("columns", "rows"), self.refinement_rows())), "passed": self.passed}

def _element(p, spec, th):
  dofs = make_dofs(p, spec)
  tm = assemble_transfer_matrix(build_space(p, spec), dofs)
  # kronecker is judged by its own check, not at build time
  return build_nodal_basis(tm, tol_kron=np.inf, tol_zero=th.tol_zero, cond_singular=th.cond_singular)

def run_suite(p, spec, thresholds=None, seed=1337, levels=3, glue=True, compare_projectors=True, rt_oracle=False):
  """
  builds the element at `levels` resolutions h, h/2, ... and runs every registered check;
  failures, including errors raised while building, are recorded in the report
  """
  th = thresholds or Thresholds()
  report = VerificationReport(p, spec, th)
  h0 = spec.resolve_h(p)
  try:
    specs = [spec.replace(h_target=h0 / 2**i) for i in range(max(1, levels))]
    builds = parallel_map(lambda s: _element(p, s, th), progress(specs, desc="levels", total=len(specs)))
    partners = projectors = None
    if glue:
      # the partner is refined with the element so the jump is reported per level
      _, q = pick_glue_edge(p, spec)
      partners = parallel_map(lambda s: _element(q, s, th), specs)
    if compare_projectors and spec.k >= 1:
      projectors = {spec.projector: builds[0]}
      for kind in ("hermite", "monomial"):
        if kind not in projectors: projectors[kind] = _element(p, specs[0].replace(projector=kind), th)
      report.condition_numbers = {k: v.cond for k, v in projectors.items()}
  except PolyhdivError as e:
    report.errors.append(e.to_record())
    return report
  report.condition_numbers.setdefault(spec.projector, builds[0].cond)
  ctx = SuiteContext(p, spec, th, seed, builds[0], builds[1:], partners, projectors)
  for name, fxn in CHECKS.items():
    try:
      report.add(fxn(ctx))
    except PolyhdivError as e:
      report.errors.append(dict(e.to_record(), check=name))
  if rt_oracle:
    for k in range(3): report.add(check_rt_oracle(k, th))
  debug(f"suite on {p}: {'pass' if report.passed else 'FAIL'}", 1)
  return report
