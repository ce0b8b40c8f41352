#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# H_k(K) = (A_k)^2 + x.B_k, generators from poisson problems

import numpy as np
from polyhdiv.errors import AdmissibilityError, SpaceRankError, UsageError
from polyhdiv.geometry import check_admissibility, triangulate
from polyhdiv.polyspace import monomial_basis, projector_basis, triangle_quadrature, EdgePolynomial, Monomial2D
from polyhdiv.poisson import PoissonProblem, DiscreteField, fe_space
from polyhdiv.utils import debug, warn

SETTINGS = ("general", "reduced")
CONFIGS = ("ia", "ib")
PROJECTOR_KINDS = ("monomial", "orthogonal", "hermite")
BLOCKS = ("A-bnd", "A-int", "B-bnd", "B-int")

# ************ element description ************

class ElementSpec:
  """
  order k, coefficients (l1, l2, m1, m2), setting, normal dof configuration, projector
  kind and sub-mesh resolution. general series: (0, k, k-1, k-1)
  """
  def __init__(self, k, l1=None, l2=None, m1=None, m2=None, setting="general", normal_config="ia",
               projector="hermite", h_target=None, fe_order=None):
    if int(k) < 0: raise UsageError(f"order must be >= 0, got {k}")
    if setting not in SETTINGS: raise UsageError(f"setting must be one of {SETTINGS}, got {setting}")
    if normal_config not in CONFIGS: raise UsageError(f"normal config must be one of {CONFIGS}, got {normal_config}")
    if projector not in PROJECTOR_KINDS: raise UsageError(f"projector must be one of {PROJECTOR_KINDS}, got {projector}")
    self.k = k = int(k)
    self.l1 = 0 if l1 is None else int(l1)
    self.l2 = k if l2 is None else int(l2)
    self.m1 = k-1 if m1 is None else int(m1)
    self.m2 = k-1 if m2 is None else int(m2)
    self.setting, self.normal_config, self.projector = setting, normal_config, projector
    self.h_target = None if h_target is None else float(h_target)
    self.fe_order = None if fe_order is None else int(fe_order)

  @staticmethod
  def general(k, **kwargs): return ElementSpec(k, setting="general", **kwargs)

  @staticmethod
  def reduced(k, **kwargs): return ElementSpec(k, setting="reduced", **kwargs)

  @property
  def coefficients(self): return (self.l1, self.l2, self.m1, self.m2)

  @property
  def reduced_setting(self): return self.setting == "reduced"

  def resolve_h(self, polygon):
    return self.h_target if self.h_target is not None else polygon.diameter / 16

  def resolve_r(self):
    return self.fe_order if self.fe_order is not None else max(2, self.k + 1)

  def replace(self, **kwargs):
    d = self.to_dict()
    d.update(kwargs)
    return ElementSpec(**d)

  def to_dict(self):
    return {"k": self.k, "l1": self.l1, "l2": self.l2, "m1": self.m1, "m2": self.m2, "setting": self.setting,
            "normal_config": self.normal_config, "projector": self.projector, "h_target": self.h_target,
            "fe_order": self.fe_order}

  @staticmethod
  def from_dict(d):
    keys = ("k", "l1", "l2", "m1", "m2", "setting", "normal_config", "projector", "h_target", "fe_order")
    return ElementSpec(**{k: d[k] for k in keys if k in d})

  def __repr__(self):
    return f"ElementSpec(k={self.k}, coefficients={self.coefficients}, {self.setting}, {self.normal_config}, {self.projector})"

def coefficient_violations(spec):
  l1, l2, m1, m2 = spec.coefficients
  out = []
  if min(spec.coefficients) < -1: out.append(f"coefficients must be >= -1, got {spec.coefficients}")
  if l2 >= l1 and l1 > 0: out.append(f"coefficient conditions: l1^(d-1) <= 0 fails for l1 = {l1}")
  if l2 < l1 and l2 != -1: out.append(f"coefficient conditions: l2 = -1 required when l2 < l1, got l2 = {l2}")
  if spec.reduced_setting and spec.coefficients != (0, spec.k, spec.k-1, spec.k-1):
    out.append(f"reduced setting fixes (l1, l2, m1, m2) = (0, k, k-1, k-1), got {spec.coefficients}")
  return out

def _exact_count(m):
  # (m+1)^2 - m^2, no contribution from the empty space
  return (m+1)**2 - m**2 if m >= 0 else 0

def dimension(spec, n_faces):
  if spec.reduced_setting: raise AdmissibilityError("dimension() follows the general setting, see reduced_dimension_formula")
  v = coefficient_violations(spec)
  if v: raise AdmissibilityError("; ".join(v))
  if spec.l1 > 0: raise AdmissibilityError(f"the direct sum dimension needs l1 <= 0, got {spec.l1}")
  l1, l2, m1, m2 = spec.coefficients
  return n_faces * (2*(l1+1) + (l2+1)) + 2*(m1+1)**2 + _exact_count(m2)

def boundary_trace_dimension(spec):
  l1, l2 = spec.l1, spec.l2
  if l1 == -1: return l2 + 1
  if l2 >= l1: return 2*(l1+1) + (l2+1) - l1
  return 2*(l1+1)

def reduced_dimension_formula(n_faces, k):
  # closed form quoted for the reduced setting, reported next to the constructed rank
  return n_faces*(k+1) + 2*k*(k-1) - (1 if k > 0 else 0)

def reduced_constructed_count(n_faces, k):
  return 2 + 2*k**2 + n_faces*(k+1) + _exact_count(k-1)

def internal_dimension(spec):
  return 2*(spec.m1+1)**2 + _exact_count(spec.m2)

# ************ vector fields ************

class VectorField:
  """
  anything the degrees of freedom can act on: exact traces along polygon edges and
  values/divergence at reference points of every sub-mesh cell
  """
  polygon, fe = None, None

  @property
  def mesh(self): return self.fe.mesh

  def trace(self, edge, t): raise NotImplementedError
  def cell_values(self, ref_pts, cells=None): raise NotImplementedError
  def cell_divergence(self, ref_pts, cells=None): raise NotImplementedError
  def evaluate(self, pts): raise NotImplementedError

  def normal_trace(self, edge, t):
    return self.polygon.edges[edge].normal @ self.trace(edge, t)

class Generator(VectorField):
  """
  e_i * u (component i) or x * u (component None) for one solved poisson field u
  """
  def __init__(self, field, block, component, polygon, edge=None, poly=None, monomial=None):
    self.field, self.block, self.component = field, block, component
    self.polygon, self.fe = polygon, field.fe
    self.edge, self.poly, self.monomial = edge, poly, monomial

  def _lift(self, u, X):
    if self.component is None: return np.moveaxis(X, -1, 0) * u
    out = np.zeros((2,) + np.shape(u))
    out[self.component] = u
    return out

  def trace(self, edge, t):
    t = np.asarray(t, dtype=float)
    return self._lift(self.field.trace_on_edge(edge, t), self.polygon.edges[edge].point(t))

  def cell_values(self, ref_pts, cells=None):
    return self._lift(self.field.cell_values(ref_pts, cells), self.fe.physical_points(ref_pts, cells))

  def cell_divergence(self, ref_pts, cells=None):
    g = self.field.cell_gradients(ref_pts, cells)
    if self.component is not None: return g[..., self.component]
    X = self.fe.physical_points(ref_pts, cells)
    return 2 * self.field.cell_values(ref_pts, cells) + np.sum(X * g, axis=-1)

  def evaluate(self, pts):
    pts = np.atleast_2d(pts)
    return self._lift(self.field.evaluate(pts), pts)

  def node_values(self, idx):
    # at FE nodes, (2, len(idx))
    return self._lift(self.field.values[idx], self.fe.coords[idx])

  def to_dict(self):
    return {"block": self.block, "component": self.component, "edge": self.edge,
            "edge_poly_coef_s": None if self.poly is None else self.poly.coef.tolist(),
            "edge_poly_kind": None if self.poly is None else self.poly.kind,
            "edge_poly_degree": None if self.poly is None else self.poly.degree,
            "monomial": None if self.monomial is None else list(self.monomial.alpha)}

  def __repr__(self):
    comp = "x" if self.component is None else f"e{self.component+1}"
    src = f"edge {self.edge}" if self.edge is not None else (self.monomial if self.monomial is not None else "1")
    return f"Generator({self.block}, {comp}, {src})"

class Combination(VectorField):
  """
  sum_j c_j g_j over a list of vector fields
  """
  def __init__(self, fields, coeffs):
    self.fields, self.coeffs = list(fields), np.asarray(coeffs, dtype=float)
    assert len(self.fields) == len(self.coeffs)
    self.polygon, self.fe = self.fields[0].polygon, self.fields[0].fe
    self.active = [j for j, c in enumerate(self.coeffs) if c != 0]

  def _sum(self, fxn):
    out = 0.0
    for j in self.active: out = out + self.coeffs[j] * fxn(self.fields[j])
    return out

  def trace(self, edge, t):
    t = np.asarray(t, dtype=float)
    return self._sum(lambda g: g.trace(edge, t)) + np.zeros((2,) + t.shape)

  def cell_values(self, ref_pts, cells=None): return self._sum(lambda g: g.cell_values(ref_pts, cells))
  def cell_divergence(self, ref_pts, cells=None): return self._sum(lambda g: g.cell_divergence(ref_pts, cells))
  def evaluate(self, pts): return self._sum(lambda g: g.evaluate(pts))

class AnalyticField(VectorField):
  """
  closed form field fxn(x, y) -> (q1, q2), optional divergence div(x, y)
  """
  def __init__(self, fxn, polygon, mesh=None, div=None):
    self.fxn, self.div, self.polygon = fxn, div, polygon
    self.fe = fe_space(mesh if mesh is not None else triangulate(polygon, polygon.diameter), 1)

  def _eval(self, X):
    q = self.fxn(X[..., 0], X[..., 1])
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), X.shape[:-1]) for c in q])

  def trace(self, edge, t): return self._eval(self.polygon.edges[edge].point(np.asarray(t, dtype=float)))
  def cell_values(self, ref_pts, cells=None): return self._eval(self.fe.physical_points(ref_pts, cells))
  def evaluate(self, pts): return self._eval(np.atleast_2d(pts))

  def cell_divergence(self, ref_pts, cells=None):
    X = self.fe.physical_points(ref_pts, cells)
    return np.broadcast_to(np.asarray(self.div(X[..., 0], X[..., 1]), dtype=float), X.shape[:-1])

# ************ space basis ************

class SpaceBasis:
  def __init__(self, polygon, spec, mesh, fe, generators, admissibility, gram=None):
    self.polygon, self.spec, self.mesh, self.fe = polygon, spec, mesh, fe
    self.generators = list(generators)
    self.admissibility = admissibility
    self.gram = gram_matrix(self.generators) if gram is None else np.asarray(gram)
    eig = np.linalg.eigvalsh(self.gram) if len(self.gram) else np.zeros(0)
    self.gram_ratio = float(eig.min() / eig.max()) if len(eig) else 1.0
    self.gram_rank = int(np.sum(eig >= GRAM_RANK_TOL * eig.max())) if len(eig) else 0
    nv = len(mesh.nodes)
    rmax = float(np.max(np.hypot(*mesh.nodes.T)))
    self.scale = max([float(np.max(np.abs(g.field.values[:nv]))) * (1.0 if g.component is not None else rmax)
                      for g in self.generators], default=1.0)

  def __len__(self): return len(self.generators)

  @property
  def blocks(self): return [g.block for g in self.generators]

  def block_counts(self):
    return {b: sum(1 for g in self.generators if g.block == b) for b in BLOCKS}

  def expected_dimension(self):
    if self.spec.reduced_setting: return reduced_constructed_count(self.polygon.n_faces, self.spec.k)
    return dimension(self.spec, self.polygon.n_faces)

  def dimension_report(self):
    n, k = self.polygon.n_faces, self.spec.k
    rep = {"constructed": len(self), "gram_rank": self.gram_rank, "gram_ratio": self.gram_ratio,
           "blocks": self.block_counts()}
    if self.spec.reduced_setting:
      rep["closed_form"] = reduced_dimension_formula(n, k)
      rep["discrepancy"] = rep["closed_form"] != self.gram_rank
      rep["overshoot"] = self.gram_rank - rep["closed_form"]
    else:
      rep["formula"] = dimension(self.spec, n)
    return rep

  def __repr__(self):
    return f"SpaceBasis({len(self)} generators, {self.block_counts()}, rank {self.gram_rank})"

GRAM_RANK_TOL = 1e-8

def gram_matrix(generators, chunk=1024):
  """
  L2 gram matrix of unit-normalized generators over the sub-mesh
  """
  if not generators: return np.zeros((0, 0))
  fe = generators[0].fe
  rule = triangle_quadrature(2 * fe.r + 2)
  G = np.zeros((len(generators),)*2)
  T = fe.mesh.n_triangles
  for s in range(0, T, chunk):
    cells = np.arange(s, min(s+chunk, T))
    V = np.stack([g.cell_values(rule.points, cells) for g in generators])
    G += np.einsum('aicq,bicq,cq->ab', V, V, fe.weights(rule, cells))
  d = np.sqrt(np.maximum(np.diag(G), 1e-300))
  return G / np.outer(d, d)

def build_space(p, spec, mesh=None):
  v = coefficient_violations(spec)
  if v: raise AdmissibilityError("; ".join(v))
  if spec.l1 > 0: raise AdmissibilityError(f"building the space needs l1 <= 0, got {spec.l1}")
  adm = check_admissibility(p)
  if spec.l2 >= 0 and not adm.ok_for_radial_block:
    raise AdmissibilityError(f"edges {adm.origin_collinear_edges} lie on lines through the origin, x.n vanishes there")
  mesh = mesh if mesh is not None else triangulate(p, spec.resolve_h(p))
  fe = fe_space(mesh, spec.resolve_r())

  # (problem, [(block, component, edge, poly, monomial), ...]) sharing one scalar solve
  jobs = []
  if spec.reduced_setting:
    jobs.append((PoissonProblem.constant_lift(p), [("A-bnd", c, None, None, None) for c in (0, 1)]))
  else:
    for e in p.edges:
      for poly in projector_basis(e, spec.l1, spec.projector):
        jobs.append((PoissonProblem.lift(poly), [("A-bnd", c, e.index, poly, None) for c in (0, 1)]))
  for m in monomial_basis('Q', spec.m1):
    jobs.append((PoissonProblem.interior(m), [("A-int", c, None, None, m) for c in (0, 1)]))
  for e in p.edges:
    for poly in projector_basis(e, spec.l2, spec.projector):
      jobs.append((PoissonProblem.lift(poly), [("B-bnd", None, e.index, poly, None)]))
  for m in (monomial_basis('Q[]', spec.m2) if spec.m2 >= 0 else []):
    jobs.append((PoissonProblem.interior(m), [("B-int", None, None, None, m)]))

  fields = fe.solve_many([job[0] for job in jobs])
  gens = []
  for field, (_, tags) in zip(fields, jobs):
    gens += [Generator(field, b, c, p, edge=e, poly=poly, monomial=m) for b, c, e, poly, m in tags]
  order = {b: i for i, b in enumerate(BLOCKS)}
  gens.sort(key=lambda g: order[g.block])  # stable: edge-major inside each block

  space = SpaceBasis(p, spec, mesh, fe, gens, adm)
  debug(f"built {space} on {mesh}", 1)
  if space.gram_rank < len(space):
    raise SpaceRankError(f"generators are numerically dependent: rank {space.gram_rank} < {len(space)}")
  if spec.reduced_setting and reduced_dimension_formula(p.n_faces, spec.k) != space.gram_rank:
    warn(f"reduced dimension formula gives {reduced_dimension_formula(p.n_faces, spec.k)}, constructed rank is {space.gram_rank}")
  return space

def generator_from_dict(d, fe, values, polygon):
  """
  rebuilds an archived generator from its metadata and FE nodal values, no solve
  """
  poly = mono = None
  if d["monomial"] is not None:
    mono = Monomial2D(*d["monomial"])
    problem = PoissonProblem.interior(mono)
  elif d["edge"] is not None:
    poly = EdgePolynomial(np.array(d["edge_poly_coef_s"]), d["edge_poly_kind"], d["edge_poly_degree"], d["edge"])
    problem = PoissonProblem.lift(poly)
  else:
    problem = PoissonProblem.constant_lift(polygon)
  return Generator(DiscreteField(fe, values, problem), d["block"], d["component"], polygon,
                   edge=d["edge"], poly=poly, monomial=mono)
