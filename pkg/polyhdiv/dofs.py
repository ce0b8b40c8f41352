#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# degrees of freedom: normal functionals per edge, boundary means, internal moments

import numpy as np
from polyhdiv.errors import AdmissibilityError
from polyhdiv.geometry import check_admissibility
from polyhdiv.hkspace import coefficient_violations, boundary_trace_dimension, internal_dimension
from polyhdiv.polyspace import (Monomial2D, EdgePolynomial, build_projection_space_P, edge_restriction,
                                projector_basis, edge_quadrature, edge_exactness, triangle_quadrature,
                                triangle_exactness)

# ************ functionals ************

class Dof:
  kind = None
  flux_only = False   # depends on q only through q.n on its edge
  edge = None

  def __call__(self, q): raise NotImplementedError

  def to_dict(self):
    return {"kind": self.kind, "edge": None if self.edge is None else self.edge.index}

  def __repr__(self):
    where = "" if self.edge is None else f" edge {self.edge.index}"
    return f"<{self.kind}{where}>"

class EdgeDof(Dof):
  def __init__(self, edge, kernel=None, exactness=3):
    self.edge, self.kernel = edge, kernel
    self.rule = edge_quadrature(exactness)

  def nodes(self):
    # parameters in [0, 1] and arc length weights
    return (self.rule.points[:, 0] + 1) / 2, self.rule.weights * self.edge.length / 2

  def to_dict(self):
    d = super().to_dict()
    if self.kernel is not None: d["kernel_coef_s"] = self.kernel.coef.tolist()
    return d

class CoordinateMoment(EdgeDof):
  """
  int_f q_i n_i x_i dgamma
  """
  kind = "CoordinateMoment"

  def __init__(self, edge, component, exactness=3):
    m = Monomial2D(1, 0) if component == 0 else Monomial2D(0, 1)
    super().__init__(edge, edge_restriction(edge, [(1.0, m)]), exactness)
    self.component = component

  def __call__(self, q):
    t, w = self.nodes()
    v = q.trace(self.edge.index, t)[self.component]
    return float(np.sum(w * v * self.edge.normal[self.component] * self.kernel(t)))

  def to_dict(self): return dict(super().to_dict(), component=self.component)

class GlobalNormalMoment(EdgeDof):
  """
  int_f (q.n) p dgamma
  """
  kind = "GlobalNormalMoment"
  flux_only = True

  def __call__(self, q):
    return self.apply_flux(lambda s: self.edge.normal @ q.trace(self.edge.index, s))

  def apply_flux(self, g):
    t, w = self.nodes()
    return float(np.sum(w * g(t) * self.kernel(t)))

  def scaled(self, c):
    return GlobalNormalMoment(self.edge, self.kernel.scaled(c), 2*len(self.rule)-1)

class PointNormalValue(EdgeDof):
  kind = "PointNormalValue"
  flux_only = True

  def __init__(self, edge, t=0.5):
    super().__init__(edge)
    self.t = float(t)

  def __call__(self, q):
    return self.apply_flux(lambda s: self.edge.normal @ q.trace(self.edge.index, s))

  def apply_flux(self, g):
    return float(np.asarray(g(np.array([self.t])))[0])

  def to_dict(self): return dict(super().to_dict(), t=self.t)

class BoundaryMean(Dof):
  """
  boundary integral of one component, closes the reduced setting
  """
  kind = "BoundaryMean"

  def __init__(self, polygon, component, exactness=3):
    self.polygon, self.component = polygon, component
    self.rule = edge_quadrature(exactness)

  def __call__(self, q):
    t = (self.rule.points[:, 0] + 1) / 2
    return float(sum(np.sum(self.rule.weights * e.length / 2 * q.trace(e.index, t)[self.component])
                     for e in self.polygon.edges))

  def to_dict(self): return dict(super().to_dict(), component=self.component)

class InternalMoment(Dof):
  """
  int_K q.p dx for one pair p of the internal projection space
  """
  kind = "InternalMoment"

  def __init__(self, space, index, exactness):
    self.space, self.index = space, index
    self.rule = triangle_quadrature(exactness)

  @property
  def pair(self): return self.space.pairs[self.index]

  def __call__(self, q):
    X = q.fe.physical_points(self.rule.points)
    p = self.space.evaluate(X[..., 0], X[..., 1])[self.index]
    return float(np.sum(np.sum(q.cell_values(self.rule.points) * p, axis=0) * q.fe.weights(self.rule)))

  def to_dict(self): return dict(super().to_dict(), index=self.index, pair=repr(self.space.pairs[self.index]))

  def __repr__(self): return f"<InternalMoment {self.index}>"

class ProjectionTable:
  """
  internal kernels times quadrature weights on every cell of one FE space, cached per space
  """
  def __init__(self, space, fe, rule):
    X = fe.physical_points(rule.points)
    self.rule = rule
    self.table = space.evaluate(X[..., 0], X[..., 1]) * fe.weights(rule)[None, None]   # (nP, 2, C, q)

  def moments(self, q):
    return np.einsum('pcxq,cxq->p', self.table, q.cell_values(self.rule.points))

# ************ dof sets ************

class DofSet:
  def __init__(self, polygon, spec, normal, boundary_means, internal, projection):
    self.polygon, self.spec = polygon, spec
    self.normal = [list(n) for n in normal]
    self.boundary_means, self.internal = list(boundary_means), list(internal)
    self.projection = projection
    self.dofs = [d for n in self.normal for d in n] + self.boundary_means + self.internal
    self._tables = {}

  def __len__(self): return len(self.dofs)
  def __getitem__(self, i): return self.dofs[i]
  def __iter__(self): return iter(self.dofs)

  @property
  def n_normal(self): return sum(len(n) for n in self.normal)

  @property
  def config(self): return self.spec.normal_config

  @property
  def setting(self): return self.spec.setting

  def edge_slices(self):
    out, s = [], 0
    for n in self.normal:
      out.append(slice(s, s + len(n)))
      s += len(n)
    return out

  def indices(self, kind=None, edge=None):
    return [i for i, d in enumerate(self.dofs) if (kind is None or d.kind == kind) and
            (edge is None or (d.edge is not None and d.edge.index == edge))]

  def internal_slice(self):
    return slice(len(self) - len(self.internal), len(self))

  def table(self, fe):
    # not thread safe: warm it before fanning out
    if fe not in self._tables:
      self._tables[fe] = ProjectionTable(self.projection, fe, self.internal[0].rule)
    return self._tables[fe]

  def evaluate(self, q):
    """
    every functional on q, internal moments batched through the projection table
    """
    head = [d(q) for d in self.dofs[:len(self) - len(self.internal)]]
    tail = self.table(q.fe).moments(q) if self.internal else np.zeros(0)
    return np.concatenate([np.array(head, dtype=float), tail])

  def scaled_edge(self, edge, c):
    """
    copy with the global moment kernels of one edge multiplied by c
    """
    normal = [[d.scaled(c) if (i == edge and isinstance(d, GlobalNormalMoment)) else d for d in n]
              for i, n in enumerate(self.normal)]
    return DofSet(self.polygon, self.spec, normal, self.boundary_means, self.internal, self.projection)

  def with_duplicate(self, edge):
    """
    copy whose last global moment on an edge repeats the first one
    """
    normal = [list(n) for n in self.normal]
    moments = [j for j, d in enumerate(normal[edge]) if isinstance(d, GlobalNormalMoment)]
    assert len(moments) >= 2, "need two global moments to duplicate"
    normal[edge][moments[-1]] = normal[edge][moments[0]]
    return DofSet(self.polygon, self.spec, normal, self.boundary_means, self.internal, self.projection)

  def to_list(self): return [d.to_dict() for d in self.dofs]

  def counts(self):
    return {"normal": self.n_normal, "boundary_means": len(self.boundary_means),
            "internal": len(self.internal), "per_edge": [len(n) for n in self.normal]}

  def __repr__(self):
    return f"DofSet({self.setting}, {self.config}, {self.counts()})"

# ************ construction ************

def internal_violations(spec):
  out = []
  P = build_projection_space_P(spec.k)
  top = max([P.pair_degree(i) for i in range(len(P))], default=-1)
  if top > max(spec.m1, spec.m2 + 1):
    out.append(f"internal conditions: internal kernel degree {top} exceeds max(m1, m2+1) = {max(spec.m1, spec.m2+1)}")
  if len(P) != internal_dimension(spec):
    out.append(f"internal count {len(P)} != interior generator count {internal_dimension(spec)}")
  return out

def admissibility_violations(spec, polygon=None):
  out = coefficient_violations(spec) + internal_violations(spec)
  if polygon is not None and _uses_coordinate_moments(spec):
    adm = check_admissibility(polygon)
    if not adm.ok_for_coordinate_dofs:
      out.append(f"edge conditions: edges {adm.axis_parallel_edges} are parallel to an axis")
  return out

def _uses_coordinate_moments(spec):
  return not spec.reduced_setting and spec.l1 == 0

def _low_order(edge, spec, exactness):
  if spec.normal_config == "ib" and spec.l1 == 0: return PointNormalValue(edge, 0.5)
  return GlobalNormalMoment(edge, EdgePolynomial.constant(1.0, edge.index), exactness)

def make_normal_dofs(p, spec):
  """
  normal functionals per edge
  Returns:
    list (one entry per edge) of Dof lists: coordinate moments, deflated global
    moments of degree 1..l2 in the projector basis, then the low order functional
  """
  ex = edge_exactness(max(spec.k, spec.l2, 0))
  if _uses_coordinate_moments(spec):
    adm = check_admissibility(p)
    if not adm.ok_for_coordinate_dofs:
      raise AdmissibilityError(f"coordinate moments need edges off the axes, edges {adm.axis_parallel_edges} are axis parallel")
  out = []
  for e in p.edges:
    dofs = [CoordinateMoment(e, c, ex) for c in (0, 1)] if _uses_coordinate_moments(spec) else []
    dofs += [GlobalNormalMoment(e, b.deflated(), ex) for b in projector_basis(e, spec.l2, spec.projector)[1:]]
    if spec.l2 >= 0: dofs.append(_low_order(e, spec, ex))
    out.append(dofs)
  return out

def make_internal_dofs(spec, space=None):
  v = internal_violations(spec)
  if any(s.startswith("internal conditions") for s in v): raise AdmissibilityError("; ".join(v))
  P = space if space is not None else build_projection_space_P(spec.k)
  ex = triangle_exactness(spec.resolve_r(), spec.k)
  return [InternalMoment(P, i, ex) for i in range(len(P))]

def make_dofs(p, spec):
  P = build_projection_space_P(spec.k)
  ex = edge_exactness(max(spec.k, 0))
  means = [BoundaryMean(p, c, ex) for c in (0, 1)] if spec.reduced_setting else []
  return DofSet(p, spec, make_normal_dofs(p, spec), means, make_internal_dofs(spec, P), P)

def eval_dof(dof, q):
  return dof(q)

# ************ validation ************

class EdgeTrace:
  """
  vector valued trace living on a single edge, zero on the rest of the boundary
  """
  def __init__(self, edge, fxn):
    self.edge, self.fxn = edge, fxn

  def trace(self, edge, t):
    t = np.asarray(t, dtype=float)
    if edge != self.edge.index: return np.zeros((2,) + t.shape)
    return self.fxn(self.edge.point(t), t)

def local_trace_fields(edge, spec):
  # traces generated on one edge by the boundary blocks
  fields = []
  if spec.l1 == 0:
    fields += [EdgeTrace(edge, lambda X, t, c=c: np.stack([np.full(t.shape, float(c == 0)), np.full(t.shape, float(c == 1))]))
               for c in (0, 1)]
  for b in projector_basis(edge, spec.l2, spec.projector):
    fields.append(EdgeTrace(edge, lambda X, t, b=b: np.moveaxis(X, -1, 0) * b(t)))
  return fields

class DofValidation:
  def __init__(self):
    self.violations, self.per_edge = [], []
    self.internal_count = self.expected_internal = 0

  @property
  def passed(self): return not self.violations

  def to_dict(self):
    return {"passed": self.passed, "violations": self.violations, "per_edge": self.per_edge,
            "internal_count": self.internal_count, "expected_internal": self.expected_internal}

def validate_dof_set(dofs, space=None, rank_tol=1e-10):
  """
  counts, the coefficient and internal conditions, and per edge independence of the normal functionals
  on the local trace space (edge conditions)
  """
  spec, rep = dofs.spec, DofValidation()
  rep.violations += admissibility_violations(spec, dofs.polygon)
  expected = spec.k + 1 if spec.reduced_setting else boundary_trace_dimension(spec)
  for e, normal in zip(dofs.polygon.edges, dofs.normal):
    M = np.array([[d(tf) for tf in local_trace_fields(e, spec)] for d in normal]).reshape(len(normal), -1)
    s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    rank = int(np.sum(s > rank_tol * s.max())) if len(s) and s.max() > 0 else 0
    rep.per_edge.append({"edge": e.index, "count": len(normal), "expected": expected, "rank": rank})
    if len(normal) != expected: rep.violations.append(f"edge {e.index}: {len(normal)} normal functionals, expected {expected}")
    if rank < len(normal): rep.violations.append(f"edge {e.index}: normal functionals are dependent, rank {rank} < {len(normal)}")
  rep.internal_count, rep.expected_internal = len(dofs.internal), internal_dimension(spec)
  if space is not None and len(space) != len(dofs):
    rep.violations.append(f"{len(dofs)} functionals for {len(space)} generators")
  return rep
