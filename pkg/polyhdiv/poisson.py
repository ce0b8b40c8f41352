#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# lagrange finite elements for  lap u = p in K,  u = g on dK

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from functools import lru_cache
from polyhdiv.errors import SolveError, DomainError
from polyhdiv.geometry import classify_boundary_points
from polyhdiv.polyspace import triangle_quadrature, eval_terms, EdgePolynomial
from polyhdiv.utils import debug, progress, frozen

RESIDUAL_TOL = 1e-10

# ************ problems ************

class PoissonProblem:
  """
  rhs      : list of (coefficient, Monomial2D), empty for harmonic lifts
  boundary : edge index -> EdgePolynomial, missing edges carry zero data
  owner    : edge whose data wins at its two polygon vertices
  """
  def __init__(self, rhs=(), boundary=None, owner=None):
    self.rhs = list(rhs)
    self.boundary = dict(boundary or {})
    self.owner = owner

  def g(self, edge, t):
    t = np.asarray(t, dtype=float)
    p = self.boundary.get(edge)
    return p(t) if p is not None else np.zeros_like(t)

  @property
  def rhs_degree(self):
    return max([m.total_degree for _, m in self.rhs], default=0)

  @staticmethod
  def interior(monomial):
    return PoissonProblem(rhs=[(1.0, monomial)])

  @staticmethod
  def lift(poly):
    return PoissonProblem(boundary={poly.edge: poly}, owner=poly.edge)

  @staticmethod
  def constant_lift(polygon, value=1.0):
    return PoissonProblem(boundary={e.index: EdgePolynomial.constant(value, e.index) for e in polygon.edges})

  def __repr__(self):
    return f"PoissonProblem(rhs={self.rhs}, edges={sorted(self.boundary)}, owner={self.owner})"

# ************ reference element ************

class ReferenceElement:
  """
  P_r lagrange element on (0,0),(1,0),(0,1), nodal basis from the inverse vandermonde
  """
  def __init__(self, r):
    assert r >= 1
    self.r = r
    lattice = [(i, j) for j in range(r+1) for i in range(r+1-j)]
    self.counts = np.array([(r-i-j, i, j) for i, j in lattice])  # barycentric counts per corner
    self.nodes = frozen(np.array(lattice, dtype=float) / r)
    self.exponents = [(p, q) for p in range(r+1) for q in range(r+1-p)]
    self.coeffs = np.linalg.inv(self._monomials(self.nodes))

  def __len__(self): return len(self.nodes)

  def _monomials(self, pts):
    pts = np.atleast_2d(pts)
    return np.stack([pts[:, 0]**p * pts[:, 1]**q for p, q in self.exponents], axis=1)

  def _monomial_grads(self, pts):
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    dx = [p * x**max(p-1, 0) * y**q for p, q in self.exponents]
    dy = [q * x**p * y**max(q-1, 0) for p, q in self.exponents]
    return np.stack([np.stack(dx, 1), np.stack(dy, 1)], axis=2)

  def tabulate(self, pts):
    return self._monomials(pts) @ self.coeffs

  def tabulate_grad(self, pts):
    return np.einsum('nmd,ml->nld', self._monomial_grads(pts), self.coeffs)

@lru_cache
def reference_element(r):
  return ReferenceElement(r)

# ************ global space ************

class FESpace:
  def __init__(self, mesh, r):
    self.mesh, self.r = mesh, r
    self.ref = ref = reference_element(r)
    tri, T, Nv = mesh.triangles, mesh.n_triangles, len(mesh.nodes)
    pairs = np.sort(tri[:, [[0, 1], [1, 2], [2, 0]]], axis=2)
    uniq, inv = np.unique(pairs.reshape(-1, 2), axis=0, return_inverse=True)
    inv = inv.reshape(T, 3)
    slot = {(0, 1): 0, (1, 2): 1, (0, 2): 2}
    n_int = (r-1) * (r-2) // 2
    dofs, k = np.zeros((T, len(ref)), dtype=np.int64), 0
    for l, c in enumerate(ref.counts):
      nz = np.nonzero(c)[0]
      if len(nz) == 1:
        dofs[:, l] = tri[:, nz[0]]
      elif len(nz) == 2:
        a, b = nz
        m = np.where(tri[:, b] > tri[:, a], c[b], c[a])  # count at the higher numbered vertex
        dofs[:, l] = Nv + inv[:, slot[(a, b)]] * (r-1) + (m-1)
      else:
        dofs[:, l] = Nv + len(uniq) * (r-1) + np.arange(T) * n_int + k
        k += 1
    self.cell_dofs = frozen(dofs, dtype=np.int64)
    self.n_dofs = Nv + len(uniq) * (r-1) + T * n_int

    # affine maps x = v0 + J xi
    v = mesh.nodes[tri]
    self.v0 = frozen(v[:, 0])
    self.J = frozen(np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=2))
    self.det = frozen(self.J[:, 0, 0] * self.J[:, 1, 1] - self.J[:, 0, 1] * self.J[:, 1, 0])
    self.invJ = frozen(np.linalg.inv(self.J))

    coords = np.zeros((self.n_dofs, 2))
    coords[self.cell_dofs] = self.physical_points(ref.nodes)
    coords[:Nv] = mesh.nodes
    self.coords = frozen(coords)
    edge, vertex = classify_boundary_points(mesh.polygon, coords)
    self.node_edge, self.node_vertex = frozen(edge, dtype=np.int64), frozen(vertex, dtype=np.int64)
    self.boundary = np.nonzero(edge >= 0)[0]
    self.free = np.nonzero(edge < 0)[0]
    self._K, self._lu, self._blocks = None, None, None

  def __repr__(self):
    return f"FESpace(P{self.r}, {self.n_dofs} dofs, {len(self.free)} free)"

  def physical_points(self, ref_pts, cells=None):
    cells = slice(None) if cells is None else cells
    return self.v0[cells][:, None, :] + np.einsum('tij,qj->tqi', self.J[cells], np.atleast_2d(ref_pts))

  def weights(self, rule, cells=None):
    cells = slice(None) if cells is None else cells
    return np.abs(self.det[cells])[:, None] * rule.weights[None, :]

  # ****** assembly ******

  def stiffness(self):
    if self._K is None:
      rule = triangle_quadrature(max(2 * (self.r - 1), 0))
      G = np.einsum('tij,qli->tqlj', self.invJ, self.ref.tabulate_grad(rule.points))
      Kloc = np.einsum('tq,tqaj,tqbj->tab', self.weights(rule), G, G)
      d = self.cell_dofs
      rows = np.broadcast_to(d[:, :, None], Kloc.shape)
      cols = np.broadcast_to(d[:, None, :], Kloc.shape)
      self._K = sp.coo_matrix((Kloc.ravel(), (rows.ravel(), cols.ravel())), shape=(self.n_dofs,)*2).tocsr()
    return self._K

  def blocks(self):
    # free-free and free-boundary parts of the stiffness matrix
    if self._blocks is None:
      K = self.stiffness()[self.free]
      self._blocks = (K[:, self.free].tocsc(), K[:, self.boundary].tocsr())
    return self._blocks

  def factor(self):
    if self._lu is None:
      try:
        self._lu = splu(self.blocks()[0])
      except RuntimeError as e:
        raise SolveError(f"stiffness factorization failed: {e}")
      debug(f"factorized {self}", 2)
    return self._lu

  def load(self, prob):
    if not prob.rhs: return np.zeros(self.n_dofs)
    rule = triangle_quadrature(self.r + prob.rhs_degree)
    X = self.physical_points(rule.points)
    f = eval_terms(prob.rhs, X[..., 0], X[..., 1])
    Floc = np.einsum('tq,tq,ql->tl', self.weights(rule), f, self.ref.tabulate(rule.points))
    return np.bincount(self.cell_dofs.ravel(), weights=Floc.ravel(), minlength=self.n_dofs)

  def boundary_values(self, prob):
    """
    dirichlet data at boundary nodes, polygon vertices follow the owner edge of the data
    """
    poly = self.mesh.polygon
    n = poly.n_faces
    vals = np.zeros(len(self.boundary))
    edge, vertex = self.node_edge[self.boundary], self.node_vertex[self.boundary]
    for e in poly.edges:
      on = (edge == e.index) & (vertex < 0)
      if not np.any(on): continue
      d = e.end - e.start
      t = (self.coords[self.boundary[on]] - e.start) @ d / (d @ d)
      vals[on] = prob.g(e.index, t)
    for i in np.nonzero(vertex >= 0)[0]:
      v = vertex[i]
      after, before = v, (v - 1) % n   # edge starting / ending at the vertex
      if prob.owner == after: vals[i] = prob.g(after, 0.0)
      elif prob.owner == before: vals[i] = prob.g(before, 1.0)
      else: vals[i] = 0.5 * (prob.g(after, 0.0) + prob.g(before, 1.0))
    return vals

  # ****** solves ******

  def solve_many(self, problems, chunk=16):
    problems = list(problems)
    fields = []
    for s in progress(range(0, len(problems), chunk), desc="poisson", total=-(-len(problems) // chunk)):
      batch = problems[s:s+chunk]
      F = np.stack([self.load(p) for p in batch], axis=1)
      UB = np.stack([self.boundary_values(p) for p in batch], axis=1)
      U = np.zeros((self.n_dofs, len(batch)))
      U[self.boundary] = UB
      if len(self.free):
        KII, KIB = self.blocks()
        rhs = -F[self.free] - KIB @ UB
        UI = self.factor().solve(np.asfortranarray(rhs))
        res = np.linalg.norm(KII @ UI - rhs, axis=0)
        scale = np.maximum(np.linalg.norm(rhs, axis=0), 1e-300)
        if np.any(res > RESIDUAL_TOL * scale): raise SolveError(f"interior residual {np.max(res / scale):.3e} above {RESIDUAL_TOL}")
        if not np.all(np.isfinite(UI)): raise SolveError("non-finite solution, singular stiffness")
        U[self.free] = UI
      fields += [DiscreteField(self, U[:, i], p) for i, p in enumerate(batch)]
    debug(f"solved {len(problems)} poisson problems on {self}", 1)
    return fields

  # ****** point location ******

  def locate(self, pts, chunk=64):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    poly = self.mesh.polygon
    cells, ref = np.zeros(len(pts), dtype=np.int64), np.zeros((len(pts), 2))
    for s in range(0, len(pts), chunk):
      P = pts[s:s+chunk]
      xi = np.einsum('tij,tmj->tmi', self.invJ, P[None, :, :] - self.v0[:, None, :])
      lam = np.minimum(np.minimum(1 - xi[..., 0] - xi[..., 1], xi[..., 0]), xi[..., 1])
      best = lam.argmax(axis=0)
      m = np.arange(len(P))
      for i in np.nonzero(lam[best, m] < -1e-10)[0]:
        if poly.distance(P[i]) > 1e-10 * poly.diameter: raise DomainError(f"point {P[i].tolist()} is outside the polygon")
      cells[s:s+chunk], ref[s:s+chunk] = best, xi[best, m]
    return cells, ref

@lru_cache(maxsize=8)
def fe_space(mesh, r):
  return FESpace(mesh, r)

# ************ discrete fields ************

class DiscreteField:
  def __init__(self, fe, values, problem):
    self.fe, self.problem = fe, problem
    self.values = frozen(values)

  @property
  def r(self): return self.fe.r

  @property
  def mesh(self): return self.fe.mesh

  def cell_values(self, ref_pts, cells=None):
    cells = slice(None) if cells is None else cells
    return self.values[self.fe.cell_dofs[cells]] @ self.fe.ref.tabulate(ref_pts).T

  def cell_gradients(self, ref_pts, cells=None):
    cells = slice(None) if cells is None else cells
    g = np.einsum('tl,qld->tqd', self.values[self.fe.cell_dofs[cells]], self.fe.ref.tabulate_grad(ref_pts))
    return np.einsum('tij,tqi->tqj', self.fe.invJ[cells], g)

  def evaluate(self, pts):
    cells, ref = self.fe.locate(pts)
    tab = self.fe.ref.tabulate(ref)
    return np.sum(self.values[self.fe.cell_dofs[cells]] * tab, axis=1)

  def evaluate_gradient(self, pts):
    cells, ref = self.fe.locate(pts)
    g = np.einsum('ml,mld->md', self.values[self.fe.cell_dofs[cells]], self.fe.ref.tabulate_grad(ref))
    return np.einsum('mij,mi->mj', self.fe.invJ[cells], g)

  def trace_on_edge(self, edge, t):
    return self.problem.g(edge, t)

  def l2_error(self, exact, exactness=None):
    rule = triangle_quadrature(exactness or 2 * self.r + 4)
    X = self.fe.physical_points(rule.points)
    err = self.cell_values(rule.points) - exact(X[..., 0], X[..., 1])
    return float(np.sqrt(np.sum(self.fe.weights(rule) * err**2)))

def solve_poisson(mesh, prob, fe_order):
  return fe_space(mesh, fe_order).solve_many([prob])[0]

def evaluate(field, point):
  pts = np.asarray(point, dtype=float)
  out = field.evaluate(pts.reshape(-1, 2))
  return float(out[0]) if pts.ndim == 1 else out

def evaluate_gradient(field, point):
  pts = np.asarray(point, dtype=float)
  out = field.evaluate_gradient(pts.reshape(-1, 2))
  return out[0] if pts.ndim == 1 else out

def trace_on_edge(field, edge, t):
  return field.trace_on_edge(edge, t)
