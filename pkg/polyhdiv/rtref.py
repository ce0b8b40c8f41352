#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# raviart-thomas RT_k on a triangle with closed form polynomials, used as an oracle

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.polynomial import Legendre
from polyhdiv.geometry import load_polygon, shared_edge
from polyhdiv.hkspace import ElementSpec, build_space
from polyhdiv.polyspace import monomial_basis, edge_quadrature, triangle_quadrature

REFERENCE_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
COMPARE_TRIANGLE = ((1.0, 0.5), (2.2, 0.9), (1.4, 1.8))

def _mono(k, a, b):
  c = np.zeros((k+2, k+2))
  c[a, b] = 1.0
  return c

# ************ space ************

class RtSpace:
  """
  (P_k)^2 + x.P_[k], members stored as (2, k+2, k+2) power coefficient arrays c[i, j] ~ x^i y^j
  """
  def __init__(self, k, triangle=REFERENCE_TRIANGLE):
    if k < 0: raise ValueError("order must be >= 0")
    self.k = k
    self.polygon = load_polygon([list(v) for v in triangle])
    z = np.zeros((k+2, k+2))
    mons = [m.alpha for m in monomial_basis('P', k)]
    members  = [np.stack([_mono(k, a, b), z]) for a, b in mons]
    members += [np.stack([z, _mono(k, a, b)]) for a, b in mons]
    members += [np.stack([_mono(k, a+1, k-a), _mono(k, a, k-a+1)]) for a in range(k+1)]
    self.members = np.stack(members)

  def __len__(self): return len(self.members)

  @property
  def dimension(self): return len(self)

  def evaluate(self, pts, coeffs=None):
    # (len, 2, M)
    pts = np.atleast_2d(pts)
    c = self.members if coeffs is None else coeffs
    return np.stack([[P.polyval2d(pts[:, 0], pts[:, 1], cc) for cc in m] for m in c])

  def normal_traces(self, edge, t, coeffs=None):
    e = self.polygon.edges[edge]
    return np.einsum('c,jcn->jn', e.normal, self.evaluate(e.point(np.asarray(t, dtype=float)), coeffs))

  def divergence(self, coeffs=None):
    c = self.members if coeffs is None else coeffs
    out = np.zeros((len(c), self.k+2, self.k+2))
    out[:, :-1, :] += P.polyder(c[:, 0], axis=1)
    out[:, :, :-1] += P.polyder(c[:, 1], axis=2)
    return out

def rt_space_basis(k, triangle=REFERENCE_TRIANGLE):
  return RtSpace(k, triangle)

# ************ degrees of freedom and nodal basis ************

def _edge_moments(space, coeffs):
  # int_f (q.n) L_j(2t-1) dgamma, edge-major
  k = space.k
  rule = edge_quadrature(2*k + 3)
  t, w = (rule.points[:, 0] + 1) / 2, rule.weights / 2
  rows = []
  for e in space.polygon.edges:
    qn = space.normal_traces(e.index, t, coeffs)
    for j in range(k+1):
      rows.append(qn @ (w * e.length * Legendre.basis(j)(2*t - 1)))
  return rows

def _internal_moments(space, coeffs):
  # int_K q_c p dx for p in P_{k-1}, component-major
  k = space.k
  if k == 0: return []
  rule = triangle_quadrature(2*k + 2)
  v = space.polygon.vertices
  J = np.stack([v[1] - v[0], v[2] - v[0]], axis=1)
  X = v[0] + rule.points @ J.T
  w = rule.weights * abs(np.linalg.det(J))
  vals = space.evaluate(X, coeffs)
  return [vals[:, c] @ (w * m(X[:, 0], X[:, 1])) for c in (0, 1) for m in monomial_basis('P', k-1)]

class RtNodalBasis:
  def __init__(self, space):
    self.space, self.k = space, space.k
    self.T = np.array(_edge_moments(space, None) + _internal_moments(space, None))
    self.C = np.linalg.solve(self.T, np.eye(len(self.T)))
    self.members = np.tensordot(self.C.T, space.members, axes=1)
    self.n_normal = 3 * (self.k + 1)

  def __len__(self): return len(self.members)

  @property
  def internal_indices(self): return list(range(self.n_normal, len(self)))

  @property
  def kronecker(self):
    # dofs re-evaluated on the nodal members
    S = np.array(_edge_moments(self.space, self.members) + _internal_moments(self.space, self.members))
    return float(np.max(np.abs(S - np.eye(len(self)))))

  def normal_traces(self, edge, t, idx=None):
    c = self.members if idx is None else self.members[idx]
    return self.space.normal_traces(edge, t, c)

  def internal_trace_defect(self, samples=33):
    if not self.internal_indices: return 0.0
    t = np.linspace(0, 1, samples)
    return float(max(np.max(np.abs(self.normal_traces(e.index, t, self.internal_indices)))
                     for e in self.space.polygon.edges))

  def divergence_excess(self):
    """
    largest divergence coefficient of total degree > k, relative to the largest coefficient
    """
    d = self.space.divergence(self.members)
    i, j = np.indices(d.shape[1:])
    high = np.abs(d[:, i + j > self.k])
    return float(high.max() / max(np.abs(d).max(), 1e-300)) if high.size else 0.0

  def trace_fit_residual(self, samples=33):
    # least squares fit of every normal trace by degree k in t
    t = np.linspace(0, 1, samples)
    worst = 0.0
    for e in self.space.polygon.edges:
      y = self.normal_traces(e.index, t)
      V = np.vander(t, self.k + 1)
      coef, *_ = np.linalg.lstsq(V, y.T, rcond=None)
      res = np.linalg.norm(V @ coef - y.T, axis=0) / np.maximum(np.linalg.norm(y, axis=1), 1e-300)
      worst = max(worst, float(res.max()))
    return worst

def rt_nodal_basis(k, triangle=REFERENCE_TRIANGLE):
  return RtNodalBasis(RtSpace(k, triangle))

# ************ conformity on two glued triangles ************

def rt_interface_jump(k, tri1, tri2, samples=33):
  """
  largest relative normal trace jump over the shared edge when the second triangle
  receives the flux dofs matching each normal dual of the first
  """
  b1, b2 = rt_nodal_basis(k, tri1), rt_nodal_basis(k, tri2)
  e1, e2 = shared_edge(b1.space.polygon, b2.space.polygon)
  f2 = b2.space.polygon.edges[e2]
  rule = edge_quadrature(2*k + 3)
  tq, w = (rule.points[:, 0] + 1) / 2, rule.weights * f2.length / 2
  t = np.linspace(0, 1, samples)
  worst = 0.0
  for i in range(e1 * (k+1), (e1+1) * (k+1)):
    g = lambda s: b1.normal_traces(e1, s, [i])[0]
    vals = np.zeros(len(b2))
    for j in range(k+1):
      vals[e2 * (k+1) + j] = np.sum(w * -g(1 - tq) * Legendre.basis(j)(2*tq - 1))
    psi = np.tensordot(vals, b2.members, axes=1)[None]
    jump = g(t) + b2.space.normal_traces(e2, 1 - t, psi)[0]
    worst = max(worst, float(np.max(np.abs(jump)) / np.max(np.abs(g(t)))))
  return worst

# ************ comparison with H_k on a triangle ************

def _rank(M, tol=1e-10):
  s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
  return int(np.sum(s > tol * s.max())) if len(s) and s.max() > 0 else 0

def _orthonormal_rows(M, tol=1e-10):
  _, s, vt = np.linalg.svd(M, full_matrices=False)
  return vt[s > tol * s.max()]

def rt_compare_normal_traces(k, triangle=COMPARE_TRIANGLE, h_target=None, samples=None):
  """
  per edge ranks of the normal trace spans of H_k with (l1, l2) = (-1, k) and of RT_k,
  of their union and of the cross projection
  """
  rt = RtSpace(k, triangle)
  spec = ElementSpec(k, l1=-1, l2=k, m1=k-1, m2=k-1, h_target=h_target)
  hk = build_space(rt.polygon, spec)
  t = np.linspace(0, 1, samples or 4*k + 9)
  rows = []
  for e in rt.polygon.edges:
    H = np.stack([g.normal_trace(e.index, t) for g in hk.generators])
    R = rt.normal_traces(e.index, t)
    cross = _orthonormal_rows(H) @ _orthonormal_rows(R).T
    rows.append({"edge": e.index, "hk_rank": _rank(H), "rt_rank": _rank(R),
                 "joint_rank": _rank(np.vstack([H, R])), "cross_rank": _rank(cross, 1e-8)})
  passed = all(r["hk_rank"] == r["rt_rank"] == r["joint_rank"] == r["cross_rank"] == k+1 for r in rows)
  return {"k": k, "per_edge": rows, "passed": passed}
