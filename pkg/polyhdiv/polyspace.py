#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# polynomial machinery: monomial spaces, the internal projection space,
# per-edge projector bases and quadrature rules

import math
import numpy as np
from functools import lru_cache
from numpy.polynomial import Polynomial, Legendre, HermiteE
from polyhdiv.errors import QuadratureError
from polyhdiv.utils import frozen

# ************ monomials ************

class Monomial2D:
  def __init__(self, a, b):
    assert a >= 0 and b >= 0, "negative exponents are never stored"
    self.alpha = (int(a), int(b))

  def __call__(self, x, y):
    a, b = self.alpha
    return np.power(x, a) * np.power(y, b)

  @property
  def degree(self): return max(self.alpha)     # Q sense

  @property
  def total_degree(self): return sum(self.alpha)

  def grad(self, x, y):
    a, b = self.alpha
    zero = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
    dx = a * np.power(x, a-1) * np.power(y, b) + zero if a else zero
    dy = b * np.power(x, a) * np.power(y, b-1) + zero if b else zero
    return dx, dy

  def __eq__(self, other): return isinstance(other, Monomial2D) and self.alpha == other.alpha
  def __hash__(self): return hash(self.alpha)
  def __repr__(self):
    a, b = self.alpha
    if a == b == 0: return "1"
    return "".join(s if e == 1 else f"{s}^{e}" for s, e in (("x", a), ("y", b)) if e)

def _ordered(alphas):
  return [Monomial2D(a, b) for a, b in sorted(alphas, key=lambda ab: (max(ab), sum(ab), ab[1]))]

SPACES = {}
def register_space(name, fxn):
  SPACES[name] = fxn

def monomial_basis(space, *degrees):
  """
  ordered monomial basis of a 2D polynomial space
  Params:
    space   : 'Q' (max degree <= k), 'Q[]' (max degree exactly k), 'P' (total degree <= k),
              'Pab' (x degree <= a, y degree <= b) or 'custom' (list of exponent pairs)
    degrees : the indices of the space, -1 gives the empty space
  Returns:
    list of Monomial2D
  """
  if space not in SPACES: raise ValueError(f"unknown monomial space {space}")
  return SPACES[space](*degrees)

register_space('Q', lambda k: _ordered([(a, b) for a in range(k+1) for b in range(k+1)]))
register_space('Q[]', lambda k: _ordered([(a, b) for a in range(k+1) for b in range(k+1) if max(a, b) == k]))
register_space('P', lambda k: _ordered([(a, b) for a in range(k+1) for b in range(k+1-a)]))
register_space('Pab', lambda a, b: _ordered([(i, j) for i in range(a+1) for j in range(b+1)]))
register_space('custom', lambda alphas: [Monomial2D(a, b) for a, b in alphas])

def eval_terms(terms, x, y):
  # terms: list of (coefficient, Monomial2D)
  out = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
  for c, m in terms: out = out + c * m(x, y)
  return out

# ************ internal projection space ************

class ProjectionSpaceP:
  """
  ordered vector pairs (p1, p2), each component a list of (coefficient, Monomial2D) terms
  """
  def __init__(self, k, pairs):
    self.k = k
    self.pairs = list(pairs)

  def __len__(self): return len(self.pairs)
  def __iter__(self): return iter(self.pairs)

  def evaluate(self, x, y):
    # (len, 2, *x.shape)
    out = np.zeros((len(self), 2) + np.broadcast(np.asarray(x), np.asarray(y)).shape)
    for i, pair in enumerate(self.pairs):
      for c in range(2): out[i, c] = eval_terms(pair[c], x, y)
    return out

  def pair_degree(self, i):
    return max([m.degree for comp in self.pairs[i] for _, m in comp], default=-1)

  def __repr__(self):
    show = lambda comp: "+".join(f"{m}" if c == 1 else f"{c}*{m}" for c, m in comp) or "0"
    return "P{" + ", ".join(f"({show(a)}, {show(b)})" for a, b in self.pairs) + "}"

def build_projection_space_P(k):
  if k < 0: raise ValueError("order must be >= 0")
  if k == 0: return ProjectionSpaceP(0, [])
  idx = [(l, m) for l in range(k+1) for m in range(k) if (l, m) != (k, k-1)]
  pairs  = [([(1.0, Monomial2D(l, m))], []) for l, m in idx]
  pairs += [([], [(1.0, Monomial2D(m, l))]) for l, m in idx]
  pairs.append(([(1.0, Monomial2D(k, k-1))], [(1.0, Monomial2D(k-1, k))]))
  return ProjectionSpaceP(k, pairs)

# ************ edge polynomials ************
# stored as power series in s = 2t - 1 in [-1, 1]

class EdgePolynomial:
  def __init__(self, poly, kind, degree, edge=None):
    self.poly = poly if isinstance(poly, Polynomial) else Polynomial(poly)
    self.kind, self.degree, self.edge = kind, int(degree), edge
    assert self.poly.degree() <= max(self.degree, 0) or np.allclose(self.poly.coef[self.degree+1:], 0)

  @property
  def coef(self): return self.poly.coef

  def __call__(self, t):
    return self.poly(2*np.asarray(t, dtype=float) - 1)

  def mean(self):
    # over the edge, arc length measure
    P = self.poly.integ()
    return (P(1.0) - P(-1.0)) / 2

  def deflated(self):
    return EdgePolynomial(self.poly - self.mean(), self.kind, self.degree, self.edge)

  def scaled(self, c):
    return EdgePolynomial(self.poly * c, self.kind, self.degree, self.edge)

  @staticmethod
  def from_t_coefficients(coef_t, edge=None, kind="monomial"):
    poly = Polynomial(coef_t)(Polynomial([0.5, 0.5]))
    return EdgePolynomial(poly, kind, max(len(coef_t)-1, 0), edge)

  @staticmethod
  def constant(value, edge=None):
    return EdgePolynomial(Polynomial([float(value)]), "monomial", 0, edge)

  def __repr__(self):
    return f"EdgePolynomial(edge={self.edge}, kind={self.kind}, coef_s={np.round(self.coef, 6).tolist()})"

def _affine_coordinate(edge, c):
  # coordinate c of the edge point as a polynomial in s
  return Polynomial([edge.midpoint[c], (edge.end[c] - edge.start[c]) / 2])

def edge_restriction(edge, terms):
  """
  composes an ambient polynomial sum c*x^a*y^b with the edge parametrization
  """
  X, Y = _affine_coordinate(edge, 0), _affine_coordinate(edge, 1)
  poly = Polynomial([0.0])
  for c, m in terms:
    a, b = m.alpha
    poly = poly + c * X**a * Y**b
  deg = max([m.total_degree for _, m in terms], default=0)
  return EdgePolynomial(poly.trim() if poly.degree() > 0 else poly, "monomial", deg, edge.index)

PROJECTORS = {}
def register_projector(name, fxn):
  PROJECTORS[name] = fxn

def _raw_monomial(edge, j):
  # dominant ambient coordinate of the edge, raised to j
  c = int(np.argmax(np.abs(edge.end - edge.start)))
  return _affine_coordinate(edge, c)**j

register_projector('monomial', _raw_monomial)
register_projector('orthogonal', lambda edge, j: Legendre.basis(j).convert(kind=Polynomial))
register_projector('hermite', lambda edge, j: HermiteE.basis(j).convert(kind=Polynomial))

def projector_basis(edge, degree, kind="hermite"):
  if kind not in PROJECTORS: raise ValueError(f"unknown projector kind {kind}")
  if degree < 0: return []
  return [EdgePolynomial(PROJECTORS[kind](edge, j), kind, j, edge.index) for j in range(degree+1)]

def change_of_basis(basis, degree):
  # power coefficients of each basis member as rows
  M = np.zeros((len(basis), degree+1))
  for i, p in enumerate(basis): M[i, :len(p.coef)] = p.coef[:degree+1]
  return M

# ************ quadrature ************

class QuadratureRule:
  """
  points/weights on the reference interval [-1, 1] ('line') or the reference
  triangle (0,0),(1,0),(0,1) ('triangle'), exact up to degree
  """
  def __init__(self, name, degree, simplex, points, weights):
    self.name, self.degree, self.simplex = name, int(degree), simplex
    self.points, self.weights = frozen(points), frozen(weights)
    assert self.points.shape[0] == self.weights.shape[0]
    assert simplex in ("line", "triangle")

  def __len__(self): return len(self.weights)
  def __repr__(self): return f"QuadratureRule({self.name}, degree={self.degree}, n={len(self)})"

MAX_EXACTNESS = 60

@lru_cache
def edge_quadrature(exactness):
  if exactness < 0: raise QuadratureError(f"exactness must be >= 0, got {exactness}")
  if exactness > MAX_EXACTNESS: raise QuadratureError(f"edge rules stop at degree {MAX_EXACTNESS}, asked {exactness}")
  n = exactness // 2 + 1
  x, w = np.polynomial.legendre.leggauss(n)
  return QuadratureRule(f"{n} point gauss-legendre", 2*n-1, "line", x[:, None], w)

@lru_cache
def triangle_quadrature(exactness):
  """
  collapsed (duffy) gauss rule on the reference triangle
  """
  if exactness < 0: raise QuadratureError(f"exactness must be >= 0, got {exactness}")
  if exactness > MAX_EXACTNESS: raise QuadratureError(f"triangle rules stop at degree {MAX_EXACTNESS}, asked {exactness}")
  nu, nv = exactness // 2 + 1, (exactness + 1) // 2 + 1  # the jacobian adds one degree in v
  xu, wu = np.polynomial.legendre.leggauss(nu)
  xv, wv = np.polynomial.legendre.leggauss(nv)
  u, v = (xu + 1) / 2, (xv + 1) / 2
  U, V = np.meshgrid(u, v, indexing="ij")
  W = np.outer(wu, wv) / 4 * (1 - V)
  pts = np.stack([(U * (1 - V)).ravel(), V.ravel()], axis=1)
  return QuadratureRule(f"{nu}x{nv} collapsed gauss", exactness, "triangle", pts, W.ravel())

def triangle_monomial_integral(a, b):
  # over the reference triangle: a! b! / (a + b + 2)!
  return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)

def edge_exactness(k): return 2*k + 3
def triangle_exactness(r, k): return 2*(r + k) + 2
