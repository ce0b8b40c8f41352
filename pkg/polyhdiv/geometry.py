#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/

import math, pathlib
import numpy as np
import shapely
from shapely.geometry import Polygon as ShapelyPolygon, LinearRing, Point
from shapely.validation import explain_validity
from shapely.ops import polylabel
from polyhdiv.errors import GeometryError, MeshError
from polyhdiv.utils import frozen, load_document, warn, debug

# non-convex, no axis parallel edge, no edge line through the origin
ACCEPTANCE_NONAGON = [(3.1, 1.2), (3.7, 2.1), (3.3, 3.0), (2.4, 2.6), (1.9, 3.5),
                      (1.1, 2.9), (1.4, 2.0), (0.7, 1.4), (1.9, 0.6)]

# ************ polygon ************

class Edge:
  def __init__(self, index, start, end):
    self.index = index
    self.start, self.end = frozen(start), frozen(end)
    d = self.end - self.start
    self.length = float(np.hypot(*d))
    self.tangent = frozen(d / self.length)
    self.normal = frozen([self.tangent[1], -self.tangent[0]])  # outward for ccw loops
    self.midpoint = frozen((self.start + self.end) / 2)

  def point(self, t):
    t = np.asarray(t, dtype=float)
    return self.start + t[..., None] * (self.end - self.start)

  @property
  def xn(self):
    # x.n is constant along the edge
    return float(self.midpoint @ self.normal)

  def __repr__(self):
    return f"Edge({self.index}, {self.start.tolist()} -> {self.end.tolist()}, |f|={self.length:.6g})"

def signed_area(v):
  x, y = v[:, 0], v[:, 1]
  return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

class Polygon:
  def __init__(self, vertices):
    self.vertices = frozen(vertices)
    n = len(self.vertices)
    self.edges = [Edge(i, self.vertices[i], self.vertices[(i+1) % n]) for i in range(n)]
    self.area = signed_area(self.vertices)
    self.shape = ShapelyPolygon(self.vertices)
    c = self.shape.centroid
    self.centroid = frozen([c.x, c.y])
    d = self.vertices[:, None, :] - self.vertices[None, :, :]
    self.diameter = float(np.max(np.hypot(d[..., 0], d[..., 1])))

  @property
  def n_faces(self): return len(self.edges)

  def distance(self, point):
    return float(self.shape.distance(Point(*point)))

  def to_document(self):
    return {"vertices": self.vertices.tolist()}

  def __repr__(self):
    return f"Polygon(n={self.n_faces}, area={self.area:.6g}, diameter={self.diameter:.6g})"

def load_polygon(source):
  """
  builds a validated counter-clockwise Polygon from a document {"vertices": [[x, y], ...]},
  a path to such a json document, or a bare list of points
  """
  if isinstance(source, (str, pathlib.Path)):
    try:
      source = load_document(source)
    except (OSError, ValueError) as e:
      raise GeometryError(f"cannot read polygon document {source}: {e}")
  pts = source.get("vertices") if isinstance(source, dict) else source
  if pts is None: raise GeometryError("polygon document has no 'vertices' field")
  try:
    v = np.array(pts, dtype=np.float64)
  except (TypeError, ValueError):
    raise GeometryError("vertices must be an array of [x, y] pairs")
  if v.ndim != 2 or v.shape[1] != 2: raise GeometryError(f"vertices must be [x, y] pairs, got shape {v.shape}")
  if not np.all(np.isfinite(v)): raise GeometryError("non-finite vertex coordinate")
  if len(np.unique(v, axis=0)) < 3: raise GeometryError("need at least 3 distinct vertices")
  step = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
  if np.any(step == 0): raise GeometryError(f"duplicate consecutive vertices at index {int(np.argmin(step))}")
  ring = LinearRing(v)
  if not ring.is_simple or not ShapelyPolygon(v).is_valid:
    raise GeometryError(f"polygon is not simple: {explain_validity(ShapelyPolygon(v))}")
  area = signed_area(v)
  if area == 0: raise GeometryError("polygon has zero area")
  if area < 0: v = v[::-1]
  return Polygon(v)

# ************ admissibility ************

class AdmissibilityReport:
  def __init__(self, axis_parallel_edges, near_parallel_edges, origin_collinear_edges, aspect_ratio):
    self.axis_parallel_edges = list(axis_parallel_edges)
    self.near_parallel_edges = list(near_parallel_edges)
    self.origin_collinear_edges = list(origin_collinear_edges)
    self.aspect_ratio = float(aspect_ratio)

  @property
  def ok_for_coordinate_dofs(self): return len(self.axis_parallel_edges) == 0

  @property
  def ok_for_radial_block(self): return len(self.origin_collinear_edges) == 0

  def to_dict(self):
    return {"axis_parallel_edges": self.axis_parallel_edges, "near_parallel_edges": self.near_parallel_edges,
            "origin_collinear_edges": self.origin_collinear_edges, "aspect_ratio": self.aspect_ratio,
            "ok_for_coordinate_dofs": self.ok_for_coordinate_dofs, "ok_for_radial_block": self.ok_for_radial_block}

def shared_edge(p1, p2, tol=1e-12):
  """
  indices (i, j) of the edge p1.edges[i] that p2.edges[j] runs along in the opposite direction
  """
  tol = tol * max(p1.diameter, p2.diameter)
  for e in p1.edges:
    for f in p2.edges:
      if np.allclose(e.start, f.end, rtol=0, atol=tol) and np.allclose(e.end, f.start, rtol=0, atol=tol): return e.index, f.index
  raise GeometryError("the polygons do not share an edge with opposite orientation")

def axis_angle(edge):
  # angle between the edge and the closest coordinate axis
  theta = math.atan2(abs(edge.tangent[1]), abs(edge.tangent[0]))
  return min(theta, math.pi/2 - theta)

def check_admissibility(p, tol_angle=1e-9, near_angle=1e-3, tol_origin=1e-8):
  axis = [e.index for e in p.edges if axis_angle(e) <= tol_angle]
  near = [e.index for e in p.edges if tol_angle < axis_angle(e) <= near_angle]
  if near: warn(f"edges {near} are almost parallel to an axis, coordinate dofs will be ill-conditioned")
  origin = [e.index for e in p.edges if abs(e.xn) <= tol_origin * p.diameter]
  outer = shapely.minimum_bounding_radius(p.shape)
  pole = polylabel(p.shape, tolerance=1e-6 * p.diameter)
  inner = p.shape.exterior.distance(pole)
  return AdmissibilityReport(axis, near, origin, outer / inner if inner > 0 else math.inf)

# ************ sub-mesh ************

def classify_boundary_points(p, pts, tol=1e-10):
  """
  Returns:
    edge   : polygon edge index per point (-1 off the boundary); vertices get the edge they start
    vertex : polygon vertex index per point (-1 elsewhere)
  """
  pts = np.asarray(pts, dtype=float)
  tol = tol * p.diameter
  dist = np.full((len(pts), p.n_faces), np.inf)
  for e in p.edges:
    d = e.end - e.start
    t = np.clip((pts - e.start) @ d / (d @ d), 0, 1)
    dist[:, e.index] = np.hypot(*(pts - (e.start + t[:, None] * d)).T)
  edge = np.where(dist.min(axis=1) <= tol, dist.argmin(axis=1), -1)
  vd = np.hypot(*(pts[:, None, :] - p.vertices[None, :, :]).transpose(2, 0, 1))
  vertex = np.where(vd.min(axis=1) <= tol, vd.argmin(axis=1), -1)
  edge = np.where(vertex >= 0, vertex, edge)
  return edge, vertex

class SubMesh:
  def __init__(self, polygon, nodes, triangles):
    self.polygon = polygon
    self.nodes, self.triangles = frozen(nodes), frozen(triangles, dtype=np.int64)
    e = self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
    d = self.nodes[e[:, 0]] - self.nodes[e[:, 1]]
    self.h = float(np.max(np.hypot(d[:, 0], d[:, 1])))
    self.node_edge, self.node_vertex = classify_boundary_points(polygon, self.nodes)
    self.node_edge.flags.writeable = self.node_vertex.flags.writeable = False
    # boundary facets: mesh edges owned by a single triangle
    key = np.sort(e, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    self.facets = frozen(uniq[counts == 1], dtype=np.int64)
    mid = self.nodes[self.facets].mean(axis=1)
    self.facet_edge = frozen(classify_boundary_points(polygon, mid)[0], dtype=np.int64)

  def areas(self):
    v = self.nodes[self.triangles]
    a, b = v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]
    return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])

  @property
  def n_triangles(self): return len(self.triangles)

  def __repr__(self):
    return f"SubMesh({self.n_triangles} triangles, {len(self.nodes)} nodes, h={self.h:.4g})"

def _cross(o, a, b):
  return (a[0]-o[0]) * (b[1]-o[1]) - (a[1]-o[1]) * (b[0]-o[0])

def _inside(p, a, b, c, eps):
  return _cross(a, b, p) >= -eps and _cross(b, c, p) >= -eps and _cross(c, a, p) >= -eps

def _min_angle(a, b, c):
  ang = []
  for o, u, w in ((a, b, c), (b, c, a), (c, a, b)):
    x, y = u - o, w - o
    ang.append(math.acos(np.clip(x @ y / (np.hypot(*x) * np.hypot(*y)), -1, 1)))
  return min(ang)

def ear_clip(vertices):
  """
  triangulates a simple ccw polygon by repeatedly removing its best shaped ear
  """
  v = np.asarray(vertices, dtype=float)
  idx = list(range(len(v)))
  eps = 1e-14 * max(1.0, float(np.max(np.abs(v))))**2
  tris = []
  while len(idx) > 3:
    best, best_q = None, -1.0
    n = len(idx)
    for j in range(n):
      i0, i1, i2 = idx[j-1], idx[j], idx[(j+1) % n]
      a, b, c = v[i0], v[i1], v[i2]
      if _cross(a, b, c) <= eps: continue   # reflex or flat
      if any(_inside(v[m], a, b, c, eps) for m in idx if m not in (i0, i1, i2)): continue
      q = _min_angle(a, b, c)
      if q > best_q: best, best_q = j, q
    if best is None: raise MeshError("ear clipping found no ear, polygon is not simple")
    n = len(idx)
    tris.append((idx[best-1], idx[best], idx[(best+1) % n]))
    idx.pop(best)
  tris.append(tuple(idx))
  return np.array(tris, dtype=np.int64)

def refine(nodes, triangles):
  # one uniform midpoint refinement, children stay counter-clockwise
  e = np.sort(triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2), axis=1)
  uniq, inv = np.unique(e, axis=0, return_inverse=True)
  mids = len(nodes) + inv.reshape(-1, 3)
  nodes = np.vstack([nodes, nodes[uniq].mean(axis=1)])
  v0, v1, v2 = triangles.T
  m01, m12, m20 = mids.T
  children = np.concatenate([np.stack([v0, m01, m20], 1), np.stack([m01, v1, m12], 1),
                             np.stack([m20, m12, v2], 1), np.stack([m01, m12, m20], 1)])
  return nodes, children

def _diameters(nodes, triangles):
  v = nodes[triangles]
  d = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 1], v[:, 0] - v[:, 2]], axis=1)
  return np.max(np.hypot(d[..., 0], d[..., 1]), axis=1)

def triangulate(p, h_target):
  if not h_target > 0: raise MeshError(f"h_target must be positive, got {h_target}")
  nodes, tris = np.array(p.vertices), ear_clip(p.vertices)
  levels = 0
  while np.max(_diameters(nodes, tris)) > h_target:
    nodes, tris = refine(nodes, tris)
    levels += 1
  mesh = SubMesh(p, nodes, tris)
  a = mesh.areas()
  if np.min(a) < 1e-14 * p.area: raise MeshError(f"degenerate triangle of area {np.min(a):.3e}")
  if abs(a.sum() - p.area) > 1e-12 * p.area: raise MeshError(f"sub-mesh area {a.sum()} != polygon area {p.area}")
  debug(f"triangulated {p} into {mesh} after {levels} refinements", 2)
  return mesh
