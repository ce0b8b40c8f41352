#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/
#
# transfer matrix sigma_i(g_j), its inverse and the nodal basis

import numpy as np
import scipy.linalg
from polyhdiv.errors import AdmissibilityError, UnisolvenceError, UsageError
from polyhdiv.dofs import make_dofs
from polyhdiv.geometry import Polygon, SubMesh, check_admissibility
from polyhdiv.hkspace import ElementSpec, SpaceBasis, Combination, build_space, generator_from_dict
from polyhdiv.poisson import fe_space
from polyhdiv.utils import debug, progress, parallel_map, frozen, write_archive, read_archive

COND_SINGULAR = 1e12
ARCHIVE_VERSION = 1
LABELS = ("normal", "degenerate-normal", "constant-lift", "internal")

# ************ transfer matrix ************

class TransferMatrix:
  def __init__(self, matrix, space, dofs):
    self.matrix = frozen(matrix)
    self.space, self.dofs = space, dofs
    assert self.matrix.shape == (len(dofs), len(space))
    self.cond = float(np.linalg.cond(self.matrix)) if self.matrix.size else 1.0

  @property
  def shape(self): return self.matrix.shape

  def __repr__(self): return f"TransferMatrix({self.shape[0]}x{self.shape[1]}, cond={self.cond:.3e})"

def assemble_transfer_matrix(space, dofs):
  if len(dofs) != len(space):
    raise AdmissibilityError(f"{len(dofs)} degrees of freedom for {len(space)} generators")
  if dofs.internal: dofs.table(space.fe)
  cols = parallel_map(dofs.evaluate, progress(space.generators, desc="transfer", total=len(space)))
  tm = TransferMatrix(np.stack(cols, axis=1), space, dofs)
  debug(f"assembled {tm}", 1)
  return tm

def invert(T):
  """
  inverse through a column pivoted QR, T P = Q R  =>  T^-1 = P R^-1 Q^T
  """
  Q, R, piv = scipy.linalg.qr(T, pivoting=True)
  X = scipy.linalg.solve_triangular(R, Q.T)
  C = np.empty_like(X)
  C[piv] = X
  return C

def kronecker_defect(T, C):
  return float(np.max(np.abs(T @ C - np.eye(len(T))))) if len(T) else 0.0

# ************ nodal basis ************

class NodalBasis:
  """
  phi_j = sum_m coeffs[m, j] g_m, dual to the dof set: sigma_i(phi_j) = delta_ij
  batched evaluators return one row per basis function (all of them, or idx)
  """
  def __init__(self, tm, coeffs):
    self.transfer = tm
    self.space, self.dofs = tm.space, tm.dofs
    self.polygon, self.spec = tm.space.polygon, tm.space.spec
    self.coeffs = frozen(coeffs)
    self.cond = tm.cond
    self.kronecker = kronecker_defect(tm.matrix, self.coeffs)
    self.classification = None

  def __len__(self): return self.coeffs.shape[1]

  def function(self, i):
    return Combination(self.space.generators, self.coeffs[:, i])

  @property
  def functions(self): return [self.function(i) for i in range(len(self))]

  def _combine(self, fxn, idx=None):
    G = np.stack([fxn(g) for g in self.space.generators])
    C = self.coeffs if idx is None else self.coeffs[:, idx]
    return np.tensordot(C.T, G, axes=1)

  def traces(self, edge, t, idx=None):
    t = np.asarray(t, dtype=float)
    return self._combine(lambda g: g.trace(edge, t), idx)

  def normal_traces(self, edge, t, idx=None):
    return np.einsum('c,jc...->j...', self.polygon.edges[edge].normal, self.traces(edge, t, idx))

  def node_values(self, nodes, idx=None): return self._combine(lambda g: g.node_values(nodes), idx)
  def cell_values(self, ref_pts, cells=None, idx=None): return self._combine(lambda g: g.cell_values(ref_pts, cells), idx)
  def cell_divergence(self, ref_pts, cells=None, idx=None): return self._combine(lambda g: g.cell_divergence(ref_pts, cells), idx)
  def evaluate(self, pts, idx=None): return self._combine(lambda g: g.evaluate(pts), idx)

  def indices(self, label):
    return [i for i, l in enumerate(self.classification.labels) if l == label]

  def __repr__(self):
    counts = None if self.classification is None else self.classification.counts
    return f"NodalBasis({len(self)} functions, cond={self.cond:.3e}, kronecker={self.kronecker:.2e}, {counts})"

class Classification:
  def __init__(self, labels, peaks, per_edge, tol_zero):
    self.labels, self.peaks, self.per_edge, self.tol_zero = list(labels), peaks, per_edge, tol_zero

  @property
  def counts(self): return {l: self.labels.count(l) for l in LABELS}

  @property
  def effective_internal(self):
    # duals that can be reclassified as internal functions
    c = self.counts
    return c["internal"] + c["degenerate-normal"] + c["constant-lift"]

  def to_dict(self):
    return {"labels": self.labels, "counts": self.counts, "per_edge": self.per_edge,
            "effective_internal": self.effective_internal, "tol_zero": self.tol_zero}

def classify(nb, tol_zero=1e-4, samples=17):
  """
  normal duals whose normal trace vanishes on every edge, relative to the largest
  normal dual trace, are degenerate-normal
  """
  t = np.linspace(0.0, 1.0, samples)
  peaks = np.zeros(len(nb))
  for e in nb.polygon.edges:
    peaks = np.maximum(peaks, np.max(np.abs(nb.normal_traces(e.index, t)), axis=1))
  normal = [i for i, d in enumerate(nb.dofs) if d.edge is not None]
  ref = max([peaks[i] for i in normal], default=0.0)
  labels = []
  for i, d in enumerate(nb.dofs):
    if d.kind == "InternalMoment": labels.append("internal")
    elif d.kind == "BoundaryMean": labels.append("constant-lift")
    elif peaks[i] <= tol_zero * ref: labels.append("degenerate-normal")
    else: labels.append("normal")
  per_edge = [{"edge": e.index,
               "normal": sum(1 for i in normal if nb.dofs[i].edge.index == e.index and labels[i] == "normal"),
               "degenerate-normal": sum(1 for i in normal if nb.dofs[i].edge.index == e.index and labels[i] == "degenerate-normal")}
              for e in nb.polygon.edges]
  return Classification(labels, peaks, per_edge, tol_zero)

def build_nodal_basis(tm, tol_kron=1e-6, tol_zero=1e-4, cond_singular=COND_SINGULAR):
  if not np.isfinite(tm.cond) or tm.cond > cond_singular:
    raise UnisolvenceError(f"transfer matrix is numerically singular, cond {tm.cond:.3e} > {cond_singular:.0e}: "
                           "inadmissible degrees of freedom or too coarse a sub-mesh")
  nb = NodalBasis(tm, invert(tm.matrix))
  if nb.kronecker > tol_kron:
    raise UnisolvenceError(f"kronecker defect {nb.kronecker:.3e} above {tol_kron:.0e}")
  nb.classification = classify(nb, tol_zero)
  debug(f"built {nb}", 1)
  return nb

def build_element(p, spec, mesh=None, tol_kron=1e-6, tol_zero=1e-4):
  """
  space, dofs, transfer matrix and nodal basis in one go
  """
  dofs = make_dofs(p, spec)
  space = build_space(p, spec, mesh)
  return build_nodal_basis(assemble_transfer_matrix(space, dofs), tol_kron, tol_zero)

def _check_index(nb, i):
  if not 0 <= int(i) < len(nb): raise UsageError(f"basis index {i} out of range [0, {len(nb)})")
  return int(i)

def eval_basis(nb, i, point):
  pts = np.asarray(point, dtype=float).reshape(-1, 2)
  out = nb.evaluate(pts, [_check_index(nb, i)])[0]
  return out[:, 0] if np.ndim(point) == 1 else out

def normal_trace(nb, i, edge, t):
  if not 0 <= int(edge) < nb.polygon.n_faces: raise UsageError(f"edge {edge} out of range [0, {nb.polygon.n_faces})")
  out = nb.normal_traces(int(edge), np.atleast_1d(t), [_check_index(nb, i)])[0]
  return float(out[0]) if np.ndim(t) == 0 else out

# ************ archives ************

def save_element(nb, directory):
  """
  meta.json (spec, polygon, generator and dof metadata, classification) plus float64 blobs
  for the transfer matrix, its inverse, the sub-mesh and the generator FE values
  """
  space = nb.space
  meta = {"version": ARCHIVE_VERSION, "spec": nb.spec.to_dict(), "polygon": nb.polygon.to_document(),
          "fe_order": space.fe.r, "h": space.mesh.h, "generators": [g.to_dict() for g in space.generators],
          "dofs": nb.dofs.to_list(), "condition_number": nb.cond, "kronecker_defect": nb.kronecker,
          "classification": nb.classification.to_dict(), "dimension": space.dimension_report(),
          "admissibility": space.admissibility.to_dict()}
  arrays = {"transfer": nb.transfer.matrix, "inverse": nb.coeffs, "gram": space.gram,
            "mesh_nodes": space.mesh.nodes, "mesh_triangles": space.mesh.triangles,
            "generator_values": np.stack([g.field.values for g in space.generators])}
  return write_archive(directory, meta, arrays)

def load_element(directory):
  meta, arrays = read_archive(directory)
  if meta.get("version") != ARCHIVE_VERSION: raise UsageError(f"unsupported archive version {meta.get('version')}")
  p = Polygon(np.array(meta["polygon"]["vertices"]))
  spec = ElementSpec.from_dict(meta["spec"])
  mesh = SubMesh(p, arrays["mesh_nodes"], arrays["mesh_triangles"].astype(np.int64))
  fe = fe_space(mesh, meta["fe_order"])
  gens = [generator_from_dict(d, fe, v, p) for d, v in zip(meta["generators"], arrays["generator_values"])]
  space = SpaceBasis(p, spec, mesh, fe, gens, check_admissibility(p), gram=arrays["gram"])
  nb = NodalBasis(TransferMatrix(arrays["transfer"], space, make_dofs(p, spec)), arrays["inverse"])
  nb.classification = classify(nb, meta["classification"]["tol_zero"])
  return nb, meta
