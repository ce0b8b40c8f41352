"""
H(div) element of order k on the acceptance nonagon

builds the nodal basis, prints its classification and runs the property checks

the environment variable VIZ plots the sub-mesh and the normal traces of the duals of one edge

How to run: 'VIZ=1 K=1 python3 demos/nonagon.py'
"""
import os
import numpy as np
from polyhdiv.geometry import load_polygon, ACCEPTANCE_NONAGON
from polyhdiv.hkspace import ElementSpec
from polyhdiv.element import build_element
from polyhdiv.verify import run_suite

if __name__ == "__main__":
  k = int(os.getenv("K", "1"))
  p = load_polygon(ACCEPTANCE_NONAGON)
  spec = ElementSpec(k, normal_config=os.getenv("CONFIG", "ia"))

  nb = build_element(p, spec)
  print(nb)
  for row in nb.classification.per_edge: print(row)

  report = run_suite(p, spec, levels=int(os.getenv("LEVELS", "1")))
  print(report.table())

  if os.getenv("VIZ") == "1":
    import matplotlib.pyplot as plt
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(12, 5))
    mesh = nb.space.mesh
    ax1.triplot(mesh.nodes[:, 0], mesh.nodes[:, 1], mesh.triangles, lw=0.3)
    ax1.plot(*np.vstack([p.vertices, p.vertices[:1]]).T, "k")
    ax1.set_aspect("equal")
    t = np.linspace(0, 1, 65)
    for i in nb.dofs.indices(edge=0):
      for e in p.edges:
        ax2.plot(e.index + t, nb.normal_traces(e.index, t, [i])[0], color=f"C{i % 10}",
                 label=f"dof {i} ({nb.classification.labels[i]})" if e.index == 0 else None)
    ax2.set_xlabel("edge index + t")
    ax2.set_ylabel("phi . n")
    ax2.legend()
    plt.show()
