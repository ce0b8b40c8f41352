"""
constructed dimension of the reduced setting next to its closed form

How to run: 'python3 demos/reduced.py'
"""
from tabulate import tabulate
from polyhdiv.geometry import load_polygon, ACCEPTANCE_NONAGON
from polyhdiv.hkspace import ElementSpec, build_space

if __name__ == "__main__":
  p = load_polygon(ACCEPTANCE_NONAGON)
  rows = []
  for k in range(3):
    rep = build_space(p, ElementSpec.reduced(k, h_target=p.diameter / 8)).dimension_report()
    rows.append([k, rep["constructed"], rep["gram_rank"], rep["closed_form"], f"{rep['gram_ratio']:.2e}"])
  print(tabulate(rows, headers=["k", "generators", "gram rank", "closed form", "gram ratio"]))
