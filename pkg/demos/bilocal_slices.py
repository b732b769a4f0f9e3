"""Scanning the two bilocal slices on a coarse grid.

Points that fit are marked '#', points that do not are '.'. The first
slice should follow sqrt|I| + sqrt|J| <= 1, the second |X| + |Y| <= 1.
A 9x9 grid takes tens of minutes on one core; pass a smaller N for a quick look.
"""
# %%
import math
import os
import sys

import numpy as np

from netlocal import NetworkTopology, SolverSettings
from netlocal.experiments import grid_csv, grid_sweep

N = int(sys.argv[1]) if len(sys.argv) > 1 else 9
grid = np.linspace(-1, 1, N)
bilocal = NetworkTopology.bilocal()
settings = SolverSettings(restarts=8, master_seed=0, stop_on_success=True,
                          workers=os.cpu_count() or 1)


# %%
def show(records, measure):
    by_point = {r.params: r for r in records}
    for y in grid[::-1]:
        row = "".join(" #" if by_point[(float(x), float(y))].success else " ." for x in grid)
        print(f"{y:+.2f} |{row}")
    # disagreements right at the boundary are expected at any finite threshold
    far = [r for r in records if abs(measure(*r.params) - 1) > 0.05]
    wrong = [r.params for r in far if r.success != (measure(*r.params) < 1)]
    print(f"{len(wrong)} of {len(far)} points away from the boundary disagree\n")


print("(I, J) slice")
ij = grid_sweep("bilocal-ij", grid, grid, bilocal, (4, 4), settings)
show(ij, lambda i, j: math.sqrt(abs(i)) + math.sqrt(abs(j)))

print("(X, Y) slice")
xy = grid_sweep("bilocal-xy", grid, grid, bilocal, (4, 4), settings)
show(xy, lambda x, y: abs(x) + abs(y))

# %%
grid_csv(xy, "bilocal_xy.csv")
