"""Lifetime maps over the (lambda, delta) plane.

Scans a coarse grid in parallel and prints the tau3 map, where a ridge
at small dephasing and delta near 0.7 stands out. The full fine-grained
scan is ``lindblad-dimer scan --lambda 0:3:0.05 --delta 0:3:0.05``.
"""

# %%
import numpy as np

from lindblad_dimer import grid_scan

lams = np.round(np.arange(0, 3.01, 0.25), 10)
deltas = np.round(np.arange(0, 3.01, 0.25), 10)

if __name__ == "__main__":
    grid = grid_scan(lams, deltas, jobs=4)

    # %% tau3 map, rows are delta, columns lambda
    tau3 = grid.field("tau3")
    print("delta\\lambda " + " ".join(f"{x:6.2f}" for x in lams))
    for d, row in zip(deltas, tau3):
        print(f"{d:12.2f} " + " ".join(f"{x:6.3f}" for x in row))

    # %% Where tau2 is smallest at each offset
    tau2 = grid.field("tau2")
    for d, row in zip(deltas, tau2):
        print(f"delta={d:4.2f}: argmin_lambda tau2 = {lams[int(np.argmin(row))]:.2f}")
