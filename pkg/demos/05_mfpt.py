"""Mean first-passage time to the trap as a function of dephasing.

The integral of the survival probability comes from a single linear
solve against the Liouvillian, with no time stepping.
"""

# %%
import numpy as np

from lindblad_dimer import DensityMatrix, DimerParams, build_liouvillian, make_dimer, mean_first_passage

rho0 = DensityMatrix.localized(2, 0)
lams = np.round(np.arange(0, 2.01, 0.125), 10)

# %%
for delta in (0.0, 1.5):
    values = [
        mean_first_passage(build_liouvillian(make_dimer(DimerParams(delta=delta)), x), rho0)
        for x in lams
    ]
    best = int(np.argmin(values))
    print(f"delta={delta}: mfpt(0)={values[0]:.4f}  min {values[best]:.4f} at lambda={lams[best]}")
