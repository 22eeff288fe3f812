"""A ring around a central trap behaves like a dimer.

With no coupling along the ring, the symmetric ring state couples to the
centre with strength sqrt(n) * v_spoke. Four spokes of 0.5 therefore give
the same survival curve as a dimer with V = 1.
"""

# %%
import numpy as np

from lindblad_dimer import (
    DensityMatrix,
    DimerParams,
    build_liouvillian,
    evolve_spectral,
    make_dimer,
    ring_with_central_trap,
    spectral_decompose,
    survival_probability,
)

times = np.linspace(0, 20, 401)

# %%
ring = ring_with_central_trap(4, v_ring=0.0, v_spoke=0.5, gamma=1.0)
psi = np.r_[np.full(4, 0.5), 0.0]
ring_pi = evolve_spectral(
    spectral_decompose(build_liouvillian(ring, 0.0)), DensityMatrix.pure(psi), times
).survival
dimer_pi = survival_probability(make_dimer(DimerParams(v=1.0)), 0.0, times)
print("max |ring - dimer| =", np.max(np.abs(ring_pi - dimer_pi)))

# %% A single ring node overlaps the symmetric state with weight 1/4; the rest is dark and never trapped
local = evolve_spectral(
    spectral_decompose(build_liouvillian(ring, 0.0)), DensityMatrix.localized(5, 0), times
).survival
print("pi(20) symmetric start:", round(ring_pi[-1], 6), " single node:", round(local[-1], 6))
