"""Stage lifetimes and the dephasing rate that minimises them.

tau_s is the time for the survival probability to fall from e^-(s-1) to
e^-s; tau_inf is the inverse of the slowest Liouvillian decay rate. For
an offset dimer, tau2, tau3 and tau_inf share an interior minimum in the
dephasing rate.
"""

# %%
from lindblad_dimer import DimerParams, lifetimes, optimal_lambda

# %% Lifetimes along the dephasing axis at delta = 1.5
print(f"{'lambda':>7} {'tau1':>8} {'tau2':>8} {'tau3':>8} {'tau_inf':>8}")
for lam in (0.0, 0.25, 0.5, 0.75, 1.0, 2.0, 5.0):
    r = lifetimes(DimerParams(delta=1.5, lam=lam))
    print(f"{lam:7.2f} {r.tau1:8.4f} {r.tau2:8.4f} {r.tau3:8.4f} {r.tau_inf:8.4f}")

# %% Optimal dephasing for each lifetime
for which in ("tau1", "tau2", "tau3", "tau_inf", "mfpt"):
    opt = optimal_lambda(1.5, which=which, lam_max=5.0)
    tag = "interior" if opt.interior else "boundary"
    print(f"{which:>7}: lambda* = {opt.lambda_star:.3f}  min = {opt.tau_min:.4f}  ({tag})")
