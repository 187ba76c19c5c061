# %% [markdown]
# Particle run of the blow-up scenario (M = 200) until sup|du/dx| exceeds 1e6.

# %%
from boussinesq1d import InitialData, StepControl, accumulate, advance, discretize, find_xn

data = InitialData.blowup(200.0)
labels = [find_xn(data.rho0, n) for n in range(1, 9)] + [0.5]
state = discretize(data, 4000, extra_labels=labels)
traj = advance(state, StepControl(t_end=1.0), rho0=data.rho0, tracked=labels)
print("termination:", traj.reason, "at t =", traj.final.t)

# %% [markdown]
# The time integrals of ||omega||, ||du/dx|| and ||drho/dx|| grow together.

# %%
series = accumulate(traj)
for k in range(0, len(series), max(1, len(series) // 8)):
    print(f"t={series.t[k]:.5f}  sup omega={series.sup_omega[k]:.3e}  I_omega={series.I_omega[k]:.3f}")
