# %% [markdown]
# Along the computed solution: Omega_n at the tracked characteristics,
# psi_n = -ln Phi_n and the residuals of the growth inequalities.

# %%
from boussinesq1d import (InitialData, StepControl, advance, blowup_bound_report, check_inequalities,
                          discretize, find_xn, track)

data = InitialData.blowup(200.0)
labels = [find_xn(data.rho0, n) for n in range(1, 9)] + [0.5]
traj = advance(discretize(data, 4000, extra_labels=labels), StepControl(t_end=1.0), rho0=data.rho0, tracked=labels)
trace = track(traj, data.rho0, n_max=8)
print("Omega_n(0):", trace.Omega[:, 0].round(2))
print("psi_n at the last snapshot:", trace.psi[:, -1].round(3))

# %%
report = check_inequalities(trace)
print(report.passed(5))
print(blowup_bound_report(trace))
