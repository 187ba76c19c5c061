# %% [markdown]
# Picard iteration on a fixed grid against the particle solver, M = 10 up to t = 0.05.

# %%
import numpy as np
from scipy.interpolate import CubicSpline

from boussinesq1d import InitialData, StepControl, advance, discretize, picard_solve

data = InitialData.blowup(10.0)
res = picard_solve(data, 0.05, 8, 2000)
print("iterate distances:", ["%.2e" % d for d in res.distances])

ref = advance(discretize(data, 8000), StepControl(t_end=0.05)).final
lag = CubicSpline(ref.phi, ref.omega)(res.state.phi)
print("max |omega_Picard - omega_particles| =", np.abs(lag - res.state.omega).max())
