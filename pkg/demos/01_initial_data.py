# %% [markdown]
# Initial data for the blow-up scenario: a density bump rho0 on [1/4, 3/4]
# pinned at rho0(1/3) = 1 and rho0(1/2) = 2, and a vorticity plateau of
# height M on [0.3, 0.45].

# %%
import numpy as np

from boussinesq1d import InitialData, find_xn

data = InitialData.blowup(200.0)
print("rho0(1/3) =", data.rho0(1 / 3), " rho0(1/2) =", data.rho0(0.5))
print("omega0 on the plateau:", data.omega0(np.array([0.3, 0.375, 0.45])))

# %% [markdown]
# The tracked labels x_n solve rho0(x_n) = 1/2 + 2^-n on the increasing branch.

# %%
for n in range(1, 9):
    x = find_xn(data.rho0, n)
    print(f"x_{n} = {x:.12f}   rho0 = {data.rho0(x):.12f}")
