# %% [markdown]
# The velocity u = -x Omega with Omega(x) = int_x^1 omega(y)/y dy, evaluated
# from particles by trapezoid quadrature.  For omega = y(1 - y) the closed
# forms are Omega = (1 - x)^2 / 2 and du/dx = omega - Omega.

# %%
import numpy as np

from boussinesq1d import ParticleState, VelocityField

for N in (250, 500, 1000, 2000):
    x = np.linspace(0, 1, N + 1)
    field = VelocityField(ParticleState(0.0, x, x, np.zeros_like(x), x * (1 - x)))
    mid = (np.arange(N) + 0.5) / N
    err_cap = np.abs(field.omega_cap(mid) - (1 - mid) ** 2 / 2).max()
    err_u = np.abs(field.velocity(mid) + mid * (1 - mid) ** 2 / 2).max()
    print(f"N={N:5d}  Omega error {err_cap:.2e}  u error {err_u:.2e}")
