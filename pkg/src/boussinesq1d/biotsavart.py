"""Model Biot-Savart law u(x) = -x Omega(x), Omega(x) = int_x^1 omega(y)/y dy.

Omega is evaluated by the trapezoid rule on the (nonuniform) particle mesh,
with omega interpolated linearly between particles.  All nodal values come
from a single backward cumulative sum.
"""
from __future__ import annotations

import numpy as np

from .fields import ParticleState

# positions below the smallest normal double are treated as sitting at the origin;
# anything larger is still resolvable and is integrated as omega/y
ORIGIN_TOL = float(np.finfo(float).tiny)


class UnreliableQuadrature(ArithmeticError):
    """Omega would require integrating omega/y across a nonvanishing singularity at the origin."""


def _integrand(phi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """omega/y at the particles, with the origin handled by the linear-interpolant limit."""
    f = np.empty_like(phi)
    far = phi >= ORIGIN_TOL
    f[far] = omega[far] / phi[far]
    near = ~far
    if np.any(near):
        if np.any(omega[near] != 0.0):
            raise UnreliableQuadrature("nonzero vorticity carried by a particle at the origin")
        # omega(y)/y on the first cell of a piecewise-linear omega vanishing at 0
        first = int(np.argmax(far)) if np.any(far) else None
        f[near] = 0.0
        if first is not None and first > 0:
            f[first - 1] = omega[first] / phi[first]
    return f


def cumulative_omega_cap(phi: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Omega at every particle: Omega_N = 0, Omega_i = Omega_{i+1} + trapezoid over [phi_i, phi_{i+1}]."""
    f = _integrand(phi, omega)
    cell = 0.5 * np.diff(phi) * (f[1:] + f[:-1])
    out = np.zeros_like(phi)
    out[:-1] = np.cumsum(cell[::-1])[::-1]
    return out


class VelocityField:
    """Omega, u and du/dx of one particle snapshot.

    Nodal Omega values are computed once; evaluations between particles add
    the partial trapezoid cell from x to the next particle.
    """

    def __init__(self, state: ParticleState):
        self.state = state
        self.phi = state.phi
        self.omega = state.omega
        self.integrand = _integrand(self.phi, self.omega)
        cell = 0.5 * np.diff(self.phi) * (self.integrand[1:] + self.integrand[:-1])
        self.nodal = np.zeros_like(self.phi)
        self.nodal[:-1] = np.cumsum(cell[::-1])[::-1]

    def vorticity(self, x):
        return np.interp(x, self.phi, self.omega)

    def omega_cap(self, x):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 1)):
            raise ValueError("evaluation points must lie in [0, 1]")
        phi, nodal = self.phi, self.nodal
        k = np.clip(np.searchsorted(phi, x, side="right"), 1, phi.size - 1)
        w = self.vorticity(x)
        right = phi[k]
        tiny = x < ORIGIN_TOL
        if np.any(tiny & (w != 0.0)):
            raise UnreliableQuadrature("Omega requested at the origin where omega does not vanish")
        with np.errstate(divide="ignore", invalid="ignore"):
            fx = np.where(tiny, self.omega[k] / right, w / x)
        partial = 0.5 * (right - x) * (fx + self.omega[k] / right)
        out = nodal[k] + partial
        # exact nodal values where x hits a particle
        on = phi[k - 1] == x
        out = np.where(on, nodal[k - 1], out)
        out = np.where(x == 1.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    def velocity(self, x):
        x = np.asarray(x, dtype=float)
        out = -x * np.asarray(self.omega_cap(x))
        out = np.where((x == 0.0) | (x == 1.0), 0.0, out)
        return float(out) if out.ndim == 0 else out

    def velocity_gradient(self, x):
        x = np.asarray(x, dtype=float)
        out = -np.asarray(self.omega_cap(x)) + self.vorticity(x)
        return float(out) if out.ndim == 0 else out

    def nodal_velocity(self) -> np.ndarray:
        u = -self.phi * self.nodal
        u[0] = u[-1] = 0.0
        return u

    def nodal_velocity_gradient(self) -> np.ndarray:
        return self.omega - self.nodal

    def sample_points(self) -> np.ndarray:
        """Particle positions and cell midpoints, interleaved."""
        phi = self.phi
        pts = np.empty(2 * phi.size - 1)
        pts[0::2] = phi
        pts[1::2] = 0.5 * (phi[1:] + phi[:-1])
        return pts

    def sup_velocity_gradient(self) -> float:
        nodes = np.abs(self.nodal_velocity_gradient())
        phi, omega, nodal = self.phi, self.omega, self.nodal
        mid = 0.5 * (phi[1:] + phi[:-1])
        wm = 0.5 * (omega[1:] + omega[:-1])
        with np.errstate(divide="ignore", invalid="ignore"):
            fm = np.where(mid >= ORIGIN_TOL, wm / mid, 0.0)
        om_mid = nodal[1:] + 0.5 * (phi[1:] - mid) * (fm + self.integrand[1:])
        mids = np.abs(wm - om_mid)
        return float(max(nodes.max(), mids.max()))


def omega_cap(state: ParticleState, x):
    return VelocityField(state).omega_cap(x)


def velocity(state: ParticleState, x):
    return VelocityField(state).velocity(x)


def velocity_gradient(state: ParticleState, x):
    return VelocityField(state).velocity_gradient(x)


def sup_velocity_gradient(state: ParticleState) -> float:
    return VelocityField(state).sup_velocity_gradient()
