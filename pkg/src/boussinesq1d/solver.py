"""Particle (characteristics) solver for the coupled density/vorticity system.

Each particle carries a fixed label x, its position phi, the conserved
density rho0(x) and its vorticity.  The ODE system

    dphi_i/dt = u(phi_i) = -phi_i Omega(phi_i),
    domega_i/dt = (d rho/dx)(phi_i),

is advanced with classical RK4.  The density gradient is the label-wise
difference quotient over the current positions, so it sharpens exactly when
characteristics compress.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .biotsavart import UnreliableQuadrature, VelocityField
from .fields import ParticleState, SmoothProfile

REACHED_T_END = "reached_t_end"
BLOWUP_FLAGGED = "blowup_flagged"
BROKEN_ORDERING = "broken_ordering"
UNRELIABLE = "unreliable_quadrature"


def drho_dx(phi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Centered difference (rho_{i+1} - rho_{i-1}) / (phi_{i+1} - phi_{i-1}), one-sided at the ends."""
    out = np.empty_like(phi)
    out[1:-1] = (rho[2:] - rho[:-2]) / (phi[2:] - phi[:-2])
    out[0] = (rho[1] - rho[0]) / (phi[1] - phi[0])
    out[-1] = (rho[-1] - rho[-2]) / (phi[-1] - phi[-2])
    return out


def min_relative_gap(phi: np.ndarray) -> float:
    """Smallest (phi_{i+1} - phi_i) / phi_{i+1}; below ~1e-16 neighbours are no longer distinct doubles."""
    return float(np.min(np.diff(phi) / phi[1:]))


def _rhs(phi, omega, rho):
    field_ = VelocityField(ParticleState(0.0, phi, phi, rho, omega))
    return field_.nodal_velocity(), drho_dx(phi, rho)


def step(state: ParticleState, dt: float) -> ParticleState:
    """One RK4 step; the result is marked broken if particle positions cross."""
    if state.broken:
        raise ValueError("cannot step a broken state")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    phi, omega, rho = state.phi, state.omega, state.rho
    k1p, k1w = _rhs(phi, omega, rho)
    k2p, k2w = _rhs(phi + 0.5 * dt * k1p, omega + 0.5 * dt * k1w, rho)
    k3p, k3w = _rhs(phi + 0.5 * dt * k2p, omega + 0.5 * dt * k2w, rho)
    k4p, k4w = _rhs(phi + dt * k3p, omega + dt * k3w, rho)
    new_phi = phi + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    new_omega = omega + dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    new_phi[0], new_phi[-1] = 0.0, 1.0
    broken = not bool(np.all(np.diff(new_phi) > 0))
    return state.evolve(t=state.t + dt, phi=new_phi, omega=new_omega, broken=broken)


@dataclass(frozen=True)
class StepControl:
    """Adaptive step rule dt = min(dt_max, cfl / max(1, sup|du/dx|)) and stop conditions."""

    t_end: float
    dt_max: float = 1e-2
    cfl: float = 0.5
    sup_dxu_max: float = 1e6
    gap_min: float = 1e-10
    output_every: int = 1
    regrid: bool = False
    rel_gap_max: float = 0.05
    abs_gap_max: float = 0.01
    max_particles: int = 20_000

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ValueError("t_end must be nonnegative")
        if not self.dt_max > 0:
            raise ValueError("dt_max must be positive")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.output_every < 1:
            raise ValueError("output_every must be >= 1")

    def dt(self, sup_dxu: float) -> float:
        return min(self.dt_max, self.cfl / max(1.0, sup_dxu))


@dataclass
class Trajectory:
    snapshots: list[ParticleState]
    steps: dict[str, list] = field(default_factory=lambda: {"step": [], "t": [], "dt": [], "sup_dxu": [], "min_gap": []})
    reason: str = REACHED_T_END
    flag_time: Optional[float] = None
    tracked: tuple[float, ...] = ()

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def final(self) -> ParticleState:
        return self.snapshots[-1]

    def series(self, label: float) -> np.ndarray:
        """Position of the characteristic with this label at every snapshot."""
        return np.array([s.position_of(label) for s in self.snapshots])


def regrid(
    state: ParticleState,
    rho0: SmoothProfile,
    rel_gap_max: float = 0.05,
    abs_gap_max: float = 0.01,
    max_particles: int = 20_000,
    omega_rule: str = "conservative",
) -> ParticleState:
    """Insert a particle at the label midpoint of every overstretched cell.

    A cell is overstretched if it is wider than ``abs_gap_max`` or its
    relative width (phi_{i+1} - phi_i)/phi_{i+1} exceeds ``rel_gap_max``,
    and it carries density or vorticity.  The new particle gets rho0 at its
    label exactly and its position from monotone cubic interpolation in
    label space.  Its vorticity is either chosen so that omega/y is linear
    across the split cell, which leaves the trapezoid Omega at every old
    particle unchanged (``omega_rule="conservative"``), or taken from the
    monotone cubic in label space (``"pchip"``).  Particles are never removed.
    """
    if omega_rule not in ("conservative", "pchip"):
        raise ValueError(f"unknown omega_rule {omega_rule!r}")
    phi, labels = state.phi, state.labels
    gap = np.diff(phi)
    active = (state.omega[1:] != 0) | (state.omega[:-1] != 0) | (state.rho[1:] != 0) | (state.rho[:-1] != 0)
    stretched = ((gap > abs_gap_max) | (gap / phi[1:] > rel_gap_max)) & active
    cells = np.flatnonzero(stretched)
    room = max_particles - state.size
    if cells.size == 0 or room <= 0:
        return state
    cells = cells[:room]
    new_labels = 0.5 * (labels[cells] + labels[cells + 1])
    keep = (new_labels > labels[cells]) & (new_labels < labels[cells + 1])
    cells, new_labels = cells[keep], new_labels[keep]
    if cells.size == 0:
        return state
    new_phi = PchipInterpolator(labels, phi)(new_labels)
    # monotone interpolation keeps new positions inside their cell; clamp against rounding
    new_phi = np.clip(new_phi, phi[cells], phi[cells + 1])
    if omega_rule == "pchip":
        new_omega = PchipInterpolator(labels, state.omega)(new_labels)
    else:
        f = VelocityField(state).integrand
        lam = (new_phi - phi[cells]) / (phi[cells + 1] - phi[cells])
        new_omega = new_phi * ((1 - lam) * f[cells] + lam * f[cells + 1])
    at = cells + 1
    return state.evolve(
        labels=np.insert(labels, at, new_labels),
        phi=np.insert(phi, at, new_phi),
        rho=np.insert(state.rho, at, np.asarray(rho0(new_labels), dtype=float)),
        omega=np.insert(state.omega, at, new_omega),
    )


def advance(
    state: ParticleState,
    control: StepControl,
    rho0: Optional[SmoothProfile] = None,
    tracked: Sequence[float] = (),
    start_step: int = 0,
    on_snapshot: Optional[Callable[[int, ParticleState], None]] = None,
) -> Trajectory:
    """Step adaptively until t_end or a stop condition.

    Snapshots are kept every ``control.output_every`` steps (counted from
    step 0, so a run resumed at ``start_step`` records the same snapshots)
    plus the initial and final states.  ``on_snapshot(step, state)`` is
    called for every recorded snapshot.
    """
    if control.regrid and rho0 is None:
        raise ValueError("regridding needs rho0 to set the density of inserted particles")
    for label in tracked:
        state.index_of(label)
    traj = Trajectory(snapshots=[state], tracked=tuple(tracked))
    if on_snapshot:
        on_snapshot(start_step, state)
    n = start_step
    last_recorded = n

    def record(s):
        nonlocal last_recorded
        if last_recorded != n:
            traj.snapshots.append(s)
            last_recorded = n
            if on_snapshot:
                on_snapshot(n, s)

    while True:
        try:
            sup = VelocityField(state).sup_velocity_gradient()
        except UnreliableQuadrature:
            traj.reason = UNRELIABLE
            break
        gap = min_relative_gap(state.phi)
        if sup > control.sup_dxu_max or gap < control.gap_min:
            traj.reason = BLOWUP_FLAGGED
            traj.flag_time = state.t
            break
        if state.t >= control.t_end:
            traj.reason = REACHED_T_END
            break
        dt = control.dt(sup)
        remaining = control.t_end - state.t
        last = dt >= remaining
        if last:
            dt = remaining
        try:
            new = step(state, dt)
        except UnreliableQuadrature:
            traj.reason = UNRELIABLE
            break
        if last:
            new = new.evolve(t=control.t_end)
        n += 1
        for key, val in zip(("step", "t", "dt", "sup_dxu", "min_gap"), (n, new.t, dt, sup, gap)):
            traj.steps[key].append(val)
        if new.broken:
            traj.reason = BROKEN_ORDERING
            state = new
            break
        if control.regrid:
            new = regrid(new, rho0, control.rel_gap_max, control.abs_gap_max, control.max_particles)
        state = new
        if n % control.output_every == 0:
            record(state)
    record(state)
    return traj
