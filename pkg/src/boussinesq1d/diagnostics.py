"""Norms, BKM-type time integrals and identity residuals along a trajectory."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, fields
from typing import Optional, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .biotsavart import VelocityField
from .fields import ParticleState, SmoothProfile
from .solver import Trajectory, drho_dx

CSV_SCHEMA = "boussinesq1d-diagnostics/1"
CSV_COLUMNS = ("t", "sup_omega", "sup_dxu", "sup_dxrho", "I_omega", "I_dxu", "I_dxrho", "min_tracked_phi", "residual_x1")


@dataclass
class DiagnosticSeries:
    t: np.ndarray
    sup_omega: np.ndarray
    sup_dxu: np.ndarray
    sup_dxrho: np.ndarray
    l2_omega: np.ndarray
    min_tracked_phi: np.ndarray
    I_omega: np.ndarray
    I_dxu: np.ndarray
    I_dxrho: np.ndarray
    residual_x1: Optional[np.ndarray] = None

    def __len__(self):
        return self.t.size

    def value_at(self, name: str, t: float) -> float:
        return float(np.interp(t, self.t, getattr(self, name)))


def _trapz(y, x):
    return float(np.sum(0.5 * np.diff(x) * (y[1:] + y[:-1])))


def snapshot_norms(state: ParticleState) -> tuple[float, float, float, float]:
    """(sup|omega|, sup|du/dx|, sup|drho/dx|, ||omega||_L2) of one snapshot."""
    field_ = VelocityField(state)
    return (
        float(np.max(np.abs(state.omega))),
        field_.sup_velocity_gradient(),
        float(np.max(np.abs(drho_dx(state.phi, state.rho)))),
        float(np.sqrt(_trapz(state.omega**2, state.phi))),
    )


def accumulate(traj: Trajectory, residual_label: Optional[float] = None) -> DiagnosticSeries:
    """Per-snapshot norms and their running time integrals (trapezoid over snapshot times)."""
    if not traj.snapshots:
        raise ValueError("empty trajectory")
    t = traj.times
    norms = np.array([snapshot_norms(s) for s in traj.snapshots]).reshape(-1, 4)
    if traj.tracked:
        min_phi = np.array([min(s.position_of(x) for x in traj.tracked) for s in traj.snapshots])
    else:
        min_phi = np.full(t.size, np.nan)
    integral = lambda y: cumulative_trapezoid(y, t, initial=0.0) if t.size > 1 else np.zeros(1)
    residual = None
    if residual_label is not None and t.size >= 3:
        residual = omega_identity_residual(traj, residual_label)[1]
    return DiagnosticSeries(
        t=t,
        sup_omega=norms[:, 0],
        sup_dxu=norms[:, 1],
        sup_dxrho=norms[:, 2],
        l2_omega=norms[:, 3],
        min_tracked_phi=min_phi,
        I_omega=integral(norms[:, 0]),
        I_dxu=integral(norms[:, 1]),
        I_dxrho=integral(norms[:, 2]),
        residual_x1=residual,
    )


def identity_rhs(state: ParticleState, label: float) -> float:
    """int_{phi}^1 omega^2/y dy + int_{phi}^1 (drho/dx)/y dy, phi the position of ``label``."""
    i = state.index_of(label)
    phi = state.phi[i:]
    f = (state.omega[i:] ** 2 + drho_dx(state.phi, state.rho)[i:]) / phi
    return _trapz(f, phi)


def omega_identity_residual(traj: Trajectory, label: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Residual of d/dt Omega(t, phi_t(x)) = int omega^2/y + int (drho/dx)/y along one characteristic.

    Returns ``(t, residual, lower_accuracy)``; the time derivative is the
    second-order difference on the (nonuniform) snapshot times, one-sided at
    the first and last snapshot, which are flagged in ``lower_accuracy``.
    """
    if len(traj.snapshots) < 3:
        raise ValueError("need at least 3 snapshots")
    t = traj.times
    cap = np.array([VelocityField(s).nodal[s.index_of(label)] for s in traj.snapshots])
    rhs = np.array([identity_rhs(s, label) for s in traj.snapshots])
    lhs = np.gradient(cap, t, edge_order=2)
    flags = np.zeros(t.size, dtype=bool)
    flags[[0, -1]] = True
    return t, lhs - rhs, flags


def hardy_check(omega: Union[SmoothProfile, ParticleState], p: float, samples: int = 20_001) -> tuple[float, float]:
    """(||Omega||_p, p ||omega||_p) by trapezoid quadrature on the particle mesh or a uniform grid."""
    if not 1 <= p < np.inf:
        raise ValueError("p must be finite and >= 1")
    if isinstance(omega, ParticleState):
        state = omega
    else:
        x = np.linspace(0.0, 1.0, samples)
        w = np.asarray(omega(x), dtype=float)
        state = ParticleState(0.0, x, x, np.zeros_like(x), w)
    cap = VelocityField(state).nodal
    lhs = _trapz(np.abs(cap) ** p, state.phi) ** (1.0 / p)
    rhs = p * _trapz(np.abs(state.omega) ** p, state.phi) ** (1.0 / p)
    return lhs, rhs


def log_bound_check(state: ParticleState, x_min: float = 1e-14) -> float:
    """max |du/dx(x)| / (||omega||_inf (1 - ln x)) over particles and midpoints with x >= x_min."""
    W = float(np.max(np.abs(state.omega)))
    if W == 0:
        return 0.0
    field_ = VelocityField(state)
    x = field_.sample_points()
    x = x[(x >= x_min) & (x < 1.0)]
    return float(np.max(np.abs(field_.velocity_gradient(x)) / (W * (1.0 - np.log(x)))))


def characteristic_bound_residual(traj: Trajectory, series: DiagnosticSeries, labels) -> float:
    """min over snapshots and labels of phi_t(x) - x**exp(I_omega(t)); nonnegative when the a-priori bound holds."""
    worst = np.inf
    for k, state in enumerate(traj.snapshots):
        e = np.exp(series.I_omega[k])
        for x in labels:
            worst = min(worst, state.position_of(x) - x**e)
    return float(worst)


def gradient_link_residual(traj: Trajectory, series: DiagnosticSeries, threshold: float = 1e-8) -> np.ndarray:
    """bound - ||du/dx||_inf per snapshot, bound = ||omega||_inf (1 + exp(I_omega) (-ln x_min)).

    x_min is the label of the leftmost particle with |omega| > threshold.
    """
    out = np.empty(len(traj.snapshots))
    for k, state in enumerate(traj.snapshots):
        hot = np.flatnonzero(np.abs(state.omega) > threshold)
        if hot.size == 0:
            out[k] = np.inf if series.sup_dxu[k] == 0 else -series.sup_dxu[k]
            continue
        x_min = state.labels[hot[0]]
        bound = series.sup_omega[k] * (1.0 + np.exp(series.I_omega[k]) * -np.log(x_min))
        out[k] = bound - series.sup_dxu[k]
    return out


def render_csv(series: DiagnosticSeries) -> str:
    """One row per snapshot; floats written with repr so repeated runs compare byte for byte."""
    residual = series.residual_x1 if series.residual_x1 is not None else np.full(len(series), np.nan)
    cols = [series.t, series.sup_omega, series.sup_dxu, series.sup_dxrho, series.I_omega, series.I_dxu,
            series.I_dxrho, series.min_tracked_phi, residual]
    buf = io.StringIO()
    buf.write(f"# {CSV_SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in zip(*cols):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def write_csv(series: DiagnosticSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_csv(series))


def read_csv(path) -> dict[str, np.ndarray]:
    with open(path) as fh:
        schema = fh.readline().strip()
        if schema != f"# {CSV_SCHEMA}":
            raise ValueError(f"unexpected diagnostics schema line {schema!r}")
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in r] for r in reader]
    data = np.array(rows).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}
