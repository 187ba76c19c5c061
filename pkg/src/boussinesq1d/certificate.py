"""The characteristic family x_1 > x_2 > ... used in the blow-up argument.

For rho0(x_n) = 1/2 + 2**-n we follow Phi_n(t) = phi_t(x_n),
Omega_n(t) = Omega(t, Phi_n(t)) and psi_n(t) = -ln Phi_n(t), and check the
chain of lower bounds along the computed solution:

    Omega_n' >= int_{Phi_n}^{phi_t(1/2)} (drho/dx)/y dy - 4
    psi_n''  >= 2**-n exp(psi_{n-1}(t)) - 4                       (n >= 2)
    psi_n''  >= 2**-n exp(psi_{n-1}(t_{n-1})) - 4,  t >= t_{n-1}
    psi_n(t_n) >= (2**-n exp(psi_{n-1}(t_{n-1})) - 8) 4**-n + psi_{n-1}(t_{n-1})

with the schedule t_1 = 1, t_{n+1} = t_n + 2**-n.  Since psi_n' = Omega_n
exactly, only one numerical derivative (of Omega_n) is taken.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .biotsavart import VelocityField
from .fields import SmoothProfile, find_xn
from .solver import Trajectory, drho_dx

JSON_SCHEMA = "boussinesq1d-certificate/1"
SATURATION = 700.0
T_BOUND = 2.0


def schedule(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(t_n, t~_n) for n = 1..n_max."""
    t = np.empty(n_max)
    t[0] = 1.0
    for n in range(1, n_max):
        t[n] = t[n - 1] + 2.0 ** (-n)
    tilde = t + 2.0 ** (-(np.arange(1, n_max + 1) + 1.0))
    return t, tilde


@dataclass
class CertificateTrace:
    n_max: int
    x: np.ndarray
    rho: np.ndarray
    t: np.ndarray
    Phi: np.ndarray  # (n_max, snapshots)
    Omega: np.ndarray
    psi: np.ndarray
    dOmega: np.ndarray  # psi_n'' by differencing Omega_n
    crude_rhs: np.ndarray  # int_{Phi_n}^{phi_t(1/2)} (drho/dx)/y dy - 4
    phi_half: np.ndarray
    local_rel_gap: np.ndarray  # relative cell width next to Phi_n
    flag_time: Optional[float]
    reason: str
    t_sched: np.ndarray = field(init=False)
    t_tilde: np.ndarray = field(init=False)

    def __post_init__(self):
        self.t_sched, self.t_tilde = schedule(self.n_max)

    def psi_at(self, n: int, t: float) -> float:
        """psi_n at time t by cubic Hermite interpolation (slopes Omega_n); nan outside the trace."""
        ts = self.t
        if not ts[0] <= t <= ts[-1]:
            return math.nan
        k = min(int(np.searchsorted(ts, t, side="right")) - 1, ts.size - 2)
        h = ts[k + 1] - ts[k]
        s = (t - ts[k]) / h
        p0, p1 = self.psi[n - 1, k], self.psi[n - 1, k + 1]
        m0, m1 = self.Omega[n - 1, k] * h, self.Omega[n - 1, k + 1] * h
        h00, h10, h01, h11 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s, -2 * s**3 + 3 * s**2, s**3 - s**2
        return float(h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1)


def track(traj: Trajectory, rho0: SmoothProfile, n_max: int = 8) -> CertificateTrace:
    """Collect Phi_n, Omega_n, psi_n for n = 1..n_max; every x_n (and 1/2) must be a tracked label."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xs = np.array([find_xn(rho0, n) for n in range(1, n_max + 1)])
    first = traj.snapshots[0]
    for x in list(xs) + [0.5]:
        try:
            first.index_of(x)
        except KeyError:
            raise ValueError(f"label {x!r} was not tracked; insert it at t=0") from None
    S = len(traj.snapshots)
    Phi = np.empty((n_max, S))
    Omega = np.empty((n_max, S))
    crude = np.empty((n_max, S))
    gaps = np.empty((n_max, S))
    phi_half = np.empty(S)
    for k, state in enumerate(traj.snapshots):
        nodal = VelocityField(state).nodal
        dr = drho_dx(state.phi, state.rho)
        idx = np.array([state.index_of(x) for x in xs])
        ih = state.index_of(0.5)
        phi_half[k] = state.phi[ih]
        f = dr / np.where(state.phi > 0, state.phi, 1.0)
        cell = 0.5 * np.diff(state.phi) * (f[1:] + f[:-1])
        # int from particle i to particle ih
        tail = np.concatenate([np.cumsum(cell[::-1])[::-1], [0.0]])
        Phi[:, k] = state.phi[idx]
        Omega[:, k] = nodal[idx]
        crude[:, k] = tail[idx] - tail[ih] - 4.0
        rel = np.diff(state.phi) / state.phi[1:]
        gaps[:, k] = np.maximum(rel[np.maximum(idx - 1, 0)], rel[np.minimum(idx, rel.size - 1)])
    t = traj.times
    dOmega = np.gradient(Omega, t, axis=1, edge_order=2) if S >= 3 else np.full_like(Omega, np.nan)
    return CertificateTrace(
        n_max=n_max,
        x=xs,
        rho=np.asarray(rho0(xs), dtype=float),
        t=t,
        Phi=Phi,
        Omega=Omega,
        psi=-np.log(Phi),
        dOmega=dOmega,
        crude_rhs=crude,
        phi_half=phi_half,
        local_rel_gap=gaps,
        flag_time=traj.flag_time,
        reason=traj.reason,
    )


@dataclass
class InequalityReport:
    tol: float
    omega_min: list[float]
    growth_vs_density_min: list[float]
    growth_vs_previous_min: list[Optional[float]]
    growth_after_schedule_min: list[Optional[float]]
    schedule_step: list[Optional[float]]
    ordering_min: float
    psi1_min: float
    warnings: list[str]

    def passed(self, n_upto: Optional[int] = None) -> dict[str, bool]:
        sl = slice(0, n_upto)
        ok = lambda vals: all(v is None or v >= -self.tol for v in vals[sl])
        return {
            "omega_nonneg": all(v >= -1e-6 for v in self.omega_min[sl]),
            "growth_vs_density": ok(self.growth_vs_density_min),
            "growth_vs_previous": ok(self.growth_vs_previous_min),
            "growth_after_schedule": ok(self.growth_after_schedule_min),
            "schedule_step": ok(self.schedule_step),
            "ordering": self.ordering_min >= 0 and self.psi1_min >= 0,
        }


def check_inequalities(trace: CertificateTrace, tol: float = 0.1, horizon: float = 5.0, gap_warn: float = 0.1) -> InequalityReport:
    """Minimum residual (lhs - rhs) of each inequality per n over the recorded times t < horizon.

    Entries are None where an inequality needs times the trajectory never
    reached (for instance psi_{n-1}(t_{n-1}) after an early blow-up flag).
    """
    keep = trace.t < horizon
    psi, dO = trace.psi[:, keep], trace.dOmega[:, keep]
    t = trace.t[keep]
    n_max = trace.n_max
    omega_min = [float(trace.Omega[n, keep].min()) for n in range(n_max)]
    growth_density = [float((dO[n] - trace.crude_rhs[n, keep]).min()) for n in range(n_max)]
    growth_prev, growth_late, schedule_step = [None], [None], [None]
    for n in range(2, n_max + 1):
        rhs = 2.0 ** (-n) * np.exp(psi[n - 2]) - 4.0
        growth_prev.append(float((dO[n - 1] - rhs).min()))
        tp = trace.t_sched[n - 2]
        a_prev = trace.psi_at(n - 1, tp)
        if math.isnan(a_prev):
            growth_late.append(None)
            schedule_step.append(None)
            continue
        late = t >= tp
        bound = 2.0 ** (-n) * math.exp(a_prev) - 4.0
        growth_late.append(float((dO[n - 1, late] - bound).min()) if late.any() else None)
        a_n = trace.psi_at(n, trace.t_sched[n - 1])
        if math.isnan(a_n):
            schedule_step.append(None)
        else:
            schedule_step.append(a_n - ((2.0 ** (-n) * math.exp(a_prev) - 8.0) * 4.0 ** (-n) + a_prev))
    ordering = float(np.min(np.diff(psi, axis=0))) if n_max > 1 else math.inf
    warnings = [
        f"n={n + 1}: Phi_n sits in a cell of relative width {trace.local_rel_gap[n, keep].max():.3g}"
        for n in range(n_max)
        if trace.local_rel_gap[n, keep].max() > gap_warn
    ]
    return InequalityReport(
        tol=tol,
        omega_min=omega_min,
        growth_vs_density_min=growth_density,
        growth_vs_previous_min=growth_prev,
        growth_after_schedule_min=growth_late,
        schedule_step=schedule_step,
        ordering_min=ordering,
        psi1_min=float(psi[0].min()),
        warnings=warnings,
    )


@dataclass(frozen=True)
class RecursionState:
    """a_n of the lower-bound recursion; once saturated the value stands for 'at least SATURATION'."""

    n: int
    value: float
    saturated: bool = False

    def at_least(self, bound: float) -> bool:
        return self.saturated or self.value >= bound


def recursion_iterate(a1: float, n_max: int) -> list[RecursionState]:
    """Iterate a_n = exp(a_{n-1} - 3n) - 1 + a_{n-1} from a_1, saturating instead of overflowing."""
    out = [RecursionState(1, float(a1), a1 > SATURATION)]
    for n in range(2, n_max + 1):
        prev = out[-1]
        if prev.saturated:
            out.append(RecursionState(n, SATURATION, True))
            continue
        expo = prev.value - 3.0 * n
        if expo > math.log(SATURATION):
            out.append(RecursionState(n, SATURATION, True))
            continue
        value = math.exp(expo) - 1.0 + prev.value
        out.append(RecursionState(n, min(value, SATURATION), value > SATURATION))
    return out


def induction_holds(states: list[RecursionState]) -> Optional[bool]:
    """Whether a_n >= 3n + 6 for every n; None when the hypothesis a_1 >= 9 fails."""
    if not states or states[0].value < 9:
        return None
    return all(s.at_least(3 * s.n + 6) for s in states)


def blowup_bound_report(trace: CertificateTrace) -> dict:
    """Measured a_n = psi_n(t_n) where available, growth fit, and the flag time against T = 2."""
    t_last = trace.t[-1]
    measured = []
    for n in range(1, trace.n_max + 1):
        tn = trace.t_sched[n - 1]
        if trace.flag_time is not None and tn >= trace.flag_time:
            break
        a = trace.psi_at(n, tn)
        if math.isnan(a):
            break
        measured.append({"n": n, "t_n": float(tn), "a_n": a})
    growth = None
    if len(measured) >= 2:
        ns = np.array([m["n"] for m in measured], dtype=float)
        logs = np.log(np.array([m["a_n"] for m in measured]))
        growth = float(np.polyfit(ns, logs, 1)[0])
    return {
        "flag_time": trace.flag_time,
        "termination": trace.reason,
        "T_bound": T_BOUND,
        "flag_before_bound": trace.flag_time is not None and trace.flag_time < T_BOUND,
        "t_last": float(t_last),
        "measured_a": measured,
        "log_growth_rate": growth,
        "min_tracked_phi_final": float(trace.Phi[:, -1].min()),
        "psi_final": [float(v) for v in trace.psi[:, -1]],
    }


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def certificate_document(trace: CertificateTrace, report: InequalityReport, recursion_a1: float = 9.0, recursion_n: int = 50) -> dict:
    """JSON-ready certificate: per-n series, inequality minima, recursion table and schedule."""
    rec = recursion_iterate(recursion_a1, recursion_n)
    return _clean({
        "schema": JSON_SCHEMA,
        "n_max": trace.n_max,
        "schedule": {"t_n": trace.t_sched, "t_tilde_n": trace.t_tilde, "T": T_BOUND},
        "characteristics": [
            {
                "n": n + 1,
                "x_n": trace.x[n],
                "rho_n": trace.rho[n],
                "t": trace.t,
                "Phi": trace.Phi[n],
                "Omega": trace.Omega[n],
                "psi": trace.psi[n],
            }
            for n in range(trace.n_max)
        ],
        "Omega_initial": trace.Omega[:, 0],
        "inequalities": {
            "tol": report.tol,
            "omega_min": report.omega_min,
            "growth_vs_density_min": report.growth_vs_density_min,
            "growth_vs_previous_min": report.growth_vs_previous_min,
            "growth_after_schedule_min": report.growth_after_schedule_min,
            "schedule_step": report.schedule_step,
            "ordering_min": report.ordering_min,
            "psi1_min": report.psi1_min,
            "passed": report.passed(),
            "warnings": report.warnings,
        },
        "recursion": {
            "a1": recursion_a1,
            "table": [{"n": s.n, "a_n": s.value, "saturated": s.saturated} for s in rec],
            "induction_holds": induction_holds(rec),
        },
        "blowup": blowup_bound_report(trace),
    })


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n"


def write_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(render_json(doc))
