"""Run orchestration: initial data, time stepping, diagnostics, certificate and artifacts.

A run directory holds

    config.json            the configuration that produced it
    run.json               termination reason, flag time, step and snapshot counts
    diagnostics.csv        per-snapshot norms and BKM-type integrals
    certificate.json       tracked characteristics and inequality residuals (blowup scenario)
    picard.json            Picard cross-check (solver = picard_crosscheck)
    checkpoints/           one binary checkpoint per recorded snapshot
    plots/*.svg
"""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import checkpoint, plots
from .certificate import (
    SATURATION,
    certificate_document,
    check_inequalities,
    recursion_iterate,
    render_json,
    track,
)
from .config import ConfigError, RunConfig, load_config
from .diagnostics import accumulate, render_csv
from .fields import InitialData, SmoothProfile, discretize, find_xn
from .picard import picard_solve
from .solver import BLOWUP_FLAGGED, REACHED_T_END, StepControl, Trajectory, advance

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_BREAKDOWN = 3
EXIT_IO = 4


@dataclass
class RunResult:
    exit_code: int
    output_dir: str
    trajectory: Optional[Trajectory] = None
    message: str = ""


def initial_data(config: RunConfig) -> InitialData:
    if config.scenario == "blowup":
        return InitialData.blowup(config.M)
    if config.scenario == "zero":
        return InitialData.zero()
    if config.scenario == "transport_only":
        return InitialData.transport_only(config.M) if config.M > 0 else InitialData.zero()
    return _tabulated(config.table)


def _tabulated(path) -> InitialData:
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read table {path}: {exc}") from None
    if data.shape[1] != 3:
        raise ConfigError("table needs three columns: x, rho0, omega0")
    x, r, w = data.T
    if x[0] < 0 or x[-1] > 1:
        raise ConfigError("table abscissae must lie in [0, 1]")
    try:
        return InitialData(rho0=SmoothProfile.tabulated(x, r, "rho0"), omega0=SmoothProfile.tabulated(x, w, "omega0"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def tracked_labels(config: RunConfig, data: InitialData) -> tuple[float, ...]:
    """x_1..x_{n_max} and 1/2 for the blow-up construction; nothing otherwise."""
    if config.scenario != "blowup":
        return ()
    return tuple(find_xn(data.rho0, n) for n in range(1, config.n_max + 1)) + (0.5,)


def step_control(config: RunConfig) -> StepControl:
    return StepControl(
        t_end=config.t_end,
        dt_max=config.dt_max,
        cfl=config.cfl,
        sup_dxu_max=config.sup_dxu_max,
        gap_min=config.gap_min,
        output_every=config.output_every,
        regrid=config.regrid,
    )


def _summary(traj: Trajectory, steps: int) -> dict:
    return {
        "reason": traj.reason,
        "flag_time": traj.flag_time,
        "t_final": traj.final.t,
        "steps": steps,
        "snapshots": len(traj.snapshots),
        "particles_final": traj.final.size,
    }


def _dump(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")


def artifacts(config: RunConfig, data: InitialData, traj: Trajectory) -> dict[str, bytes]:
    """Diagnostics CSV and certificate JSON of a trajectory, as bytes keyed by file name."""
    residual_label = traj.tracked[0] if traj.tracked and len(traj.snapshots) >= 3 else None
    out = {"diagnostics.csv": render_csv(accumulate(traj, residual_label=residual_label)).encode()}
    if traj.tracked:
        trace = track(traj, data.rho0, config.n_max)
        out["certificate.json"] = render_json(certificate_document(trace, check_inequalities(trace))).encode()
    return out


def _plots(outdir: str, traj: Trajectory, data: InitialData, config: RunConfig) -> None:
    pdir = os.path.join(outdir, "plots")
    os.makedirs(pdir, exist_ok=True)
    t = traj.times
    sup = [float(np.max(np.abs(s.omega))) for s in traj.snapshots]
    plots.sup_omega_figure(t, sup, traj.flag_time).save(os.path.join(pdir, "sup_omega.svg"))
    rec = recursion_iterate(9.0, 50)
    plots.recursion_figure([s.n for s in rec], [s.value for s in rec], SATURATION).save(os.path.join(pdir, "recursion.svg"))
    if traj.tracked:
        trace = track(traj, data.rho0, config.n_max)
        plots.characteristics_figure(t, trace.Phi).save(os.path.join(pdir, "characteristics.svg"))
        plots.psi_figure(t, trace.psi, trace.t_sched).save(os.path.join(pdir, "psi.svg"))


def _picard(config: RunConfig, data: InitialData, traj: Trajectory) -> dict:
    result = picard_solve(data, config.t_end, config.picard_iterations, config.N)
    doc = {"t_end": config.t_end, "N": config.N, "iterations": config.picard_iterations,
           "distances": result.distances, "contracting": result.contracting,
           "sup_omega": float(np.max(np.abs(result.state.omega))), "max_abs_difference": None}
    if traj.reason == REACHED_T_END:
        final = traj.final
        lag = CubicSpline(final.phi, final.omega)(result.state.phi)
        doc["max_abs_difference"] = float(np.max(np.abs(lag - result.state.omega)))
        doc["sup_difference"] = abs(float(np.max(np.abs(final.omega))) - doc["sup_omega"])
    return doc


def _finish(config, data, traj, outdir, steps) -> RunResult:
    try:
        for name, blob in artifacts(config, data, traj).items():
            with open(os.path.join(outdir, name), "wb") as fh:
                fh.write(blob)
        _dump(_summary(traj, steps), os.path.join(outdir, "run.json"))
        _plots(outdir, traj, data, config)
        if config.solver == "picard_crosscheck":
            _dump(_picard(config, data, traj), os.path.join(outdir, "picard.json"))
    except OSError as exc:
        return RunResult(EXIT_IO, outdir, traj, f"I/O failure: {exc}")
    if traj.reason in (REACHED_T_END, BLOWUP_FLAGGED):
        msg = f"{traj.reason} at t={traj.final.t:.6g}"
        return RunResult(EXIT_OK, outdir, traj, msg)
    return RunResult(EXIT_BREAKDOWN, outdir, traj, f"numerical breakdown without blow-up flag: {traj.reason} at t={traj.final.t:.6g}")


def _prepare(outdir: str, config: RunConfig) -> str:
    ckdir = os.path.join(outdir, "checkpoints")
    os.makedirs(ckdir, exist_ok=True)
    for old in checkpoint.list_dir(ckdir):
        os.remove(old)
    with open(os.path.join(outdir, "config.json"), "w") as fh:
        fh.write(config.to_json())
    return ckdir


def run(config: RunConfig, output_dir: Optional[str] = None) -> RunResult:
    """discretize, advance, then write diagnostics, certificate, checkpoints and plots."""
    outdir = output_dir or config.output_path()
    try:
        data = initial_data(config)
        labels = tracked_labels(config, data)
        state = discretize(data, config.N, layout=config.layout, extra_labels=labels, refine_at=labels)
        control = step_control(config)
    except (ConfigError, ValueError) as exc:
        return RunResult(EXIT_CONFIG, outdir, None, f"config error: {exc}")
    try:
        ckdir = _prepare(outdir, config)
    except OSError as exc:
        return RunResult(EXIT_IO, outdir, None, f"I/O failure: {exc}")
    traj = advance(state, control, rho0=data.rho0, tracked=labels,
                   on_snapshot=lambda n, s: checkpoint.write(os.path.join(ckdir, checkpoint.filename(n)), s, n))
    return _finish(config, data, traj, outdir, len(traj.steps["step"]))


def resume(run_dir: str, step: int, output_dir: str) -> RunResult:
    """Restart the run stored in ``run_dir`` from its checkpoint at ``step`` into ``output_dir``.

    Earlier snapshots are copied from the stored checkpoints, so the result
    is a complete run directory that should match the original byte for byte.
    """
    try:
        config = load_config(os.path.join(run_dir, "config.json"))
        data = initial_data(config)
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, output_dir, None, f"config error: {exc}")
    try:
        stored = checkpoint.load_dir(os.path.join(run_dir, "checkpoints"))
    except OSError as exc:
        return RunResult(EXIT_IO, output_dir, None, f"I/O failure: {exc}")
    before = [(n, s) for n, s in stored if n <= step]
    if not before or before[-1][0] != step:
        return RunResult(EXIT_IO, output_dir, None, f"no checkpoint for step {step} in {run_dir}")
    labels = tracked_labels(config, data)
    try:
        ckdir = _prepare(output_dir, config)
        for n, s in before[:-1]:
            checkpoint.write(os.path.join(ckdir, checkpoint.filename(n)), s, n)
    except OSError as exc:
        return RunResult(EXIT_IO, output_dir, None, f"I/O failure: {exc}")
    tail = advance(before[-1][1], step_control(config), rho0=data.rho0, tracked=labels, start_step=step,
                   on_snapshot=lambda n, s: checkpoint.write(os.path.join(ckdir, checkpoint.filename(n)), s, n))
    traj = Trajectory(snapshots=[s for _, s in before[:-1]] + tail.snapshots, reason=tail.reason,
                      flag_time=tail.flag_time, tracked=tail.tracked)
    return _finish(config, data, traj, output_dir, step + len(tail.steps["step"]))


def load_trajectory(run_dir: str) -> tuple[RunConfig, InitialData, Trajectory, dict]:
    config = load_config(os.path.join(run_dir, "config.json"))
    data = initial_data(config)
    with open(os.path.join(run_dir, "run.json")) as fh:
        summary = json.load(fh)
    snaps = [s for _, s in checkpoint.load_dir(os.path.join(run_dir, "checkpoints"))]
    traj = Trajectory(snapshots=snaps, reason=summary["reason"], flag_time=summary["flag_time"],
                      tracked=tracked_labels(config, data))
    return config, data, traj, summary


def verify(run_dir: str) -> RunResult:
    """Recompute diagnostics and certificate from the stored checkpoints and compare with the stored files."""
    try:
        config, data, traj, _ = load_trajectory(run_dir)
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, run_dir, None, f"config error: {exc}")
    except (OSError, KeyError, ValueError) as exc:
        return RunResult(EXIT_IO, run_dir, None, f"I/O failure: {exc}")
    mismatched = []
    for name, blob in artifacts(config, data, traj).items():
        try:
            with open(os.path.join(run_dir, name), "rb") as fh:
                stored = fh.read()
        except OSError as exc:
            return RunResult(EXIT_IO, run_dir, traj, f"I/O failure: {exc}")
        if stored != blob:
            mismatched.append(name)
    if mismatched:
        return RunResult(EXIT_MISMATCH, run_dir, traj, "recomputed artifacts differ: " + ", ".join(mismatched))
    return RunResult(EXIT_OK, run_dir, traj, f"verified {len(traj.snapshots)} snapshots")


SWEEP_COLUMNS = ("M", "exit_code", "reason", "flag_time", "max_I_omega", "min_tracked_phi", "output_dir")


def _sweep_one(args) -> dict:
    config, outdir = args
    row = {"M": config.M, "output_dir": outdir}
    try:
        result = run(config, outdir)
    except Exception as exc:  # isolate per-run failures
        row.update(exit_code=-1, reason=f"error: {type(exc).__name__}: {exc}")
        return row
    row["exit_code"] = result.exit_code
    traj = result.trajectory
    if traj is None:
        row["reason"] = result.message
        return row
    series = accumulate(traj)
    row.update(
        reason=traj.reason,
        flag_time=traj.flag_time,
        max_I_omega=float(series.I_omega[-1]),
        min_tracked_phi=float(np.nanmin(series.min_tracked_phi)) if traj.tracked else None,
    )
    return row


def sweep(template: RunConfig, Ms: Sequence[float], workers: Optional[int] = None, output_dir: Optional[str] = None) -> list[dict]:
    """One run per M in parallel; writes sweep_summary.csv under the template's output directory."""
    base = output_dir or template.output_path()
    jobs = [(replace(template, M=float(M)), os.path.join(base, f"M_{float(M):g}")) for M in Ms]
    if jobs and (workers is None or workers > 1):
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    os.makedirs(base, exist_ok=True)
    with open(os.path.join(base, "sweep_summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(["" if row.get(c) is None else (repr(row[c]) if isinstance(row[c], float) else row[c])
                             for c in SWEEP_COLUMNS])
    return rows
