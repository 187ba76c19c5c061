import csv
import filecmp
import json
import os

import numpy as np
import pytest

from boussinesq1d import checkpoint
from boussinesq1d.cli import main
from boussinesq1d.config import OUTPUT_ROOT_ENV, RunConfig
from boussinesq1d.runner import EXIT_BREAKDOWN, EXIT_CONFIG, EXIT_IO, EXIT_MISMATCH, EXIT_OK, resume, run, sweep, verify


def write_config(path, **kw):
    doc = {"version": 1, **kw}
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture(scope="module")
def blowup_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs") / "blow"
    res = run(RunConfig(scenario="blowup", M=200.0, N=4000, t_end=1.0, output_dir=str(out)))
    assert res.exit_code == EXIT_OK
    return out


def test_zero_scenario_flat_diagnostics(tmp_path):
    cfg = write_config(tmp_path / "z.json", scenario="zero", N=64, t_end=0.2, output_dir=str(tmp_path / "z"))
    assert main(["run", str(cfg)]) == EXIT_OK
    with open(tmp_path / "z" / "diagnostics.csv") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    assert rows and all(float(r["sup_omega"]) == 0 and float(r["I_dxu"]) == 0 for r in rows)
    assert not (tmp_path / "z" / "certificate.json").exists()


def test_blowup_run_artifacts(blowup_dir):
    summary = json.loads((blowup_dir / "run.json").read_text())
    assert summary["reason"] == "blowup_flagged" and summary["flag_time"] < 2
    cert = json.loads((blowup_dir / "certificate.json").read_text())
    assert len(cert["Omega_initial"]) == 8 and min(cert["Omega_initial"]) > 20
    for name in ("sup_omega", "characteristics", "psi", "recursion"):
        assert (blowup_dir / "plots" / f"{name}.svg").exists()
    assert len(checkpoint.list_dir(blowup_dir / "checkpoints")) == summary["snapshots"]


def test_repeated_runs_byte_identical(blowup_dir, tmp_path):
    again = tmp_path / "again"
    assert run(RunConfig(scenario="blowup", M=200.0, N=4000, t_end=1.0, output_dir=str(again))).exit_code == EXIT_OK
    for name in ("diagnostics.csv", "certificate.json", "run.json"):
        assert filecmp.cmp(blowup_dir / name, again / name, shallow=False)


def test_resume_bit_for_bit(blowup_dir, tmp_path):
    out = tmp_path / "resumed"
    assert main(["run", "--resume", str(blowup_dir), "--step", "25", "--out", str(out)]) == EXIT_OK
    for name in ("diagnostics.csv", "certificate.json", "run.json"):
        assert filecmp.cmp(blowup_dir / name, out / name, shallow=False)
    orig = checkpoint.list_dir(blowup_dir / "checkpoints")
    new = checkpoint.list_dir(out / "checkpoints")
    assert [os.path.basename(p) for p in orig] == [os.path.basename(p) for p in new]
    assert all(filecmp.cmp(a, b, shallow=False) for a, b in zip(orig, new))


def test_resume_missing_step(blowup_dir, tmp_path):
    assert resume(str(blowup_dir), 10**6, str(tmp_path / "x")).exit_code == EXIT_IO


def test_verify(blowup_dir, tmp_path):
    assert main(["verify", str(blowup_dir)]) == EXIT_OK
    copy = tmp_path / "tampered"
    import shutil

    shutil.copytree(blowup_dir, copy)
    text = (copy / "diagnostics.csv").read_text().replace("e-", "E-", 1)
    (copy / "diagnostics.csv").write_text(text)
    assert verify(str(copy)).exit_code == EXIT_MISMATCH
    assert verify(str(tmp_path / "nowhere")).exit_code in (EXIT_CONFIG, EXIT_IO)


def test_config_errors_exit_2(tmp_path):
    bad = write_config(tmp_path / "bad.json", Mx=3)
    assert main(["run", str(bad)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    assert main(["sweep", str(bad), "--M", "1"]) == EXIT_CONFIG
    assert main(["run"]) == EXIT_CONFIG


def test_io_error_exit_4(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    cfg = write_config(tmp_path / "c.json", scenario="zero", N=32, t_end=0.1, output_dir=str(blocker / "sub"))
    assert main(["run", str(cfg)]) == EXIT_IO


def test_breakdown_without_flag_exit_3(tmp_path):
    table = tmp_path / "table.csv"
    x = np.linspace(0, 1, 201)
    np.savetxt(table, np.column_stack([x, np.zeros_like(x), -1e3 * np.exp(-(((x - 0.6) / 0.02) ** 2))]), delimiter=",")
    cfg = RunConfig(scenario="custom_tabulated", table=str(table), N=200, t_end=0.05, dt_max=0.01, cfl=1.0,
                    sup_dxu_max=1e300, gap_min=1e-300, output_dir=str(tmp_path / "c"))
    res = run(cfg)
    assert res.exit_code in (EXIT_OK, EXIT_BREAKDOWN)
    if res.exit_code == EXIT_BREAKDOWN:
        assert res.trajectory.reason in ("broken_ordering", "unreliable_quadrature")


def test_custom_table_errors(tmp_path):
    cfg = RunConfig(scenario="custom_tabulated", table=str(tmp_path / "none.csv"), output_dir=str(tmp_path / "o"))
    assert run(cfg).exit_code == EXIT_CONFIG


def test_output_root_env(monkeypatch, tmp_path):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path))
    cfg = write_config(tmp_path / "z.json", scenario="zero", N=32, t_end=0.1, output_dir="rel")
    assert main(["run", str(cfg)]) == EXIT_OK
    assert (tmp_path / "rel" / "run.json").exists()


def test_sweep_flag_time_monotone(tmp_path):
    template = RunConfig(scenario="blowup", N=2000, t_end=5.0, output_dir=str(tmp_path / "sw"))
    rows = sweep(template, [50, 100, 200], workers=1)
    times = [r["flag_time"] for r in rows]
    assert all(r["exit_code"] == EXIT_OK for r in rows)
    assert times[0] >= times[1] >= times[2]
    with open(tmp_path / "sw" / "sweep_summary.csv") as fh:
        assert len(list(csv.reader(fh))) == 4


def test_sweep_empty_and_isolated_failures(tmp_path):
    cfg = write_config(tmp_path / "s.json", scenario="zero", N=32, t_end=0.1, output_dir=str(tmp_path / "e"))
    assert main(["sweep", str(cfg), "--M", ""]) == EXIT_OK
    assert (tmp_path / "e" / "sweep_summary.csv").read_text().count("\n") == 1
    rows = sweep(RunConfig(scenario="custom_tabulated", table="/nonexistent.csv", output_dir=str(tmp_path / "f")), [1.0], workers=1)
    assert rows[0]["exit_code"] == EXIT_CONFIG


def test_sweep_parallel_matches_serial(tmp_path):
    template = RunConfig(scenario="blowup", N=500, t_end=5.0, output_dir=str(tmp_path / "p"))
    par = sweep(template, [50, 200], workers=2)
    ser = sweep(template, [50, 200], workers=1, output_dir=str(tmp_path / "s"))
    assert [r["flag_time"] for r in par] == [r["flag_time"] for r in ser]


def test_check_recursion(capsys):
    assert main(["check-recursion", "--a1", "9", "--n", "50"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "a_n >= 3n+6 for all n" in out
    assert main(["check-recursion", "--a1", "0", "--n", "5"]) == EXIT_OK
    assert "does not apply" in capsys.readouterr().out
    assert main(["check-recursion", "--n", "0"]) == EXIT_CONFIG


def test_picard_crosscheck_artifact(tmp_path):
    cfg = RunConfig(scenario="blowup", M=10.0, N=400, t_end=0.05, solver="picard_crosscheck", picard_iterations=5,
                    output_dir=str(tmp_path / "pc"))
    assert run(cfg).exit_code == EXIT_OK
    doc = json.loads((tmp_path / "pc" / "picard.json").read_text())
    assert doc["contracting"] and len(doc["distances"]) == 4
    d = doc["distances"]
    assert all(b < 0.5 * a for a, b in zip(d, d[1:]))
    assert doc["max_abs_difference"] < 0.01 * doc["sup_omega"]
