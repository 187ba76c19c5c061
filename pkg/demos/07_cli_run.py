# %% [markdown]
# The same pipeline through the command line: run, verify, resume and a sweep over M.

# %%
import json
import os
import tempfile

from boussinesq1d.cli import main

root = tempfile.mkdtemp()
cfg = os.path.join(root, "blowup.json")
with open(cfg, "w") as fh:
    json.dump({"version": 1, "scenario": "blowup", "M": 200, "N": 4000, "t_end": 1.0,
               "output_dir": os.path.join(root, "run")}, fh)

print("run     ->", main(["run", cfg]))
print("verify  ->", main(["verify", os.path.join(root, "run")]))
print("resume  ->", main(["run", "--resume", os.path.join(root, "run"), "--step", "10", "--out", os.path.join(root, "resumed")]))
print("sweep   ->", main(["sweep", cfg, "--M", "50,100,200", "--workers", "1", "--out", os.path.join(root, "sweep")]))
print(open(os.path.join(root, "sweep", "sweep_summary.csv")).read())
