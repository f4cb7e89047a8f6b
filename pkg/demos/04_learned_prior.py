# %% [markdown]
# # Training a learned attack prior
#
# The companion `cgca_al` package learns a per-line attack probability
# from simulated scenarios and hands it to the diagnosis LP through a
# small JSON exchange format.  The two packages only meet at files: the
# canonical grid JSON, the area JSON, the NDJSON dataset shards, and the
# exported prior.  This demo keeps the dataset and epoch budget small so
# it runs in under a minute; the full protocol uses 500 training samples
# per attack type and trains to early stopping.

# %%
import tempfile
from pathlib import Path

import numpy as np
import torch

import cgca_al
import pcpa

workdir = Path(tempfile.mkdtemp())
grid, p, loads = pcpa.load_case("ieee30")
area = pcpa.find_area_with_line_count(grid, 8, 8)
pcpa.save_grid(workdir / "grid.json", grid, p, loads)
pcpa.save_area(workdir / "area.json", area)

config = pcpa.DatasetConfig(train_per_type=40, test_per_cardinality=10)
pcpa.generate_dataset(grid, area, p, loads, workdir / "ds", seed=12,
                      config=config)

# %% [markdown]
# The model sees six per-bus channels: pre-attack angle, injection, and
# load, the post-attack angle and injection (zeroed on blinded buses),
# and a mask marking the attacked area.

# %%
spec = cgca_al.load_graph_spec(workdir / "grid.json", workdir / "area.json")
train_set, test_sets = cgca_al.load_dataset(workdir / "ds", spec)
print("train features:", tuple(train_set.features.shape))

torch.manual_seed(0)
model = cgca_al.CgcaAl(spec)
result = cgca_al.train(model, train_set,
                       cgca_al.TrainConfig(max_epochs=40, patience=10, seed=0))
print(f"epochs {result.epochs_run}, best val F1 {result.best_val_f1:.3f}")
for nf in (1, 4, 8):
    print(f"|F|={nf}: test F1 {cgca_al.evaluate_f1(model, test_sets[nf]):.3f}")

# %% [markdown]
# A trained model turns any scenario record into a prior file that
# `pcpa diagnose --prior file:...` accepts.  The file carries an area
# digest, so a prior built for one area cannot be loaded against another.

# %%
import json

record = json.loads(
    (workdir / "ds" / "test_F1.ndjson").read_text().splitlines()[0])
y = cgca_al.prior_for_scenario(model, spec, record)
cgca_al.export_prior(workdir / "prior.json", spec, y)

D = pcpa.build_incidence(grid)
A = pcpa.build_admittance(D, grid.reactances())
view = pcpa.partition(grid, A, D, area.bus_ids_H)
scn = pcpa.scenario_from_dict(record, area)
meas = scn.measurements(grid)

prior = pcpa.load_prior(workdir / "prior.json", area)
res = pcpa.diagnose(grid, view, area, meas, prior)
res_u = pcpa.diagnose(grid, view, area, meas, pcpa.uniform_prior(area))
truth = scn.attack.x_H
print("learned prior error:",
      f"{pcpa.normalized_error(res.x_H, truth):.4f}")
print("uniform prior error:",
      f"{pcpa.normalized_error(res_u.x_H, truth):.4f}")
