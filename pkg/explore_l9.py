"""Calibration run: L=9 Ising sweeps for the n=0,1,2 and sqrt schedules."""
import json
import time

import numpy as np

import adiaprep as ap

path = ap.IsingSemicirclePath(9)
lin = ap.linear_schedule()
scheds = [
    ap.piecewise_schedule(ap.beta_schedule(0), lin, 0.1),
    ap.piecewise_schedule(ap.beta_schedule(1), lin, 0.1),
    ap.piecewise_schedule(ap.beta_schedule(2), lin, 0.1),
]
eps_beta = np.geomspace(0.03, 0.00032, 14)
t0 = time.time()
rows = ap.sweep(path, eps_beta, scheds, tolerance=1e-13, max_workers=2)
t1 = time.time()
print(f"beta sweep: {t1-t0:.0f}s")

eps_sqrt = np.geomspace(0.02, 0.00025, 18)
rows += ap.sweep(path, eps_sqrt, [ap.sqrt_schedule(lin, 0.1)], tolerance=1e-13, max_workers=2)
print(f"sqrt sweep: {time.time()-t1:.0f}s")

ap.evolution.write_sweep_csv(rows, "/root/pkg/explore_l9.csv")
for r in rows:
    print(f"{r.schedule_label:24s} eps={r.epsilon:.5f} T={r.T:7.1f} "
          f"delta={r.final_infidelity:.4e} ({r.runtime_s:.1f}s)"
          + (f" ERR {r.error}" if r.error else ""))
