"""Calibration: exponential-regime rates for L in {7,9,11} (criterion 3)
and the beta1 vs smoothed-beta1 crossover (criterion 4)."""
import time

import numpy as np

import adiaprep as ap

lin = ap.linear_schedule()
scheds = [ap.piecewise_schedule(ap.beta_schedule(n), lin, 0.1) for n in (0, 1, 2)]

print("== criterion 3: exponential regime")
for L in (7, 9, 11):
    path = ap.IsingSemicirclePath(L)
    eps = np.geomspace(0.05, 0.004, 9)
    t0 = time.time()
    rows = ap.sweep(path, eps, scheds, tolerance=1e-11, max_workers=2)
    print(f"L={L}: sweep {time.time()-t0:.0f}s")
    for n in (0, 1, 2):
        pts = [(r.epsilon, r.final_infidelity) for r in rows
               if r.n == n and r.final_infidelity and r.final_infidelity > 1e-12]
        fit = ap.fit_exponential(pts)
        print(f"  n={n}: c={fit.exponent_or_rate:.5f} prefactor={fit.prefactor:.3f} "
              f"rms={fit.residual:.3f}")
    ap.evolution.write_sweep_csv(rows, f"/root/pkg/explore_c3_L{L}.csv")

print("== criterion 4: beta1 vs s_beta1")
for L, eps_lo in ((7, 0.00022), (9, 0.00032)):
    path = ap.IsingSemicirclePath(L)
    eps = np.geomspace(0.02, eps_lo, 12)
    t0 = time.time()
    rows = ap.sweep(path, eps, [ap.beta_schedule(1), ap.piecewise_schedule(ap.beta_schedule(1), lin, 0.1)],
                    tolerance=1e-13, max_workers=2)
    print(f"L={L}: sweep {time.time()-t0:.0f}s")
    ap.evolution.write_sweep_csv(rows, f"/root/pkg/explore_c4_L{L}.csv")
    for r in rows:
        print(f"  {r.schedule_label:22s} eps={r.epsilon:.5f} delta={r.final_infidelity:.4e}")
