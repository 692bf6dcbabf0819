"""
Which loss channel helps, and by how much
=========================================

Sweep one dissipation rate at a time at a fixed evaluation time, then
sweep all three together over time.  Set FIBERENT_WORKERS to run grid
points in parallel.
"""

import numpy as np

from fiberent.scenarios import ScenarioConfig, SweepAxis, preset, run_sweep

for name in ("fig3b_inset", "fig3d_inset", "fig3f_inset"):
    config = preset(name)
    axis = config.sweep[0]
    grid = run_sweep(config)
    print(f"{name}: fidelity at t={config.record_time:.0f}/g vs {axis.name}")
    for x, f in zip(axis.grid(), grid.values):
        print(f"   {x:.2f}   {f:.4f}")

# beta = kappa = gamma together: too little loss is slow, too much hurts.
config = preset("fig5")
rates, times = (a.grid() for a in config.sweep)
grid = run_sweep(config)
print("\nbeta=kappa=gamma  F(5e3)  F(1e4)  F(2e4)")
cols = [int(np.searchsorted(times, t)) for t in (5e3, 1e4, 2e4)]
for r, row in zip(rates, grid.values):
    print(f"   {r:.2f}          " + "  ".join(f"{row[c]:.3f}" for c in cols))

# A small two-dimensional map at an earlier time.
small = ScenarioConfig(config.params, sweep=(SweepAxis(("beta",), 0.0, 0.06, 4),
                                             SweepAxis(("kappa",), 0.0, 0.06, 4)),
                       record_time=1.5e4)
print("\nfidelity over (beta, kappa), gamma = 0, t = 1.5e4/g")
print(np.array2string(run_sweep(small).values, precision=3))
