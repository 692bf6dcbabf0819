"""
Robustness and the experimental estimate
========================================

The steady state does not depend on the initial state, so no timing
control is needed.  Drive amplitude errors of +-50% cost little, and with
realistic cavity parameters a sizeable fidelity survives.
"""

import numpy as np

from fiberent import DensityMatrix, build_basis, preset, run_scenario, steady_state
from fiberent.dynamics import build_liouvillian, evolve_to
from fiberent.model import hamiltonian, lindblad_set
from fiberent.observables import fidelity_T
from fiberent.scenarios import run_sweep

basis = build_basis(1)
params = preset("fig3b").params
liou = build_liouvillian(hamiltonian(basis, params), lindblad_set(basis, params))

print("initial state   F(2e4/g)")
for label in ("ket00", "ket01", "ket10", "ket11", "S"):
    rho = evolve_to(DensityMatrix.from_label(basis, label), liou, 2e4)
    print(f"   {label:<10}  {fidelity_T(rho):.4f}")
print(f"steady state    {fidelity_T(steady_state(liou)):.4f}")

# Relative errors on both drive amplitudes.
config = preset("fig6a")
grid = run_sweep(config)
print(f"\nfig6a: fidelity over +-50% drive errors, min {grid.values.min():.3f}, max {grid.values.max():.3f}")
d = config.sweep[0].grid()
print("rows: dOmega/Omega, columns: dOmega_MW/Omega_MW =", d[::5])
print(np.array2string(grid.values[::5, ::5], precision=3))

# g, kappa, gamma ~ 2pi x (34, 4.1, 3.6) MHz, in units of g.
result = run_scenario(preset("exp_check"))
s = result.summary
print(f"\nexperimental parameters: F(2e4/g) = {s['final_fidelity']:.3f}, "
      f"steady state {s['steady_fidelity']:.3f} (photon-traced {s['steady_photon_traced_fidelity']:.3f})")
