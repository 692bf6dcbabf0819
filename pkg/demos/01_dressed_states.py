"""
Dressed states of the cavity-fiber-cavity network
=================================================

Diagonalize the drive-free Hamiltonian in the zero- and one-excitation
subspace, compare with the closed-form dressed states and look at how the
two drives connect them.
"""

import numpy as np

from fiberent import SystemParams, build_basis, dressed_couplings, verify_spectrum
from fiberent.model import driveless_hamiltonian, resonance_detuning
from fiberent.spectra import LABELS, ZERO_LABELS, analytic_energies

basis = build_basis(1)
print(f"{basis.dim} basis states, first few:", [s.label for s in basis.states[:5]])

# Unit couplings; the laser detuning puts |T4> on resonance with |00>.
g, nu = 1.0, 1.0
delta = resonance_detuning(g, nu)
print(f"resonant detuning Delta' = {delta:.12f}  (minus the golden ratio)")

h0 = driveless_hamiltonian(basis, g, nu, delta).matrix
numeric = np.sort(np.linalg.eigvalsh(h0))
analytic = analytic_energies(g, nu, delta)
print("\nlabel   energy (rotating frame)")
for label in LABELS:
    print(f"{label:<6}  {analytic[label]: .6f}")
print("max |analytic - numeric| =", np.max(np.abs(np.sort(list(analytic.values())) - numeric)))

# Degenerate T_i/S_i pairs are compared as subspaces.
report = verify_spectrum(basis, SystemParams(g=g, nu=nu))
print(f"\nspectrum check: ok={report.ok}, worst residual {report.max_residual:.2e}, "
      f"worst subspace distance {report.max_subspace_distance:.2e}")

# Drive matrix elements leaving the ground manifold, or inside it.
params = SystemParams(omega=0.008, omega_mw=0.002)
table = dressed_couplings(basis, params)
print("\nsource -> target   drive       |coupling|/g   detuning/g")
for row in table:
    if row.source in ZERO_LABELS and (row.source == "ket00" or row.target in ZERO_LABELS):
        print(f"{row.source:>6} -> {row.target:<7} {row.drive:<10} {row.magnitude:.3e}     {row.detuning: .4f}")
