"""
Preparing the triplet through fiber loss
========================================

Start both atoms in |11> with empty cavities and fiber, switch on the
laser and microwave drives and let photon loss in the fiber do the rest.
Then turn the loss off and watch the preparation fail.
"""

import numpy as np

from fiberent import preset, run_scenario
from fiberent.observables import photon_traced_fidelity

config = preset("fig3b")
print("parameters:", config.params.as_dict())

result = run_scenario(config)
series = result.series
for t in (0, 2000, 4000, 6000, 8000, 10000):
    k = int(np.searchsorted(series.times, t))
    r = series.records[k]
    print(f"t = {t:>6.0f}/g   P00 {r.P00:.3f}  PS {r.PS:.3f}  PT {r.PT:.3f}  P11 {r.P11:.3f}")

print(f"\nfidelity with |T,000> at t=1e4/g: {result.summary['final_fidelity']:.4f}")
print(f"photon-traced fidelity:            {photon_traced_fidelity(series.final_state):.4f}")

# Without the fiber loss nothing pumps population into |T>.
lossless = run_scenario(config.replace(params=config.params.replace(beta=0.0), t_max=8000.0, n_records=801))
print(f"\nwith beta = 0, fidelity at t=8e3/g: {lossless.summary['final_fidelity']:.2e}")
