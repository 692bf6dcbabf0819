"""Target fidelity, ground-manifold populations and sanity metrics."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

RECORD_FIELDS = ("P00", "PS", "PT", "P11", "fidelity", "trace_error", "min_eig")

_R2 = math.sqrt(2)


def _matrix(rho) -> np.ndarray:
    return rho.matrix if hasattr(rho, "matrix") else np.asarray(rho)


def zero_block_vectors(basis) -> dict[str, np.ndarray]:
    """``|00>, |S>, |T>, |11>`` times the photon vacuum."""
    k = basis.ket
    return {
        "P00": k("00"),
        "PS": (k("01") - k("10")) / _R2,
        "PT": (k("01") + k("10")) / _R2,
        "P11": k("11"),
    }


def target_state(basis) -> np.ndarray:
    return zero_block_vectors(basis)["PT"]


def _expect(vec, m) -> float:
    return float(np.real(vec.conj() @ m @ vec))


def fidelity_T(rho) -> float:
    """``<T,000| rho |T,000>`` with ``|T> = (|01> + |10>)/sqrt(2)``."""
    return _expect(target_state(rho.basis), _matrix(rho))


def photon_traced_fidelity(rho) -> float:
    """``<T| Tr_photons(rho) |T>``: counts ``|T>`` with any photon configuration."""
    basis, m = rho.basis, _matrix(rho)
    total = 0.0
    for photons in ("000", "100", "010", "001"):
        try:
            v = (basis.ket("01", photons) + basis.ket("10", photons)) / _R2
        except KeyError:
            continue
        total += _expect(v, m)
    return total


def zero_subspace_populations(rho) -> tuple[float, float, float, float]:
    m = _matrix(rho)
    vecs = zero_block_vectors(rho.basis)
    return tuple(_expect(vecs[k], m) for k in ("P00", "PS", "PT", "P11"))


@dataclass(frozen=True)
class ObservableRecord:
    P00: float
    PS: float
    PT: float
    P11: float
    fidelity: float
    trace_error: float
    min_eig: float

    def as_tuple(self):
        return astuple(self)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def observe(rho) -> ObservableRecord:
    m = _matrix(rho)
    p00, ps, pt, p11 = zero_subspace_populations(rho)
    herm = (m + m.conj().T) / 2
    return ObservableRecord(
        P00=p00, PS=ps, PT=pt, P11=p11,
        fidelity=pt,
        trace_error=float(abs(np.trace(m) - 1.0)),
        min_eig=float(np.linalg.eigvalsh(herm)[0]),
    )
