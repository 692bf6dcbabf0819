"""Analytic dressed states of the drive-free Hamiltonian and drive couplings between them.

The twenty dressed states are the four zero-excitation states
``|00>, |S>, |T>, |11>`` (times the photon vacuum) plus the sixteen
one-excitation eigenstates ``phi1..phi8``, ``T1..T4`` and ``S1..S4``.
Energies are given in the rotating frame: zero for the ground manifold,
``delta`` plus a coupling-dependent splitting for one excitation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, VerificationError
from .hilbert import Basis
from .model import (
    LINDBLAD_LABELS,
    SystemParams,
    coupling_constants,
    driveless_hamiltonian,
    laser_term,
    lindblad_set,
    microwave_term,
)

ZERO_LABELS = ("ket00", "S", "T", "ket11")
PHI_LABELS = tuple(f"phi{k}" for k in range(1, 9))
T_LABELS = ("T1", "T2", "T3", "T4")
S_LABELS = ("S1", "S2", "S3", "S4")
LABELS = ZERO_LABELS + PHI_LABELS + T_LABELS + S_LABELS

# Orientation of coupling rows: lower excitation first, then along the
# preparation chain |11> -> |S> -> |00> -> |T4> -> |T>.
_ROW_ORDER = ("ket11", "S", "T", "ket00") + PHI_LABELS + T_LABELS + S_LABELS

COUPLING_COLUMNS = ("source", "target", "drive", "magnitude_over_g", "detuning_over_g")


def _check_region(g: float, nu: float):
    if not (g > 0 and nu > 0):
        raise DomainError(f"dressed states need g > 0 and nu > 0 (got g={g}, nu={nu})")
    g1sq, _, g3sq = coupling_constants(g, nu)
    if g1sq < g3sq:
        raise DomainError(
            f"g1^2 < g3^2 at g={g}, nu={nu}: pair energies sqrt(g1^2 - g3^2) are not real"
        )


def analytic_energies(g: float, nu: float, delta: float = 0.0) -> dict[str, float]:
    """Closed-form eigenvalues of the drive-free Hamiltonian, keyed by label."""
    _check_region(g, nu)
    g1sq, _, g3sq = coupling_constants(g, nu)
    g1 = math.sqrt(g1sq)
    minus = math.sqrt(g1sq - g3sq) / math.sqrt(2)
    plus = math.sqrt(g1sq + g3sq) / math.sqrt(2)
    root2nu = math.sqrt(2) * nu
    one = {
        "phi1": 0.0, "phi2": -root2nu, "phi3": root2nu, "phi4": 0.0,
        "phi5": -g, "phi6": g, "phi7": -g1, "phi8": g1,
        "T1": -minus, "T2": minus, "T3": -plus, "T4": plus,
    }
    for k in range(1, 5):
        one[f"S{k}"] = one[f"T{k}"]
    energies = {label: 0.0 for label in ZERO_LABELS}
    energies.update({label: delta + shift for label, shift in one.items()})
    return {label: energies[label] for label in LABELS}


@dataclass(frozen=True, eq=False)
class DressedState:
    label: str
    vector: np.ndarray
    energy: float
    basis: Basis = field(repr=False)

    @property
    def excitation(self) -> int:
        return 0 if self.label in ZERO_LABELS else 1


def _pair_vectors(basis: Basis, sign: int):
    """Symmetric (sign=+1) or antisymmetric (sign=-1) combinations for T/S states."""
    k = basis.ket
    return (
        k("01", "100") + sign * k("10", "001"),
        k("01", "010") + sign * k("10", "010"),
        k("01", "001") + sign * k("10", "100"),
        k("0e", "000") + sign * k("e0", "000"),
    )


def _vector(label: str, basis: Basis, g: float, nu: float) -> np.ndarray:
    k = basis.ket
    r2 = math.sqrt(2)
    g1sq, g2sq, g3sq = coupling_constants(g, nu)
    g1 = math.sqrt(g1sq)

    if label == "ket00":
        return k("00")
    if label == "ket11":
        return k("11")
    if label == "S":
        return (k("01") - k("10")) / r2
    if label == "T":
        return (k("01") + k("10")) / r2
    if label == "phi1":
        return (k("00", "100") - k("00", "001")) / r2
    if label in ("phi2", "phi3"):
        s = -1 if label == "phi2" else 1
        return (k("00", "100") + k("00", "001") + s * r2 * k("00", "010")) / 2
    if label == "phi4":
        x = g / nu
        return (k("e1") + k("1e") - x * k("11", "010")) / math.sqrt(2 + x * x)
    if label == "phi5":
        return (k("11", "001") + k("e1") - k("1e") - k("11", "100")) / 2
    if label == "phi6":
        return (k("11", "100") + k("e1") - k("1e") - k("11", "001")) / 2
    if label in ("phi7", "phi8"):
        s = -1 if label == "phi7" else 1
        x, y = g1 / g, 2 * nu / g
        v = k("e1") + k("1e") + y * k("11", "010") + s * x * (k("11", "001") + k("11", "100"))
        return v / math.sqrt(2 * x * x + y * y + 2)

    kind, idx = label[0], int(label[1])
    u1, u2, u3, u4 = _pair_vectors(basis, +1 if kind == "T" else -1)
    if idx in (1, 2):
        root = math.sqrt(g1sq - g3sq)
        s = 1 if idx == 1 else -1
        c1 = s * root * (g * g + g3sq) / (2 * r2 * g * nu * nu)
        c2 = -(g2sq + g3sq) / (2 * g * nu)
        c3 = -s * root / (r2 * g)
        norm = math.sqrt(2 * (g3sq**2 + g * g * g3sq - 2 * g3sq * nu * nu)) / (g * nu)
    else:
        root = math.sqrt(g1sq + g3sq)
        c1 = root * (g * g - g3sq) / (2 * r2 * g * nu * nu)
        if idx == 4:
            c1 = -c1
        c2 = (g3sq - g2sq) / (2 * g * nu)
        c3 = (-1 if idx == 3 else 1) * root / (r2 * g)
        norm = math.sqrt(2 * (g3sq**2 - g * g * g3sq + 2 * g3sq * nu * nu)) / (g * nu)
    return (c1 * u1 + c2 * u2 + c3 * u3 + u4) / norm


def dressed_state(label: str, basis: Basis, g: float, nu: float, delta: float = 0.0) -> DressedState:
    """Closed-form dressed state ``label`` with its rotating-frame energy.

    The vectors follow the closed forms literally, including
    their overall signs; only the one-excitation basis is supported.
    """
    if label not in LABELS:
        raise KeyError(f"unknown dressed state {label!r}; expected one of {LABELS}")
    if basis.max_excitation != 1:
        raise ValueError("dressed states are defined on the one-excitation basis")
    energy = analytic_energies(g, nu, delta)[label]
    vec = _vector(label, basis, g, nu).astype(complex)
    vec.flags.writeable = False
    return DressedState(label, vec, energy, basis)


def dressed_states(basis: Basis, g: float, nu: float, delta: float = 0.0) -> dict[str, DressedState]:
    return {label: dressed_state(label, basis, g, nu, delta) for label in LABELS}


# --------------------------------------------------------------------------
# spectrum verification


class SpectrumRow(NamedTuple):
    label: str
    analytic_energy: float
    energy_error: float
    residual: float
    subspace_distance: float


@dataclass
class SpectrumReport:
    rows: list[SpectrumRow]
    failures: list[str]
    hamiltonian_norm: float

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)

    @property
    def max_energy_error(self) -> float:
        return max(r.energy_error for r in self.rows)

    @property
    def max_subspace_distance(self) -> float:
        return max(r.subspace_distance for r in self.rows)


def _cluster(values, tol):
    order = np.argsort(values)
    groups, current = [], [order[0]]
    for i in order[1:]:
        if values[i] - values[current[-1]] <= tol:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return groups


def verify_spectrum(
    basis: Basis,
    params: SystemParams,
    energies: dict[str, float] | None = None,
    *,
    energy_tol: float = 1e-9,
    subspace_tol: float = 1e-8,
    strict: bool = True,
) -> SpectrumReport:
    """Check the analytic dressed states against a dense eigensolver.

    Only the drive-free part of ``params`` is used.  Each analytic energy
    must lie within ``energy_tol`` of a numerical eigenvalue and each
    vector must be an eigenvector to ``1e-10 * ||H||``.  Degenerate levels
    (clustered at ``1e-8 * ||H||``) are compared as subspaces through the
    spectral norm of the projector difference, since numerical
    eigenvectors there are arbitrary.  ``energies`` overrides the
    closed-form energies (used to inject faults in tests).

    Raises :class:`VerificationError` on any mismatch unless ``strict`` is
    false.
    """
    delta = params.resolved_delta
    h = driveless_hamiltonian(basis, params.g, params.nu, delta).matrix
    hnorm = max(np.linalg.norm(h, 2), 1.0)
    states = dressed_states(basis, params.g, params.nu, delta)
    if energies is not None:
        energies = {**{k: s.energy for k, s in states.items()}, **energies}
    else:
        energies = {k: s.energy for k, s in states.items()}

    evals, evecs = np.linalg.eigh(h)
    cluster_tol = 1e-8 * hnorm
    residual_tol = 1e-10 * hnorm

    labels = list(LABELS)
    e_arr = np.array([energies[k] for k in labels])
    distance = {}
    claimed = np.zeros(len(evals), dtype=bool)
    for group in _cluster(e_arr, cluster_tol):
        centre = float(np.mean(e_arr[group]))
        q, _ = np.linalg.qr(np.column_stack([states[labels[i]].vector for i in group]))
        mask = np.abs(evals - centre) <= cluster_tol + energy_tol
        claimed |= mask
        vn = evecs[:, mask]
        dist = np.linalg.norm(q @ q.conj().T - vn @ vn.conj().T, 2)
        for i in group:
            distance[labels[i]] = float(dist)

    rows, failures = [], []
    for label in labels:
        v, e = states[label].vector, energies[label]
        err = float(np.min(np.abs(evals - e)))
        res = float(np.linalg.norm(h @ v - e * v))
        rows.append(SpectrumRow(label, e, err, res, distance[label]))
        if err > energy_tol:
            failures.append(f"{label}: energy {e:.12g} is {err:.3g} from the nearest eigenvalue")
        if res > max(residual_tol, energy_tol):
            failures.append(f"{label}: eigen-residual {res:.3g}")
        if distance[label] > subspace_tol:
            failures.append(f"{label}: eigenspace distance {distance[label]:.3g}")
    for i in np.flatnonzero(~claimed):
        failures.append(f"numerical eigenvalue {evals[i]:.12g} has no analytic partner")

    report = SpectrumReport(rows, failures, float(hnorm))
    if strict and failures:
        raise VerificationError("; ".join(failures), report)
    return report


# --------------------------------------------------------------------------
# drive couplings in the dressed basis


class CouplingRow(NamedTuple):
    source: str
    target: str
    drive: str
    amplitude: complex
    magnitude: float
    detuning: float


@dataclass(frozen=True)
class CouplingTable:
    rows: tuple[CouplingRow, ...]
    g: float = 1.0

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def find(self, source: str, target: str, drive: str) -> CouplingRow | None:
        """Row joining ``source`` and ``target`` (either orientation)."""
        for row in self.rows:
            if row.drive == drive and {row.source, row.target} == {source, target}:
                return row
        return None

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COUPLING_COLUMNS)
        for r in self.rows:
            writer.writerow([r.source, r.target, r.drive,
                             f"{r.magnitude / self.g:.12g}", f"{r.detuning / self.g:.12g}"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _row_key(label):
    return (0 if label in ZERO_LABELS else 1, _ROW_ORDER.index(label))


def dressed_couplings(basis: Basis, params: SystemParams) -> CouplingTable:
    """Matrix elements of the laser and microwave terms between dressed states.

    The detuning of a row is the dressed-energy gap ``E_target - E_source``:
    in the rotating frame the drives are static, so a zero gap means a
    resonant transition.
    """
    states = dressed_states(basis, params.g, params.nu, params.resolved_delta)
    ordered = sorted(LABELS, key=_row_key)
    mat = np.column_stack([states[k].vector for k in ordered])
    rows = []
    for drive, term in (("laser", laser_term(basis, params.omega)),
                        ("microwave", microwave_term(basis, params.omega_mw))):
        m = mat.conj().T @ term.matrix @ mat
        thresh = 1e-12 * max(np.abs(term.matrix).max(initial=0.0), 1e-300)
        for j, src in enumerate(ordered):
            for i in range(j + 1, len(ordered)):
                amp = complex(m[i, j])
                if abs(amp) <= thresh:
                    continue
                tgt = ordered[i]
                rows.append(CouplingRow(src, tgt, drive, amp, abs(amp),
                                        states[tgt].energy - states[src].energy))
    return CouplingTable(tuple(rows), params.g)


def closed_form_couplings(params: SystemParams) -> list[tuple[str, str, str, float]]:
    """Closed-form coupling magnitudes as ``(source, target, drive, magnitude)``."""
    g, nu, om, mw = params.g, params.nu, params.omega, params.omega_mw
    g1sq, _, g3sq = coupling_constants(g, nu)
    g1 = math.sqrt(g1sq)
    om1 = math.sqrt(2) * g * nu * om / math.sqrt(g3sq**2 + g * g * g3sq - 2 * nu * nu * g3sq)
    om2 = math.sqrt(2) * g * nu * om / math.sqrt(g3sq**2 - g * g * g3sq + 2 * nu * nu * g3sq)
    return [
        ("ket11", "S", "microwave", math.sqrt(2) * mw),
        ("S", "ket00", "microwave", math.sqrt(2) * mw),
        ("ket00", "T1", "laser", om1),
        ("ket00", "T2", "laser", om1),
        ("ket00", "T3", "laser", om2),
        ("ket00", "T4", "laser", om2),
        ("T", "phi4", "laser", math.sqrt(2) * om * nu / g1),
        ("T", "phi7", "laser", g * om / (math.sqrt(2) * g1)),
        ("T", "phi8", "laser", g * om / (math.sqrt(2) * g1)),
        ("S", "phi5", "laser", om / math.sqrt(2)),
        ("S", "phi6", "laser", om / math.sqrt(2)),
    ]


# --------------------------------------------------------------------------
# quantum jumps out of dressed states


class JumpImage(NamedTuple):
    vector: np.ndarray
    overlap_with_T000: float


def overlap_fraction(vector: np.ndarray, target: np.ndarray) -> float:
    """``|<target|v>|^2 / ||v||^2``; zero for the zero vector."""
    nrm = np.vdot(vector, vector).real
    if nrm == 0.0:
        return 0.0
    return float(abs(np.vdot(target, vector)) ** 2 / (nrm * np.vdot(target, target).real))


def jump_image(state: DressedState, channel: str, params: SystemParams) -> JumpImage:
    """Apply jump operator ``channel`` to a dressed state (unnormalized)."""
    if channel not in LINDBLAD_LABELS:
        raise KeyError(f"unknown Lindblad channel {channel!r}; expected one of {LINDBLAD_LABELS}")
    op = lindblad_set(state.basis, params)[channel]
    v = op.apply(state.vector)
    t000 = _vector("T", state.basis, params.g, params.nu)
    return JumpImage(v, overlap_fraction(v, t000))
