"""Lindblad superoperator, matrix-exponential propagation and steady states.

Density matrices are vectorized column-major (``vec(A X B) = (B^T kron A) vec(X)``).
The master equation is written as::

    drho/dt = i [rho, H] + sum_j ( L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho} )

:func:`integrate_adaptive` solves the same equation with an embedded
Runge-Kutta pair acting directly on the density matrix; it never touches
the superoperator and serves as an independent check of :func:`propagate`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DegeneracyError, NumericalError, ShapeError
from .hilbert import Basis, Operator
from .model import LindbladSet
from .observables import RECORD_FIELDS, ObservableRecord, observe

INITIAL_STATES = ("ket00", "ket01", "ket10", "ket11", "S", "T")


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vector).reshape(dim, dim, order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ShapeError(f"density matrix shape {m.shape} does not match basis")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_ket(cls, basis: Basis, ket) -> DensityMatrix:
        v = np.asarray(ket, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(basis, np.outer(v, v.conj()))

    @classmethod
    def from_label(cls, basis: Basis, label: str) -> DensityMatrix:
        """Ground-manifold product or Bell state with the photon vacuum."""
        k = basis.ket
        kets = {
            "ket00": k("00"), "ket01": k("01"), "ket10": k("10"), "ket11": k("11"),
            "S": k("01") - k("10"), "T": k("01") + k("10"),
        }
        if label not in kets:
            raise KeyError(f"unknown initial state {label!r}; expected one of {INITIAL_STATES}")
        return cls.from_ket(basis, kets[label])

    def hermitized(self) -> DensityMatrix:
        return DensityMatrix(self.basis, (self.matrix + self.matrix.conj().T) / 2)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self) -> float:
        m = self.matrix
        return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])

    def is_valid(self, tol: float = 1e-8) -> bool:
        m = self.matrix
        return (np.max(np.abs(m - m.conj().T)) <= tol
                and abs(self.trace() - 1) <= tol
                and self.min_eigenvalue() >= -tol)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    matrix: np.ndarray
    hamiltonian: Operator
    lindblad: LindbladSet

    @property
    def basis(self) -> Basis:
        return self.hamiltonian.basis

    def apply(self, rho_matrix: np.ndarray) -> np.ndarray:
        n = self.basis.dim
        return unvec(self.matrix @ vec(rho_matrix), n)

    def trace_defect(self) -> float:
        """Largest entry of ``vec(I)^T L``; zero for a trace-preserving generator."""
        ident = vec(np.eye(self.basis.dim))
        return float(np.max(np.abs(ident @ self.matrix)))

    def spectral_abscissa(self) -> float:
        return float(np.max(np.linalg.eigvals(self.matrix).real))


def build_liouvillian(hamiltonian: Operator, lindblad: LindbladSet) -> Liouvillian:
    if hamiltonian.basis != lindblad.basis:
        raise ShapeError("Hamiltonian and Lindblad operators use different bases")
    n = hamiltonian.basis.dim
    eye = np.eye(n)
    h = hamiltonian.matrix
    sup = 1j * (np.kron(h.T, eye) - np.kron(eye, h))
    for op in lindblad:
        lm = op.matrix
        if not lm.any():
            continue
        ldl = lm.conj().T @ lm
        sup += np.kron(lm.conj(), lm) - 0.5 * np.kron(eye, ldl) - 0.5 * np.kron(ldl.T, eye)
    sup.flags.writeable = False
    return Liouvillian(sup, hamiltonian, lindblad)


@dataclass(frozen=True, eq=False)
class Propagator:
    step: float
    matrix: np.ndarray


def make_propagator(liouvillian: Liouvillian, step: float) -> Propagator:
    if not math.isfinite(step):
        raise NumericalError(f"propagator step {step} is not finite")
    m = sla.expm(step * liouvillian.matrix)
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"propagator for step {step} is not finite")
    m.flags.writeable = False
    return Propagator(float(step), m)


@dataclass
class TimeSeries:
    times: np.ndarray
    records: list[ObservableRecord]
    final_state: DensityMatrix
    states: list[np.ndarray] | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return np.asarray(self.times)
        return np.array([getattr(r, name) for r in self.records])

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("t",) + RECORD_FIELDS)
        for t, rec in zip(self.times, self.records):
            writer.writerow([f"{v:.12g}" for v in (t, *rec.as_tuple())])


def _check_grid(t_grid) -> tuple[np.ndarray, float]:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-d sequence")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if t.size == 1:
        return t, 0.0
    steps = np.diff(t)
    h = float(steps[0])
    if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(h, abs(t[-1]) * 1e-6):
        raise ValueError("time grid must be uniform and strictly increasing; resample upstream")
    return t, h


def _record(basis, vector, keep, states):
    m = unvec(vector, basis.dim)
    rho = DensityMatrix(basis, (m + m.conj().T) / 2)
    if keep:
        states.append(rho.matrix)
    return rho, observe(rho)


def propagate(
    rho0: DensityMatrix,
    liouvillian: Liouvillian,
    t_grid,
    *,
    keep_states: bool = False,
) -> TimeSeries:
    """Evolve ``rho0`` over a uniform grid starting at zero.

    One matrix exponential for the grid step is applied repeatedly.
    Re-symmetrization happens on the recorded copies only.
    """
    if rho0.basis != liouvillian.basis:
        raise ShapeError("initial state and Liouvillian use different bases")
    t, h = _check_grid(t_grid)
    if not np.all(np.isfinite(rho0.matrix)):
        raise NumericalError("initial density matrix is not finite")
    basis = rho0.basis
    states: list[np.ndarray] = []
    vector = vec(rho0.matrix).astype(complex)
    rho, rec = _record(basis, vector, keep_states, states)
    records = [rec]
    if t.size > 1:
        prop = make_propagator(liouvillian, h).matrix
        for k in range(1, t.size):
            vector = prop @ vector
            if not np.all(np.isfinite(vector)):
                raise NumericalError(f"non-finite density matrix at t={t[k]:.6g}")
            rho, rec = _record(basis, vector, keep_states, states)
            records.append(rec)
    return TimeSeries(t, records, rho, states if keep_states else None)


def evolve_to(rho0: DensityMatrix, liouvillian: Liouvillian, t: float, max_step: float = 10.0) -> DensityMatrix:
    """State at time ``t``, stepping with equal steps no longer than ``max_step``.

    Nothing is recorded along the way; use :func:`propagate` for series.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return rho0
    n = max(1, math.ceil(t / max_step - 1e-9))
    prop = make_propagator(liouvillian, t / n).matrix
    vector = vec(rho0.matrix).astype(complex)
    for _ in range(n):
        vector = prop @ vector
    if not np.all(np.isfinite(vector)):
        raise NumericalError(f"non-finite density matrix at t={t:.6g}")
    m = unvec(vector, rho0.basis.dim)
    return DensityMatrix(rho0.basis, (m + m.conj().T) / 2)


def null_space(liouvillian: Liouvillian, rel_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Singular values and the right-singular vectors counted as null."""
    _, s, vh = np.linalg.svd(liouvillian.matrix)
    mask = s < rel_tol * s[0]
    return s, vh[mask].conj().T


def steady_state(liouvillian: Liouvillian, rel_tol: float = 1e-10) -> DensityMatrix:
    """Unique stationary state from the smallest right-singular vector.

    Singular values below ``rel_tol * sigma_max`` count as null; anything
    but a one-dimensional null space raises :class:`DegeneracyError`.
    """
    _, kernel = null_space(liouvillian, rel_tol)
    if kernel.shape[1] != 1:
        raise DegeneracyError(kernel.shape[1])
    m = unvec(kernel[:, 0], liouvillian.basis.dim)
    tr = np.trace(m)
    if abs(tr) < 1e-12:
        raise NumericalError("null vector has vanishing trace")
    m = m / tr
    return DensityMatrix(liouvillian.basis, (m + m.conj().T) / 2)


# --------------------------------------------------------------------------
# independent cross-check: Dormand-Prince 5(4) on the matrix equation

_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
_DP_A_ROWS = tuple(np.array(row) for row in _DP_A)
_DP_E_ARR = np.array(_DP_E)


def _master_rhs(hamiltonian: Operator, lindblad: LindbladSet):
    h = hamiltonian.matrix
    jumps = [op.matrix for op in lindblad if op.matrix.any()]
    heff = h - 0.5j * sum((j.conj().T @ j for j in jumps), np.zeros_like(h))
    heff_dag = heff.conj().T
    if jumps:
        js = np.stack(jumps)
        jds = js.conj().transpose(0, 2, 1)

        def rhs(rho):
            return -1j * (heff @ rho - rho @ heff_dag) + (js @ rho @ jds).sum(axis=0)
    else:
        def rhs(rho):
            return -1j * (heff @ rho - rho @ heff_dag)
    return rhs


def integrate_adaptive(
    rho0: DensityMatrix,
    hamiltonian: Operator,
    lindblad: LindbladSet,
    t_grid,
    *,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    first_step: float = 0.01,
) -> TimeSeries:
    """Solve the master equation with adaptive Dormand-Prince 5(4) steps.

    Steps are clipped to land on every grid time.  The grid need not be
    uniform, only increasing from zero.
    """
    t = np.asarray(t_grid, dtype=float)
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must start at 0 and increase")
    f = _master_rhs(hamiltonian, lindblad)
    basis = rho0.basis
    y = rho0.matrix.astype(complex)
    ks = np.empty((7,) + y.shape, dtype=complex)
    ks[0] = f(y)
    h = first_step
    now = 0.0
    rho = DensityMatrix(basis, (y + y.conj().T) / 2)
    records = [observe(rho)]
    for t_next in t[1:]:
        while now < t_next:
            h_try = min(h, t_next - now)
            for i in range(1, 7):
                acc = y + h_try * np.tensordot(_DP_A_ROWS[i], ks[:i], axes=1)
                ks[i] = f(acc)
            y_new = acc  # the last stage is evaluated at the fifth-order solution
            err_vec = h_try * np.tensordot(_DP_E_ARR, ks, axes=1)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            ratio = np.abs(err_vec) / scale
            err = math.sqrt(np.vdot(ratio, ratio).real / ratio.size)
            if err <= 1.0:
                now = t_next if h_try == t_next - now else now + h_try
                y = y_new
                ks[0] = ks[6]
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            if h_try == h or err > 1.0:
                h = h_try * factor
            if not np.all(np.isfinite(y)):
                raise NumericalError("adaptive integration diverged")
        rho = DensityMatrix(basis, (y + y.conj().T) / 2)
        records.append(observe(rho))
    return TimeSeries(t, records, rho)
