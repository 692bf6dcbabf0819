"""Excitation-truncated product basis and elementary operators.

Each basis state is ``|qA qB>|nA nF nB>``: the levels of the two
Lambda atoms followed by the photon numbers of cavity A, the fiber and
cavity B.  Only states with at most ``max_excitation`` excitations
(excited atoms plus photons) are kept.

Operators are stored densely.  Products of *truncated* operators are not
the truncation of the product (``b a_A^dag`` passes through a state with
two excitations), so compound terms are composed on the untruncated
product space and projected afterwards; see :meth:`Basis.project` and
the ``product_*`` builders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum
from types import MappingProxyType
from typing import NamedTuple

import numpy as np

from .errors import ShapeError


class Level(IntEnum):
    G0 = 0
    G1 = 1
    E = 2

    @property
    def symbol(self):
        return "01e"[self]


MODES = ("cavityA", "fiber", "cavityB")
ATOMS = ("A", "B")

_LEVEL_ALIASES = {
    "0": Level.G0, "g0": Level.G0,
    "1": Level.G1, "g1": Level.G1,
    "e": Level.E,
}


def as_level(value) -> Level:
    if isinstance(value, Level):
        return value
    if isinstance(value, str):
        try:
            return _LEVEL_ALIASES[value]
        except KeyError:
            raise ValueError(f"unknown atomic level {value!r}") from None
    return Level(value)


class BasisState(NamedTuple):
    qA: Level
    qB: Level
    nA: int
    nF: int
    nB: int

    @property
    def excitation(self) -> int:
        return (self.qA == Level.E) + (self.qB == Level.E) + self.nA + self.nF + self.nB

    @property
    def label(self) -> str:
        return f"|{self.qA.symbol}{self.qB.symbol}>|{self.nA}{self.nF}{self.nB}>"

    def __str__(self):
        return self.label


def _parse_state(atoms: str, photons: str = "000") -> BasisState:
    if len(atoms) != 2 or len(photons) != 3:
        raise ValueError(f"bad state label {atoms!r}, {photons!r}")
    return BasisState(as_level(atoms[0]), as_level(atoms[1]), *(int(c) for c in photons))


class Basis:
    """Ordered basis of all product states with excitation <= ``max_excitation``.

    Ordering is lexicographic in ``(qA, qB, nA, nF, nB)`` with
    ``0 < 1 < e`` for atomic levels.
    """

    def __init__(self, max_excitation: int):
        if max_excitation < 0:
            raise ValueError("max_excitation must be non-negative")
        self.max_excitation = int(max_excitation)
        cap = range(self.max_excitation + 1)
        self.product_states = tuple(
            BasisState(Level(a), Level(b), nA, nF, nB)
            for a, b, nA, nF, nB in itertools.product(range(3), range(3), cap, cap, cap)
        )
        self.states = tuple(s for s in self.product_states if s.excitation <= self.max_excitation)
        self.index = MappingProxyType({s: i for i, s in enumerate(self.states)})
        self.product_index = MappingProxyType({s: i for i, s in enumerate(self.product_states)})

        iso = np.zeros((len(self.product_states), len(self.states)))
        for j, s in enumerate(self.states):
            iso[self.product_index[s], j] = 1.0
        iso.flags.writeable = False
        self.isometry = iso

    def __len__(self):
        return len(self.states)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __eq__(self, other):
        return isinstance(other, Basis) and other.max_excitation == self.max_excitation

    def __hash__(self):
        return hash(("Basis", self.max_excitation))

    def __repr__(self):
        return f"Basis(max_excitation={self.max_excitation}, dim={self.dim})"

    def project(self, product_matrix: np.ndarray) -> np.ndarray:
        """Restrict an operator on the full product space to this basis."""
        return self.isometry.T @ product_matrix @ self.isometry

    def state(self, atoms: str, photons: str = "000") -> BasisState:
        return _parse_state(atoms, photons)

    def position(self, atoms: str, photons: str = "000") -> int:
        return self.index[_parse_state(atoms, photons)]

    def ket(self, atoms: str, photons: str = "000") -> np.ndarray:
        """Unit vector for ``|atoms>|photons>``, e.g. ``basis.ket("e1", "000")``."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.position(atoms, photons)] = 1.0
        return v

    def excitation_mask(self, n: int) -> np.ndarray:
        return np.array([s.excitation == n for s in self.states])


@dataclass(frozen=True, eq=False)
class Operator:
    basis: Basis
    matrix: np.ndarray
    hermitian: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.basis.dim
        if m.shape != (n, n):
            raise ShapeError(f"operator shape {m.shape} does not match basis dimension {n}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        if self.hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12:
            raise ValueError("operator flagged Hermitian is not")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def dag(self) -> Operator:
        return Operator(self.basis, self.matrix.conj().T, self.hermitian, self.label + "^dag")

    def apply(self, vector) -> np.ndarray:
        return self.matrix @ np.asarray(vector, dtype=complex)

    def expect(self, vector) -> complex:
        v = np.asarray(vector, dtype=complex)
        return v.conj() @ self.matrix @ v

    def __add__(self, other):
        _check_same_basis(self, other)
        return Operator(self.basis, self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __sub__(self, other):
        _check_same_basis(self, other)
        return Operator(self.basis, self.matrix - other.matrix, self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        herm = self.hermitian and np.isreal(scalar)
        return Operator(self.basis, scalar * self.matrix, bool(herm), self.label)

    __rmul__ = __mul__


def _check_same_basis(a: Operator, b: Operator):
    if a.basis != b.basis:
        raise ShapeError("operators live on different bases")


def build_basis(max_excitation: int) -> Basis:
    return Basis(max_excitation)


def _mode_slot(mode: str) -> int:
    try:
        return 2 + MODES.index(mode)
    except ValueError:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}") from None


def _atom_slot(atom: str) -> int:
    try:
        return ATOMS.index(atom)
    except ValueError:
        raise ValueError(f"unknown atom {atom!r}; expected 'A' or 'B'") from None


def product_mode_annihilator(basis: Basis, mode: str) -> np.ndarray:
    """Annihilator of ``mode`` on the untruncated product space."""
    slot = _mode_slot(mode)
    dim = len(basis.product_states)
    m = np.zeros((dim, dim), dtype=complex)
    for j, s in enumerate(basis.product_states):
        n = s[slot]
        if n == 0:
            continue
        t = list(s)
        t[slot] = n - 1
        m[basis.product_index[BasisState(*t)], j] = np.sqrt(n)
    return m


def product_atomic_transition(basis: Basis, atom: str, to, frm) -> np.ndarray:
    """``|to><from|`` on one atom, on the untruncated product space."""
    slot = _atom_slot(atom)
    to, frm = as_level(to), as_level(frm)
    dim = len(basis.product_states)
    m = np.zeros((dim, dim), dtype=complex)
    for j, s in enumerate(basis.product_states):
        if s[slot] != frm:
            continue
        t = list(s)
        t[slot] = to
        m[basis.product_index[BasisState(*t)], j] = 1.0
    return m


def mode_annihilator(basis: Basis, mode: str) -> Operator:
    return Operator(basis, basis.project(product_mode_annihilator(basis, mode)), label=f"a_{mode}")


def number_operator(basis: Basis, mode: str) -> Operator:
    a = product_mode_annihilator(basis, mode)
    return Operator(basis, basis.project(a.conj().T @ a), hermitian=True, label=f"n_{mode}")


def atomic_transition(basis: Basis, atom: str, to, frm) -> Operator:
    """Truncated matrix of ``|to><from|`` acting on ``atom`` (identity elsewhere)."""
    m = basis.project(product_atomic_transition(basis, atom, to, frm))
    to, frm = as_level(to), as_level(frm)
    return Operator(basis, m, hermitian=(to == frm), label=f"|{to.symbol}><{frm.symbol}|_{atom}")


def excitation_operator(basis: Basis) -> Operator:
    diag = np.array([s.excitation for s in basis.states], dtype=float)
    return Operator(basis, np.diag(diag).astype(complex), hermitian=True, label="N_e")
