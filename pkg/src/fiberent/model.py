"""Rotating-frame Hamiltonian and Lindblad operators of the cavity-fiber-cavity system.

The lab-frame drives carry phases ``exp(i w t)`` (laser) and
``exp(i w_MW t)`` (microwave).  Moving to the frame generated by::

    H0 = w_MW sum_i |1><1|_i + w sum_i |e><e|_i + (w - w_MW) (sum_m a_m^dag a_m + b^dag b)

with ``w_MW = w_1 - w_0`` (``w_0 = 0``) and cavity/fiber frequencies equal
to ``w_e - w_1`` removes every explicit time dependence.  The ground
states then sit at zero energy and every excited atom or photon costs the
same detuning ``delta = w_e - w``.  The jump operators only pick up phases
in this frame, which the dissipator ignores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .errors import DomainError, ShapeError
from .hilbert import (
    Basis,
    Operator,
    product_atomic_transition,
    product_mode_annihilator,
)

AUTO_T4 = "auto_T4"

RATE_FIELDS = ("g", "nu", "omega", "omega_mw", "beta", "kappa", "gamma")
LINDBLAD_LABELS = ("beta", "gamma1", "gamma2", "gamma3", "gamma4", "kappa1", "kappa2")


def coupling_constants(g: float, nu: float) -> tuple[float, float, float]:
    """Return ``(g1^2, g2^2, g3^2)`` of the dressed-state algebra.

    ``g1^2 = g^2 + 2 nu^2``, ``g2^2 = g^2 - 2 nu^2`` and
    ``g3^2 = sqrt(g^4 + 4 nu^4)``.  Note ``g2^2`` is negative for
    ``nu > g / sqrt(2)``; only its square appears in the formulas.
    """
    g1sq = g * g + 2 * nu * nu
    g2sq = g * g - 2 * nu * nu
    g3sq = math.sqrt(g**4 + 4 * nu**4)
    return g1sq, g2sq, g3sq


def resonance_detuning(g: float, nu: float) -> float:
    """Detuning ``w_e - w`` that makes ``|00>|000>`` resonant with ``|T4>``.

    >>> round(resonance_detuning(1.0, 1.0), 12)
    -1.61803398875
    """
    if not (g > 0 and nu > 0):
        raise DomainError(f"resonance_detuning needs g > 0 and nu > 0 (got g={g}, nu={nu})")
    g1sq, _, g3sq = coupling_constants(g, nu)
    return -math.sqrt(g1sq + g3sq) / math.sqrt(2)


@dataclass(frozen=True)
class SystemParams:
    """Physical rates, all in units of the atom-cavity coupling ``g``.

    ``delta`` is the rotating-frame detuning ``w_e - w``; the string
    ``"auto_T4"`` selects :func:`resonance_detuning`.  ``gamma`` is the
    total spontaneous emission rate of ``|e>``, split equally between the
    two ground states.
    """

    g: float = 1.0
    nu: float = 1.0
    omega: float = 0.0
    omega_mw: float = 0.0
    delta: float | str = AUTO_T4
    beta: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in RATE_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
            if value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")
        if self.g <= 0:
            raise DomainError("g must be positive")
        if isinstance(self.delta, str):
            if self.delta != AUTO_T4:
                raise DomainError(f"delta must be a number or {AUTO_T4!r}, got {self.delta!r}")
        elif not math.isfinite(self.delta):
            raise DomainError("delta must be finite")

    @property
    def resolved_delta(self) -> float:
        if self.delta == AUTO_T4:
            return resonance_detuning(self.g, self.nu)
        return float(self.delta)

    def replace(self, **changes) -> SystemParams:
        return replace(self, **changes)

    def driveless(self) -> SystemParams:
        return replace(self, omega=0.0, omega_mw=0.0)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _require_single_excitation(basis: Basis):
    if basis.max_excitation != 1:
        raise ShapeError(f"model needs the one-excitation basis, got max_excitation={basis.max_excitation}")


def _hermitian_part(basis: Basis, product_term: np.ndarray) -> np.ndarray:
    """Project ``V + V^dag`` onto the basis."""
    return basis.project(product_term + product_term.conj().T)


def driveless_hamiltonian(basis: Basis, g: float, nu: float, delta: float) -> Operator:
    """Atom-cavity-fiber part: ``delta N_e + g sum_i |e><1|_i a_i + nu b (a_A^dag + a_B^dag) + h.c.``"""
    _require_single_excitation(basis)
    aA = product_mode_annihilator(basis, "cavityA")
    aB = product_mode_annihilator(basis, "cavityB")
    b = product_mode_annihilator(basis, "fiber")
    v = (
        g * (product_atomic_transition(basis, "A", "e", "1") @ aA
             + product_atomic_transition(basis, "B", "e", "1") @ aB)
        + nu * b @ (aA.conj().T + aB.conj().T)
    )
    n_exc = np.diag([float(s.excitation) for s in basis.states])
    return Operator(basis, delta * n_exc + _hermitian_part(basis, v), hermitian=True, label="H_acf")


def laser_term(basis: Basis, omega: float) -> Operator:
    _require_single_excitation(basis)
    v = omega * (product_atomic_transition(basis, "A", "0", "e")
                 + product_atomic_transition(basis, "B", "0", "e"))
    return Operator(basis, _hermitian_part(basis, v), hermitian=True, label="H_cl")


def microwave_term(basis: Basis, omega_mw: float) -> Operator:
    # The relative minus sign makes |T> dark to the microwave.
    _require_single_excitation(basis)
    v = omega_mw * (product_atomic_transition(basis, "A", "0", "1")
                    - product_atomic_transition(basis, "B", "0", "1"))
    return Operator(basis, _hermitian_part(basis, v), hermitian=True, label="H_mw")


def hamiltonian(basis: Basis, params: SystemParams) -> Operator:
    h = (driveless_hamiltonian(basis, params.g, params.nu, params.resolved_delta)
         + laser_term(basis, params.omega)
         + microwave_term(basis, params.omega_mw))
    return Operator(basis, h.matrix, hermitian=True, label="H")


@dataclass(frozen=True)
class LindbladSet:
    """The seven jump operators in the fixed order of ``LINDBLAD_LABELS``.

    Zero-rate channels are kept as zero matrices.
    """

    basis: Basis
    ops: tuple[Operator, ...]
    labels: tuple[str, ...] = field(default=LINDBLAD_LABELS)

    def __post_init__(self):
        if len(self.ops) != len(self.labels):
            raise ValueError("one operator per label required")

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def __getitem__(self, label: str) -> Operator:
        try:
            return self.ops[self.labels.index(label)]
        except ValueError:
            raise KeyError(f"unknown Lindblad channel {label!r}; expected one of {self.labels}") from None

    def items(self):
        return zip(self.labels, self.ops)

    def stacked(self) -> np.ndarray:
        return np.stack([op.matrix for op in self.ops])


def lindblad_set(basis: Basis, params: SystemParams) -> LindbladSet:
    _require_single_excitation(basis)
    half_gamma = math.sqrt(params.gamma / 2)
    raw = {
        "beta": math.sqrt(params.beta) * product_mode_annihilator(basis, "fiber"),
        "gamma1": half_gamma * product_atomic_transition(basis, "A", "0", "e"),
        "gamma2": half_gamma * product_atomic_transition(basis, "A", "1", "e"),
        "gamma3": half_gamma * product_atomic_transition(basis, "B", "0", "e"),
        "gamma4": half_gamma * product_atomic_transition(basis, "B", "1", "e"),
        "kappa1": math.sqrt(params.kappa) * product_mode_annihilator(basis, "cavityA"),
        "kappa2": math.sqrt(params.kappa) * product_mode_annihilator(basis, "cavityB"),
    }
    ops = tuple(Operator(basis, basis.project(raw[k]), label=f"L_{k}") for k in LINDBLAD_LABELS)
    return LindbladSet(basis, ops)


def validate_short_fiber(length_l: float, vbar: float) -> bool:
    """True when ``l * vbar / (2 pi c) <= 1`` (single fiber mode regime).

    ``length_l`` in metres, ``vbar`` (cavity-to-fiber-continuum decay) in 1/s.
    """
    if not (length_l > 0 and vbar > 0):
        raise DomainError("fiber length and decay rate must be positive")
    return length_l * vbar <= 2 * math.pi * SPEED_OF_LIGHT
