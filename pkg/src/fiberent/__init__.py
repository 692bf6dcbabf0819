"""Dissipative preparation of two-atom entanglement in a cavity-fiber-cavity network."""

from .dynamics import (
    DensityMatrix,
    Liouvillian,
    Propagator,
    TimeSeries,
    build_liouvillian,
    integrate_adaptive,
    make_propagator,
    propagate,
    steady_state,
)
from .errors import (
    ConfigError,
    DegeneracyError,
    DomainError,
    NumericalError,
    ShapeError,
    VerificationError,
)
from .hilbert import (
    Basis,
    BasisState,
    Level,
    Operator,
    atomic_transition,
    build_basis,
    excitation_operator,
    mode_annihilator,
)
from .model import (
    AUTO_T4,
    LindbladSet,
    SystemParams,
    hamiltonian,
    lindblad_set,
    resonance_detuning,
    validate_short_fiber,
)
from .observables import ObservableRecord, fidelity_T, observe, zero_subspace_populations
from .scenarios import ScenarioConfig, SweepAxis, preset, run_scenario
from .spectra import (
    analytic_energies,
    dressed_couplings,
    dressed_state,
    jump_image,
    verify_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "analytic_energies",
    "atomic_transition",
    "AUTO_T4",
    "Basis",
    "BasisState",
    "build_basis",
    "build_liouvillian",
    "ConfigError",
    "DegeneracyError",
    "DensityMatrix",
    "DomainError",
    "dressed_couplings",
    "dressed_state",
    "excitation_operator",
    "fidelity_T",
    "hamiltonian",
    "integrate_adaptive",
    "jump_image",
    "Level",
    "lindblad_set",
    "LindbladSet",
    "Liouvillian",
    "make_propagator",
    "mode_annihilator",
    "NumericalError",
    "ObservableRecord",
    "observe",
    "Operator",
    "preset",
    "propagate",
    "Propagator",
    "resonance_detuning",
    "run_scenario",
    "ScenarioConfig",
    "ShapeError",
    "steady_state",
    "SweepAxis",
    "SystemParams",
    "TimeSeries",
    "validate_short_fiber",
    "VerificationError",
    "verify_spectrum",
    "zero_subspace_populations",
]
